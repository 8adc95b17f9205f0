"""Brute-force reference solvers: enumerate every facility configuration.

Each configuration fixes the indicator columns and leaves a pure LP in the
flows. The integer search is plain enumeration and never touches branch and
bound, so agreement with :func:`greenloop.lp_mip.solve_milp` is a meaningful
cross-check.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .eps_constraint import EpsConfig, sweep_with
from .errors import EnumerationBoundError
from .lp_mip import INFEASIBLE, OPTIMAL, SolverConfig, build_milp, solution_from_x, solve_lp
from .model import FlowSolution, NetworkInstance, variable_layout
from .pareto import ParetoFront

MAX_FACILITIES = 16
TIE_REL_TOL = 1e-9


@dataclass
class OracleResult:
    objective: float
    indicators: Optional[Tuple[int, ...]]
    optima: List[Tuple[int, ...]]
    solution: Optional[FlowSolution]
    log: List[Tuple[Tuple[int, ...], str, float]] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.indicators is not None


def _check_bound(instance: NetworkInstance):
    d = instance.dims
    total = d["F"] + d["W"] + d["I"]
    if total > MAX_FACILITIES:
        raise EnumerationBoundError(
            f"brute force enumerates 2^(F+W+I) = 2^{total} configurations; the limit is 2^{MAX_FACILITIES}")
    return total


def brute_force_milp(instance: NetworkInstance, mode: str = "cost", emission_cap: Optional[float] = None,
                     *, cost_cap: Optional[float] = None, config: SolverConfig | None = None,
                     threads: int = 1) -> OracleResult:
    n_fac = _check_bound(instance)
    lp = build_milp(instance, mode, emission_cap, cost_cap=cost_cap, relaxed=True)
    layout = variable_layout(instance)
    n_ind = layout.blocks["xd"][0].stop
    configs = list(itertools.product((0, 1), repeat=n_fac))

    def run(bits):
        lower = lp.lower.copy()
        upper = lp.upper.copy()
        lower[:n_ind] = bits
        upper[:n_ind] = bits
        return solve_lp(lp.with_bounds(lower, upper), config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, configs))
    else:
        results = [run(b) for b in configs]

    log = []
    best = math.inf
    for bits, sol in zip(configs, results):
        log.append((bits, sol.status, sol.objective if sol.optimal else math.nan))
        if sol.optimal:
            best = min(best, sol.objective)
    if not math.isfinite(best):
        return OracleResult(math.inf, None, [], None, log)
    tol = TIE_REL_TOL * max(1.0, abs(best))
    # configs are enumerated lexicographically, so the first tie is the smallest vector
    optima = [bits for bits, sol in zip(configs, results) if sol.optimal and sol.objective <= best + tol]
    winner = optima[0]
    x = results[configs.index(winner)].x
    return OracleResult(best, winner, optima, solution_from_x(instance, x), log)


def oracle_solver(instance: NetworkInstance, config: SolverConfig | None = None, threads: int = 1):
    def solve(mode, emission_cap=None, cost_cap=None):
        res = brute_force_milp(instance, mode, emission_cap, cost_cap=cost_cap, config=config, threads=threads)
        if not res.feasible:
            return INFEASIBLE, None
        return OPTIMAL, res.solution
    return solve


def brute_force_front(instance: NetworkInstance, n: int = 20, config: SolverConfig | None = None,
                      threads: int = 1) -> ParetoFront:
    """Reference epsilon-constraint front with every scalar solve done by enumeration."""
    _check_bound(instance)
    eps_config = EpsConfig(n=n, solver=config or SolverConfig())
    return sweep_with(instance, oracle_solver(instance, config, threads), eps_config, method="brute-force")


@dataclass(frozen=True)
class CheckRow:
    check: str
    solver: float
    oracle: float

    @property
    def rel_diff(self) -> float:
        if math.isinf(self.solver) and math.isinf(self.oracle):
            return 0.0
        return abs(self.solver - self.oracle) / max(1.0, abs(self.oracle))

    def ok(self, rtol: float = 1e-6) -> bool:
        return self.rel_diff <= rtol


def cross_check(instance: NetworkInstance, n_caps: int = 5, grid_points: int = 5,
                config: SolverConfig | None = None, threads: int = 1) -> List[CheckRow]:
    """Branch-and-bound vs enumeration on both objectives, ``n_caps`` emission caps and a sweep.

    Caps are spread evenly over the emission range of the payoff table. A
    problem that is infeasible for both solvers counts as a match.
    """
    from .eps_constraint import payoff_table, sweep
    from .lp_mip import solve_milp

    _check_bound(instance)
    config = config or SolverConfig()

    def milp(mode, cap=None):
        sol = solve_milp(build_milp(instance, mode, cap), config)
        return sol.objective if sol.optimal else math.inf

    def oracle(mode, cap=None):
        return brute_force_milp(instance, mode, cap, config=config, threads=threads).objective

    rows = [CheckRow("cost", milp("cost"), oracle("cost")),
            CheckRow("emissions", milp("emissions"), oracle("emissions"))]
    if math.isinf(rows[0].oracle):
        return rows
    eps_config = EpsConfig(n=grid_points, solver=config, threads=threads)
    table = payoff_table(instance, eps_config)
    for k, cap in enumerate(np.linspace(table.ideal[1], table.nadir[1], n_caps)):
        cap = float(cap)
        rows.append(CheckRow(f"cost | f2 <= {cap:.6g}", milp("cost_with_emission_cap", cap),
                             oracle("cost_with_emission_cap", cap)))
    exact = sweep(instance, eps_config).points
    reference = brute_force_front(instance, grid_points, config, threads).points
    rows.append(CheckRow("sweep size", float(len(exact)), float(len(reference))))
    for k, (a, b) in enumerate(zip(exact, reference)):
        rows.append(CheckRow(f"sweep[{k}].f1", a[0], b[0]))
        rows.append(CheckRow(f"sweep[{k}].f2", a[1], b[1]))
    return rows
