"""Exact bi-objective fronts by the epsilon-constraint method.

One objective is minimised while the other is capped at a grid value
``eps``; the grid spans the payoff-table range of the capped objective.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import InvalidParameterError, ModelInfeasibleError, SolverLimitError
from .instance_io import instance_hash
from .lp_mip import (INFEASIBLE, ITERATION_LIMIT, OPTIMAL, SolverConfig, build_milp, solution_from_x,
                     solve_milp)
from .model import FlowSolution, NetworkInstance, evaluate_cost, evaluate_emissions
from .pareto import FrontEntry, ParetoFront

# relative slack used when holding the first objective at its optimum
LEXICOGRAPHIC_SLACK = 1e-9
METHOD_ID = "eps-constraint"


@dataclass(frozen=True)
class EpsConfig:
    n: int = 20
    constrained: str = "f2"
    solver: SolverConfig = field(default_factory=SolverConfig)
    relaxed: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameterError("the epsilon grid needs at least two points")
        if self.constrained not in ("f1", "f2"):
            raise InvalidParameterError("constrained objective must be 'f1' or 'f2'")
        if self.threads < 1:
            raise InvalidParameterError("threads must be >= 1")


@dataclass(frozen=True)
class PayoffTable:
    ideal: Tuple[float, float]
    nadir: Tuple[float, float]
    cost_anchor: FlowSolution
    emission_anchor: FlowSolution
    proven: bool = True


def objectives(instance: NetworkInstance, solution: FlowSolution) -> Tuple[float, float]:
    return evaluate_cost(instance, solution).total, evaluate_emissions(instance, solution).total


def _cap(value: float) -> float:
    return value + LEXICOGRAPHIC_SLACK * max(1.0, abs(value))


# a scalar solve: (mode, cap) -> (status, solution or None)
Solver = Callable[[str, Optional[float], Optional[float]], Tuple[str, Optional[FlowSolution]]]


def milp_solver(instance: NetworkInstance, config: EpsConfig) -> Solver:
    def solve(mode, emission_cap=None, cost_cap=None):
        lp = build_milp(instance, mode, emission_cap, cost_cap=cost_cap, relaxed=config.relaxed)
        sol = solve_milp(lp, config.solver)
        if sol.x is None:
            return sol.status, None
        return sol.status, solution_from_x(instance, sol.x)
    return solve


def lexicographic_anchor(instance, solve: Solver, first: str):
    """Minimise ``first`` then the other objective with ``first`` held at its optimum."""
    status, sol = solve("cost" if first == "f1" else "emissions")
    if sol is None:
        return status, None
    f1, f2 = objectives(instance, sol)
    if first == "f1":
        status2, sol2 = solve("emissions_with_cost_cap", None, _cap(f1))
    else:
        status2, sol2 = solve("cost_with_emission_cap", _cap(f2), None)
    if sol2 is None:
        return status, sol
    proven = status == OPTIMAL and status2 == OPTIMAL
    return (OPTIMAL if proven else ITERATION_LIMIT), sol2


def payoff_from_anchors(instance, solve: Solver) -> PayoffTable:
    s1, cost_anchor = lexicographic_anchor(instance, solve, "f1")
    s2, emission_anchor = lexicographic_anchor(instance, solve, "f2")
    if cost_anchor is None or emission_anchor is None:
        if s1 == INFEASIBLE and s2 == INFEASIBLE:
            raise ModelInfeasibleError("both anchor problems are infeasible")
        raise SolverLimitError("an anchor solve hit its limit without an incumbent")
    a = objectives(instance, cost_anchor)
    b = objectives(instance, emission_anchor)
    ideal = (min(a[0], b[0]), min(a[1], b[1]))
    nadir = (max(a[0], b[0]), max(a[1], b[1]))
    return PayoffTable(ideal, nadir, cost_anchor, emission_anchor, proven=s1 == OPTIMAL and s2 == OPTIMAL)


def payoff_table(instance: NetworkInstance, config: EpsConfig | None = None) -> PayoffTable:
    config = config or EpsConfig()
    return payoff_from_anchors(instance, milp_solver(instance, config))


def grid(table: PayoffTable, n: int, constrained: str = "f2") -> np.ndarray:
    k = 1 if constrained == "f2" else 0
    return np.linspace(table.ideal[k], table.nadir[k], n)


def sweep_with(instance, solve: Solver, config: EpsConfig, method: str = METHOD_ID, metadata=None) -> ParetoFront:
    """Run the grid with an arbitrary scalar solver; shared by the exact and brute-force paths."""
    table = payoff_from_anchors(instance, solve)
    eps_values = grid(table, config.n, config.constrained)

    def one(eps):
        if config.constrained == "f2":
            return solve("cost_with_emission_cap", float(eps), None)
        return solve("emissions_with_cost_cap", None, float(eps))

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(one, eps_values))
    else:
        results = [one(e) for e in eps_values]

    entries = []
    exact = table.proven
    for eps, (status, sol) in zip(eps_values, results):
        if status != OPTIMAL:
            exact = False
        if sol is None:
            continue
        f1, f2 = objectives(instance, sol)
        entries.append(FrontEntry(f1, f2, sol, method, epsilon=float(eps), proven=status == OPTIMAL))
    meta = {
        "method": method,
        "grid_points": config.n,
        "constrained": config.constrained,
        "relaxed": config.relaxed,
        "ideal": list(table.ideal),
        "nadir": list(table.nadir),
        "solver": asdict(config.solver),
    }
    meta.update(metadata or {})
    return ParetoFront.from_entries(entries, instance_hash(instance), meta, exact=exact)


def sweep(instance: NetworkInstance, config: EpsConfig | None = None) -> ParetoFront:
    """Epsilon-constraint front over ``config.n`` evenly spaced caps (endpoints included)."""
    config = config or EpsConfig()
    return sweep_with(instance, milp_solver(instance, config), config)
