"""Best-first branch and bound over :func:`solve_lp` relaxations."""
from __future__ import annotations

import heapq
import math

import numpy as np

from .problem import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProgram, LpSolution, SolverConfig
from .simplex import solve_lp


def _select_branch(x, integer, config: SolverConfig):
    """Index of the variable to branch on, or ``None`` if ``x`` is integral.

    Most-fractional picks the variable whose fractional part is closest to
    0.5; ties go to the lowest index (``argmax`` returns the first maximum).
    """
    frac = np.abs(x - np.round(x))
    frac = np.where(integer, frac, 0.0)
    if not np.any(frac > config.integrality_tol):
        return None
    if config.branching == "first-fractional":
        return int(np.flatnonzero(frac > config.integrality_tol)[0])
    return int(np.argmax(frac))


def _polish(lp: LinearProgram, x, config):
    """Fix integer columns at their rounded values and re-solve for the rest."""
    fixed = np.where(lp.integer, np.round(x), 0.0)
    lower = np.where(lp.integer, fixed, lp.lower)
    upper = np.where(lp.integer, fixed, lp.upper)
    sol = solve_lp(lp.with_bounds(lower, upper), config)
    if sol.optimal:
        sol.x = np.where(lp.integer, fixed, sol.x)
        sol.objective = float(lp.c @ sol.x)
        return sol
    return None


def solve_milp(lp: LinearProgram, config: SolverConfig | None = None) -> LpSolution:
    config = config or SolverConfig()
    if not lp.integer.any():
        sol = solve_lp(lp, config)
        sol.nodes = 1
        return sol

    lower0 = lp.lower.copy()
    upper0 = lp.upper.copy()
    integer = lp.integer
    # integer bounds can be tightened to integral values up front
    lower0[integer] = np.ceil(lower0[integer] - config.integrality_tol)
    upper0[integer] = np.floor(upper0[integer] + config.integrality_tol)
    if np.any(lower0 > upper0):
        return LpSolution(INFEASIBLE, nodes=0)

    incumbent = None
    incumbent_obj = math.inf
    heap = [(-math.inf, 0, lower0, upper0)]
    tie = 1
    nodes = 0
    iterations = 0
    hit_limit = False
    best_open = -math.inf

    def prune_level(obj):
        return obj >= incumbent_obj - config.optimality_tol * max(1.0, abs(incumbent_obj))

    while heap:
        parent_bound, _, lo, hi = heapq.heappop(heap)
        if incumbent is not None and prune_level(parent_bound):
            continue
        if nodes >= config.max_nodes:
            hit_limit = True
            best_open = parent_bound
            break
        nodes += 1
        relax = solve_lp(lp.with_bounds(lo, hi), config)
        iterations += relax.iterations
        if relax.status == INFEASIBLE:
            continue
        if relax.status == UNBOUNDED:
            return LpSolution(UNBOUNDED, nodes=nodes, iterations=iterations)
        if relax.status == ITERATION_LIMIT:
            hit_limit = True
            continue
        if incumbent is not None and prune_level(relax.objective):
            continue
        j = _select_branch(relax.x, integer, config)
        if j is None:
            polished = _polish(lp, relax.x, config) or relax
            iterations += polished.iterations
            if polished.objective < incumbent_obj:
                incumbent, incumbent_obj = polished, polished.objective
            continue
        v = relax.x[j]
        down_hi = hi.copy()
        down_hi[j] = math.floor(v)
        up_lo = lo.copy()
        up_lo[j] = math.ceil(v)
        heapq.heappush(heap, (relax.objective, tie, lo, down_hi))
        heapq.heappush(heap, (relax.objective, tie + 1, up_lo, hi))
        tie += 2

    if hit_limit:
        status = ITERATION_LIMIT
    elif incumbent is None:
        status = INFEASIBLE
    else:
        status = OPTIMAL
    if incumbent is None:
        return LpSolution(status, nodes=nodes, iterations=iterations)
    bound = incumbent_obj if status == OPTIMAL else min(best_open, incumbent_obj)
    return LpSolution(status, x=incumbent.x, objective=incumbent_obj, duals=None, reduced_costs=None,
                      iterations=iterations, nodes=nodes, bound=bound)
