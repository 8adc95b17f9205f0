"""Random feasible LPs and duality certificates for solver checks."""
import numpy as np

from greenloop import LinearProgram


def random_feasible_lp(rng, max_vars=20, max_rows=15) -> LinearProgram:
    """Feasible, bounded LP built around a known interior point."""
    n = int(rng.integers(2, max_vars + 1))
    m = int(rng.integers(1, max_rows + 1))
    A = rng.normal(size=(m, n)).round(3)
    lower = np.where(rng.random(n) < 0.2, -rng.uniform(0, 5, n), 0.0)
    upper = np.where(rng.random(n) < 0.7, lower + rng.uniform(1, 10, n), np.inf)
    # variables without an upper bound get a nonnegative cost so the LP stays bounded
    c = rng.normal(size=n).round(3)
    c = np.where(np.isinf(upper), np.abs(c), c)
    x0 = np.where(np.isinf(upper), lower + rng.uniform(0, 5, n), lower + (upper - lower) * rng.random(n))
    act = A @ x0
    rel = rng.choice(["<=", ">=", "="], size=m, p=[0.45, 0.4, 0.15])
    slack = rng.uniform(0, 3, m)
    b = np.where(rel == "<=", act + slack, np.where(rel == ">=", act - slack, act))
    return LinearProgram(c, A, tuple(rel), b, lower, upper, np.zeros(n, dtype=bool))


def dual_objective(lp: LinearProgram, sol) -> float:
    y, r = sol.duals, sol.reduced_costs
    # infinite bounds only meet zero reduced costs in a dual-feasible solution
    lo = np.where(np.isfinite(lp.lower), lp.lower, 0.0)
    up = np.where(np.isfinite(lp.upper), lp.upper, 0.0)
    bound_part = np.where(r > 0, r * lo, np.where(r < 0, r * up, 0.0))
    return float(lp.b @ y + bound_part.sum())


def complementary_slackness_residual(lp: LinearProgram, sol) -> float:
    """Largest violation of complementary slackness and dual sign feasibility."""
    x, y, r = sol.x, sol.duals, sol.reduced_costs
    row_gap = lp.A @ x - lp.b
    res = [np.abs(y * row_gap).max(initial=0.0)]
    rel = np.array(lp.relations)
    # minimisation: <= rows carry y <= 0, >= rows carry y >= 0
    res.append(np.maximum(y[rel == "<="], 0).max(initial=0.0))
    res.append(np.maximum(-y[rel == ">="], 0).max(initial=0.0))
    # a reduced cost pushing against a missing bound is a dual-feasibility violation of size |r|
    lo_gap = np.where(np.isfinite(lp.lower), x - np.where(np.isfinite(lp.lower), lp.lower, 0.0), 1.0)
    up_gap = np.where(np.isfinite(lp.upper), np.where(np.isfinite(lp.upper), lp.upper, 0.0) - x, 1.0)
    res.append(np.abs(np.where(r > 0, r * lo_gap, 0.0)).max(initial=0.0))
    res.append(np.abs(np.where(r < 0, r * up_gap, 0.0)).max(initial=0.0))
    return float(max(res))
