"""Dense two-phase tableau simplex with dual recovery.

Pricing is Dantzig's most-negative reduced cost; after ``degeneracy_limit``
consecutive zero-length steps the solver switches to Bland's rule for the rest
of the phase, which rules out cycling.
"""
from __future__ import annotations

import numpy as np

from .problem import (INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProgram, LpSolution,
                      SolverConfig)

PIVOT_TOL = 1e-9
RATIO_TIE = 1e-12


class _Standard:
    """``A_s @ z (rel) b_s``, ``z >= 0`` with ``x = offset + M @ z``."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        cols = []  # (var index, sign)
        offset = np.zeros(n)
        bound_rows = []  # (column index, rhs)
        for j in range(n):
            lo, hi = lp.lower[j], lp.upper[j]
            if np.isfinite(lo):
                offset[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(hi):
                    bound_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                offset[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        ns = len(cols)
        M = np.zeros((n, ns))
        for k, (j, sign) in enumerate(cols):
            M[j, k] = sign
        self.M = M
        self.offset = offset
        self.n_struct = ns
        self.n_orig_rows = lp.n_rows

        A = lp.A @ M
        b = lp.b - lp.A @ offset
        rel = list(lp.relations)
        if bound_rows:
            B = np.zeros((len(bound_rows), ns))
            for r, (k, _) in enumerate(bound_rows):
                B[r, k] = 1.0
            A = np.vstack([A, B])
            b = np.concatenate([b, [rhs for _, rhs in bound_rows]])
            rel += ["<="] * len(bound_rows)
        sign = np.where(b < 0, -1.0, 1.0)
        A = A * sign[:, None]
        b = b * sign
        flip = {"<=": ">=", ">=": "<=", "=": "="}
        rel = [flip[r] if s < 0 else r for r, s in zip(rel, sign)]
        self.A = A
        self.b = b
        self.relations = rel
        self.sign = sign
        self.c = lp.c @ M
        self.c0 = float(lp.c @ offset)


class _Counter:
    def __init__(self, limit):
        self.limit = limit
        self.count = 0


def _pivot(T, obj, r, k):
    T[r] /= T[r, k]
    col = T[:, k].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    obj -= obj[k] * T[r]


def _iterate(T, obj, basis, ncols, config, counter, dual_tol):
    bland = False
    degenerate = 0
    while True:
        d = obj[:ncols]
        if bland:
            cand = np.flatnonzero(d < -dual_tol)
            if cand.size == 0:
                return OPTIMAL
            k = int(cand[0])
        else:
            k = int(np.argmin(d))
            if d[k] >= -dual_tol:
                return OPTIMAL
        col = T[:, k]
        pos = col > PIVOT_TOL
        if not pos.any():
            return UNBOUNDED
        rhs = np.maximum(T[:, -1], 0.0)
        ratios = np.full(col.size, np.inf)
        ratios[pos] = rhs[pos] / col[pos]
        rmin = ratios.min()
        ties = np.flatnonzero(ratios <= rmin + RATIO_TIE * max(1.0, abs(rmin)))
        if bland:
            r = int(ties[np.argmin(np.asarray(basis)[ties])])
        else:
            r = int(ties[np.argmax(col[ties])])
        if counter.count >= counter.limit:
            return ITERATION_LIMIT
        _pivot(T, obj, r, k)
        basis[r] = k
        counter.count += 1
        if rmin <= RATIO_TIE:
            degenerate += 1
            if degenerate > config.degeneracy_limit:
                bland = True
        else:
            degenerate = 0


def solve_lp(lp: LinearProgram, config: SolverConfig | None = None) -> LpSolution:
    """Solve the continuous relaxation of ``lp`` (integrality flags are ignored)."""
    config = config or SolverConfig()
    std = _Standard(lp)
    m, ns = std.A.shape

    slack_rows = [i for i, r in enumerate(std.relations) if r != "="]
    art_rows = [i for i, r in enumerate(std.relations) if r != "<="]
    n_slack, n_art = len(slack_rows), len(art_rows)
    N = ns + n_slack + n_art
    T = np.zeros((m, N + 1))
    T[:, :ns] = std.A
    T[:, -1] = std.b
    basis = [-1] * m
    for s, i in enumerate(slack_rows):
        T[i, ns + s] = 1.0 if std.relations[i] == "<=" else -1.0
        if std.relations[i] == "<=":
            basis[i] = ns + s
    for a, i in enumerate(art_rows):
        T[i, ns + n_slack + a] = 1.0
        basis[i] = ns + n_slack + a
    full_A = T[:, : ns + n_slack].copy()

    counter = _Counter(config.max_iterations)
    scale_b = max(1.0, float(np.abs(std.b).max(initial=0.0)))
    scale_c = max(1.0, float(np.abs(std.c).max(initial=0.0)))
    dual_tol = config.optimality_tol * scale_c

    if n_art:
        obj = np.zeros(N + 1)
        obj[ns + n_slack:N] = 1.0
        for i in art_rows:
            obj -= T[i]
        status = _iterate(T, obj, basis, N, config, counter, config.optimality_tol)
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, iterations=counter.count)
        infeasibility = -obj[-1]
        if infeasibility > config.feasibility_tol + 1e-9 * scale_b:
            return LpSolution(INFEASIBLE, iterations=counter.count)
        # drive remaining (zero-valued) artificials out of the basis
        keep = []
        for i in range(m):
            if basis[i] >= ns + n_slack:
                row = np.abs(T[i, : ns + n_slack])
                k = int(np.argmax(row)) if row.size else -1
                if k >= 0 and row[k] > PIVOT_TOL:
                    _pivot(T, obj, i, k)
                    basis[i] = k
                    keep.append(i)
                # otherwise the row is redundant and is dropped
            else:
                keep.append(i)
        T = np.hstack([T[keep, : ns + n_slack], T[keep, -1:]])
        basis = [basis[i] for i in keep]
    else:
        keep = list(range(m))
    N2 = ns + n_slack

    c_ext = np.zeros(N2 + 1)
    c_ext[:ns] = std.c
    obj = c_ext.copy()
    for i, bi in enumerate(basis):
        obj -= c_ext[bi] * T[i]
    status = _iterate(T, obj, basis, N2, config, counter, dual_tol)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, iterations=counter.count)

    B = full_A[keep][:, basis]
    b_keep = std.b[keep]
    try:
        z_basic = np.linalg.solve(B, b_keep)
        y_std = np.linalg.solve(B.T, c_ext[basis])
    except np.linalg.LinAlgError:
        z_basic = T[:, -1].copy()
        y_std = None
    z = np.zeros(N2)
    z[basis] = np.maximum(z_basic, 0.0)
    x = std.offset + std.M @ z[:ns]
    objective = float(lp.c @ x)

    duals = reduced = None
    if y_std is not None:
        y_rows = np.zeros(m)
        y_rows[keep] = y_std
        y_rows *= std.sign
        duals = y_rows[: std.n_orig_rows]
        reduced = lp.c - lp.A.T @ duals
    return LpSolution(status, x=x, objective=objective, duals=duals, reduced_costs=reduced,
                      iterations=counter.count, bound=objective)
