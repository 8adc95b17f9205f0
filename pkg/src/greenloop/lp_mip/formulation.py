"""Translate a :class:`NetworkInstance` into matrix form."""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from ..errors import InvalidParameterError
from ..model import FLOW_BLOCKS, INDICATOR_BLOCKS, FlowSolution, NetworkInstance, variable_layout
from .problem import LinearProgram

MODES = ("cost", "emissions", "cost_with_emission_cap", "emissions_with_cost_cap")


def objective_vectors(instance: NetworkInstance) -> Tuple[np.ndarray, np.ndarray]:
    """Linear coefficients of total cost and total emissions over the variable layout."""
    p = instance
    rho = p.reliability
    layout = variable_layout(p)
    cost = np.zeros(layout.size)
    emis = np.zeros(layout.size)

    def put(vec, block, values):
        s, shape = layout.blocks[block]
        vec[s] = np.broadcast_to(values, shape).ravel()

    put(cost, "xa", p.ra)
    put(cost, "xb", p.rb)
    put(cost, "xd", p.rd)
    put(cost, "ya", p.ma[None, :, None] + p.ta)
    put(cost, "yb", rho * (p.mb[None, :, None] + p.tb))
    put(cost, "yc", p.mc[None, :, None] + p.md[None, None, :] + p.tc)
    put(cost, "yd", p.mr[None, None, :] + p.td)

    production = p.ga + p.gc if p.include_assembly_emissions else p.ga
    put(emis, "ya", production[None, :, None] + p.gta[:, None, None] * p.da[None] * p.la)
    put(emis, "yb", rho * (p.gb[None, :, None] + p.gtb[:, None, None] * p.db[None] * p.lb))
    put(emis, "yc", p.gd[None, None, :] + p.gtc[:, None, None] * p.dc[None] * p.lc)
    put(emis, "yd", p.gr[None, None, :] +p.gtd[:, None, None] * p.dd[None] * p.ld)
    return cost, emis


def _constraint_rows(instance: NetworkInstance):
    p = instance
    layout = variable_layout(p)
    n = layout.size
    dims = p.dims
    rows, rels, rhs, names = [], [], [], []

    def idx(block):
        s, shape = layout.blocks[block]
        return np.arange(s.start, s.stop).reshape(shape)

    xa, xb, xd = idx("xa"), idx("xb"), idx("xd")
    ya, yb, yc, yd = idx("ya"), idx("yb"), idx("yc"), idx("yd")

    def add(name, plus, minus=(), minus_coef=1.0, extra=None, rel="<=", b=0.0):
        row = np.zeros(n)
        row[np.ravel(plus)] += 1.0
        if len(np.ravel(minus)):
            row[np.ravel(minus)] -= minus_coef
        if extra is not None:
            col, coef = extra
            row[col] += coef
        rows.append(row)
        rels.append(rel)
        rhs.append(float(b))
        names.append(name)

    for f in range(dims["F"]):
        add(f"C12[{f}]", ya[:, f, :], extra=(xa[f], -p.pa[f]))
    for w in range(dims["W"]):
        add(f"C13[{w}]", ya[:, :, w], extra=(xb[w], -p.pb[w]))
    for w in range(dims["W"]):
        add(f"C14[{w}]", yb[:, w, :], minus=ya[:, :, w])
    for c in range(dims["C"]):
        add(f"C15[{c}]", yb[:, :, c], rel=">=", b=p.q[c])
    for c in range(dims["C"]):
        add(f"C16[{c}]", yc[:, c, :], b=p.q[c])
    for i in range(dims["I"]):
        add(f"C17[{i}]", yc[:, :, i], extra=(xd[i], -p.pd[i]))
    for c in range(dims["C"]):
        add(f"C18[{c}]", yc[:, c, :], rel=">=", b=p.hd * p.q[c])
    for i in range(dims["I"]):
        add(f"C19[{i}]", yd[:, i, :], minus=yc[:, :, i], minus_coef=p.hr, rel=">=")
    for f in range(dims["F"]):
        add(f"C20[{f}]", yd[:, :, f], extra=(xa[f], -p.pr[f]))
    return np.array(rows), rels, rhs, names


def build_milp(instance: NetworkInstance, mode: str = "cost", emission_cap: Optional[float] = None,
               *, cost_cap: Optional[float] = None, relaxed: bool = False) -> LinearProgram:
    """Matrix image of the bi-objective model for one scalarisation.

    ``mode`` selects the objective. ``cost_with_emission_cap`` adds the row
    ``emissions <= emission_cap``; ``emissions_with_cost_cap`` adds
    ``cost <= cost_cap`` (used for lexicographic anchors and for sweeps that
    constrain cost instead of emissions).
    """
    if mode not in MODES:
        raise InvalidParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "cost_with_emission_cap" and emission_cap is None:
        raise InvalidParameterError("cost_with_emission_cap mode requires emission_cap")
    if mode == "emissions_with_cost_cap" and cost_cap is None:
        raise InvalidParameterError("emissions_with_cost_cap mode requires cost_cap")

    layout = variable_layout(instance)
    cost, emis = objective_vectors(instance)
    A, rels, rhs, row_names = _constraint_rows(instance)
    if mode == "cost_with_emission_cap":
        A = np.vstack([A, emis])
        rels.append("<=")
        rhs.append(float(emission_cap))
        row_names.append("emission_cap")
    elif mode == "emissions_with_cost_cap":
        A = np.vstack([A, cost])
        rels.append("<=")
        rhs.append(float(cost_cap))
        row_names.append("cost_cap")
    c = emis if mode.startswith("emissions") else cost

    lower = np.zeros(layout.size)
    upper = np.full(layout.size, np.inf)
    integer = np.zeros(layout.size, dtype=bool)
    for block in INDICATOR_BLOCKS:
        s, _ = layout.blocks[block]
        upper[s] = 1.0
        integer[s] = not relaxed
    return LinearProgram(c=c, A=A, relations=tuple(rels), b=np.array(rhs), lower=lower, upper=upper,
                         integer=integer, names=tuple(layout.names()), row_names=tuple(row_names))


def solution_from_x(instance: NetworkInstance, x) -> FlowSolution:
    """Map a solver point back onto the decision blocks (tiny negatives clipped)."""
    x = np.asarray(x, dtype=float)
    layout = variable_layout(instance)
    x = x.copy()
    for block in FLOW_BLOCKS:
        s, _ = layout.blocks[block]
        x[s] = np.maximum(x[s], 0.0)
    return FlowSolution.from_vector(instance, x)
