"""Network data model, objective evaluators and constraint checker.

Index conventions: every transport tensor is ordered (option, origin,
destination), so ``ya[t, f, w]`` is the flow from factory ``f`` to warehouse
``w`` on option ``t``. Distances drop the option axis (``da[f, w]``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Dict, List, Tuple

import numpy as np

from .errors import DimensionError, InstanceValidationError, InvalidParameterError

DEFAULT_TOL = 1e-6

# symbol -> shape expressed in dimension names
PARAMETER_SHAPES: Dict[str, Tuple[str, ...]] = {
    "q": ("C",),
    "ta": ("TF", "F", "W"),
    "tb": ("TW", "W", "C"),
    "tc": ("TK", "C", "I"),
    "td": ("TI", "I", "F"),
    "la": ("TF", "F", "W"),
    "lb": ("TW", "W", "C"),
    "lc": ("TK", "C", "I"),
    "ld": ("TI", "I", "F"),
    "da": ("F", "W"),
    "db": ("W", "C"),
    "dc": ("C", "I"),
    "dd": ("I", "F"),
    "ra": ("F",),
    "rb": ("W",),
    "rd": ("I",),
    "ma": ("F",),
    "mb": ("W",),
    "mc": ("C",),
    "md": ("I",),
    "mr": ("F",),
    "pa": ("F",),
    "pb": ("W",),
    "pd": ("I",),
    "pr": ("F",),
    "ga": ("F",),
    "gc": ("F",),
    "gb": ("W",),
    "gd": ("I",),
    "gr": ("F",),
    "gta": ("TF",),
    "gtb": ("TW",),
    "gtc": ("TK",),
    "gtd": ("TI",),
}
SCALAR_PARAMETERS = ("hd", "hr", "lam", "t")
RATE_PARAMETERS = ("la", "lb", "lc", "ld")
COST_PARAMETERS = ("ta", "tb", "tc", "td", "ra", "rb", "rd", "ma", "mb", "mc", "md", "mr")
EMISSION_PARAMETERS = ("ga", "gc", "gb", "gd", "gr", "gta", "gtb", "gtc", "gtd")
DIMENSION_NAMES = ("F", "W", "C", "I", "TF", "TW", "TK", "TI")

# decision blocks in canonical variable order
INDICATOR_BLOCKS = ("xa", "xb", "xd")
FLOW_BLOCKS = ("ya", "yb", "yc", "yd")
BLOCK_SHAPES: Dict[str, Tuple[str, ...]] = {
    "xa": ("F",),
    "xb": ("W",),
    "xd": ("I",),
    "ya": ("TF", "F", "W"),
    "yb": ("TW", "W", "C"),
    "yc": ("TK", "C", "I"),
    "yd": ("TI", "I", "F"),
}

CONSTRAINT_FAMILIES = tuple(f"C{k}" for k in range(12, 23))


def _frozen(value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class NetworkInstance:
    """All sets and parameters of the closed-loop network.

    Set sizes are inferred from the parameter arrays: ``F`` from ``ra``,
    ``W`` from ``rb``, ``C`` from ``q``, ``I`` from ``rd`` and the transport
    option counts from the emission factor vectors ``gta`` .. ``gtd``.
    """

    q: np.ndarray
    ta: np.ndarray
    tb: np.ndarray
    tc: np.ndarray
    td: np.ndarray
    la: np.ndarray
    lb: np.ndarray
    lc: np.ndarray
    ld: np.ndarray
    da: np.ndarray
    db: np.ndarray
    dc: np.ndarray
    dd: np.ndarray
    ra: np.ndarray
    rb: np.ndarray
    rd: np.ndarray
    ma: np.ndarray
    mb: np.ndarray
    mc: np.ndarray
    md: np.ndarray
    mr: np.ndarray
    pa: np.ndarray
    pb: np.ndarray
    pd: np.ndarray
    pr: np.ndarray
    ga: np.ndarray
    gc: np.ndarray
    gb: np.ndarray
    gd: np.ndarray
    gr: np.ndarray
    gta: np.ndarray
    gtb: np.ndarray
    gtc: np.ndarray
    gtd: np.ndarray
    hd: float
    hr: float
    lam: float = 0.0
    t: float = 7.0
    include_assembly_emissions: bool = False
    currency: str = "£"

    def __post_init__(self):
        for name in PARAMETER_SHAPES:
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        for name in SCALAR_PARAMETERS:
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InstanceValidationError(name, "must be a real number") from None
            object.__setattr__(self, name, value)
        object.__setattr__(self, "include_assembly_emissions", bool(self.include_assembly_emissions))
        self._validate()

    def _validate(self):
        dims = self.dims
        for name, value in dims.items():
            if value < 1:
                raise InstanceValidationError(name, "every set needs at least one member")
        for name, symbolic in PARAMETER_SHAPES.items():
            arr = getattr(self, name)
            expected = tuple(dims[d] for d in symbolic)
            if arr.shape != expected:
                raise InstanceValidationError(name, f"expected shape {expected}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise InstanceValidationError(name, "entries must be finite")
            if name in RATE_PARAMETERS:
                if np.any(arr <= 0):
                    raise InstanceValidationError(name, "transport rates must be > 0")
            elif np.any(arr < 0):
                raise InstanceValidationError(name, "entries must be >= 0")
        for name in SCALAR_PARAMETERS:
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InstanceValidationError(name, "must be finite and >= 0")
        for name in ("hd", "hr"):
            if getattr(self, name) > 1:
                raise InstanceValidationError(name, "fraction must lie in [0, 1]")

    @property
    def dims(self) -> Dict[str, int]:
        return {
            "F": int(np.size(self.ra)),
            "W": int(np.size(self.rb)),
            "C": int(np.size(self.q)),
            "I": int(np.size(self.rd)),
            "TF": int(np.size(self.gta)),
            "TW": int(np.size(self.gtb)),
            "TK": int(np.size(self.gtc)),
            "TI": int(np.size(self.gtd)),
        }

    @property
    def reliability(self) -> float:
        return reliability_factor(self.lam, self.t)

    def block_shape(self, block: str) -> Tuple[int, ...]:
        dims = self.dims
        return tuple(dims[d] for d in BLOCK_SHAPES[block])

    def replace(self, **changes) -> "NetworkInstance":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return NetworkInstance(**values)

    def __eq__(self, other):
        if not isinstance(other, NetworkInstance):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray):
                if a.shape != b.shape or not np.array_equal(a, b):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = None


@dataclass(frozen=True)
class FlowSolution:
    """Facility indicators and flow tensors for one network design."""

    xa: np.ndarray
    xb: np.ndarray
    xd: np.ndarray
    ya: np.ndarray
    yb: np.ndarray
    yc: np.ndarray
    yd: np.ndarray

    def __post_init__(self):
        for name in INDICATOR_BLOCKS + FLOW_BLOCKS:
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @classmethod
    def zeros(cls, instance: NetworkInstance) -> "FlowSolution":
        return cls(**{b: np.zeros(instance.block_shape(b)) for b in INDICATOR_BLOCKS + FLOW_BLOCKS})

    @classmethod
    def from_vector(cls, instance: NetworkInstance, x) -> "FlowSolution":
        """Unpack a flat vector laid out as xa, xb, xd, ya, yb, yc, yd."""
        x = np.asarray(x, dtype=float)
        layout = variable_layout(instance)
        if x.shape != (layout.size,):
            raise DimensionError(f"expected {layout.size} variables, got shape {x.shape}")
        return cls(**{b: x[s].reshape(shape) for b, (s, shape) in layout.blocks.items()})

    def to_vector(self) -> np.ndarray:
        return np.concatenate([getattr(self, b).ravel() for b in INDICATOR_BLOCKS + FLOW_BLOCKS])

    def check_shape(self, instance: NetworkInstance):
        for b in INDICATOR_BLOCKS + FLOW_BLOCKS:
            expected = instance.block_shape(b)
            got = getattr(self, b).shape
            if got != expected:
                raise DimensionError(f"{b}: expected shape {expected}, got {got}")

    def __eq__(self, other):
        if not isinstance(other, FlowSolution):
            return NotImplemented
        return all(np.array_equal(getattr(self, b), getattr(other, b)) for b in INDICATOR_BLOCKS + FLOW_BLOCKS)

    __hash__ = None


@dataclass(frozen=True)
class VariableLayout:
    blocks: Dict[str, Tuple[slice, Tuple[int, ...]]]
    size: int

    def names(self) -> List[str]:
        out = []
        for block, (_, shape) in self.blocks.items():
            for idx in np.ndindex(*shape):
                out.append(f"{block}[{','.join(str(i) for i in idx)}]")
        return out


def variable_layout(instance: NetworkInstance, order=INDICATOR_BLOCKS + FLOW_BLOCKS) -> VariableLayout:
    blocks = {}
    start = 0
    for b in order:
        shape = instance.block_shape(b)
        n = int(np.prod(shape))
        blocks[b] = (slice(start, start + n), shape)
        start += n
    return VariableLayout(blocks, start)


@dataclass(frozen=True)
class CostBreakdown:
    tfc: float
    tvc: float
    ttc: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.tfc + self.tvc + self.ttc)


@dataclass(frozen=True)
class EmissionBreakdown:
    ep: float
    ea: float
    eh: float
    ed: float
    er: float
    et: float
    include_assembly: bool = False
    total: float = field(init=False)

    def __post_init__(self):
        total = self.ep + self.eh + self.ed + self.er + self.et
        if self.include_assembly:
            total = total + self.ea
        object.__setattr__(self, "total", total)


@dataclass(frozen=True)
class Violation:
    family: str
    index: Tuple
    slack: float
    tol: float


@dataclass(frozen=True)
class FeasibilityReport:
    violations: Tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def families(self) -> set:
        return {v.family for v in self.violations}


def reliability_factor(lam: float, t: float) -> float:
    """Warehouse survival probability ``exp(-lam * t)`` over a horizon of ``t`` days."""
    if lam < 0 or t < 0:
        raise InvalidParameterError("failure rate and horizon must be non-negative")
    return math.exp(-lam * t)


def evaluate_cost(instance: NetworkInstance, solution: FlowSolution) -> CostBreakdown:
    solution.check_shape(instance)
    s, p = solution, instance
    rho = p.reliability
    tfc = float(p.ra @ s.xa + p.rb @ s.xb + p.rd @ s.xd)
    collected_by_customer = s.yc.sum(axis=(0, 2))
    collected_by_center = s.yc.sum(axis=(0, 1))
    tvc = float(
        p.ma @ s.ya.sum(axis=(0, 2))
        + rho * (p.mb @ s.yb.sum(axis=(0, 2)))
        + p.mc @ collected_by_customer
        + p.md @ collected_by_center
        + p.mr @ s.yd.sum(axis=(0, 1))
    )
    ttc = float(
        np.sum(p.ta * s.ya)
        + rho * np.sum(p.tb * s.yb)
        + np.sum(p.tc * s.yc)
        + np.sum(p.td * s.yd)
    )
    return CostBreakdown(tfc, tvc, ttc)


def evaluate_emissions(instance: NetworkInstance, solution: FlowSolution) -> EmissionBreakdown:
    solution.check_shape(instance)
    s, p = solution, instance
    rho = p.reliability
    produced = s.ya.sum(axis=(0, 2))
    ep = float(p.ga @ produced)
    ea = float(p.gc @ produced)
    eh = float(rho * (p.gb @ s.yb.sum(axis=(0, 2))))
    ed = float(p.gd @ s.yc.sum(axis=(0, 1)))
    er = float(p.gr @ s.yd.sum(axis=(0, 1)))
    et = float(
        np.einsum("t,tfw,fw,tfw->", p.gta, s.ya, p.da, p.la)
        + rho * np.einsum("t,twc,wc,twc->", p.gtb, s.yb, p.db, p.lb)
        + np.einsum("t,tci,ci,tci->", p.gtc, s.yc, p.dc, p.lc)
        + np.einsum("t,tif,if,tif->", p.gtd, s.yd, p.dd, p.ld)
    )
    return EmissionBreakdown(ep, ea, eh, ed, er, et, include_assembly=p.include_assembly_emissions)


def constraint_slacks(instance: NetworkInstance, solution, exact: bool = True) -> Dict[str, np.ndarray]:
    """Signed slack of every constraint row; negative entries are violations.

    ``solution`` only needs the seven block attributes; leading batch axes
    are allowed, so a whole population can be checked in one call.
    """
    p, s = instance, solution
    into_warehouse = s.ya.sum(axis=(-3, -2))
    out_of_warehouse = s.yb.sum(axis=(-3, -1))
    served = s.yb.sum(axis=(-3, -2))
    collected = s.yc.sum(axis=(-3, -1))
    into_center = s.yc.sum(axis=(-3, -2))
    out_of_center = s.yd.sum(axis=(-3, -1))
    remanufactured = s.yd.sum(axis=(-3, -2))
    indicators = np.concatenate([s.xa, s.xb, s.xd], axis=-1)
    if exact:
        c22 = -np.abs(indicators - np.round(indicators))
        c22 = np.minimum(c22, np.minimum(indicators, 1.0 - indicators))
    else:
        c22 = np.minimum(indicators, 1.0 - indicators)
    flows = [s.ya, s.yb, s.yc, s.yd]
    return {
        "C12": p.pa * s.xa - s.ya.sum(axis=(-3, -1)),
        "C13": p.pb * s.xb - into_warehouse,
        "C14": into_warehouse - out_of_warehouse,
        "C15": served - p.q,
        "C16": p.q - collected,
        "C17": p.pd * s.xd - into_center,
        "C18": collected - p.hd * p.q,
        "C19": out_of_center - p.hr * into_center,
        "C20": p.pr * s.xa - remanufactured,
        "C21": np.concatenate([a.reshape(a.shape[:-3] + (-1,)) for a in flows], axis=-1),
        "C22": c22,
    }


def _entity_index(instance: NetworkInstance, family: str, k: int) -> Tuple:
    if family == "C21":
        for block in FLOW_BLOCKS:
            shape = instance.block_shape(block)
            n = int(np.prod(shape))
            if k < n:
                return (block,) + tuple(int(i) for i in np.unravel_index(k, shape))
            k -= n
    if family == "C22":
        for block in INDICATOR_BLOCKS:
            n = instance.block_shape(block)[0]
            if k < n:
                return (block, k)
            k -= n
    return (k,)


def check_feasibility(instance: NetworkInstance, solution: FlowSolution, tol: float = DEFAULT_TOL,
                      exact: bool = True) -> FeasibilityReport:
    """Check constraint families C12-C22; ``exact=False`` relaxes indicators to [0, 1]."""
    if tol < 0 or not math.isfinite(tol):
        raise InvalidParameterError("tolerance must be a finite non-negative number")
    solution.check_shape(instance)
    violations = []
    for family, slack in constraint_slacks(instance, solution, exact).items():
        for k in np.flatnonzero(slack < -tol):
            violations.append(Violation(family, _entity_index(instance, family, int(k)), float(slack[k]), tol))
    return FeasibilityReport(tuple(violations))


def total_violation(instance: NetworkInstance, solution: FlowSolution, tol: float = DEFAULT_TOL,
                    exact: bool = True) -> float:
    """Sum of violation magnitudes beyond ``tol``; zero iff ``check_feasibility`` passes."""
    return float(violation_magnitude(constraint_slacks(instance, solution, exact), tol))


def violation_magnitude(slacks: Dict[str, np.ndarray], tol: float):
    """Per-candidate sum of ``-slack`` over entries below ``-tol`` (reduces the last axis)."""
    total = 0.0
    for slack in slacks.values():
        total = total + np.where(slack < -tol, -slack, 0.0).sum(axis=-1)
    return total
