"""Front container, dominance filtering and front-comparison metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ComparisonError, InvalidReferenceError
from .model import FlowSolution

DUPLICATE_ABS_TOL = 1e-6
DUPLICATE_REL_TOL = 1e-9
REFERENCE_FACTOR = 1.1


def _same(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=DUPLICATE_REL_TOL, abs_tol=DUPLICATE_ABS_TOL)


def dominates(a, b) -> bool:
    """Minimisation dominance: ``a <= b`` componentwise, strictly in one."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def nondominated_indices(points: Sequence[Tuple[float, float]]) -> List[int]:
    """Indices of the nondominated points; among near-duplicates the first wins."""
    pts = [(float(p[0]), float(p[1])) for p in points]
    reps: List[int] = []
    for i, p in enumerate(pts):
        if not any(_same(pts[j][0], p[0]) and _same(pts[j][1], p[1]) for j in reps):
            reps.append(i)
    return [i for i in reps if not any(dominates(pts[j], pts[i]) for j in reps if j != i)]


def filter_dominated(points: Sequence[Tuple[float, float]]) -> List[Tuple[float, float]]:
    return [tuple(points[i]) for i in nondominated_indices(points)]


def hypervolume(points: Sequence[Tuple[float, float]], reference: Tuple[float, float]) -> float:
    """Area dominated by ``points`` and bounded by ``reference`` (minimisation)."""
    r1, r2 = float(reference[0]), float(reference[1])
    pts = [(float(a), float(b)) for a, b in points]
    for a, b in pts:
        if a > r1 or b > r2:
            raise InvalidReferenceError(f"point ({a}, {b}) lies beyond reference ({r1}, {r2})")
    area = 0.0
    ceiling = r2
    for a, b in sorted(pts):
        if b < ceiling:
            area += (r1 - a) * (ceiling - b)
            ceiling = b
    return area


def coverage(a_points, b_points) -> float:
    """Fraction of ``b_points`` weakly dominated by at least one point of ``a_points``."""
    if not len(b_points):
        return 0.0
    covered = 0
    for q in b_points:
        for p in a_points:
            if p[0] <= q[0] + DUPLICATE_REL_TOL * abs(q[0]) and p[1] <= q[1] + DUPLICATE_REL_TOL * abs(q[1]):
                covered += 1
                break
    return covered / len(b_points)


@dataclass(frozen=True)
class FrontEntry:
    f1: float
    f2: float
    solution: FlowSolution
    method: str
    epsilon: Optional[float] = None
    generation: Optional[int] = None
    proven: bool = True

    @property
    def point(self) -> Tuple[float, float]:
        return (self.f1, self.f2)


@dataclass(frozen=True)
class ParetoFront:
    """Mutually nondominated entries sorted by ascending ``f1``.

    Build fronts through :meth:`from_entries`, which filters and orders the
    candidates; the constructor only checks the invariants.
    """

    entries: Tuple[FrontEntry, ...]
    instance_hash: str
    metadata: Dict = field(default_factory=dict)
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        pts = self.points
        if nondominated_indices(pts) != list(range(len(pts))):
            raise ValueError("front entries must be mutually nondominated and free of duplicates")
        if any(pts[k][0] > pts[k + 1][0] for k in range(len(pts) - 1)):
            raise ValueError("front entries must be sorted by ascending f1")

    @classmethod
    def from_entries(cls, entries, instance_hash: str, metadata=None, exact: bool = True) -> "ParetoFront":
        entries = list(entries)
        kept = [entries[i] for i in nondominated_indices([e.point for e in entries])]
        kept.sort(key=lambda e: (e.f1, e.f2))
        return cls(tuple(kept), instance_hash, dict(metadata or {}), exact)

    @property
    def points(self) -> List[Tuple[float, float]]:
        return [e.point for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class FrontMetrics:
    hypervolume_a: float
    hypervolume_b: float
    hypervolume_ratio: float
    coverage_ab: float
    coverage_ba: float
    count_a: int
    count_b: int
    anchors_a: Dict[str, float]
    anchors_b: Dict[str, float]
    reference: Tuple[float, float]

    def as_dict(self) -> Dict:
        return {
            "hypervolume_a": self.hypervolume_a,
            "hypervolume_b": self.hypervolume_b,
            "hypervolume_ratio": self.hypervolume_ratio,
            "coverage_ab": self.coverage_ab,
            "coverage_ba": self.coverage_ba,
            "count_a": self.count_a,
            "count_b": self.count_b,
            "min_f1_a": self.anchors_a["min_f1"],
            "min_f2_a": self.anchors_a["min_f2"],
            "min_f1_b": self.anchors_b["min_f1"],
            "min_f2_b": self.anchors_b["min_f2"],
            "reference_f1": self.reference[0],
            "reference_f2": self.reference[1],
        }


def reference_point(*fronts: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """Componentwise maximum over all fronts, scaled by ``REFERENCE_FACTOR``."""
    pts = [p for front in fronts for p in front]
    if not pts:
        return (0.0, 0.0)
    arr = np.asarray(pts, dtype=float)
    return tuple(float(v) * REFERENCE_FACTOR for v in arr.max(axis=0))


def _anchors(points) -> Dict[str, float]:
    if not points:
        return {"min_f1": math.nan, "min_f2": math.nan}
    return {"min_f1": min(p[0] for p in points), "min_f2": min(p[1] for p in points)}


def compare(front_a: ParetoFront, front_b: ParetoFront) -> FrontMetrics:
    """Hypervolume and coverage of two fronts against a shared reference point."""
    if front_a.instance_hash != front_b.instance_hash:
        raise ComparisonError(
            f"fronts come from different instances ({front_a.instance_hash[:12]} vs {front_b.instance_hash[:12]})")
    pa, pb = front_a.points, front_b.points
    ref = reference_point(pa, pb)
    hv_a = hypervolume(pa, ref)
    hv_b = hypervolume(pb, ref)
    ratio = hv_b / hv_a if hv_a > 0 else math.nan
    return FrontMetrics(
        hypervolume_a=hv_a,
        hypervolume_b=hv_b,
        hypervolume_ratio=ratio,
        coverage_ab=coverage(pa, pb),
        coverage_ba=coverage(pb, pa),
        count_a=len(pa),
        count_b=len(pb),
        anchors_a=_anchors(pa),
        anchors_b=_anchors(pb),
        reference=ref,
    )
