"""Matrix-form optimisation problems and solver results."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from ..errors import InvalidParameterError

RELATIONS = ("<=", ">=", "=")

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class LinearProgram:
    """Minimise ``c @ x`` subject to ``A[i] @ x  (relation[i])  b[i]`` and bounds.

    ``lower`` may contain ``-inf`` and ``upper`` may contain ``+inf``.
    """

    c: np.ndarray
    A: np.ndarray
    relations: tuple
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer: np.ndarray
    names: tuple = ()
    row_names: tuple = ()

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        n = c.size
        A = np.array(self.A, dtype=float).reshape(-1, n)
        b = np.array(self.b, dtype=float).reshape(-1)
        lower = np.array(self.lower, dtype=float).reshape(-1)
        upper = np.array(self.upper, dtype=float).reshape(-1)
        integer = np.array(self.integer, dtype=bool).reshape(-1)
        relations = tuple(self.relations)
        if A.shape[0] != b.size or len(relations) != b.size:
            raise InvalidParameterError("row count mismatch between A, relations and b")
        if lower.size != n or upper.size != n or integer.size != n:
            raise InvalidParameterError("bound/integrality vectors must match the variable count")
        if any(r not in RELATIONS for r in relations):
            raise InvalidParameterError(f"relations must be drawn from {RELATIONS}")
        if not np.all(np.isfinite(b)) or not np.all(np.isfinite(c)) or not np.all(np.isfinite(A)):
            raise InvalidParameterError("objective, matrix and right-hand side must be finite")
        if np.any(lower > upper) or np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise InvalidParameterError("every lower bound must be <= its upper bound")
        names = tuple(self.names) or tuple(f"x{j}" for j in range(n))
        row_names = tuple(self.row_names) or tuple(f"r{i}" for i in range(b.size))
        for attr, value in (("c", c), ("A", A), ("b", b), ("lower", lower), ("upper", upper), ("integer", integer)):
            value.flags.writeable = False
            object.__setattr__(self, attr, value)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "row_names", row_names)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b.size

    def with_bounds(self, lower, upper) -> "LinearProgram":
        return replace(self, lower=lower, upper=upper)

    def relaxed(self) -> "LinearProgram":
        return replace(self, integer=np.zeros(self.n_vars, dtype=bool))

    def row_activity(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float)

    def dump(self) -> str:
        """Plain-text image of the problem.

        Layout: a ``vars`` line, one ``bound`` line per variable
        (``name lower upper int|cont``), the ``min`` objective line, then one
        line per row: ``name coef_1 ... coef_n relation rhs``. Numbers use
        ``repr`` so the dump round-trips exactly.
        """
        lines = [f"vars {self.n_vars} rows {self.n_rows}"]
        for j, name in enumerate(self.names):
            kind = "int" if self.integer[j] else "cont"
            lines.append(f"bound {name} {float(self.lower[j])!r} {float(self.upper[j])!r} {kind}")
        lines.append("min " + " ".join(repr(float(v)) for v in self.c))
        for i, rname in enumerate(self.row_names):
            coeffs = " ".join(repr(float(v)) for v in self.A[i])
            lines.append(f"{rname} {coeffs} {self.relations[i]} {float(self.b[i])!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SolverConfig:
    feasibility_tol: float = 1e-6
    optimality_tol: float = 1e-9
    integrality_tol: float = 1e-6
    max_iterations: int = 20000
    max_nodes: int = 20000
    branching: str = "most-fractional"
    # consecutive degenerate pivots before switching to Bland's rule
    degeneracy_limit: int = 50

    def __post_init__(self):
        if min(self.feasibility_tol, self.optimality_tol, self.integrality_tol) <= 0:
            raise InvalidParameterError("all tolerances must be > 0")
        if self.max_iterations < 1 or self.max_nodes < 1:
            raise InvalidParameterError("iteration and node limits must be positive")
        if self.branching not in ("most-fractional", "first-fractional"):
            raise InvalidParameterError(f"unknown branching rule {self.branching!r}")


@dataclass
class LpSolution:
    status: str
    x: Optional[np.ndarray] = None
    objective: float = float("nan")
    duals: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    iterations: int = 0
    nodes: int = 0
    bound: float = float("nan")
    log: List[str] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL
