"""JSON persistence for instances and fronts, bundled cases and a seeded generator."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from .errors import FrontFormatError, GenerationError, InstanceValidationError, SchemaVersionError
from .model import (DIMENSION_NAMES, FLOW_BLOCKS, INDICATOR_BLOCKS, PARAMETER_SHAPES, FlowSolution,
                    NetworkInstance)
from .pareto import FrontEntry, ParetoFront

SCHEMA_VERSION = 1
FRONT_SCHEMA_VERSION = 1

# document key -> NetworkInstance attribute
_DOC_TO_ATTR = {k: k for k in PARAMETER_SHAPES}
_DOC_TO_ATTR.update({"l_a": "la", "l_b": "lb", "l_c": "lc", "l_d": "ld", "hd": "hd", "hr": "hr",
                     "lambda": "lam", "t": "t"})
for _k in ("la", "lb", "lc", "ld"):
    del _DOC_TO_ATTR[_k]
_ATTR_TO_DOC = {v: k for k, v in _DOC_TO_ATTR.items()}
_TOP_KEYS = {"schema_version", "dimensions", "parameters", "currency", "provenance",
             "include_assembly_emissions"}
_HASH_RE = re.compile(r"^[0-9a-f]{64}$")

BUNDLED = {"base": "case_2222.json", "tradeoff": "case_2222_tradeoff.json"}


# --- instances -------------------------------------------------------------

def instance_to_document(instance: NetworkInstance, provenance: str = "") -> Dict:
    params = {}
    for attr, key in sorted(_ATTR_TO_DOC.items(), key=lambda kv: kv[1]):
        value = getattr(instance, attr)
        params[key] = value.tolist() if isinstance(value, np.ndarray) else float(value)
    return {
        "schema_version": SCHEMA_VERSION,
        "dimensions": instance.dims,
        "parameters": params,
        "currency": instance.currency,
        "include_assembly_emissions": instance.include_assembly_emissions,
        "provenance": provenance,
    }


def instance_from_document(doc: Dict) -> NetworkInstance:
    if not isinstance(doc, dict):
        raise InstanceValidationError("$", "document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise InstanceValidationError(sorted(unknown)[0], "unknown key")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    dims = doc.get("dimensions")
    if not isinstance(dims, dict):
        raise InstanceValidationError("dimensions", "missing dimension block")
    for name in set(dims) - set(DIMENSION_NAMES):
        raise InstanceValidationError(f"dimensions.{name}", "unknown key")
    for name in DIMENSION_NAMES:
        value = dims.get(name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise InstanceValidationError(f"dimensions.{name}", "must be an integer >= 1")
    params = doc.get("parameters")
    if not isinstance(params, dict):
        raise InstanceValidationError("parameters", "missing parameter block")
    for key in params:
        if key not in _DOC_TO_ATTR:
            raise InstanceValidationError(f"parameters.{key}", "unknown key")
    kwargs = {}
    for key, attr in _DOC_TO_ATTR.items():
        path = f"parameters.{key}"
        if key not in params:
            if key == "gc":
                kwargs[attr] = np.zeros(dims["F"])
                continue
            if key == "t":
                kwargs[attr] = 7.0
                continue
            raise InstanceValidationError(path, "missing")
        raw = params[key]
        if attr in PARAMETER_SHAPES:
            try:
                arr = np.array(raw, dtype=float)
            except (TypeError, ValueError):
                raise InstanceValidationError(path, "must be a (nested) array of numbers") from None
            expected = tuple(dims[d] for d in PARAMETER_SHAPES[attr])
            if arr.shape != expected:
                raise InstanceValidationError(path, f"expected shape {list(expected)}, got {list(arr.shape)}")
            kwargs[attr] = arr
        else:
            if not isinstance(raw, (int, float)) or isinstance(raw, bool):
                raise InstanceValidationError(path, "must be a number")
            kwargs[attr] = float(raw)
    currency = doc.get("currency", "£")
    if not isinstance(currency, str):
        raise InstanceValidationError("currency", "must be a string")
    flag = doc.get("include_assembly_emissions", False)
    if not isinstance(flag, bool):
        raise InstanceValidationError("include_assembly_emissions", "must be true or false")
    try:
        return NetworkInstance(**kwargs, include_assembly_emissions=flag, currency=currency)
    except InstanceValidationError as exc:
        key = _ATTR_TO_DOC.get(exc.key, exc.key)
        raise InstanceValidationError(f"parameters.{key}", str(exc).split(": ", 1)[-1]) from None


def dumps_instance(instance: NetworkInstance, provenance: str = "") -> str:
    return json.dumps(instance_to_document(instance, provenance), indent=2, ensure_ascii=False) + "\n"


def load_instance(text: str) -> NetworkInstance:
    """Parse and validate an instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceValidationError("$", f"parse error: {exc}") from None
    return instance_from_document(doc)


def read_instance(path) -> NetworkInstance:
    return load_instance(Path(path).read_text(encoding="utf-8"))


def save_instance(instance: NetworkInstance, path, provenance: str = "") -> None:
    Path(path).write_text(dumps_instance(instance, provenance), encoding="utf-8")


def read_provenance(path) -> str:
    return json.loads(Path(path).read_text(encoding="utf-8")).get("provenance", "")


def instance_hash(instance: NetworkInstance) -> str:
    """SHA-256 of the canonical document, provenance excluded."""
    doc = instance_to_document(instance)
    del doc["provenance"]
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def bundled_text(name: str = "base") -> str:
    return resources.files("greenloop.data").joinpath(BUNDLED[name]).read_text(encoding="utf-8")


def bundled_path(name: str = "base") -> Path:
    return Path(str(resources.files("greenloop.data").joinpath(BUNDLED[name])))


def load_bundled(name: str = "base") -> NetworkInstance:
    """The synthetic 2-2-2-2 case (``"base"``) or its two-option variant (``"tradeoff"``)."""
    return load_instance(bundled_text(name))


# --- fronts ----------------------------------------------------------------

def _solution_to_doc(sol: FlowSolution) -> Dict:
    return {b: getattr(sol, b).tolist() for b in INDICATOR_BLOCKS + FLOW_BLOCKS}


def front_to_document(front: ParetoFront) -> Dict:
    entries = []
    for e in front.entries:
        entries.append({
            "f1": e.f1,
            "f2": e.f2,
            "method": e.method,
            "epsilon": e.epsilon,
            "generation": e.generation,
            "proven": e.proven,
            "solution": _solution_to_doc(e.solution),
        })
    return {
        "schema_version": FRONT_SCHEMA_VERSION,
        "kind": "pareto_front",
        "instance_hash": front.instance_hash,
        "exact": front.exact,
        "metadata": front.metadata,
        "entries": entries,
    }


def dumps_front(front: ParetoFront) -> str:
    return json.dumps(front_to_document(front), indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def _number(value, key):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise FrontFormatError(key, "must be a finite number")
    return float(value)


def front_from_document(doc: Dict) -> ParetoFront:
    if not isinstance(doc, dict) or doc.get("kind") != "pareto_front":
        raise FrontFormatError("kind", "not a pareto_front document")
    if doc.get("schema_version") != FRONT_SCHEMA_VERSION:
        raise FrontFormatError("schema_version", f"expected {FRONT_SCHEMA_VERSION}")
    ihash = doc.get("instance_hash")
    if not isinstance(ihash, str) or not _HASH_RE.match(ihash):
        raise FrontFormatError("instance_hash", "must be a 64-character lowercase hex digest")
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, list):
        raise FrontFormatError("entries", "must be a list")
    entries = []
    for k, raw in enumerate(raw_entries):
        key = f"entries[{k}]"
        try:
            sol = FlowSolution(**{b: np.array(raw["solution"][b], dtype=float)
                                  for b in INDICATOR_BLOCKS + FLOW_BLOCKS})
        except (KeyError, TypeError, ValueError):
            raise FrontFormatError(f"{key}.solution", "malformed decision blocks") from None
        eps = raw.get("epsilon")
        gen = raw.get("generation")
        entries.append(FrontEntry(
            f1=_number(raw.get("f1"), f"{key}.f1"),
            f2=_number(raw.get("f2"), f"{key}.f2"),
            solution=sol,
            method=str(raw.get("method", "")),
            epsilon=None if eps is None else _number(eps, f"{key}.epsilon"),
            generation=None if gen is None else int(gen),
            proven=bool(raw.get("proven", True)),
        ))
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise FrontFormatError("metadata", "must be an object")
    try:
        return ParetoFront(tuple(entries), ihash, metadata, bool(doc.get("exact", True)))
    except ValueError as exc:
        raise FrontFormatError("entries", str(exc)) from None


def loads_front(text: str) -> ParetoFront:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FrontFormatError("$", f"parse error: {exc}") from None
    return front_from_document(doc)


def save_front(front: ParetoFront, path) -> None:
    Path(path).write_text(dumps_front(front), encoding="utf-8")


def load_front(path) -> ParetoFront:
    return loads_front(Path(path).read_text(encoding="utf-8"))


def front_to_csv(front: ParetoFront) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["f1", "f2", "method", "epsilon_or_gen", "proven"])
    for e in front.entries:
        tag = e.epsilon if e.epsilon is not None else e.generation
        writer.writerow([repr(e.f1), repr(e.f2), e.method, "" if tag is None else repr(tag),
                         "true" if e.proven else "false"])
    return buf.getvalue()


# --- generator -------------------------------------------------------------

DEFAULT_RANGES: Dict[str, Tuple[float, float]] = {
    "q": (500.0, 2000.0),
    "ta": (2.0, 8.0), "tb": (2.0, 8.0), "tc": (1.0, 5.0), "td": (1.0, 5.0),
    "la": (1.1, 1.5), "lb": (1.1, 1.5), "lc": (1.1, 1.5), "ld": (1.1, 1.5),
    "da": (50.0, 400.0), "db": (50.0, 400.0), "dc": (50.0, 400.0), "dd": (50.0, 400.0),
    "ra": (150000.0, 300000.0), "rb": (50000.0, 100000.0), "rd": (20000.0, 50000.0),
    "ma": (100.0, 150.0), "mb": (5.0, 12.0), "mc": (3.0, 8.0), "md": (8.0, 15.0), "mr": (40.0, 70.0),
    "pa": (1000.0, 3000.0), "pb": (1000.0, 3000.0), "pd": (300.0, 900.0), "pr": (100.0, 400.0),
    "ga": (30.0, 50.0), "gc": (2.0, 6.0), "gb": (1.0, 4.0), "gd": (3.0, 8.0), "gr": (10.0, 25.0),
    "gta": (0.03, 0.15), "gtb": (0.03, 0.15), "gtc": (0.03, 0.15), "gtd": (0.03, 0.15),
    "hd": (0.1, 0.3), "hr": (0.05, 0.2), "lam": (0.0, 0.02), "t": (7.0, 7.0),
}


@dataclass(frozen=True)
class GeneratorSpec:
    """Seeded random-instance recipe.

    ``dims`` is (F, W, C, I, TF, TW, TK, TI). ``ranges`` overrides entries of
    :data:`DEFAULT_RANGES`; every parameter is drawn uniformly from its range.
    Capacities are then scaled up so that each stage offers at least
    ``margin`` times the flow it must carry.
    """

    seed: int
    dims: Tuple[int, ...] = (2, 2, 2, 2, 1, 1, 1, 1)
    ranges: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    margin: float = 1.5

    def __post_init__(self):
        if len(self.dims) != 8 or any(int(d) < 1 for d in self.dims):
            raise GenerationError("dims must be eight positive integers (F, W, C, I, TF, TW, TK, TI)")
        if self.margin < 1:
            raise GenerationError("margin must be >= 1")
        for key, (lo, hi) in self.ranges.items():
            if key not in DEFAULT_RANGES:
                raise GenerationError(f"unknown range key {key!r}")
            if lo < 0 or lo > hi:
                raise GenerationError(f"range for {key!r} must satisfy 0 <= lower <= upper")

    def range_for(self, key):
        return self.ranges.get(key, DEFAULT_RANGES[key])


def generate(spec: GeneratorSpec) -> NetworkInstance:
    from .lp_mip import build_milp, solve_lp

    dims = dict(zip(DIMENSION_NAMES, (int(d) for d in spec.dims)))
    rng = np.random.default_rng(spec.seed)
    values = {}
    for key in DEFAULT_RANGES:
        lo, hi = spec.range_for(key)
        if key in PARAMETER_SHAPES:
            shape = tuple(dims[d] for d in PARAMETER_SHAPES[key])
            values[key] = rng.uniform(lo, hi, size=shape)
        else:
            values[key] = float(rng.uniform(lo, hi))
    if values["hd"] > 1 or values["hr"] > 1:
        raise GenerationError("hd and hr ranges must stay within [0, 1]")
    if any(np.any(values[k] <= 0) for k in ("la", "lb", "lc", "ld")):
        raise GenerationError("transport rate ranges must be strictly positive")

    demand = float(values["q"].sum())
    need = {
        "pa": demand,
        "pb": demand,
        "pd": values["hd"] * demand,
        "pr": values["hr"] * values["hd"] * demand,
    }
    for key, required in need.items():
        total = float(values[key].sum())
        target = spec.margin * required
        if total < target:
            if total <= 0:
                raise GenerationError(f"capacity range for {key!r} is degenerate at zero")
            values[key] = values[key] * (target / total)
    instance = NetworkInstance(**values)
    probe = solve_lp(build_milp(instance, "cost", relaxed=True))
    if not probe.optimal:
        raise GenerationError(f"generated instance failed the feasibility probe ({probe.status})")
    return instance
