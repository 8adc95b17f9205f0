"""Real-coded NSGA-II style genetic algorithm for the bi-objective design model.

A chromosome holds every flow variable (scaled to its stage capacity)
followed by one gene per facility indicator. Each offspring is passed through
a single-pass projection (:func:`repair`) before evaluation; any residual
constraint violation is kept as a scalar and handled by feasibility
dominance in the ranking.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from types import SimpleNamespace
from typing import List, Optional

import numpy as np

from .errors import InvalidParameterError
from .instance_io import instance_hash
from .lp_mip import objective_vectors
from .model import (DEFAULT_TOL, FLOW_BLOCKS, INDICATOR_BLOCKS, FlowSolution, NetworkInstance,
                    constraint_slacks, evaluate_cost, evaluate_emissions, variable_layout,
                    violation_magnitude)
from .pareto import FrontEntry, ParetoFront

METHOD_ID = "nsga2"
EVAL_CHUNK = 50
PENALTY_MODES = ("feasibility-dominance", "weighted-penalty")
DEFAULTS_NOTE = ("population size, generation count and operator rates are library defaults; "
                 "no published settings exist for this model")


@dataclass(frozen=True)
class GaConfig:
    seed: int
    population_size: int = 100
    generations: int = 250
    crossover_prob: float = 0.9
    mutation_prob: Optional[float] = None  # None -> 1 / gene count
    crossover_eta: float = 15.0
    mutation_eta: float = 20.0
    penalty: str = "feasibility-dominance"
    penalty_weight: float = 1e4
    threshold: float = 0.5
    tol: float = DEFAULT_TOL
    threads: int = 1

    def __post_init__(self):
        if self.seed is None:
            raise InvalidParameterError("a seed is required")
        if self.population_size < 2:
            raise InvalidParameterError("population size must be >= 2")
        if self.generations < 0:
            raise InvalidParameterError("generations must be >= 0")
        for name in ("crossover_prob", "threshold"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1]")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise InvalidParameterError("mutation_prob must lie in [0, 1]")
        if self.penalty not in PENALTY_MODES:
            raise InvalidParameterError(f"penalty must be one of {PENALTY_MODES}")
        if self.threads < 1:
            raise InvalidParameterError("threads must be >= 1")


@dataclass
class Chromosome:
    genes: np.ndarray
    objectives: tuple = (math.nan, math.nan)
    violation: float = math.nan


class _Encoding:
    """Gene layout and per-gene bounds for one instance."""

    def __init__(self, instance: NetworkInstance):
        p = instance
        self.instance = p
        self.layout = variable_layout(p, FLOW_BLOCKS + INDICATOR_BLOCKS)
        self.size = self.layout.size
        upper = np.zeros(self.size)
        bounds = {
            "ya": np.minimum(p.pa[None, :, None], p.pb[None, None, :]),
            "yb": p.pb[None, :, None],
            "yc": np.minimum(p.q[None, :, None], p.pd[None, None, :]),
            "yd": np.minimum(p.pd[None, :, None], p.pr[None, None, :]),
            "xa": 1.0, "xb": 1.0, "xd": 1.0,
        }
        for block, (s, shape) in self.layout.blocks.items():
            upper[s] = np.broadcast_to(bounds[block], shape).ravel()
        self.lower = np.zeros(self.size)
        self.upper = upper
        # objective vectors are laid out indicators-first; permute to gene order
        cost, emis = objective_vectors(p)
        canon = variable_layout(p)
        perm = np.concatenate([np.arange(canon.blocks[b][0].start, canon.blocks[b][0].stop)
                               for b in FLOW_BLOCKS + INDICATOR_BLOCKS])
        self.cost = cost[perm]
        self.emis = emis[perm]

    def views(self, genes):
        """Block arrays for a (rows, genes) array, each with a leading row axis (copies)."""
        n = genes.shape[0]
        return {b: genes[:, s].reshape((n,) + shape) for b, (s, shape) in self.layout.blocks.items()}

    def pack(self, views):
        n = next(iter(views.values())).shape[0]
        return np.concatenate([views[b].reshape(n, -1) for b in self.layout.blocks], axis=1)

    def decode(self, genes) -> FlowSolution:
        g = np.asarray(genes, dtype=float)
        return FlowSolution(**{b: g[s].reshape(shape) for b, (s, shape) in self.layout.blocks.items()})


def _open_largest(x, capacity, needed):
    """Open the largest facility in rows that need one but have none open."""
    if capacity.max() <= 0:
        return
    none_open = ~((x > 0) & (capacity > 0)).any(axis=1)
    x[needed & none_open, int(np.argmax(capacity))] = 1.0


def _grow_factor(mask, target, current):
    return np.where(mask, target / np.where(current > 0, current, 1.0), 1.0)


def _fill(weights, amount):
    """Per-row split of ``amount`` (rows x targets) across origins in proportion to ``weights``."""
    total = weights.sum(axis=1, keepdims=True)
    share = np.divide(weights, total, out=np.zeros_like(weights), where=total > 0)
    return share[:, :, None] * amount[:, None, :]


def _cap_factor(total, limit, tol):
    over = total - limit > tol
    return np.where(over, np.divide(limit, total, out=np.zeros_like(total), where=total > 0), 1.0)


def _repair_batch(enc: _Encoding, genes, threshold: float, tol: float):
    """Vectorised single-pass repair of a (rows, genes) array; returns (genes, block dict)."""
    p = enc.instance
    g = np.array(genes, dtype=float, ndmin=2)
    v = enc.views(g)
    xa, xb, xd = (v[b] for b in INDICATOR_BLOCKS)
    ya, yb, yc, yd = (v[b] for b in FLOW_BLOCKS)
    TF, TW, TK, TI = ya.shape[1], yb.shape[1], yc.shape[1], yd.shape[1]

    # (a) decode indicators; closed facilities carry nothing
    for x in (xa, xb, xd):
        x[...] = (x >= threshold).astype(float)
    ya *= xa[:, None, :, None] * xb[:, None, None, :]
    yb *= xb[:, None, :, None]
    yc *= xd[:, None, None, :]
    yd *= xd[:, None, :, None] * xa[:, None, None, :]

    # (b) meet demand
    served = yb.sum(axis=(1, 2))
    short = p.q - served > tol
    yb *= _grow_factor(short & (served > 0), p.q, served)[:, None, None, :]
    empty = short & (served <= 0)
    _open_largest(xb, p.pb, empty.any(axis=1))
    fill = _fill(p.pb * xb, np.broadcast_to(p.q, empty.shape)) / TW
    yb[...] = np.where(empty[:, None, None, :], fill[:, None], yb)
    # (c) warehouses receive what they ship
    out = yb.sum(axis=(1, 3))
    inn = ya.sum(axis=(1, 2))
    short = out - inn > tol
    ya *= _grow_factor(short & (inn > 0), out, inn)[:, None, None, :]
    empty = short & (inn <= 0)
    _open_largest(xa, p.pa, empty.any(axis=1))
    fill = _fill(p.pa * xa, out) / TF
    ya[...] = np.where(empty[:, None, None, :], fill[:, None], ya)
    # (d) minimum collection, then minimum demolition
    got = yc.sum(axis=(1, 3))
    need = np.broadcast_to(p.hd * p.q, got.shape)
    short = need - got > tol
    yc *= _grow_factor(short & (got > 0), need, got)[:, None, :, None]
    empty = short & (got <= 0)
    _open_largest(xd, p.pd, empty.any(axis=1))
    fill = _fill(p.pd * xd, need).transpose(0, 2, 1) / TK
    yc[...] = np.where(empty[:, None, :, None], fill[:, None], yc)
    got = yd.sum(axis=(1, 3))
    need = p.hr * yc.sum(axis=(1, 2))
    short = need - got > tol
    yd *= _grow_factor(short & (got > 0), need, got)[:, None, :, None]
    empty = short & (got <= 0)
    _open_largest(xa, p.pr, empty.any(axis=1))
    fill = _fill(p.pr * xa, need).transpose(0, 2, 1) / TI
    yd[...] = np.where(empty[:, None, :, None], fill[:, None], yd)

    # (e) capacities by proportional scale-down, upstream first
    ya *= _cap_factor(ya.sum(axis=(1, 3)), p.pa * xa, tol)[:, None, :, None]
    ya *= _cap_factor(ya.sum(axis=(1, 2)), p.pb * xb, tol)[:, None, None, :]
    yb *= _cap_factor(yb.sum(axis=(1, 3)), ya.sum(axis=(1, 2)), tol)[:, None, :, None]
    yc *= _cap_factor(yc.sum(axis=(1, 3)), p.q, tol)[:, None, :, None]
    yc *= _cap_factor(yc.sum(axis=(1, 2)), p.pd * xd, tol)[:, None, None, :]
    yd *= _cap_factor(yd.sum(axis=(1, 2)), p.pr * xa, tol)[:, None, None, :]

    # an indicator serving positive flow is charged as open
    xa[(ya.sum(axis=(1, 3)) > 0) | (yd.sum(axis=(1, 2)) > 0)] = 1.0
    xb[(ya.sum(axis=(1, 2)) > 0) | (yb.sum(axis=(1, 3)) > 0)] = 1.0
    xd[(yc.sum(axis=(1, 2)) > 0) | (yd.sum(axis=(1, 3)) > 0)] = 1.0
    return enc.pack(v), v


def _evaluate_batch(enc: _Encoding, genes, config: GaConfig):
    """Repair rows of ``genes``; returns (genes, objectives (n, 2), violations (n,))."""
    g, v = _repair_batch(enc, genes, config.threshold, config.tol)
    slacks = constraint_slacks(enc.instance, SimpleNamespace(**v), exact=True)
    viol = violation_magnitude(slacks, config.tol)
    # row-wise sums rather than a BLAS product so results do not depend on the batch size
    objs = np.column_stack([(g * enc.cost).sum(axis=1), (g * enc.emis).sum(axis=1)])
    return g, objs, np.asarray(viol, dtype=float)


def _evaluate_parallel(enc: _Encoding, genes, config: GaConfig):
    """Evaluate in fixed-size chunks; the worker count only decides who computes each chunk."""
    genes = np.asarray(genes)
    chunks = [genes[k:k + EVAL_CHUNK] for k in range(0, len(genes), EVAL_CHUNK)]
    if config.threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            parts = list(pool.map(lambda c: _evaluate_batch(enc, c, config), chunks))
    else:
        parts = [_evaluate_batch(enc, c, config) for c in chunks]
    return tuple(np.concatenate([part[k] for part in parts]) for k in range(3))


def repair(instance: NetworkInstance, chromosome: Chromosome, config: GaConfig | None = None) -> Chromosome:
    """Project a chromosome towards feasibility and refresh its cached objectives.

    Single pass: decode indicators, raise deliveries to demand, raise
    warehouse inflows to cover outflows, raise collection and demolition to
    their minimum shares, then scale flows down to every capacity. Whatever
    violation remains is stored on the result instead of looping again.
    """
    config = config or GaConfig(seed=0)
    g, objs, viol = _evaluate_batch(_Encoding(instance), chromosome.genes, config)
    return Chromosome(g[0], (float(objs[0, 0]), float(objs[0, 1])), float(viol[0]))


def decode(instance: NetworkInstance, chromosome: Chromosome) -> FlowSolution:
    return _Encoding(instance).decode(chromosome.genes)


def _initial_genes(enc: _Encoding, config: GaConfig):
    rng = np.random.default_rng([config.seed, 0])
    return rng.uniform(0.0, 1.0, size=(config.population_size, enc.size)) * enc.upper


def initialize_population(instance: NetworkInstance, config: GaConfig) -> List[Chromosome]:
    """Uniform random genes within bounds, each repaired and evaluated."""
    enc = _Encoding(instance)
    g, objs, viol = _evaluate_parallel(enc, _initial_genes(enc, config), config)
    return [Chromosome(g[i], (float(objs[i, 0]), float(objs[i, 1])), float(viol[i])) for i in range(len(g))]


# --- ranking ---------------------------------------------------------------

def _dominance_matrix(objs, viol, penalty="feasibility-dominance", weight=1e4):
    f = np.asarray(objs, dtype=float).reshape(-1, 2)
    v = np.zeros(len(f)) if viol is None else np.asarray(viol, dtype=float)
    if penalty == "weighted-penalty":
        f = f + weight * v[:, None]
        v = np.zeros_like(v)
    le = (f[:, None, :] <= f[None, :, :]).all(axis=-1)
    lt = (f[:, None, :] < f[None, :, :]).any(axis=-1)
    pareto = le & lt
    feas = v == 0
    both = feas[:, None] & feas[None, :]
    neither = ~feas[:, None] & ~feas[None, :]
    return (both & pareto) | (feas[:, None] & ~feas[None, :]) | (neither & (v[:, None] < v[None, :]))


def nondominated_sort(objectives, violations=None, penalty: str = "feasibility-dominance",
                      weight: float = 1e4) -> List[List[int]]:
    """Fronts of indices in rank order.

    Under feasibility dominance a feasible point beats any infeasible one,
    smaller violation wins among infeasible points, and plain Pareto
    dominance applies among feasible points.
    """
    D = _dominance_matrix(objectives, violations, penalty, weight)
    remaining = D.sum(axis=0)
    assigned = np.zeros(len(remaining), dtype=bool)
    fronts = []
    while not assigned.all():
        current = np.flatnonzero((remaining == 0) & ~assigned)
        fronts.append([int(i) for i in current])
        assigned[current] = True
        remaining = remaining - D[current].sum(axis=0)
    return fronts


def crowding_distance(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for m in range(pts.shape[1]):
        order = np.argsort(pts[:, m], kind="stable")
        vals = pts[order, m]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if span <= 0:
            continue
        dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def _rank_and_crowd(objs, viol, config: GaConfig):
    fronts = nondominated_sort(objs, viol, config.penalty, config.penalty_weight)
    rank = np.empty(len(objs), dtype=int)
    crowd = np.empty(len(objs))
    for r, front in enumerate(fronts):
        rank[front] = r
        crowd[front] = crowding_distance(np.asarray(objs)[front])
    return fronts, rank, crowd


# --- variation -------------------------------------------------------------

def _sbx(rng, a, b, lower, upper, eta, prob):
    c1, c2 = a.copy(), b.copy()
    if rng.random() > prob:
        return c1, c2
    n = a.size
    swap = rng.random(n)
    u = rng.random(n)
    flip = rng.random(n)
    active = (swap <= 0.5) & (np.abs(a - b) > 1e-14) & (upper > lower)
    if not active.any():
        return c1, c2
    y1 = np.minimum(a, b)[active]
    y2 = np.maximum(a, b)[active]
    yl, yu = lower[active], upper[active]
    r = u[active]
    gap = y2 - y1

    def betaq(beta):
        alpha = 2.0 - beta ** -(eta + 1.0)
        return np.where(r <= 1.0 / alpha, (r * alpha) ** (1.0 / (eta + 1.0)),
                        (1.0 / np.maximum(2.0 - r * alpha, 1e-300)) ** (1.0 / (eta + 1.0)))

    child1 = 0.5 * ((y1 + y2) - betaq(1.0 + 2.0 * (y1 - yl) / gap) * gap)
    child2 = 0.5 * ((y1 + y2) + betaq(1.0 + 2.0 * (yu - y2) / gap) * gap)
    child1 = np.clip(child1, yl, yu)
    child2 = np.clip(child2, yl, yu)
    swapped = flip[active] <= 0.5
    c1[active] = np.where(swapped, child2, child1)
    c2[active] = np.where(swapped, child1, child2)
    return c1, c2


def _mutate(rng, x, lower, upper, eta, prob):
    y = x.copy()
    hit = rng.random(x.size) < prob
    r = rng.random(x.size)
    hit &= upper > lower
    if not hit.any():
        return y
    yl, yu, yv, rr = lower[hit], upper[hit], y[hit], r[hit]
    span = yu - yl
    d1 = (yv - yl) / span
    d2 = (yu - yv) / span
    power = 1.0 / (eta + 1.0)
    low = rr < 0.5
    val_low = 2.0 * rr + (1.0 - 2.0 * rr) * (1.0 - d1) ** (eta + 1.0)
    val_high = 2.0 * (1.0 - rr) + 2.0 * (rr - 0.5) * (1.0 - d2) ** (eta + 1.0)
    delta = np.where(low, val_low ** power - 1.0, 1.0 - val_high ** power)
    y[hit] = np.clip(yv + delta * span, yl, yu)
    return y


def _tournament(rng, rank, crowd, n):
    picks = rng.integers(0, len(rank), size=(n, 2))
    a, b = picks[:, 0], picks[:, 1]
    better_b = (rank[b] < rank[a]) | ((rank[b] == rank[a]) & (crowd[b] > crowd[a]))
    return np.where(better_b, b, a)


def _survivors(fronts, crowd, n):
    chosen = []
    for front in fronts:
        if len(chosen) + len(front) <= n:
            chosen.extend(front)
            continue
        front = np.asarray(front)
        order = np.argsort(-crowd[front], kind="stable")
        chosen.extend(int(i) for i in front[order[: n - len(chosen)]])
        break
    return chosen


def evolve(instance: NetworkInstance, config: GaConfig, trace=None) -> ParetoFront:
    """Evolve a population and return its feasible rank-1 members as a front.

    ``trace`` may be a text stream; one CSV row per generation is written to
    it (``generation,best_f1,best_f2,feasible_count``).
    """
    enc = _Encoding(instance)
    n = config.population_size
    pm = config.mutation_prob if config.mutation_prob is not None else 1.0 / enc.size
    genes, objs, viol = _evaluate_parallel(enc, _initial_genes(enc, config), config)
    writer = None
    if trace is not None:
        writer = csv.writer(trace, lineterminator="\n")
        writer.writerow(["generation", "best_f1", "best_f2", "feasible_count"])

    def record(gen):
        if writer is None:
            return
        feas = objs[viol == 0]
        best1, best2 = (feas.min(axis=0) if len(feas) else (math.nan, math.nan))
        writer.writerow([gen, repr(float(best1)), repr(float(best2)), len(feas)])

    record(0)
    fronts, rank, crowd = _rank_and_crowd(objs, viol, config)

    for gen in range(1, config.generations + 1):
        # every random draw happens here, in a fixed order, before any parallel work
        rng = np.random.default_rng([config.seed, gen])
        parents = _tournament(rng, rank, crowd, n + (n % 2))
        children = []
        for k in range(0, len(parents), 2):
            a, b = genes[parents[k]], genes[parents[k + 1]]
            c1, c2 = _sbx(rng, a, b, enc.lower, enc.upper, config.crossover_eta, config.crossover_prob)
            children.append(_mutate(rng, c1, enc.lower, enc.upper, config.mutation_eta, pm))
            children.append(_mutate(rng, c2, enc.lower, enc.upper, config.mutation_eta, pm))
        child_genes, child_objs, child_viol = _evaluate_parallel(enc, np.array(children[:n]), config)
        all_genes = np.concatenate([genes, child_genes])
        all_objs = np.concatenate([objs, child_objs])
        all_viol = np.concatenate([viol, child_viol])
        fronts, _, crowd_all = _rank_and_crowd(all_objs, all_viol, config)
        keep = _survivors(fronts, crowd_all, n)
        genes, objs, viol = all_genes[keep], all_objs[keep], all_viol[keep]
        fronts, rank, crowd = _rank_and_crowd(objs, viol, config)
        record(gen)

    pop = [Chromosome(genes[i], tuple(objs[i]), float(viol[i])) for i in range(len(genes))]
    return _front_from_population(instance, enc, pop, fronts, config)


def _front_from_population(instance, enc, pop, fronts, config) -> ParetoFront:
    # the worker count never changes the result, so it stays out of the front file
    settings = {k: v for k, v in asdict(config).items() if k != "threads"}
    meta = {"method": METHOD_ID, "ga": settings, "note": DEFAULTS_NOTE}
    entries = []
    for i in fronts[0] if fronts else []:
        chrom = pop[i]
        if chrom.violation != 0:
            continue
        sol = enc.decode(chrom.genes)
        f1 = evaluate_cost(instance, sol).total
        f2 = evaluate_emissions(instance, sol).total
        entries.append(FrontEntry(f1, f2, sol, METHOD_ID, generation=config.generations, proven=False))
    if not entries:
        meta["diagnostic"] = "no constraint-satisfying chromosome in the final first front"
    return ParetoFront.from_entries(entries, instance_hash(instance), meta, exact=False)
