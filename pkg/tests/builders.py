"""Small hand-checkable instances shared by the test modules."""
import numpy as np

from greenloop import FlowSolution, NetworkInstance


def unit_instance(**overrides) -> NetworkInstance:
    """1-1-1-1 network, one option per stage, every unit cost/rate/distance/factor 1.

    Fixed costs 100, capacities 100, demand 10, hd 0.2, hr 0.5, lambda 0.
    """
    one3 = np.ones((1, 1, 1))
    one2 = np.ones((1, 1))
    one = np.ones(1)
    values = dict(
        q=[10.0], ta=one3, tb=one3, tc=one3, td=one3, la=one3, lb=one3, lc=one3, ld=one3,
        da=one2, db=one2, dc=one2, dd=one2,
        ra=[100.0], rb=[100.0], rd=[100.0],
        ma=one, mb=one, mc=one, md=one, mr=one,
        pa=[100.0], pb=[100.0], pd=[100.0], pr=[100.0],
        ga=one, gc=one, gb=one, gd=one, gr=one, gta=one, gtb=one, gtc=one, gtd=one,
        hd=0.2, hr=0.5, lam=0.0, t=7.0,
    )
    values.update(overrides)
    return NetworkInstance(**values)


def unit_solution(ya=10.0, yb=10.0, yc=2.0, yd=1.0, xa=1.0, xb=1.0, xd=1.0) -> FlowSolution:
    return FlowSolution(xa=[xa], xb=[xb], xd=[xd], ya=[[[ya]]], yb=[[[yb]]], yc=[[[yc]]], yd=[[[yd]]])


def tradeoff_unit_instance(**overrides) -> NetworkInstance:
    """Unit network with two factory->warehouse options: (Ta 1, Gta 10) and (Ta 10, Gta 1)."""
    values = dict(ta=np.array([1.0, 10.0]).reshape(2, 1, 1), la=np.ones((2, 1, 1)), gta=[10.0, 1.0])
    values.update(overrides)
    return unit_instance(**values)


def random_solution(instance, rng, integral=True) -> FlowSolution:
    blocks = {}
    for b in ("xa", "xb", "xd"):
        shape = instance.block_shape(b)
        blocks[b] = rng.integers(0, 2, size=shape).astype(float) if integral else rng.uniform(0, 1, shape)
    for b in ("ya", "yb", "yc", "yd"):
        blocks[b] = rng.uniform(0, 500, size=instance.block_shape(b))
    return FlowSolution(**blocks)


def random_instance(rng, dims=None, **overrides) -> NetworkInstance:
    """Random valid instance (no feasibility guarantee) with dimensions drawn in 1..3."""
    from greenloop.model import DIMENSION_NAMES, PARAMETER_SHAPES, RATE_PARAMETERS

    if dims is None:
        dims = dict(zip(DIMENSION_NAMES, rng.integers(1, 4, size=8)))
    values = {}
    for name, symbolic in PARAMETER_SHAPES.items():
        shape = tuple(int(dims[d]) for d in symbolic)
        low = 0.5 if name in RATE_PARAMETERS else 0.0
        values[name] = rng.uniform(low, 100.0, size=shape)
    values.update(hd=float(rng.uniform()), hr=float(rng.uniform()), lam=float(rng.uniform(0, 0.1)),
                  t=float(rng.uniform(1, 14)))
    values.update(overrides)
    return NetworkInstance(**values)
