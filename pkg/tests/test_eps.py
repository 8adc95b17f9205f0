import numpy as np
import pytest

from greenloop import (EpsConfig, InvalidParameterError, ModelInfeasibleError, check_feasibility,
                       evaluate_cost, evaluate_emissions, hypervolume, load_bundled, payoff_table, sweep)
from greenloop.eps_constraint import grid
from greenloop.pareto import dominates

from builders import tradeoff_unit_instance, unit_instance


def test_single_pattern_collapses_payoff_table():
    # capacities leave exactly one feasible flow plan
    inst = unit_instance(pa=[10.0], pb=[10.0], pd=[2.0], pr=[1.0])
    table = payoff_table(inst)
    assert table.ideal == pytest.approx(table.nadir)


def test_tradeoff_unit_payoff_table():
    table = payoff_table(tradeoff_unit_instance())
    # option 1 everywhere: cost 348, emissions 136; option 2: cost 438, emissions 46
    assert table.ideal == pytest.approx((348.0, 46.0))
    assert table.nadir == pytest.approx((438.0, 136.0))
    assert table.proven


def test_bundled_payoff_spread():
    table = payoff_table(load_bundled("base"))
    assert table.ideal[1] < table.nadir[1]
    assert table.ideal[0] <= table.nadir[0]


def test_grid_is_inclusive():
    table = payoff_table(tradeoff_unit_instance())
    eps = grid(table, 11)
    assert eps[0] == pytest.approx(46.0) and eps[-1] == pytest.approx(136.0)
    assert np.allclose(np.diff(eps), 9.0)


def test_two_point_grid_returns_anchors():
    inst = tradeoff_unit_instance()
    table = payoff_table(inst)
    anchors = [(table.ideal[0], table.nadir[1]), (table.nadir[0], table.ideal[1])]
    front = sweep(inst, EpsConfig(n=2))
    for p in front.points:
        assert any(p == pytest.approx(a) for a in anchors)


def test_caps_respected_on_tradeoff_unit():
    inst = tradeoff_unit_instance()
    front = sweep(inst, EpsConfig(n=11))
    assert len(front) == 11
    for e in front:
        assert evaluate_emissions(inst, e.solution).total <= e.epsilon + 1e-6
        assert e.f1 == pytest.approx(evaluate_cost(inst, e.solution).total)


def test_bundled_front_feasible_and_nondominated():
    inst = load_bundled("base")
    front = sweep(inst, EpsConfig(n=20))
    assert len(front) >= 10 and front.exact
    for e in front:
        assert check_feasibility(inst, e.solution, tol=1e-6).feasible
    pts = front.points
    assert not any(dominates(p, q) for p in pts for q in pts)


def test_cost_anchor_on_front():
    inst = load_bundled("tradeoff")
    table = payoff_table(inst)
    front = sweep(inst, EpsConfig(n=5))
    assert front.points[0] == pytest.approx((table.ideal[0], table.nadir[1]))


def test_nested_grids_never_lose_hypervolume():
    inst = load_bundled("tradeoff")
    fronts = [sweep(inst, EpsConfig(n=n)).points for n in (3, 5, 9, 17)]
    ref = tuple(1.1 * v for v in np.max([p for f in fronts for p in f], axis=0))
    hv = [hypervolume(f, ref) for f in fronts]
    assert all(b >= a * (1 - 1e-12) for a, b in zip(hv, hv[1:]))


def test_thread_count_does_not_change_front():
    inst = load_bundled("tradeoff")
    a = sweep(inst, EpsConfig(n=8, threads=1))
    b = sweep(inst, EpsConfig(n=8, threads=4))
    assert a.points == b.points
    assert [e.epsilon for e in a] == [e.epsilon for e in b]


def test_cost_constrained_variant():
    inst = tradeoff_unit_instance()
    front = sweep(inst, EpsConfig(n=6, constrained="f1"))
    assert len(front) >= 2
    for e in front:
        assert e.f1 <= e.epsilon + 1e-6


def test_relaxed_front_is_no_worse():
    inst = load_bundled("base")
    exact = sweep(inst, EpsConfig(n=4))
    relaxed = sweep(inst, EpsConfig(n=4, relaxed=True))
    assert relaxed.metadata["relaxed"] is True
    assert relaxed.points[0][0] <= exact.points[0][0] + 1e-6


def test_infeasible_instance_raises():
    with pytest.raises(ModelInfeasibleError):
        payoff_table(unit_instance(pa=[5.0]))


def test_config_validation():
    with pytest.raises(InvalidParameterError):
        EpsConfig(n=1)
    with pytest.raises(InvalidParameterError):
        EpsConfig(constrained="f3")
