import numpy as np
import pytest

from greenloop import (EnumerationBoundError, EpsConfig, GaConfig, GeneratorSpec, brute_force_front,
                       brute_force_milp, build_milp, evolve, generate, load_bundled, solve_milp, sweep)
from greenloop.oracle import cross_check

from builders import tradeoff_unit_instance, unit_instance


def test_bundled_enumeration_matches_milp():
    inst = load_bundled("base")
    res = brute_force_milp(inst, "cost")
    assert len(res.log) == 64
    milp = solve_milp(build_milp(inst, "cost"))
    assert res.objective == pytest.approx(milp.objective, rel=1e-6)
    feasible = [obj for _, status, obj in res.log if status == "optimal"]
    assert res.objective == min(feasible)


def test_free_opening_puts_all_open_among_optima():
    inst = unit_instance(ra=[0.0], rb=[0.0], rd=[0.0])
    res = brute_force_milp(inst, "cost")
    assert (1, 1, 1) in res.optima


def test_empty_problem_prefers_all_closed():
    inst = unit_instance(q=[0.0], hd=0.0)
    res = brute_force_milp(inst, "cost")
    assert res.objective == 0.0
    assert res.indicators == (0, 0, 0)


def test_infeasible_instance_reports_no_configuration():
    res = brute_force_milp(unit_instance(pa=[1.0]), "cost")
    assert not res.feasible and res.optima == []


def test_enumeration_bound_enforced():
    inst = generate(GeneratorSpec(seed=0, dims=(6, 6, 1, 5, 1, 1, 1, 1)))
    with pytest.raises(EnumerationBoundError, match="2\\^17"):
        brute_force_milp(inst)


def test_threads_do_not_change_result():
    inst = load_bundled("tradeoff")
    a = brute_force_milp(inst, "emissions", threads=1)
    b = brute_force_milp(inst, "emissions", threads=4)
    assert a.objective == b.objective and a.indicators == b.indicators


def test_reference_front_matches_sweep():
    inst = load_bundled("base")
    exact = sweep(inst, EpsConfig(n=20)).points
    ref = brute_force_front(inst, 20).points
    assert len(exact) == len(ref)
    np.testing.assert_allclose(np.array(exact), np.array(ref), rtol=1e-6)


def test_two_point_reference_front():
    inst = tradeoff_unit_instance()
    pts = np.array(brute_force_front(inst, 2).points)
    np.testing.assert_allclose(pts, [[348.0, 136.0], [438.0, 46.0]], rtol=1e-6)


def test_tradeoff_reference_front_has_spread():
    assert len(set(brute_force_front(load_bundled("tradeoff"), 6).points)) >= 2


def test_oracle_lower_bounds_ga_points():
    inst = load_bundled("tradeoff")
    best_cost = brute_force_milp(inst, "cost").objective
    best_emis = brute_force_milp(inst, "emissions").objective
    front = evolve(inst, GaConfig(seed=3, population_size=30, generations=30))
    for e in front:
        assert e.f1 >= best_cost * (1 - 1e-6) and e.f2 >= best_emis * (1 - 1e-6)


def test_cross_check_rows():
    rows = cross_check(unit_instance(), n_caps=3, grid_points=3)
    assert [r.check for r in rows[:2]] == ["cost", "emissions"]
    assert all(r.ok() for r in rows)
    assert len(rows) == 2 + 3 + 1 + 2 * int(rows[5].oracle)
