"""Acceptance criteria; pytest prints one PASS/FAIL line per criterion.

Run alone with ``python3 tests/test_acceptance.py``.
"""
import re
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from greenloop import (EpsConfig, GaConfig, GeneratorSpec, check_feasibility, evaluate_cost, evaluate_emissions,
                       evolve, generate, hypervolume, load_bundled, solve_lp, sweep)
from greenloop.cli import main
from greenloop.oracle import cross_check
from greenloop.pareto import reference_point

from builders import unit_instance, unit_solution
from lp_checks import complementary_slackness_residual, dual_objective, random_feasible_lp
from oracles import unit_network

HERE = Path(__file__).parent


def generated_cases(count=10):
    rng = np.random.default_rng(7)
    cases = []
    for seed in range(count):
        f, w, c, i = (int(v) for v in rng.integers(1, 3, size=4))
        techs = tuple(int(v) for v in rng.integers(1, 3, size=4))
        cases.append(generate(GeneratorSpec(seed=seed, dims=(f, w, c, i) + techs)))
    return cases


def test_criterion_1_oracle_equivalence():
    start = time.perf_counter()
    cases = [load_bundled("base")] + generated_cases()
    assert len({(d["F"], d["W"], d["C"], d["I"]) for d in (c.dims for c in cases)}) > 1
    for inst in cases:
        d = inst.dims
        assert max(d["F"], d["W"], d["C"], d["I"]) <= 2 and d["F"] + d["W"] + d["I"] <= 6
        rows = cross_check(inst, n_caps=5)
        capped = [r for r in rows if r.check.startswith("cost | f2")]
        assert len(capped) == 5
        bad = [(r.check, r.solver, r.oracle) for r in rows if not r.ok(1e-6)]
        assert not bad, bad
    assert time.perf_counter() - start < 60


def test_criterion_2_lp_soundness():
    rng = np.random.default_rng(2)
    for _ in range(20):
        problem = random_feasible_lp(rng, max_vars=20, max_rows=15)
        assert problem.c.size <= 20
        res = solve_lp(problem)
        assert res.optimal
        assert abs(res.objective - dual_objective(problem, res)) <= 1e-8
        assert complementary_slackness_residual(problem, res) <= 1e-6


def test_criterion_3_eps_constraint_correctness():
    start = time.perf_counter()
    inst = load_bundled("tradeoff")
    front = sweep(inst, EpsConfig(n=20))
    assert len(front) >= 2
    for e in front:
        assert check_feasibility(inst, e.solution, 1e-6).feasible
        assert e.f2 <= e.epsilon + 1e-6
    f1 = [p[0] for p in front.points]
    f2 = [p[1] for p in front.points]
    assert all(a <= b for a, b in zip(f1, f1[1:]))
    assert all(a > b for a, b in zip(f2, f2[1:]))
    assert time.perf_counter() - start < 10


def test_criterion_4_method_agreement():
    inst = load_bundled("tradeoff")
    exact = sweep(inst, EpsConfig(n=20))
    start = time.perf_counter()
    ga = evolve(inst, GaConfig(seed=1))
    elapsed = time.perf_counter() - start
    assert len(ga) > 0
    for e in ga:
        assert check_feasibility(inst, e.solution, 1e-6).feasible
    ref = reference_point(exact.points, ga.points)
    assert hypervolume(ga.points, ref) >= 0.95 * hypervolume(exact.points, ref)
    assert elapsed < 30


def test_criterion_5_evaluator_exactness():
    p, s = unit_network.unit_parameters(), unit_network.unit_solution()
    cost = unit_network.cost(p, s)
    plain = unit_network.emissions(p, s)
    assembly = unit_network.emissions(p, s, include_assembly=True)
    assert (cost["total"], plain["total"], assembly["total"]) == (348, 46, 56)
    sol = unit_solution()
    assert evaluate_cost(unit_instance(), sol).total == cost["total"]
    assert evaluate_emissions(unit_instance(), sol).total == plain["total"]
    assert evaluate_emissions(unit_instance(include_assembly_emissions=True), sol).total == assembly["total"]


def test_criterion_6_determinism(tmp_path, monkeypatch):
    monkeypatch.delenv("GREENLOOP_OUTPUT_DIR", raising=False)
    for seed in (1, 2, 3):
        outputs = []
        for threads in (1, 4):
            for run in (0, 1):
                out = tmp_path / f"s{seed}-t{threads}-r{run}.json"
                code = main(["solve", "ga", "bundled:base", "--seed", str(seed), "--threads", str(threads),
                             "--out", str(out)])
                assert code == 0
                outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] and outputs[2] == outputs[3]
        assert outputs[0] == outputs[2]


INVARIANT_TESTS = [
    "test_pareto.py::test_filter_idempotent",
    "test_pareto.py::test_hypervolume_monotone",
    "test_model.py::test_cost_scales_linearly",
    "test_model.py::test_emissions_scale_linearly",
    "test_model.py::test_higher_failure_rate_lowers_warehouse_terms",
    "test_instance_io.py::test_instance_round_trip_property",
    "test_instance_io.py::test_front_round_trip_property",
]


def test_criterion_7_invariant_suites():
    cmd = [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", "--hypothesis-show-statistics"]
    proc = subprocess.run(cmd + [str(HERE / t) for t in INVARIANT_TESTS], cwd=HERE.parent,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout[-3000:]
    assert f"{len(INVARIANT_TESTS)} passed" in proc.stdout
    per_test = re.split(r"\n(?=\S+::test_)", proc.stdout)
    for name in INVARIANT_TESTS:
        block = next(b for b in per_test if name.split("::")[1] in b.splitlines()[0])
        counts = [int(n) for n in re.findall(r"(\d+) passing examples", block)]
        assert sum(counts) >= 100, (name, counts)
        assert "failing examples, " in block and not re.search(r"[1-9]\d* failing examples", block)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
