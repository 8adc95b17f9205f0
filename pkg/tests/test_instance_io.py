import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greenloop import (FrontEntry, GeneratorSpec, InstanceValidationError, ParetoFront, build_milp,
                       generate, instance_hash, load_bundled, solve_lp)
from greenloop.errors import FrontFormatError, GenerationError, SchemaVersionError
from greenloop.instance_io import (DEFAULT_RANGES, bundled_text, dumps_front, dumps_instance, front_to_csv,
                                   instance_to_document, load_front, load_instance, loads_front,
                                   read_instance, read_provenance, save_front, save_instance)

from builders import random_instance, unit_instance, unit_solution

SEEDS = settings(max_examples=120, deadline=None, derandomize=True)


def _doc():
    return json.loads(bundled_text("base"))


def test_bundled_case_dimensions():
    inst = load_bundled("base")
    d = inst.dims
    assert (d["F"], d["W"], d["C"], d["I"]) == (2, 2, 2, 2)
    assert inst.t == 7.0 and inst.currency == "£"
    assert _doc()["provenance"].startswith("synthetic")


def test_tradeoff_variant_has_two_options():
    inst = load_bundled("tradeoff")
    assert inst.dims["TF"] == 2 and inst.dims["TW"] == 2


def test_bad_fraction_names_key():
    doc = _doc()
    doc["parameters"]["hd"] = 1.3
    with pytest.raises(InstanceValidationError) as err:
        load_instance(json.dumps(doc))
    assert "hd" in err.value.key and "hd" in str(err.value)


def test_negative_capacity_names_key():
    doc = _doc()
    doc["parameters"]["pa"][0] = -5
    with pytest.raises(InstanceValidationError) as err:
        load_instance(json.dumps(doc))
    assert err.value.key == "parameters.pa"


@pytest.mark.parametrize("mutate,key", [
    (lambda d: d["parameters"].update(bogus=1), "parameters.bogus"),
    (lambda d: d.update(extra=1), "extra"),
    (lambda d: d["parameters"].pop("q"), "parameters.q"),
    (lambda d: d["parameters"].update(ta=[[1.0]]), "parameters.ta"),
    (lambda d: d["dimensions"].update(F=0), "dimensions.F"),
    (lambda d: d["parameters"].update({"lambda": "x"}), "parameters.lambda"),
])
def test_document_errors_name_the_key(mutate, key):
    doc = _doc()
    mutate(doc)
    with pytest.raises(InstanceValidationError) as err:
        load_instance(json.dumps(doc))
    assert err.value.key == key


def test_schema_version_checked():
    doc = _doc()
    doc["schema_version"] = 99
    with pytest.raises(SchemaVersionError):
        load_instance(json.dumps(doc))


def test_parse_error():
    with pytest.raises(InstanceValidationError):
        load_instance("{not json")


def test_missing_gc_defaults_to_zero():
    doc = _doc()
    del doc["parameters"]["gc"]
    del doc["parameters"]["t"]
    inst = load_instance(json.dumps(doc))
    assert np.all(inst.gc == 0) and inst.t == 7.0


def test_save_load_round_trip(tmp_path):
    inst = load_bundled("tradeoff")
    path = tmp_path / "case.json"
    save_instance(inst, path, provenance="copied")
    assert read_instance(path) == inst
    assert read_provenance(path) == "copied"


def test_hash_ignores_provenance_but_not_values():
    inst = unit_instance()
    assert instance_hash(inst) == instance_hash(load_instance(dumps_instance(inst, "elsewhere")))
    assert instance_hash(inst) != instance_hash(unit_instance(q=[11.0]))
    assert len(instance_hash(inst)) == 64


def _front(inst, points):
    sol = unit_solution()
    entries = [FrontEntry(a, b, sol, "test", epsilon=0.1 * k, proven=k % 2 == 0)
               for k, (a, b) in enumerate(points)]
    return ParetoFront.from_entries(entries, instance_hash(inst), {"note": "x", "nested": {"a": [1, 2]}})


def test_empty_front_round_trip(tmp_path):
    f = ParetoFront.from_entries([], instance_hash(unit_instance()))
    path = tmp_path / "front.json"
    save_front(f, path)
    back = load_front(path)
    assert len(back) == 0 and back.instance_hash == f.instance_hash


def test_front_round_trip_full_precision():
    inst = unit_instance()
    f = _front(inst, [(0.1 + 0.2, 3.0000000000000004), (1 / 3, 2.0)])
    back = loads_front(dumps_front(f))
    assert back.points == f.points
    assert back.metadata == f.metadata and back.exact == f.exact
    assert [e.epsilon for e in back] == [e.epsilon for e in f]
    assert [e.proven for e in back] == [e.proven for e in f]
    assert all(a.solution == b.solution for a, b in zip(back, f))


def test_corrupted_hash_names_field():
    doc = json.loads(dumps_front(_front(unit_instance(), [(1, 2)])))
    doc["instance_hash"] = "zz" + doc["instance_hash"][2:]
    with pytest.raises(FrontFormatError) as err:
        loads_front(json.dumps(doc))
    assert err.value.key == "instance_hash"


def test_front_csv_header():
    text = front_to_csv(_front(unit_instance(), [(1, 2), (2, 1)]))
    lines = text.splitlines()
    assert lines[0] == "f1,f2,method,epsilon_or_gen,proven"
    assert len(lines) == 3


# --- generator ------------------------------------------------------------------

def test_generator_deterministic():
    spec = GeneratorSpec(seed=42)
    assert generate(spec) == generate(spec)
    assert generate(spec) != generate(GeneratorSpec(seed=43))


@pytest.mark.parametrize("seed", range(10))
def test_generator_output_is_lp_feasible(seed):
    inst = generate(GeneratorSpec(seed=seed, margin=1.5))
    assert solve_lp(build_milp(inst, "cost", relaxed=True)).optimal
    assert load_instance(dumps_instance(inst)) == inst


def test_collapsed_ranges_give_unit_instance():
    unit = unit_instance()
    ranges = {}
    for key in DEFAULT_RANGES:
        value = getattr(unit, key)
        v = float(np.ravel(value)[0]) if isinstance(value, np.ndarray) else float(value)
        ranges[key] = (v, v)
    inst = generate(GeneratorSpec(seed=0, dims=(1,) * 8, ranges=ranges))
    assert inst == unit


def test_generator_spec_validation():
    with pytest.raises(GenerationError):
        GeneratorSpec(seed=0, margin=0.5)
    with pytest.raises(GenerationError):
        GeneratorSpec(seed=0, ranges={"q": (5.0, 1.0)})
    with pytest.raises(GenerationError):
        GeneratorSpec(seed=0, dims=(1, 1, 1))


def test_degenerate_ranges_fail_generation():
    with pytest.raises(GenerationError):
        generate(GeneratorSpec(seed=0, ranges={"pa": (0.0, 0.0)}))


# --- round-trip properties ------------------------------------------------------------

@SEEDS
@given(seed=st.integers(0, 2**32 - 1))
def test_instance_round_trip_property(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, include_assembly_emissions=bool(seed % 2), currency="€" if seed % 3 else "£")
    assert load_instance(dumps_instance(inst, f"seed {seed}")) == inst
    assert instance_hash(load_instance(dumps_instance(inst))) == instance_hash(inst)


@SEEDS
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(0, 12))
def test_front_round_trip_property(seed, n):
    rng = np.random.default_rng(seed)
    f1 = np.sort(rng.uniform(0, 1e6, n))
    f2 = np.sort(rng.uniform(0, 1e6, n))[::-1]
    f = _front(unit_instance(), list(zip(f1, f2)))
    back = loads_front(dumps_front(f))
    assert back.points == f.points
    assert dumps_front(back) == dumps_front(f)
