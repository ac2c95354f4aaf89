import json
import random

import pytest

from metricfuzz import corpus
from metricfuzz import syntax as S
from metricfuzz.checker import type_of_value
from metricfuzz.extreal import INF, ZERO, ExtReal
from metricfuzz.generate import (
    GenConfig, UnsupportedType, decaying_list_type, gen_nearby_pair, gen_value, list_elements,
    make_list,
)
from metricfuzz.harness import (
    INCONCLUSIVE, PASS, VIOLATION, HarnessError, check_fix_bound, check_metric_preservation,
    exceeds, report_json, summarize,
)
from metricfuzz.metrics import env_distance, value_distance
from metricfuzz.parser import parse_program, parse_type

PHI, DLIST = decaying_list_type(0.5)

HARNESS_PROGRAMS = [
    p.stem for p in corpus.accepted()
    if not any(S.mentions_lolli(corpus.load(p.stem).typedefs, t)
               for t in corpus.load(p.stem).freevars.values())
]

MUTANT = "var x : real\n(fun (y : real) => y + y) x\n"


# ---- generators ------------------------------------------------------------

def test_unit_is_always_unit():
    rng = random.Random(0)
    assert all(gen_value({}, S.UNIT, rng) == S.UnitV() for _ in range(20))


def test_tensor_of_reals_in_range():
    rng = random.Random(1)
    for _ in range(100):
        v = gen_value({}, S.Tensor(S.REAL, S.REAL), rng)
        assert isinstance(v, S.TensorV)
        assert all(-8 <= c.value <= 8 for c in (v.left, v.right))


@pytest.mark.parametrize("depth", [0, 1, 3, 6])
def test_lists_respect_the_depth_bound(depth):
    rng = random.Random(depth)
    cfg = GenConfig(max_list_depth=depth + 1)
    for _ in range(100):
        v = gen_value(PHI, DLIST, rng, cfg)
        assert len(list_elements(v)) <= depth
        assert type_of_value(PHI, v) == DLIST


def test_generated_values_recheck():
    rng = random.Random(2)
    phi = {**PHI, "tree": parse_type("real + tree * tree")}
    for src in ["real + unit", "![0.5] (real & real)", "tree", "dlist * unit"]:
        t = parse_type(src)
        for _ in range(50):
            assert type_of_value(phi, gen_value(phi, t, rng)) == t


def test_function_types_are_not_generated():
    with pytest.raises(UnsupportedType):
        gen_value({}, S.Lolli(S.REAL, S.REAL), random.Random(0))


def test_uninhabited_within_budget():
    phi = {"stream": parse_type("real * stream")}
    with pytest.raises(UnsupportedType):
        gen_value(phi, S.Ident("stream"), random.Random(0))


def test_nearby_pairs():
    rng = random.Random(3)
    for _ in range(200):
        a, b = gen_nearby_pair(PHI, DLIST, rng, 0.0)
        assert a == b and value_distance(PHI, DLIST, a, b).value == 0
        x, y = gen_nearby_pair({}, S.REAL, rng, 0.5)
        assert abs(x.value - y.value) <= 0.5
        a, b = gen_nearby_pair(PHI, DLIST, rng, 1.0)
        assert len(list_elements(a)) == len(list_elements(b))


@pytest.mark.parametrize("n", [0, 1, 4, 10])
def test_uniform_perturbation_of_a_decaying_list(n):
    delta = 0.25
    xs = [float(i) for i in range(n)]
    a, b = make_list(xs, 0.5), make_list([x + delta for x in xs], 0.5)
    want = sum(0.5 ** i * delta for i in range(n))
    assert value_distance(PHI, DLIST, a, b).value == want


# ---- metric preservation ---------------------------------------------------

@pytest.mark.parametrize("name", HARNESS_PROGRAMS)
def test_corpus_has_no_violations(name):
    reports = check_metric_preservation(corpus.load(name), GenConfig(trials=200, seed=11))
    s = summarize(reports)
    assert s.ok, [r.to_json() for r in s.violations[:3]]
    for r in reports:
        assert r.input_distance.exact


def test_doubling_is_tight():
    prog = corpus.load("double")
    for r in check_metric_preservation(prog, GenConfig(trials=50)):
        assert r.verdict == PASS
        assert r.output_distance.value == r.input_distance.value


def test_zero_sensitivity_case():
    prog = corpus.load("case_zero")
    assert summarize(check_metric_preservation(prog, GenConfig(trials=100))).ok
    # inputs in different injections are infinitely apart even at sensitivity 0
    declared = {"s": S.Binding(ZERO, parse_type("real + unit"))}
    far = env_distance({}, declared, {"s": S.InlV(S.RealV(0.0))}, {"s": S.InrV(S.UnitV())})
    assert far.value == INF
    assert not exceeds(INF, far.value, 1e-9)


def test_divergence_on_both_sides_is_inconclusive():
    reports = check_metric_preservation(corpus.load("loop"), GenConfig(trials=5, fuel=200))
    assert {r.verdict for r in reports} == {INCONCLUSIVE}


def test_reproducible():
    prog = corpus.load("map_inc")
    cfg = GenConfig(trials=50, seed=5)
    a = [r.to_json() for r in check_metric_preservation(prog, cfg)]
    b = [r.to_json() for r in check_metric_preservation(prog, cfg)]
    c = [r.to_json() for r in check_metric_preservation(prog, GenConfig(trials=50, seed=6))]
    assert a == b and a != c


def test_mutant_is_caught():
    prog = parse_program(MUTANT)
    reports = check_metric_preservation(prog, GenConfig(trials=100, perturb_delta=1.0), unsafe=True)
    assert any(r.verdict == VIOLATION for r in reports)


def test_tripling_mutant_is_caught():
    src = "var x : ![2] real\nlet !y = x in (fun (z : real) => z + z + z) y\n"
    reports = check_metric_preservation(parse_program(src), GenConfig(trials=100), unsafe=True)
    assert any(r.verdict == VIOLATION for r in reports)


def test_higher_order_declarations_are_refused():
    with pytest.raises(HarnessError):
        check_metric_preservation(corpus.load("map_open"), GenConfig(trials=1))


def test_exceeds_uses_relative_tolerance():
    assert not exceeds(ExtReal(1 + 1e-12), ExtReal(1), 1e-9)
    assert exceeds(ExtReal(1.01), ExtReal(1), 1e-9)
    assert exceeds(INF, ExtReal(1e300), 1e-9)
    assert not exceeds(INF, INF, 0)


def test_report_schema():
    prog = parse_program(MUTANT)
    cfg = GenConfig(trials=20, seed=3)
    rep = report_json("mutant.fuzz", cfg, check_metric_preservation(prog, cfg, unsafe=True))
    assert set(rep) == {"program", "seed", "trials", "passes", "violations", "inconclusive", "config"}
    assert rep["trials"] == 20 and rep["seed"] == 3
    assert rep["passes"] + len(rep["violations"]) + rep["inconclusive"] == 20
    v = rep["violations"][0]
    assert v["verdict"] == VIOLATION
    assert {"inputs", "input_distance", "outcomes", "output_distance", "reason"} <= set(v)
    json.dumps(rep)


# ---- fixed-point bound -------------------------------------------------------

def test_fix_bound_half():
    rep = check_fix_bound(0.5, 10, 1.0)
    assert rep.inferred_sensitivity == 2
    assert rep.output_distance.value == 2 - 2 ** -9
    assert rep.bound == 2 and rep.holds


def test_fix_bound_point_nine():
    rep = check_fix_bound(0.9, 50, 1.0)
    assert float(rep.output_distance.value) == pytest.approx(sum(0.9 ** i for i in range(50)))
    assert float(rep.bound) == pytest.approx(10) and rep.holds


def test_fix_bound_zero_delta():
    assert check_fix_bound(0.5, 10, 0.0).output_distance.value == 0


def test_fix_bound_function_distance_is_delta():
    rep = check_fix_bound(0.75, 5, 0.5)
    assert rep.function_distance.value == 0.5


def test_fix_bound_rejects_bad_r():
    for r in (0, 1, 2):
        with pytest.raises(ValueError):
            check_fix_bound(r, 3, 1.0)
