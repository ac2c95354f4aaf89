import random

import pytest

from metricfuzz import corpus
from metricfuzz import syntax as S
from metricfuzz.checker import check_program
from metricfuzz.evaluator import FuelExhausted, Stuck, Terminated, apply_value, evaluate, run_program
from metricfuzz.generate import GenConfig, gen_value, list_elements, make_list
from metricfuzz.parser import parse_program, parse_term

HARNESS_PROGRAMS = [
    p.stem for p in corpus.accepted()
    if not any(S.mentions_lolli(corpus.load(p.stem).typedefs, t)
               for t in corpus.load(p.stem).freevars.values())
]


def run(src, fuel=1000, env=None, phi=None):
    return evaluate(phi or {}, env or {}, parse_term(src, phi), fuel)


def test_beta():
    out = run("(fun (x : real) => x) 3", 100)
    assert isinstance(out, Terminated) and out.value == S.RealV(3.0)


def test_let_pair():
    out = run("let (x, y) = (1, 2) in x + y", 100)
    assert out.value == S.RealV(3.0)


def test_infinite_fix_exhausts():
    out = run("(fix[inf] f (x : unit) : unit => f x) ()", 1000)
    assert out == FuelExhausted(1000)


def test_map_increment_fixture():
    prog = corpus.load("map_inc")
    out = run_program(prog, {"l": make_list([1, 2], 0.5)}, 1000)
    assert isinstance(out, Terminated)
    assert list_elements(out.value) == [2.0, 3.0]


def test_closed_map_applied():
    prog = corpus.load("map")
    phi = prog.typedefs
    inc = run("fun (x : real) => x + 1")
    box = S.BoxV(inc.value)
    fn = evaluate(phi, {}, prog.main, 100)
    m = apply_value(phi, fn.value, box, 100)
    out = apply_value(phi, m.value, make_list([1, 2], 0.5), 1000)
    assert list_elements(out.value) == [2.0, 3.0]


def test_each_rule_costs_one_unit():
    assert run("1").fuel_used == 1
    assert run("1 + 2").fuel_used == 3
    assert run("(fun (x : real) => x) 3").fuel_used == 4
    assert run("1", fuel=0) == FuelExhausted(0)


def test_fuel_exhaustion_mid_run():
    assert run("1 + 2", fuel=2) == FuelExhausted(2)


def test_stuck_on_ill_shaped_redexes():
    assert isinstance(run("fst 1"), Stuck)
    assert isinstance(run("1 2"), Stuck)
    assert isinstance(run("() + 1"), Stuck)
    assert isinstance(run("unfold 1"), Stuck)
    assert isinstance(run("let !x = 1 in x"), Stuck)
    assert isinstance(run("y"), Stuck)


def test_case_evaluates_one_branch():
    src = "case inl[real] () of inl u => 5 | inr a => (fix[inf] f (x : unit) : real => f x) ()"
    assert run(src).value == S.RealV(5.0)


def test_closures_capture_only_free_variables():
    out = evaluate({}, {"x": S.RealV(1.0), "junk": S.RealV(9.0)},
                   parse_term("fun (y : real) => x + y"), 10)
    assert dict(out.value.captured) == {"x": S.RealV(1.0)}


def test_recursive_closure_refers_to_itself():
    src = """
    type rlist = unit + real * rlist
    var l : rlist
    (fix[inf] len (k : rlist) : real =>
      case unfold k of inl u => 0 | inr p => let (x, rest) = p in 1 + len rest) l
    """
    prog = parse_program(src)
    phi = prog.typedefs
    lst = S.FoldV(S.InlV(S.UnitV()))
    for x in range(3):
        lst = S.FoldV(S.InrV(S.TensorV(S.RealV(float(x)), lst)))
    assert run_program(prog, {"l": lst}, 1000).value == S.RealV(3.0)


def test_deep_recursion_does_not_use_the_host_stack():
    prog = corpus.load("list_sum")
    lst = S.FoldV(S.InlV(S.UnitV()))
    for x in range(20_000):
        lst = S.FoldV(S.InrV(S.TensorV(S.RealV(1.0), lst)))
    out = run_program(prog, {"l": lst}, 10_000_000)
    assert out.value == S.RealV(20_000.0)


# ---- properties over the corpus ------------------------------------------

def _inputs(prog, seed):
    rng = random.Random(seed)
    return {x: gen_value(prog.typedefs, t, rng, GenConfig()) for x, t in prog.freevars.items()}


@pytest.mark.parametrize("name", HARNESS_PROGRAMS)
def test_determinism(name):
    prog = corpus.load(name)
    for seed in range(20):
        env = _inputs(prog, seed)
        assert run_program(prog, env, 3000) == run_program(prog, env, 3000)


@pytest.mark.parametrize("name", HARNESS_PROGRAMS)
def test_fuel_monotonicity(name):
    prog = corpus.load(name)
    for seed in range(20):
        env = _inputs(prog, seed)
        out = run_program(prog, env, 3000)
        if isinstance(out, FuelExhausted):
            assert isinstance(run_program(prog, env, 300), FuelExhausted)
            continue
        n = out.fuel_used
        assert isinstance(run_program(prog, env, n - 1), FuelExhausted)
        for more in (n, n + 1, 2 * n, n + 1000):
            assert run_program(prog, env, more) == Terminated(out.value, n)


@pytest.mark.parametrize("name", HARNESS_PROGRAMS)
def test_no_stuck_and_closed_results(name):
    prog = corpus.load(name)
    check_program(prog)
    for seed in range(50):
        out = run_program(prog, _inputs(prog, seed), 3000)
        assert not isinstance(out, Stuck), out
        if isinstance(out, Terminated):
            assert S.free_vars(S.value_to_term(out.value)) == frozenset()
