"""Randomized checks that well-typed programs do not expand distances.

For a program ``var x1 : t1 ... var xn : tn  e`` with inferred sensitivities
``r1 .. rn`` each trial draws two nearby substitutions, runs ``e`` under
both, and requires

    d(out1, out2) <= sum_i r_i * d(in1_i, in2_i)

(the right side is always exact since declared types are first order). A
run that terminates on one side only, while the inputs are at finite
distance, is also a violation: divergence sits infinitely far from every
value.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

from . import syntax as S
from .checker import check_program, declared_sensitivities
from .evaluator import FuelExhausted, Outcome, Stuck, Terminated, evaluate
from .extreal import ExtReal, format_ext, mul, reciprocal_gap, to_json
from .generate import GenConfig, gen_nearby_pair, gen_value, make_list
from .metrics import DistanceResult, MetricConfig, env_distance, value_distance
from .parser import Program, parse_program, parse_term

PASS = "pass"
VIOLATION = "violation"
INCONCLUSIVE = "inconclusive"


class HarnessError(ValueError):
    """The program does not meet the harness preconditions."""


@dataclass
class TrialReport:
    index: int
    inputs: Tuple[Dict[str, S.Value], Dict[str, S.Value]]
    input_distance: DistanceResult
    outcomes: Tuple[Outcome, Outcome]
    output_distance: Optional[DistanceResult]
    verdict: str
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "inputs": [{x: S.pretty_value(v) for x, v in side.items()} for side in self.inputs],
            "input_distance": self.input_distance.to_json(),
            "outcomes": [_outcome_json(o) for o in self.outcomes],
            "output_distance": None if self.output_distance is None else self.output_distance.to_json(),
            "verdict": self.verdict,
            "reason": self.reason,
        }


def _outcome_json(o: Outcome) -> dict:
    if isinstance(o, Terminated):
        return {"kind": "terminated", "value": S.pretty_value(o.value), "fuel_used": o.fuel_used}
    if isinstance(o, FuelExhausted):
        return {"kind": "fuel_exhausted", "fuel_used": o.fuel_used}
    return {"kind": "stuck", "description": o.description}


def exceeds(out: ExtReal, bound: ExtReal, tolerance: float) -> bool:
    """``out > bound`` beyond a relative tolerance."""
    if bound.is_inf:
        return False
    if out.is_inf:
        return True
    return float(out) > float(bound) * (1.0 + tolerance)


def check_metric_preservation(
    program: Program,
    cfg: GenConfig = GenConfig(),
    unsafe: bool = False,
    metric: Optional[MetricConfig] = None,
) -> List[TrialReport]:
    phi = program.typedefs
    typing = check_program(program, unsafe=unsafe)
    for x, t in program.freevars.items():
        if S.mentions_lolli(phi, t):
            raise HarnessError(f"declared variable '{x}' has higher-order type {S.pretty_type(t)}")
    declared = declared_sensitivities(program, typing)
    metric = metric or MetricConfig(probe_fuel=max(cfg.fuel, 1), rng_seed=cfg.seed)

    reports = []
    for i in range(cfg.trials):
        rng = random.Random(f"{cfg.seed}:{i}")
        s1, s2 = {}, {}
        for x, t in program.freevars.items():
            s1[x], s2[x] = gen_nearby_pair(phi, t, rng, cfg.perturb_delta, cfg)
        din = env_distance(phi, declared, s1, s2, metric)
        assert din.exact, "first-order substitutions have exact distances"
        o1 = evaluate(phi, s1, program.main, cfg.fuel)
        o2 = evaluate(phi, s2, program.main, cfg.fuel)
        dout = None
        if isinstance(o1, Stuck) or isinstance(o2, Stuck):
            verdict, reason = VIOLATION, "evaluation got stuck (checker/evaluator disagreement)"
        elif isinstance(o1, Terminated) and isinstance(o2, Terminated):
            dout = value_distance(phi, typing.type, o1.value, o2.value, metric)
            if exceeds(dout.value, din.value, cfg.tolerance):
                verdict, reason = VIOLATION, "output distance exceeds input distance"
            else:
                verdict, reason = PASS, ""
        elif isinstance(o1, FuelExhausted) and isinstance(o2, FuelExhausted):
            verdict, reason = INCONCLUSIVE, "fuel exhausted on both runs"
        elif din.value.is_inf:
            verdict, reason = PASS, "termination differs but inputs are infinitely apart"
        else:
            verdict, reason = VIOLATION, "termination differs at finite input distance"
        reports.append(TrialReport(i, (s1, s2), din, (o1, o2), dout, verdict, reason))
    return reports


@dataclass
class Summary:
    trials: int
    passes: int
    violations: List[TrialReport]
    inconclusive: int

    @property
    def ok(self) -> bool:
        return not self.violations


def summarize(reports: List[TrialReport]) -> Summary:
    return Summary(
        trials=len(reports),
        passes=sum(r.verdict == PASS for r in reports),
        violations=[r for r in reports if r.verdict == VIOLATION],
        inconclusive=sum(r.verdict == INCONCLUSIVE for r in reports),
    )


def report_json(program_name: str, cfg: GenConfig, reports: List[TrialReport]) -> dict:
    s = summarize(reports)
    config = asdict(cfg)
    config["real_range"] = list(cfg.real_range)
    return {
        "program": program_name,
        "seed": cfg.seed,
        "trials": s.trials,
        "passes": s.passes,
        "violations": [r.to_json() for r in s.violations],
        "inconclusive": s.inconclusive,
        "config": config,
    }


# --------------------------------------------------------------------------
# Fixed-point sensitivity bound

MAP_SOURCE = """\
type dlist = unit + real * ![{r}] dlist
var f : real -o real
fix[{r}] m (l : dlist) : dlist =>
  case unfold l of
    inl u => fold[dlist] (inl[real * ![{r}] dlist] ())
  | inr p => let (x, rest) = p in
      fold[dlist] (inr[unit] (f x, ![{r}] (let !tl = rest in m tl)))
"""


def map_program(r) -> Program:
    """``map f`` over decaying lists, recursion via ``fix[r]``, ``f`` free."""
    return parse_program(MAP_SOURCE.format(r=format_ext(r)))


@dataclass
class FixBoundReport:
    r: ExtReal
    list_len: int
    delta: float
    inferred_sensitivity: ExtReal
    function_distance: DistanceResult
    output_distance: DistanceResult
    bound: ExtReal
    holds: bool

    def to_json(self) -> dict:
        return {
            "r": to_json(self.r),
            "list_len": self.list_len,
            "delta": self.delta,
            "inferred_sensitivity": to_json(self.inferred_sensitivity),
            "function_distance": self.function_distance.to_json(),
            "output_distance": self.output_distance.to_json(),
            "bound": to_json(self.bound),
            "holds": self.holds,
        }


def check_fix_bound(r, list_len: int, delta: float, cfg: GenConfig = GenConfig()) -> FixBoundReport:
    """Compare ``map id l`` with ``map (x + delta) l`` on a list of length
    ``list_len``; their distance must stay below ``delta / (1 - r)``."""
    r = ExtReal(r)
    if not 0 < r < 1:
        # at r = 0 the tail cannot be unboxed, so map does not typecheck
        raise ValueError("the fixed-point bound needs 0 < r < 1")
    if list_len < 0 or delta < 0:
        raise ValueError("list_len and delta must be nonnegative")
    prog = map_program(r)
    phi = prog.typedefs
    typing = check_program(prog)
    sens = S.sens_of(typing.env, "f")

    rng = random.Random(cfg.seed)
    elements = [gen_value(phi, S.REAL, rng, cfg).value for _ in range(list_len)]
    lst = make_list(elements, r)
    fuel = max(cfg.fuel, 64 * (list_len + 1))
    f1 = _closed_value(phi, "fun (x : real) => x")
    f2 = _closed_value(phi, "fun (x : real) => x + d", {"d": S.RealV(float(delta))})
    call = S.App(prog.main, S.Var("l"))
    o1 = evaluate(phi, {"f": f1, "l": lst}, call, fuel)
    o2 = evaluate(phi, {"f": f2, "l": lst}, call, fuel)
    if not (isinstance(o1, Terminated) and isinstance(o2, Terminated)):
        raise RuntimeError(f"map did not terminate within {fuel} steps: {o1!r} / {o2!r}")
    fn_type = S.Lolli(S.REAL, S.REAL)
    fdist = value_distance(phi, fn_type, f1, f2, MetricConfig(rng_seed=cfg.seed))
    dout = value_distance(phi, typing.type.codomain, o1.value, o2.value)
    bound = mul(reciprocal_gap(r), delta)
    holds = not exceeds(dout.value, bound, cfg.tolerance)
    return FixBoundReport(r, list_len, float(delta), sens, fdist, dout, bound, holds)


def _closed_value(phi, source: str, env: Optional[Dict[str, S.Value]] = None) -> S.Value:
    out = evaluate(phi, env or {}, parse_term(source, phi), 16)
    assert isinstance(out, Terminated)
    return out.value

