"""Typecheck every corpus program and fuzz the first-order ones.

    python3 scripts/run_corpus.py --trials 1000 --seed 0
"""
import argparse
import time
from dataclasses import dataclass

from metricfuzz import corpus
from metricfuzz import syntax as S
from metricfuzz.checker import check_program, declared_sensitivities
from metricfuzz.errors import TypeCheckError
from metricfuzz.extreal import format_ext
from metricfuzz.generate import GenConfig
from metricfuzz.harness import HarnessError, check_metric_preservation, summarize


@dataclass
class Row:
    name: str
    verdict: str
    type: str = ""
    env: str = ""
    passes: int = 0
    violations: int = 0
    inconclusive: int = 0
    seconds: float = 0.0


def run(name: str, cfg: GenConfig) -> Row:
    prog = corpus.load(name)
    try:
        res = check_program(prog)
    except TypeCheckError as exc:
        return Row(name, f"rejected ({type(exc).__name__})")
    env = ", ".join(f"{x}:{format_ext(b.sens)}" for x, b in declared_sensitivities(prog, res).items())
    row = Row(name, "accepted", S.pretty_type(res.type), env or "-")
    start = time.perf_counter()
    try:
        s = summarize(check_metric_preservation(prog, cfg))
    except HarnessError:
        row.verdict = "accepted, not fuzzed (function input)"
        return row
    row.seconds = time.perf_counter() - start
    row.passes, row.violations, row.inconclusive = s.passes, len(s.violations), s.inconclusive
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--delta", type=float, default=1.0)
    args = ap.parse_args()
    cfg = GenConfig(trials=args.trials, seed=args.seed, perturb_delta=args.delta)

    names = [p.stem for p in corpus.accepted() + corpus.rejected()]
    rows = [run(n, cfg) for n in names]
    print(f"{'program':<18} {'pass':>5} {'viol':>5} {'inc':>5} {'secs':>6}  type / env / verdict")
    for r in rows:
        print(f"{r.name:<18} {r.passes:>5} {r.violations:>5} {r.inconclusive:>5} {r.seconds:>6.2f}"
              f"  {r.type or '-'} / {r.env or '-'} / {r.verdict}")
    total = sum(r.violations for r in rows)
    print(f"\ntotal violations: {total}")
    raise SystemExit(1 if total else 0)


if __name__ == "__main__":
    main()
