"""Sweep the decay rate of map's list type and compare the measured output
distance with the bound 1/(1-r) inferred for the mapped function.

    python3 scripts/fix_bound_sweep.py --len 10 --delta 1
"""
import argparse

from metricfuzz.extreal import format_ext
from metricfuzz.harness import check_fix_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--len", type=int, default=10, dest="list_len")
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--rates", type=float, nargs="+", default=[0.1, 0.25, 0.5, 0.75, 0.9, 0.99])
    args = ap.parse_args()

    print(f"{'r':>6} {'inferred':>20} {'output':>20} {'bound':>20} {'ratio':>8}  holds")
    ok = True
    for r in args.rates:
        rep = check_fix_bound(r, args.list_len, args.delta)
        out, bound = rep.output_distance.value, rep.bound
        ratio = float(out) / float(bound) if float(bound) else 0.0
        print(f"{r:>6} {format_ext(rep.inferred_sensitivity):>20} {float(out):>20.15g} "
              f"{format_ext(bound):>20} {ratio:>8.4f}  {rep.holds}")
        ok &= rep.holds
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
