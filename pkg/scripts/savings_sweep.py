"""Recall and sample fraction across a C_alpha grid on subspace instances.

The default grid extends well below 1/16 because, at this scale, larger
constants keep the confidence radius wider than the whole distance spread.

    python3 scripts/savings_sweep.py --n 500 --m 4096 --trials 20 --out sweep.csv
"""

import argparse

from adaptive_knn.harness import ExperimentSpec, emit, run_sweep

DEFAULT_GRID = [2.0**e for e in range(-12, 2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--m", type=int, default=4096)
    ap.add_argument("--p", type=int, default=10)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=float, nargs="+", default=DEFAULT_GRID)
    ap.add_argument("--mode", default="with-replacement", choices=["with-replacement", "without-replacement"])
    ap.add_argument("--out")
    args = ap.parse_args()

    spec = ExperimentSpec(c_alphas=tuple(args.grid), trials=args.trials, n=args.n, m=args.m, p=args.p,
                          k=10, h=10, delta=0.001, sampling_mode=args.mode, seed=args.seed)
    result = run_sweep(spec)
    print(f"{'c_alpha':>10} {'recall':>8} {'fraction':>9} {'q25':>7} {'q75':>7}")
    for s in result.summaries:
        print(f"{s.c_alpha:10.6g} {s.recall_median:8.3f} {s.fraction_median:9.4f} "
              f"{s.fraction_q25:7.4f} {s.fraction_q75:7.4f}")
    if args.out:
        emit(result, args.out, "json" if args.out.endswith(".json") else "csv")


if __name__ == "__main__":
    main()
