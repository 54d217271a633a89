"""Mean heap element moves per iteration as n grows, at equal iterations per arm."""

import argparse

import numpy as np

from adaptive_knn import AdaptiveKNN, Dataset, Query, RunConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--m", type=int, default=512)
    ap.add_argument("--per-arm", type=int, default=10)
    args = ap.parse_args()

    rng = np.random.default_rng(1)
    for n in args.sizes:
        data = Dataset(rng.uniform(-0.5, 0.5, (n, args.m)))
        query = Query(rng.uniform(-0.5, 0.5, args.m))
        search = AdaptiveKNN(data, query, RunConfig(k=10, h=10, seed=1))
        search.advance(args.per_arm * n)
        rep = search.report()
        print(f"n={n:>6}  iterations={rep.iterations:>8}  mean moves={rep.heap_moves / rep.iterations:7.2f}"
              f"  worst={rep.max_step_moves}  log2(n)={np.log2(n):5.2f}")


if __name__ == "__main__":
    main()
