"""Empirical miss rate of the theory-variant radius against the brute-force oracle."""

import argparse

from adaptive_knn import RunConfig, SubspaceSpec, Variant, brute_force, generate_subspace, recall, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--m", type=int, default=2048)
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--h", type=int, default=10)
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()

    misses, fractions = 0, []
    for t in range(args.trials):
        data, query = generate_subspace(SubspaceSpec(args.n, args.m, args.p, seed=1000 + t))
        rep = run(data, query, RunConfig(k=args.k, h=args.h, delta=args.delta, variant=Variant.THEORY, seed=t))
        misses += recall(rep.result_set, brute_force(data, query, args.k).k_set) < 1.0
        fractions.append(rep.sample_fraction)
    fractions.sort()
    print(f"misses {misses}/{args.trials} (delta {args.delta}); median sample fraction {fractions[len(fractions) // 2]:.4f}")


if __name__ == "__main__":
    main()
