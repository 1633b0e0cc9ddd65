"""Census of middle-block cases and solver outcomes on random inputs.

Two experiments. First, random Hermitian persymmetric middle blocks are
classified directly, showing how the (a, e, |b - f|) regions split. The
second draws random atomic measures (atom counts cycling 1 through 8),
runs the full solver on their quintic moments, and tallies the case
taken, the support found, and any honest failures.
"""

import argparse
from collections import Counter

import numpy as np

from tcmp.errors import TcmpError
from tcmp.extraction import AtomicMeasure, generate_moments
from tcmp.linalg import MiddleBlock
from tcmp.solver import classify, solve


def random_middle(rng):
    a, e = rng.uniform(0.2, 4.0, 2)
    b, c, d, f = (
        complex(x, y) for x, y in rng.normal(scale=0.8, size=(4, 2))
    )
    full = np.array(
        [
            [a, b, c, d],
            [np.conjugate(b), e, f, c],
            [np.conjugate(c), np.conjugate(f), e, b],
            [np.conjugate(d), np.conjugate(c), np.conjugate(b), a],
        ],
        dtype=complex,
    )
    return MiddleBlock(full=full, a=float(a), b=b, c=c, d=d, e=float(e), f=f)


def random_measure(rng, count):
    atoms = []
    while len(atoms) < count:
        z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        if all(abs(z - w) >= 0.25 for w in atoms):
            atoms.append(z)
    weights = tuple(float(x) for x in rng.uniform(0.5, 1.5, count))
    return AtomicMeasure(tuple(atoms), weights)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--blocks", type=int, default=20000)
    ap.add_argument("--measures", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    tally = Counter(
        classify(random_middle(rng)).value for _ in range(args.blocks)
    )
    print(f"classification of {args.blocks} random middle blocks:")
    for label, n in tally.most_common():
        print(f"  {label:<20} {n:>7}  ({100.0 * n / args.blocks:.2f}%)")

    print(f"\nsolver outcomes on {args.measures} random measures:")
    outcomes = Counter()
    for k in range(args.measures):
        count = k % 8 + 1
        mu = random_measure(rng, count)
        seq = generate_moments(mu, 5)
        try:
            solved, report = solve(seq)
        except TcmpError as exc:
            outcomes[f"{count} atoms -> {type(exc).__name__}"] += 1
            print(f"  {count} atoms: {type(exc).__name__}: {exc}")
            continue
        note = f" ({'; '.join(report.notes)})" if report.notes else ""
        outcomes[f"{count} atoms -> {report.case.value}"] += 1
        print(
            f"  {count} atoms: {report.case.value}, support "
            f"{report.achieved_support}, residual "
            f"{report.max_moment_residual:.1e}{note}"
        )

    print("\nsummary:")
    for key, n in sorted(outcomes.items()):
        print(f"  {key}: {n}")


if __name__ == "__main__":
    main()
