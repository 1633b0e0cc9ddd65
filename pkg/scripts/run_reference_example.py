"""Walk the six-atom reference instance through every solver stage.

The measure is the unit-weight combination of atoms 0, 1, -1, i, -i,
1 + i. Its degree-5 moments are integers, every intermediate object has
a closed form, and the flat case is taken end to end, so the printout
doubles as a worked example of the whole pipeline.
"""

import numpy as np

from tcmp.extraction import AtomicMeasure, generate_moments, verify_measure
from tcmp.linalg import middle_block, psd_check, solve_range_inclusion
from tcmp.moments import (
    build_cross_block,
    build_moment_matrix,
    monomials_up_to,
)
from tcmp.linalg import numeric_rank
from tcmp.solver import classify, predicted_support, solve

ATOMS = (0j, 1 + 0j, -1 + 0j, 1j, -1j, 1 + 1j)
WEIGHTS = (1.0,) * 6


def cfmt(z, nd=6):
    z = complex(z)
    re = 0.0 if abs(z.real) < 1e-12 else z.real
    im = 0.0 if abs(z.imag) < 1e-12 else z.imag
    if im == 0.0:
        return f"{re:.{nd}g}"
    sign = "+" if im >= 0 else "-"
    return f"{re:.{nd}g} {sign} {abs(im):.{nd}g}i"


def main():
    mu = AtomicMeasure(ATOMS, WEIGHTS)
    seq = generate_moments(mu, 5)
    print("atoms:", ", ".join(cfmt(z) for z in ATOMS))
    print(f"degree-5 moment table has {len(seq.as_dict())} entries")
    print(f"  gamma_00 = {cfmt(seq[(0, 0)])}   gamma_12 = {cfmt(seq[(1, 2)])}"
          f"   gamma_23 = {cfmt(seq[(2, 3)])}")

    M2 = build_moment_matrix(seq, 2)
    verdict = psd_check(M2.entries)
    r2 = numeric_rank(M2.entries)
    print(f"\nM(2): rank {r2}, min eigenvalue {verdict.min_eigenvalue:.6f}")

    B = build_cross_block(seq, 2, 3)
    sol = solve_range_inclusion(M2.entries, B)
    print(f"range inclusion residual: {sol.residual:.3e}")

    labels = monomials_up_to(2)
    names = {(0, 0): "1", (0, 1): "z", (1, 0): "zbar",
             (0, 2): "z^2", (1, 1): "zbar z", (2, 0): "zbar^2"}
    for col, head in ((0, "z^3"), (1, "zbar z^2")):
        terms = [
            f"({cfmt(sol.W[k, col])}) {names[(lab.conj_power, lab.power)]}"
            for k, lab in enumerate(labels)
            if abs(sol.W[k, col]) > 1e-9
        ]
        print(f"  {head} = " + " + ".join(terms))

    mid = middle_block(M2, sol.W)
    print("\ncompressed middle block:")
    for row in mid.full:
        print("  [" + "  ".join(f"{cfmt(v, 4):>10}" for v in row) + "]")
    case = classify(mid)
    print(f"case: {case.value}, predicted minimal support "
          f"{predicted_support(case, r2)}")

    solved, report = solve(seq)
    print(f"\nsolved with gamma_33 = {report.gamma33:.6f}")
    print(f"{report.achieved_support} atoms:")
    order = np.argsort([z.real * 10 + z.imag for z in solved.atoms])
    for k in order:
        print(f"  z = {cfmt(solved.atoms[k]):>14}   weight {solved.weights[k]:.9f}")
    print(f"worst relative moment residual: "
          f"{verify_measure(seq, solved):.3e}")


if __name__ == "__main__":
    main()
