"""Command line interface.

Subcommands: check (structural feasibility of M(2) and the degree-3 cross
block), classify (case label and predicted minimal support), solve
(construct a minimal atomic representing measure), verify (check a measure
against a moment file), generate (moments of a random or specified atomic
measure). Exit codes: 0 success, 1 invalid input, 2 numerical failure,
3 unsupported case.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import (
    BadAtomSpec,
    DegreeTooLow,
    NotPsd,
    NumericalError,
    RangeNotIncluded,
    TcmpError,
    UnsupportedCase,
    ValidationError,
)
from .extraction import AtomicMeasure, generate_moments, verify_measure
from .io import load_measure, load_moments, save_measure, save_moments
from .linalg import middle_block, numeric_rank, psd_check, solve_range_inclusion
from .moments import build_cross_block, build_moment_matrix
from .solver import (
    CaseLabel,
    SolverConfig,
    classify,
    predicted_support,
    solve,
)


def _cfmt(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.9g} {sign} {abs(z.imag):.9g}i"


def _require_quintic(seq) -> None:
    if seq.degree != 5:
        raise DegreeTooLow(
            f"expected degree-5 moment data, file declares degree {seq.degree}"
        )


def _feasibility(seq, tol_psd: float, tol_rank: float, tol_range: float):
    """Shared front end of check and classify; prints as it goes."""
    M2 = build_moment_matrix(seq, 2)
    psd = psd_check(M2.entries, tol_psd)
    rank = numeric_rank(M2.entries, tol_rank)
    print(f"M(2) rank: {rank}")
    print(
        f"M(2) PSD: {'yes' if psd.is_psd else 'no'} "
        f"(min eigenvalue {psd.min_eigenvalue:.3e})"
    )
    if not psd.is_psd:
        raise NotPsd(f"M(2) has eigenvalue {psd.min_eigenvalue:.6e}")
    B = build_cross_block(seq, 2, 3)
    try:
        sol = solve_range_inclusion(M2.entries, B, tol_range)
    except RangeNotIncluded as exc:
        print(f"range inclusion: no (residual {exc.residual:.3e})")
        raise
    print(f"range inclusion: yes (residual {sol.residual:.3e})")
    middle = middle_block(M2, sol.W)
    return M2, rank, middle


def cmd_check(args) -> int:
    seq = load_moments(args.input)
    _require_quintic(seq)
    _, _, middle = _feasibility(seq, args.tol_psd, args.tol_rank, args.tol_range)
    print("middle block: Hermitian persymmetric")
    print(f"  a = {middle.a:.12g}")
    print(f"  b = {_cfmt(middle.b)}")
    print(f"  c = {_cfmt(middle.c)}")
    print(f"  d = {_cfmt(middle.d)}")
    print(f"  e = {middle.e:.12g}")
    print(f"  f = {_cfmt(middle.f)}")
    print("feasible: yes")
    return 0


def cmd_classify(args) -> int:
    seq = load_moments(args.input)
    _require_quintic(seq)
    _, rank, middle = _feasibility(
        seq, args.tol_psd, args.tol_rank, args.tol_range
    )
    case = classify(middle, args.tol_case)
    print(f"case: {case.value}")
    print(f"predicted minimal support: {predicted_support(case, rank)}")
    if case is CaseLabel.UNSUPPORTED:
        print("this family is outside the certified constructions")
        return 3
    return 0


def cmd_solve(args) -> int:
    seq = load_moments(args.input)
    _require_quintic(seq)
    config = SolverConfig(
        tol_psd=args.tol_psd,
        tol_rank=args.tol_rank,
        tol_range=args.tol_range,
        gamma33_override=args.gamma33,
    )
    mu, report = solve(seq, config)
    print(f"case: {report.case.value}")
    ranks = f"rank M(2): {report.rank_M2}"
    if report.rank_M3 is not None:
        ranks += f"   rank M(3): {report.rank_M3}"
    if report.rank_M4 is not None:
        ranks += f"   rank M(4): {report.rank_M4}"
    print(ranks)
    if report.gamma33 is not None:
        print(f"gamma_33: {report.gamma33:.12g}")
    if report.alpha is not None:
        print(f"alpha: {_cfmt(report.alpha)}")
    print(
        f"support: {report.achieved_support} atoms "
        f"(predicted {report.predicted_support})"
    )
    print(f"max moment residual: {report.max_moment_residual:.3e}")
    for note in report.notes:
        print(f"note: {note}")
    print("atoms:")
    for z, w in zip(mu.atoms, mu.weights):
        print(f"  z = {_cfmt(z)}   weight {w:.9g}")
    if args.output:
        save_measure(mu, args.output)
        print(f"measure written to {args.output}")
    return 0


def cmd_verify(args) -> int:
    seq = load_moments(args.moments)
    mu = load_measure(args.measure)
    residual = verify_measure(seq, mu)
    print(f"atoms: {len(mu)}")
    print(f"total mass: {mu.mass:.12g}")
    print(f"max relative residual: {residual:.3e}")
    ok = residual <= args.tol
    print(f"verified: {'yes' if ok else 'no'} (tolerance {args.tol:.1e})")
    return 0 if ok else 2


def _parse_atom(spec: str) -> tuple[complex, float]:
    parts = spec.split(",")
    if len(parts) != 3:
        raise BadAtomSpec(
            f"atom {spec!r} must be re,im,weight (three comma-separated numbers)"
        )
    try:
        re, im, w = (float(p) for p in parts)
    except ValueError as exc:
        raise BadAtomSpec(f"atom {spec!r} has a non-numeric field") from exc
    return complex(re, im), w


def _random_measure(rng, count: int, min_sep: float = 0.2) -> AtomicMeasure:
    """Atoms uniform on the square [-2, 2]^2 (kept min_sep apart so the
    instance stays in general position), weights log-uniform on [0.1, 10]."""
    atoms: list[complex] = []
    attempts = 0
    while len(atoms) < count:
        z = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        if all(abs(z - other) >= min_sep for other in atoms):
            atoms.append(z)
        attempts += 1
        if attempts > 10000:
            raise BadAtomSpec(
                f"could not place {count} atoms {min_sep} apart; lower --count"
            )
    weights = [float(10.0 ** rng.uniform(-1.0, 1.0)) for _ in atoms]
    return AtomicMeasure(tuple(atoms), tuple(weights))


def cmd_generate(args) -> int:
    if args.atom:
        pairs = [_parse_atom(spec) for spec in args.atom]
        try:
            mu = AtomicMeasure(
                tuple(z for z, _ in pairs), tuple(w for _, w in pairs)
            )
        except ValueError as exc:
            raise BadAtomSpec(str(exc)) from exc
    else:
        rng = np.random.default_rng(args.seed)
        mu = _random_measure(rng, args.count)
    seq = generate_moments(mu, args.degree)
    save_moments(seq, args.output)
    print(
        f"wrote degree-{args.degree} moments of {len(mu)} atoms to {args.output}"
    )
    if args.measure_output:
        save_measure(mu, args.measure_output)
        print(f"generating measure written to {args.measure_output}")
    return 0


def _add_tol_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-psd", type=float, default=1e-8)
    p.add_argument("--tol-rank", type=float, default=1e-8)
    p.add_argument("--tol-range", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tcmp",
        description="Minimal representing measures for quintic complex "
        "moment data.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="structural feasibility report")
    p.add_argument("input", help="moment file (JSON)")
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("classify", help="case label and predicted support")
    p.add_argument("input", help="moment file (JSON)")
    _add_tol_flags(p)
    p.add_argument("--tol-case", type=float, default=1e-8)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("solve", help="construct a minimal representing measure")
    p.add_argument("input", help="moment file (JSON)")
    p.add_argument("-o", "--output", help="write the measure here (JSON)")
    p.add_argument(
        "--gamma33",
        type=float,
        default=None,
        help="override the automatic gamma_33 choice",
    )
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="check a measure against moment data")
    p.add_argument("moments", help="moment file (JSON)")
    p.add_argument("measure", help="measure file (JSON)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("generate", help="emit moments of an atomic measure")
    p.add_argument("-o", "--output", required=True, help="moment file to write")
    p.add_argument(
        "--measure-output", help="also write the generating measure here"
    )
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=6, help="number of atoms")
    p.add_argument("--degree", type=int, default=5)
    p.add_argument(
        "--atom",
        action="append",
        metavar="RE,IM,WEIGHT",
        help="explicit atom (repeatable); suppresses the random draw",
    )
    p.set_defaults(fn=cmd_generate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UnsupportedCase as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TcmpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
