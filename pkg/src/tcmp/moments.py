"""Truncated complex moment sequences, moment matrices, and the Riesz functional.

A truncated bi-sequence {gamma_ij}_{i+j<=m} with gamma_00 > 0 and
gamma_ji = conj(gamma_ij) is the data of the truncated complex moment
problem: find a positive Borel measure mu on C with
gamma_ij = integral of conj(z)^i z^j dmu.

Monomials in z and conj(z) are ordered degree-lexicographically,

    1, Z, Z_, Z^2, Z Z_, Z_^2, Z^3, ...

(Z_ denotes the conjugate variable), i.e. within each total degree the
conjugate power increases. Moment matrices and cross blocks follow this
order along both axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, NamedTuple

import numpy as np

from .errors import (
    DegreeTooLow,
    MissingMoment,
    NonpositiveMass,
    SymmetryViolation,
)

DEFAULT_SYMMETRY_TOL = 1e-9


class MonomialIndex(NamedTuple):
    """Exponent pair of conj(z)^conj_power * z^power."""

    conj_power: int
    power: int

    @property
    def degree(self) -> int:
        return self.conj_power + self.power

    @property
    def position(self) -> int:
        """Index in the degree-lexicographic monomial order."""
        d = self.degree
        return d * (d + 1) // 2 + self.conj_power

    def conjugate(self) -> "MonomialIndex":
        return MonomialIndex(self.power, self.conj_power)


def monomials_up_to(n: int) -> list[MonomialIndex]:
    """All monomial indices of degree <= n, degree-lexicographic."""
    return [
        MonomialIndex(i, d - i) for d in range(n + 1) for i in range(d + 1)
    ]


def monomials_of_degree(d: int) -> list[MonomialIndex]:
    return [MonomialIndex(i, d - i) for i in range(d + 1)]


def matrix_side(n: int) -> int:
    """Side length of a moment matrix of order n."""
    return (n + 1) * (n + 2) // 2


@dataclass(frozen=True)
class BivariatePolynomial:
    """Polynomial in z and conj(z) stored as {(conj_power, power): coeff}.

    Zero coefficients are dropped on construction. The zero polynomial has
    an empty coefficient map and degree -1 by convention.
    """

    coeffs: Mapping[MonomialIndex, complex]

    def __post_init__(self):
        cleaned = {}
        for key, val in self.coeffs.items():
            idx = MonomialIndex(*key)
            if idx.conj_power < 0 or idx.power < 0:
                raise ValueError(f"negative exponent in {idx}")
            cval = complex(val)
            if cval != 0:
                cleaned[idx] = cval
        object.__setattr__(self, "coeffs", cleaned)

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return -1
        return max(idx.degree for idx in self.coeffs)

    def terms(self) -> Iterator[tuple[MonomialIndex, complex]]:
        return iter(sorted(self.coeffs.items(), key=lambda t: t[0].position))

    def conjugate(self) -> "BivariatePolynomial":
        """Coefficients conjugated, powers of z and conj(z) swapped.

        This is the polynomial p_ with p_(z) = conj(p(z)) pointwise.
        """
        return BivariatePolynomial(
            {idx.conjugate(): val.conjugate() for idx, val in self.coeffs.items()}
        )

    def shifted(self, di: int, dj: int) -> "BivariatePolynomial":
        return BivariatePolynomial(
            {
                MonomialIndex(idx.conj_power + di, idx.power + dj): val
                for idx, val in self.coeffs.items()
            }
        )

    def __add__(self, other):
        merged = dict(self.coeffs)
        for idx, val in other.coeffs.items():
            merged[idx] = merged.get(idx, 0.0) + val
        return BivariatePolynomial(merged)

    def __sub__(self, other):
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, BivariatePolynomial):
            prod: dict[MonomialIndex, complex] = {}
            for ia, va in self.coeffs.items():
                for ib, vb in other.coeffs.items():
                    key = MonomialIndex(
                        ia.conj_power + ib.conj_power, ia.power + ib.power
                    )
                    prod[key] = prod.get(key, 0.0) + va * vb
            return BivariatePolynomial(prod)
        return BivariatePolynomial(
            {idx: val * other for idx, val in self.coeffs.items()}
        )

    __rmul__ = __mul__

    def __call__(self, z: complex) -> complex:
        zbar = np.conjugate(z)
        return sum(
            (val * zbar**idx.conj_power * z**idx.power for idx, val in self.coeffs.items()),
            start=0.0 + 0.0j,
        )


def monomial(i: int, j: int, coeff: complex = 1.0) -> BivariatePolynomial:
    return BivariatePolynomial({MonomialIndex(i, j): coeff})


def shift(p: BivariatePolynomial, di: int, dj: int) -> BivariatePolynomial:
    """Multiply p by conj(z)^di z^dj (translate all exponents)."""
    return p.shifted(di, dj)


@dataclass(frozen=True)
class MomentSequence:
    """Validated truncated moment sequence of the given total degree.

    The entry map is total on {(i, j): i + j <= degree}, Hermitian-symmetric
    exactly (pairs are averaged during validation), with real positive mass
    gamma_00.
    """

    degree: int
    entries: Mapping[MonomialIndex, complex] = field(repr=False)

    def gamma(self, i: int, j: int) -> complex:
        return self.entries[MonomialIndex(i, j)]

    def __getitem__(self, key) -> complex:
        return self.entries[MonomialIndex(*key)]

    def __contains__(self, key) -> bool:
        return MonomialIndex(*key) in self.entries

    def items(self):
        return self.entries.items()

    def as_dict(self) -> dict[MonomialIndex, complex]:
        return dict(self.entries)


def validate_sequence(
    raw: Mapping,
    degree: int,
    tol_sym: float = DEFAULT_SYMMETRY_TOL,
) -> MomentSequence:
    """Check totality, positivity of mass, and Hermitian symmetry.

    Symmetry is enforced exactly by averaging gamma_ij with
    conj(gamma_ji); a relative deviation above tol_sym raises
    SymmetryViolation. Missing entries raise MissingMoment, and entries of
    degree above ``degree`` are rejected.
    """
    if degree < 0:
        raise DegreeTooLow("sequence degree must be nonnegative")
    table = {}
    for key, val in raw.items():
        idx = MonomialIndex(*key)
        if idx.degree > degree:
            raise DegreeTooLow(
                f"entry {tuple(idx)} exceeds declared degree {degree}"
            )
        table[idx] = complex(val)

    out: dict[MonomialIndex, complex] = {}
    for idx in monomials_up_to(degree):
        mirror = idx.conjugate()
        if idx in out:
            continue
        if idx not in table and mirror not in table:
            raise MissingMoment(f"missing moment gamma_{idx.conj_power}{idx.power}")
        if idx in table and mirror in table:
            a, b = table[idx], table[mirror]
            cb = complex(np.conjugate(b))
            # componentwise magnitudes; abs() of a complex near the float
            # ceiling overflows in hypot even when both parts are finite
            diff = a - cb
            dev = max(abs(diff.real), abs(diff.imag))
            scale = max(1.0, abs(a.real), abs(a.imag))
            if dev > tol_sym * scale:
                raise SymmetryViolation(
                    f"gamma_{mirror.conj_power}{mirror.power} is not the "
                    f"conjugate of gamma_{idx.conj_power}{idx.power}"
                )
            # midpoint via the difference: a + cb itself can overflow
            avg = a if cb == a else a + (cb - a) / 2.0
        else:
            got = table.get(idx, None)
            avg = got if got is not None else np.conjugate(table[mirror])
        if idx == mirror:
            avg = complex(avg.real, 0.0)
        out[idx] = complex(avg)
        out[mirror] = complex(np.conjugate(avg))

    mass = out[MonomialIndex(0, 0)]
    if not (mass.real > 0.0):
        raise NonpositiveMass(f"gamma_00 = {mass} must be positive")
    return MomentSequence(degree=degree, entries=out)


def riesz(seq: MomentSequence, p: BivariatePolynomial) -> complex:
    """Riesz functional: sum of a_ij gamma_ij over the terms of p."""
    if p.degree > seq.degree:
        raise DegreeTooLow(
            f"polynomial degree {p.degree} exceeds sequence degree {seq.degree}"
        )
    return complex(
        sum(val * seq.entries[idx] for idx, val in p.coeffs.items())
    )


@dataclass(frozen=True)
class MomentMatrix:
    """Moment matrix of order n with its monomial labels.

    Entry at row label Z_^k Z^l and column label Z_^i Z^j is
    gamma_{i+l, j+k}, so that <M p, q> equals the Riesz functional of
    p * conj(q) for polynomials of degree <= n.
    """

    order: int
    labels: tuple[MonomialIndex, ...]
    entries: np.ndarray = field(repr=False)

    def label_position(self, idx: MonomialIndex) -> int:
        return MonomialIndex(*idx).position

    def block(self, i: int, j: int) -> np.ndarray:
        """The (i, j) block: rows of degree i against columns of degree j."""
        r0 = i * (i + 1) // 2
        c0 = j * (j + 1) // 2
        return self.entries[r0 : r0 + i + 1, c0 : c0 + j + 1]


def build_moment_matrix(seq: MomentSequence, n: int) -> MomentMatrix:
    """Assemble the order-n moment matrix; needs sequence degree >= 2n."""
    if seq.degree < 2 * n:
        raise DegreeTooLow(
            f"order-{n} moment matrix needs degree {2 * n}, have {seq.degree}"
        )
    labels = monomials_up_to(n)
    side = len(labels)
    M = np.empty((side, side), dtype=complex)
    for r, (k, l) in enumerate(labels):
        for c, (i, j) in enumerate(labels):
            M[r, c] = seq.entries[MonomialIndex(i + l, j + k)]
    return MomentMatrix(order=n, labels=tuple(labels), entries=M)


def build_cross_block(
    seq: MomentSequence, row_order: int, col_degree: int
) -> np.ndarray:
    """Cross block: rows over all monomials of degree <= row_order, columns
    over the monomials of exact degree col_degree, same entry rule as the
    moment matrix."""
    if seq.degree < row_order + col_degree:
        raise DegreeTooLow(
            f"cross block needs degree {row_order + col_degree}, have {seq.degree}"
        )
    rows = monomials_up_to(row_order)
    cols = monomials_of_degree(col_degree)
    B = np.empty((len(rows), len(cols)), dtype=complex)
    for r, (k, l) in enumerate(rows):
        for c, (i, j) in enumerate(cols):
            B[r, c] = seq.entries[MonomialIndex(i + l, j + k)]
    return B
