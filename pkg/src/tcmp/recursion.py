"""Generating polynomials and recursive extension of moment sequences.

A generating polynomial conj(z)^e z^(d-e) - P encodes a column relation of
the moment matrix: the sequence is recursive when

    gamma_{e+i, d-e+j} = Riesz(conj(z)^i z^j P)   for all admissible shifts.

When the leading monomial is the pure power z^d and deg P < d, the relation
together with Hermitian symmetry determines every entry from the seed block
{gamma_ij : i, j < d}, which is how the degree-5 data is pushed to degree 8.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConflictingEntry, DegreeTooLow, MissingInitialData
from .moments import (
    BivariatePolynomial,
    MomentSequence,
    MonomialIndex,
    riesz,
    shift,
    validate_sequence,
)

DEFAULT_CONFLICT_TOL = 1e-7


@dataclass(frozen=True)
class GeneratingPolynomial:
    """Relation monomial(leading) = tail, with tail degree <= leading degree."""

    leading: MonomialIndex
    tail: BivariatePolynomial

    def __post_init__(self):
        object.__setattr__(self, "leading", MonomialIndex(*self.leading))
        if self.leading in self.tail.coeffs:
            raise ValueError("leading monomial must be excluded from the tail")
        if self.tail.degree > self.leading.degree:
            raise ValueError(
                f"tail degree {self.tail.degree} exceeds leading degree "
                f"{self.leading.degree}"
            )

    @property
    def d(self) -> int:
        return self.leading.degree

    def relation(self) -> BivariatePolynomial:
        """The polynomial monomial(leading) - tail, vanishing on the support
        of any representing measure of a sequence it generates."""
        lead = BivariatePolynomial({self.leading: 1.0})
        return lead - self.tail


def conjugate_generating(g: GeneratingPolynomial) -> GeneratingPolynomial:
    """Conjugate relation: leading exponents transposed, tail conjugated."""
    return GeneratingPolynomial(
        leading=g.leading.conjugate(), tail=g.tail.conjugate()
    )


@dataclass(frozen=True)
class ExtensionWindow:
    """Shift budget i + j <= max_shift over which a relation is tested."""

    max_shift: int

    def __post_init__(self):
        if self.max_shift < 0:
            raise ValueError("max_shift must be nonnegative")


def is_generating(
    seq: MomentSequence,
    g: GeneratingPolynomial,
    window: ExtensionWindow,
    tol: float = 1e-7,
) -> tuple[bool, float]:
    """Test the recursion identities over all shifts in the window.

    Returns (ok, worst absolute residual); ok compares the residual against
    tol * (1 + max |target gamma|) over the window.
    """
    e, de = g.leading
    if seq.degree < g.d + window.max_shift:
        raise DegreeTooLow(
            f"window {window.max_shift} over degree-{g.d} relation needs "
            f"sequence degree {g.d + window.max_shift}, have {seq.degree}"
        )
    worst = 0.0
    scale = 1.0
    for s in range(window.max_shift + 1):
        for i in range(s + 1):
            j = s - i
            target = seq.gamma(e + i, de + j)
            value = riesz(seq, shift(g.tail, i, j))
            worst = max(worst, abs(target - value))
            scale = max(scale, 1.0 + abs(target))
    return worst <= tol * scale, worst


def extend_by_recurrence(
    known: Mapping,
    g: GeneratingPolynomial,
    target_degree: int,
    tol_conflict: float = DEFAULT_CONFLICT_TOL,
) -> MomentSequence:
    """Extend a partial sequence to target_degree by the recursion of g.

    Requires a pure-power leading monomial z^d with tail degree < d. New
    entries gamma_{i, j+d} are filled level by level in i + j, mirrored by
    conjugation; entries already present are never overwritten but are
    checked against the recurrence value (ConflictingEntry beyond
    tol_conflict relative). An entry equal to its own mirror must come out
    real within the same tolerance.
    """
    if isinstance(known, MomentSequence):
        table = known.as_dict()
    else:
        table = {MonomialIndex(*k): complex(v) for k, v in known.items()}
    if g.leading.conj_power != 0:
        raise ValueError("recurrence extension needs a pure-power leading z^d")
    d = g.d
    if g.tail.degree >= d:
        raise ValueError("tail degree must be strictly below the leading degree")
    if target_degree < d:
        raise DegreeTooLow(f"target degree {target_degree} below relation degree {d}")

    # mirror whatever is present so lookups can stay one-sided
    for idx in list(table):
        mirror = idx.conjugate()
        if mirror not in table:
            table[mirror] = complex(np.conjugate(table[idx]))

    for i in range(d):
        for j in range(d):
            if MonomialIndex(i, j) not in table:
                raise MissingInitialData(
                    f"seed entry gamma_{i}{j} required for a degree-{d} recursion"
                )

    def recurrence_value(i, j):
        acc = 0.0 + 0.0j
        for (l, k), coeff in g.tail.coeffs.items():
            key = MonomialIndex(i + l, j + k)
            if key not in table:
                raise MissingInitialData(
                    f"entry gamma_{key.conj_power}{key.power} needed by the "
                    f"recurrence is not available"
                )
            acc += coeff * table[key]
        return acc

    def place(key, value):
        mirror = key.conjugate()
        if key == mirror:
            if abs(value.imag) > tol_conflict * (1.0 + abs(value)):
                raise ConflictingEntry(
                    f"diagonal entry gamma_{key.conj_power}{key.power} came "
                    f"out non-real: {value}"
                )
            value = complex(value.real, 0.0)
        if key in table:
            old = table[key]
            if abs(old - value) > tol_conflict * (1.0 + abs(old)):
                raise ConflictingEntry(
                    f"recurrence value {value} for gamma_{key.conj_power}"
                    f"{key.power} conflicts with existing {old}"
                )
            return
        table[key] = value
        table[mirror] = complex(np.conjugate(value))

    for s in range(target_degree - d + 1):
        for i in range(s + 1):
            j = s - i
            place(MonomialIndex(i, j + d), recurrence_value(i, j))

    wanted = {
        MonomialIndex(i, j)
        for i in range(target_degree + 1)
        for j in range(target_degree + 1 - i)
    }
    return validate_sequence(
        {k: v for k, v in table.items() if k in wanted}, target_degree
    )


def check_lien(
    seq: MomentSequence, g: GeneratingPolynomial, tol: float = 1e-7
) -> bool:
    """Cross identities between a relation with leading conj(z)^f z^(f+1)
    and its conjugate:

        Riesz(conj(z)^(l+1) z^k tail) = Riesz(conj(z)^l z^(k+1) conj-tail)

    over l + k <= degree - 2f - 2. Holds when g genuinely generates the
    sequence; a symmetry break or a non-recursive tail makes it fail.
    """
    f = g.leading.conj_power
    if g.leading.power != f + 1:
        raise ValueError("check_lien expects a leading monomial conj(z)^f z^(f+1)")
    budget = seq.degree - 2 * f - 2
    if budget < 0:
        raise DegreeTooLow(
            f"sequence degree {seq.degree} too low for leading degree {g.d}"
        )
    tail = g.tail
    tail_conj = g.tail.conjugate()
    worst = 0.0
    scale = 1.0
    for s in range(budget + 1):
        for l in range(s + 1):
            k = s - l
            lhs = riesz(seq, shift(tail, l + 1, k))
            rhs = riesz(seq, shift(tail_conj, l, k + 1))
            worst = max(worst, abs(lhs - rhs))
            scale = max(scale, 1.0 + abs(lhs))
    return worst <= tol * scale
