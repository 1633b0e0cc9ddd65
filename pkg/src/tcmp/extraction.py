"""Atom and weight extraction from flat moment matrices.

Once a flat extension is in hand (rank M(n+1) = rank M(n)), the support of
the minimal representing measure is the spectrum of the multiplication
operator by z compressed to the column space, and the weights follow from a
generalized Vandermonde least-squares fit to the moments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ExpressFailure,
    IllConditionedVandermonde,
    NegativeWeight,
)
from .linalg import DEFAULT_RANK_TOL, numeric_rank
from .moments import MomentMatrix, MomentSequence, MonomialIndex, monomials_up_to

DEFAULT_ATOM_MERGE_TOL = 1e-7
DEFAULT_WEIGHT_TOL = 1e-7
VANDERMONDE_COND_LIMIT = 1e12


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely atomic measure: pairwise distinct atoms, nonnegative weights."""

    atoms: tuple[complex, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        atoms = tuple(complex(z) for z in self.atoms)
        weights = tuple(float(w) for w in self.weights)
        if len(atoms) != len(weights):
            raise ValueError("atoms and weights must have equal length")
        if any(not np.isfinite(w) or w < 0.0 for w in weights):
            raise ValueError("weights must be finite and nonnegative")
        for z in atoms:
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                raise ValueError("atoms must be finite")
        for idx, z in enumerate(atoms):
            for w in atoms[idx + 1 :]:
                if z == w:
                    raise ValueError(f"duplicate atom {z}")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def mass(self) -> float:
        return float(sum(self.weights))

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class BasisSelection:
    """Monomial labels whose columns span the column space, with positions."""

    monomials: tuple[MonomialIndex, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "monomials", tuple(MonomialIndex(*m) for m in self.monomials)
        )

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(m.position for m in self.monomials)

    def __len__(self) -> int:
        return len(self.monomials)


def column_space_basis(
    M: MomentMatrix, tol_rank: float = DEFAULT_RANK_TOL
) -> BasisSelection:
    """Greedy scan in monomial order keeping columns that raise the rank."""
    target = numeric_rank(M.entries, tol_rank)
    picked: list[int] = []
    for pos in range(M.entries.shape[1]):
        if len(picked) == target:
            break
        cand = picked + [pos]
        if numeric_rank(M.entries[:, cand], tol_rank) == len(cand):
            picked.append(pos)
    labels = tuple(M.labels[p] for p in picked)
    if len(picked) != target:
        raise ExpressFailure(
            f"greedy basis found {len(picked)} columns for rank {target}"
        )
    return BasisSelection(monomials=labels)


def multiplication_matrix(
    flat: MomentMatrix,
    basis: BasisSelection,
    tol: float = 1e-7,
) -> np.ndarray:
    """Matrix of multiplication by z on the column space of the flat matrix.

    Column k expresses the column labelled z * m_k over the basis columns,
    solving the basis-restricted system and checking the residual on all
    rows; its eigenvalues are the atoms of the minimal measure.
    """
    side = flat.entries.shape[0]
    rows = list(basis.positions)
    if any(m.degree > flat.order - 1 for m in basis.monomials):
        raise ValueError("basis monomials must have degree below the flat order")
    S = flat.entries[np.ix_(rows, rows)]
    svals = np.linalg.svd(S, compute_uv=False)
    if svals[-1] <= 1e-13 * svals[0]:
        raise ExpressFailure("restricted basis matrix is numerically singular")
    scale = max(1.0, float(np.abs(flat.entries).max()))
    A = np.empty((len(rows), len(rows)), dtype=complex)
    basis_cols = flat.entries[:, rows]
    for k, mono in enumerate(basis.monomials):
        shifted = MonomialIndex(mono.conj_power, mono.power + 1)
        pos = shifted.position
        if pos >= side:
            raise ValueError(f"shifted monomial {shifted} outside the flat matrix")
        x = np.linalg.solve(S, flat.entries[np.ix_(rows, [pos])])
        residual = float(np.abs(basis_cols @ x[:, 0] - flat.entries[:, pos]).max())
        if residual > tol * scale:
            raise ExpressFailure(
                f"column for z * {tuple(mono)} not in the basis span, "
                f"residual {residual:.3e}"
            )
        A[:, k] = x[:, 0]
    return A


def merge_close(
    values: np.ndarray, merge_tol: float = DEFAULT_ATOM_MERGE_TOL
) -> list[complex]:
    """Cluster values closer than merge_tol, representing each by its mean."""
    clusters: list[list[complex]] = []
    for v in sorted(map(complex, values), key=lambda z: (z.real, z.imag)):
        for group in clusters:
            if abs(v - group[0]) <= merge_tol:
                group.append(v)
                break
        else:
            clusters.append([v])
    return [complex(np.mean(group)) for group in clusters]


def extract_atoms(
    flat: MomentMatrix,
    basis: BasisSelection,
    tol: float = 1e-7,
    merge_tol: float = DEFAULT_ATOM_MERGE_TOL,
) -> list[complex]:
    """Eigenvalues of the multiplication matrix, merged within merge_tol."""
    A = multiplication_matrix(flat, basis, tol)
    return merge_close(np.linalg.eigvals(A), merge_tol)


def solve_weights(
    atoms: list[complex],
    seq: MomentSequence,
    weight_tol: float = DEFAULT_WEIGHT_TOL,
) -> list[float]:
    """Least-squares weights for the given atoms against all moments.

    Builds the generalized Vandermonde system over every monomial of degree
    <= seq.degree. The solved weights must be real within weight_tol
    (imaginary parts are then dropped) and nonnegative within weight_tol
    (small negatives are clamped to zero).
    """
    if not atoms:
        raise ValueError("need at least one atom")
    monos = monomials_up_to(seq.degree)
    A = np.empty((len(monos), len(atoms)), dtype=complex)
    b = np.empty(len(monos), dtype=complex)
    for r, (i, j) in enumerate(monos):
        b[r] = seq.gamma(i, j)
        for k, z in enumerate(atoms):
            A[r, k] = np.conjugate(z) ** i * z**j
    svals = np.linalg.svd(A, compute_uv=False)
    if svals[-1] <= 0.0 or svals[0] / svals[-1] > VANDERMONDE_COND_LIMIT:
        raise IllConditionedVandermonde(
            f"atom configuration too degenerate, condition "
            f"{svals[0] / max(svals[-1], 1e-300):.3e}"
        )
    w, *_ = np.linalg.lstsq(A, b, rcond=None)
    wscale = 1.0 + float(np.abs(w).max())
    if float(np.abs(w.imag).max()) > weight_tol * wscale:
        raise IllConditionedVandermonde(
            f"weights came out non-real, max imaginary part "
            f"{float(np.abs(w.imag).max()):.3e}"
        )
    out = []
    for wk in w.real:
        if wk < -weight_tol * wscale:
            raise NegativeWeight(f"weight {wk:.6e} below zero beyond tolerance")
        out.append(max(float(wk), 0.0))
    return out


def generate_moments(mu: AtomicMeasure, degree: int) -> MomentSequence:
    """Moments of an atomic measure: gamma_ij = sum w conj(z)^i z^j.

    Entries are computed for i <= j and mirrored by conjugation so the
    result is Hermitian-symmetric to the last bit. The sequence is built
    directly rather than revalidated: an empty measure has gamma_00 = 0,
    which verify_measure must still be able to score.
    """
    entries: dict[MonomialIndex, complex] = {}
    zs = np.array(mu.atoms, dtype=complex)
    ws = np.array(mu.weights, dtype=float)
    for d in range(degree + 1):
        for i in range(d // 2 + 1):
            j = d - i
            val = complex(np.sum(ws * np.conjugate(zs) ** i * zs**j))
            if i == j:
                val = complex(val.real, 0.0)
            entries[MonomialIndex(i, j)] = val
            entries[MonomialIndex(j, i)] = complex(np.conjugate(val))
    return MomentSequence(degree=degree, entries=entries)


def verify_measure(seq: MomentSequence, mu: AtomicMeasure) -> float:
    """Worst relative reproduction error max |gamma - moment| / (1 + |gamma|)."""
    reproduced = generate_moments(mu, seq.degree)
    worst = 0.0
    for idx, gamma in seq.items():
        err = abs(gamma - reproduced.entries[idx]) / (1.0 + abs(gamma))
        worst = max(worst, err)
    return worst
