"""Tolerance-guarded numerical linear algebra for moment matrices.

Everything here is dense numpy on small Hermitian matrices. Positivity,
rank, and range questions all go through explicit tolerances so that the
solver's case decisions are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotHermitian, PersymmetryViolation, RangeNotIncluded
from .moments import MomentMatrix

DEFAULT_PSD_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-8
DEFAULT_RANGE_TOL = 1e-8
DEFAULT_PSYM_TOL = 1e-8

HERMITIAN_REL_TOL = 1e-12


@dataclass(frozen=True)
class PsdReport:
    is_psd: bool
    min_eigenvalue: float
    scale: float


@dataclass(frozen=True)
class RangeSolution:
    """Minimal-norm W with M W = B, together with the worst residual."""

    W: np.ndarray = field(repr=False)
    residual: float


@dataclass(frozen=True)
class MiddleBlock:
    """The compressed block W* M(2) W of the quintic problem.

    Hermitian and persymmetric, hence determined by six scalars laid out as

        [[a,        b,        c,        d      ],
         [conj(b),  e,        f,        c      ],
         [conj(c),  conj(f),  e,        b      ],
         [conj(d),  conj(c),  conj(b),  a      ]]

    with a, e real.
    """

    full: np.ndarray = field(repr=False)
    a: float
    b: complex
    c: complex
    d: complex
    e: float
    f: complex


@dataclass(frozen=True)
class PhiMatrix:
    """Block anti-diagonal involution J_0 + J_1 + ... + J_n (direct sum).

    Realizes complex conjugation of coordinates in the monomial basis: it
    swaps each monomial label with its conjugate within the same degree.
    """

    n: int
    entries: np.ndarray = field(repr=False)


def _hermitian_part(H: np.ndarray, context: str, tol: float = HERMITIAN_REL_TOL):
    H = np.asarray(H, dtype=complex)
    scale = max(1.0, float(np.abs(H).max()) if H.size else 0.0)
    defect = float(np.abs(H - H.conj().T).max()) if H.size else 0.0
    if defect > tol * scale:
        raise NotHermitian(
            f"{context}: Hermitian defect {defect:.3e} above {tol:.1e} relative"
        )
    return (H + H.conj().T) / 2.0


def psd_check(H: np.ndarray, tol_psd: float = DEFAULT_PSD_TOL) -> PsdReport:
    """Eigenvalue test for positive semidefiniteness.

    The matrix must be Hermitian within 1e-12 relative; it is symmetrized
    before the eigenvalue computation. Scale is the largest absolute
    eigenvalue, and the verdict allows eigenvalues down to
    -tol_psd * max(scale, 1).
    """
    S = _hermitian_part(H, "psd_check")
    if S.size == 0:
        return PsdReport(is_psd=True, min_eigenvalue=0.0, scale=0.0)
    eigs = np.linalg.eigvalsh(S)
    scale = float(np.abs(eigs).max())
    min_eig = float(eigs.min())
    return PsdReport(
        is_psd=min_eig >= -tol_psd * max(scale, 1.0),
        min_eigenvalue=min_eig,
        scale=scale,
    )


def numeric_rank(A: np.ndarray, tol_rank: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above tol_rank times the largest one."""
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0
    svals = np.linalg.svd(A, compute_uv=False)
    if svals[0] == 0.0:
        return 0
    return int(np.count_nonzero(svals > tol_rank * svals[0]))


def solve_range_inclusion(
    M: np.ndarray, B: np.ndarray, tol_range: float = DEFAULT_RANGE_TOL
) -> RangeSolution:
    """Solve M W = B columnwise in the minimal-norm sense.

    Raises RangeNotIncluded when the residual exceeds
    tol_range * (1 + max|B|), i.e. when some column of B leaves the range
    of M. For positive semidefinite M this is the Douglas factorization
    test for a flat structure of the bordered matrix.
    """
    M = np.asarray(M, dtype=complex)
    B = np.asarray(B, dtype=complex)
    W = np.linalg.pinv(M) @ B
    residual = float(np.abs(M @ W - B).max()) if B.size else 0.0
    bound = tol_range * (1.0 + (float(np.abs(B).max()) if B.size else 0.0))
    if residual > bound:
        raise RangeNotIncluded(
            f"range inclusion fails, residual {residual:.3e} > {bound:.3e}",
            residual=residual,
        )
    return RangeSolution(W=W, residual=residual)


def _antitranspose(H: np.ndarray) -> np.ndarray:
    # flip across the anti-diagonal: out[i, j] = H[n-1-j, n-1-i]
    return H[::-1, ::-1].T


def middle_block(
    M2: MomentMatrix, W: np.ndarray, tol_psym: float = DEFAULT_PSYM_TOL
) -> MiddleBlock:
    """Compress M(2) by the range solution W and read off (a, b, c, d, e, f).

    The product is Hermitian-symmetrized, checked for persymmetry
    (full[3-j, 3-i] == full[i, j]) within tol_psym relative, then made
    exactly persymmetric by averaging with its anti-transpose.
    """
    W = np.asarray(W, dtype=complex)
    if W.shape != (6, 4):
        raise ValueError(f"expected a 6x4 range solution, got {W.shape}")
    X = W.conj().T @ M2.entries @ W
    H = (X + X.conj().T) / 2.0
    flip = _antitranspose(H)
    scale = max(1.0, float(np.abs(H).max()))
    defect = float(np.abs(H - flip).max())
    if defect > tol_psym * scale:
        raise PersymmetryViolation(
            f"middle block persymmetry defect {defect:.3e} above "
            f"{tol_psym:.1e} relative"
        )
    P = (H + flip) / 2.0
    return MiddleBlock(
        full=P,
        a=float(P[0, 0].real),
        b=complex(P[0, 1]),
        c=complex(P[0, 2]),
        d=complex(P[0, 3]),
        e=float(P[1, 1].real),
        f=complex(P[1, 2]),
    )


def build_phi(n: int) -> PhiMatrix:
    """Direct sum of anti-identity blocks of sizes 1, 2, ..., n+1."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    side = (n + 1) * (n + 2) // 2
    Phi = np.zeros((side, side))
    off = 0
    for p in range(n + 1):
        Phi[off : off + p + 1, off : off + p + 1] = np.fliplr(np.eye(p + 1))
        off += p + 1
    return PhiMatrix(n=n, entries=Phi)


def smuljan_extend_rank(
    rank_A: int, C_minus_WAW: np.ndarray, tol_rank: float = DEFAULT_RANK_TOL
) -> int:
    """Rank of a bordered extension via the Smul'jan block criterion:
    rank of the whole equals rank of the corner plus rank of the Schur
    complement C - W* A W."""
    return rank_A + numeric_rank(C_minus_WAW, tol_rank)
