"""Truncated complex moment problems of degree five.

Decide whether quintic moment data {gamma_ij}_{i+j<=5} admits a positive
Borel representing measure on the complex plane, construct a minimal
atomic one when it does, and report the minimal support cardinality.
"""

from . import errors
from .extraction import (
    AtomicMeasure,
    BasisSelection,
    column_space_basis,
    extract_atoms,
    generate_moments,
    merge_close,
    multiplication_matrix,
    solve_weights,
    verify_measure,
)
from .io import load_measure, load_moments, save_measure, save_moments
from .linalg import (
    MiddleBlock,
    PhiMatrix,
    PsdReport,
    RangeSolution,
    build_phi,
    middle_block,
    numeric_rank,
    psd_check,
    smuljan_extend_rank,
    solve_range_inclusion,
)
from .moments import (
    BivariatePolynomial,
    MomentMatrix,
    MomentSequence,
    MonomialIndex,
    build_cross_block,
    build_moment_matrix,
    matrix_side,
    monomial,
    monomials_of_degree,
    monomials_up_to,
    riesz,
    shift,
    validate_sequence,
)
from .recursion import (
    ExtensionWindow,
    GeneratingPolynomial,
    check_lien,
    conjugate_generating,
    extend_by_recurrence,
    is_generating,
)
from .solver import (
    CaseLabel,
    ColumnRelation,
    SixticCompletion,
    SolverConfig,
    SolverReport,
    build_completion,
    choose_gamma33,
    classify,
    completed_sequence,
    extract_column_relation,
    intersect_circles,
    predicted_support,
    solve,
    solve_P_z4,
    solve_gamma43,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "BasisSelection",
    "BivariatePolynomial",
    "CaseLabel",
    "ColumnRelation",
    "ExtensionWindow",
    "GeneratingPolynomial",
    "MiddleBlock",
    "MomentMatrix",
    "MomentSequence",
    "MonomialIndex",
    "PhiMatrix",
    "PsdReport",
    "RangeSolution",
    "SixticCompletion",
    "SolverConfig",
    "SolverReport",
    "build_completion",
    "build_cross_block",
    "build_moment_matrix",
    "build_phi",
    "check_lien",
    "choose_gamma33",
    "classify",
    "column_space_basis",
    "completed_sequence",
    "conjugate_generating",
    "errors",
    "extend_by_recurrence",
    "extract_atoms",
    "extract_column_relation",
    "generate_moments",
    "intersect_circles",
    "is_generating",
    "load_measure",
    "load_moments",
    "matrix_side",
    "merge_close",
    "middle_block",
    "monomial",
    "monomials_of_degree",
    "monomials_up_to",
    "multiplication_matrix",
    "numeric_rank",
    "predicted_support",
    "psd_check",
    "riesz",
    "save_measure",
    "save_moments",
    "shift",
    "smuljan_extend_rank",
    "solve",
    "solve_P_z4",
    "solve_gamma43",
    "solve_range_inclusion",
    "solve_weights",
    "validate_sequence",
    "verify_measure",
]
