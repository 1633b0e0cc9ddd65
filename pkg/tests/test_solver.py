"""Case analysis, completion geometry, and end-to-end solves.

The closed-form numbers here (circle intersections, completion tails)
were worked by hand; the frozen instances in golden.py pin the solver's
behaviour on every reachable case, including the honest failures.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import golden
import pipeline
from oracles import moments_by_summation
from tcmp.errors import (
    DegreeTooLow,
    FlatnessFailure,
    InfeasibleGamma33,
    NoIntersection,
    NotPsd,
    RangeNotIncluded,
    RankMismatch,
    SingularBorderedSystem,
    UnimodularAlpha,
    UnsupportedCase,
)
from tcmp.extraction import column_space_basis, generate_moments
from tcmp.linalg import middle_block, numeric_rank
from tcmp.moments import MonomialIndex, build_moment_matrix, validate_sequence
from tcmp.solver import (
    CaseLabel,
    SolverConfig,
    build_completion,
    choose_gamma33,
    classify,
    completed_sequence,
    extract_column_relation,
    intersect_circles,
    predicted_support,
    solve,
    solve_gamma43,
)

mk = golden.make_middle
C = CaseLabel


def assert_measure_matches(mu, atoms, weights, tol=1e-6):
    """Nearest-atom pairing with per-atom weight comparison."""
    assert len(mu) == len(atoms)
    for z, w in zip(atoms, weights):
        dists = [abs(z - zc) for zc in mu.atoms]
        k = int(np.argmin(dists))
        assert dists[k] <= tol * max(1.0, abs(z))
        assert abs(mu.weights[k] - w) <= tol * max(1.0, abs(w))


# ---------------------------------------------------------------- cases


def test_classify_truth_table():
    assert classify(mk(12, -8j, -4, 8j, 12, -8j)) is C.FLAT_CASE_I
    assert classify(mk(12, 0, 0, 0, 12, 1)) is C.UNSUPPORTED
    assert classify(mk(3, 0, 0, 0, 1, 2)) is C.RANK_ONE_CASE_II1
    assert classify(mk(3, 0, 0, 0, 1, 0)) is C.RANK_TWO_CASE_II2
    # the boundary |b - f| = (a - e)/2 belongs to the rank-two side
    assert classify(mk(3, 0, 0, 0, 1, 1)) is C.RANK_TWO_CASE_II2
    assert classify(mk(1, 0, 0, 0, 3, 2)) is C.RANK_ONE_CASE_II1
    assert classify(mk(1, 0, 0, 0, 3, 0)) is C.DEGENERATE_BOUNDARY


def test_classify_is_relative_to_scale():
    assert classify(mk(7, 2j, 0, 0, 7 + 1e-10, 2j)) is C.FLAT_CASE_I
    assert classify(mk(1, 0.3, 0, 0, 3, 0.3 + 1e-12j)) is C.DEGENERATE_BOUNDARY
    assert classify(mk(3, 0, 0, 0, 1, 1 + 1e-6)) is C.RANK_ONE_CASE_II1
    assert classify(mk(3, 0, 0, 0, 1, 1 + 1e-10)) is C.RANK_TWO_CASE_II2


def test_predicted_support_table():
    for r in (4, 6):
        assert predicted_support(C.FLAT_CASE_I, r) == r
        assert predicted_support(C.RANK_ONE_CASE_II1, r) == r + 1
        assert predicted_support(C.RANK_TWO_CASE_II2, r) == r + 2
        assert predicted_support(C.DEGENERATE_BOUNDARY, r) == r + 1
        assert predicted_support(C.UNSUPPORTED, r) == r + 1


# -------------------------------------------------------------- circles


def test_intersect_circles_worked_examples():
    assert intersect_circles(0, 1, 2, 1) == pytest.approx(1.0, abs=1e-12)
    assert intersect_circles(0, 5, 6, 5) == pytest.approx(3 + 4j, abs=1e-12)
    # coincident circles: any point qualifies, a representative comes back
    assert intersect_circles(1j, 2, 1j, 2) == pytest.approx(2 + 1j, abs=1e-12)


def test_intersect_circles_failures():
    with pytest.raises(NoIntersection):
        intersect_circles(0, 1, 3, 1)
    with pytest.raises(NoIntersection):
        intersect_circles(0, 1, 0, 2)
    with pytest.raises(NoIntersection):
        intersect_circles(0, 5, 1, 1)


coord = st.floats(-3.0, 3.0)


@given(zr=coord, zi=coord, c1r=coord, c1i=coord, c2r=coord, c2i=coord)
def test_intersection_point_lies_on_both_circles(zr, zi, c1r, c1i, c2r, c2i):
    z, c1, c2 = complex(zr, zi), complex(c1r, c1i), complex(c2r, c2i)
    r1, r2 = abs(z - c1), abs(z - c2)
    assume(abs(c1 - c2) > 1e-3)
    assume(r1 > 1e-3 and r2 > 1e-3)
    w = intersect_circles(c1, r1, c2, r2)
    assert abs(abs(w - c1) - r1) < 1e-9 * max(1.0, r1)
    assert abs(abs(w - c2) - r2) < 1e-9 * max(1.0, r2)


# ------------------------------------------------------------- gamma_43


def test_solve_gamma43_worked_examples():
    assert solve_gamma43(0.0, 1 + 2j) == pytest.approx(1 + 2j, abs=1e-12)
    assert solve_gamma43(2.0, 1.0) == pytest.approx(-1.0, abs=1e-12)
    assert solve_gamma43(0.5j, 1.0) == pytest.approx(4 / 3 + 2j / 3, abs=1e-12)


def test_solve_gamma43_rejects_unimodular_alpha():
    with pytest.raises(UnimodularAlpha):
        solve_gamma43(complex(math.cos(0.3), math.sin(0.3)), 1.0)
    with pytest.raises(UnimodularAlpha):
        solve_gamma43(1.0, 0.5)


@given(
    modulus=st.one_of(st.floats(0.0, 0.9), st.floats(1.1, 3.0)),
    phase=st.floats(0.0, 2 * math.pi),
    re=st.floats(-5.0, 5.0),
    im=st.floats(-5.0, 5.0),
)
def test_solve_gamma43_inverts_the_affine_map(modulus, phase, re, im):
    alpha = modulus * complex(math.cos(phase), math.sin(phase))
    gamma = complex(re, im)
    s = gamma - alpha * complex(np.conjugate(gamma))
    got = solve_gamma43(alpha, s)
    assert got == pytest.approx(gamma, abs=1e-9 * (1 + abs(gamma)))


# ------------------------------------------------------- gamma_33 choice


def test_choose_gamma33_rank_two_rule():
    assert choose_gamma33(mk(3, 0, 0, 0, 1, 0), C.RANK_TWO_CASE_II2) == 4.0
    assert choose_gamma33(mk(3, 0, 0, 0, 1, 1), C.RANK_TWO_CASE_II2) == 4.0
    assert (
        choose_gamma33(mk(3, 0, 0, 0, 1, 0), C.RANK_TWO_CASE_II2, gap_default=2.5)
        == 5.5
    )


@pytest.mark.parametrize(
    "mid",
    [
        mk(3, 0, 0, 0, 1, 2),
        mk(1, 0, 0, 0, 3, 2),
        mk(3, 1 + 2j, 0.5, -0.25j, 1, 2.2 + 2j),
    ],
)
def test_choose_gamma33_lands_in_the_rank_one_window(mid):
    x = choose_gamma33(mid, C.RANK_ONE_CASE_II1)
    assert x > max(mid.a, mid.e)
    p, q = x - mid.a, x - mid.e
    rad = math.sqrt(p * q)
    K = abs(mid.b - mid.f)
    assert abs(q - rad) <= K <= q + rad
    comp = build_completion(mid, C.RANK_ONE_CASE_II1, x)
    assert comp.difference_rank == 1
    assert abs(abs(comp.gamma42 - mid.b) - rad) < 1e-9 * max(1.0, rad)
    assert abs(abs(comp.gamma42 - mid.f) - q) < 1e-9 * max(1.0, q)


# ------------------------------------------------------ completion block


def test_flat_completion_copies_the_middle_block(ref_seq):
    M2 = build_moment_matrix(ref_seq, 2)
    mid = middle_block(M2, golden.REF_W)
    comp = build_completion(mid, C.FLAT_CASE_I, mid.a)
    assert comp.difference_rank == 0
    assert comp.gamma33 == pytest.approx(12.0, abs=1e-12)
    assert comp.gamma42 == pytest.approx(-8j, abs=1e-12)
    assert comp.gamma51 == pytest.approx(-4.0, abs=1e-12)
    assert comp.gamma60 == pytest.approx(8j, abs=1e-12)
    assert np.max(np.abs(comp.C3 - golden.REF_MIDDLE)) < 1e-12


def test_rank_one_completion_worked_example():
    mid = mk(3, 0, 0, 0, 1, 2)
    comp = build_completion(mid, C.RANK_ONE_CASE_II1, 5.0)
    root7 = math.sqrt(7.0)
    assert comp.gamma33 == 5.0
    assert comp.gamma42 == pytest.approx(-1 + 1j * root7, abs=1e-12)
    assert comp.gamma51 == pytest.approx(-1 - 1j * root7, abs=1e-12)
    assert comp.gamma60 == pytest.approx(2.0, abs=1e-12)
    assert comp.difference_rank == 1
    D = comp.C3 - mid.full
    assert numeric_rank(D, 1e-10) == 1
    assert np.linalg.eigvalsh(D).min() > -1e-10

    other = build_completion(mid, C.RANK_ONE_CASE_II1, 5.0, branch=1)
    assert other.gamma42 == pytest.approx(-1 - 1j * root7, abs=1e-12)
    assert other.gamma51 == pytest.approx(-1 + 1j * root7, abs=1e-12)
    assert other.gamma60 == pytest.approx(2.0, abs=1e-12)


def test_rank_two_completion_worked_example():
    mid = mk(3, 0, 0, 0, 1, 0)
    root3 = math.sqrt(3.0)
    comp = build_completion(mid, C.RANK_TWO_CASE_II2, 4.0)
    assert comp.gamma42 == pytest.approx(root3, abs=1e-12)
    assert comp.gamma51 == pytest.approx(1.0, abs=1e-12)
    assert comp.gamma60 == pytest.approx(1 / root3, abs=1e-12)
    assert comp.difference_rank == 2
    D = comp.C3 - mid.full
    assert numeric_rank(D, 1e-10) == 2
    assert np.linalg.eigvalsh(D).min() > -1e-10

    turned = build_completion(mid, C.RANK_TWO_CASE_II2, 4.0, theta=math.pi / 2)
    assert turned.gamma42 == pytest.approx(1j * root3, abs=1e-12)
    assert turned.gamma51 == pytest.approx(-1.0, abs=1e-12)
    assert turned.gamma60 == pytest.approx(-1j / root3, abs=1e-12)


def test_degenerate_boundary_completion_closed_form():
    comp = build_completion(mk(1, 0, 0, 0, 3, 0), C.DEGENERATE_BOUNDARY, 3.0)
    assert comp.gamma33 == 3.0
    assert comp.gamma42 == 0.0
    assert comp.gamma51 == 0.0
    assert comp.gamma60 == pytest.approx(2.0, abs=1e-12)
    assert comp.difference_rank == 1


def test_completion_guards():
    with pytest.raises(InfeasibleGamma33):
        build_completion(mk(3, 0, 0, 0, 1, 2), C.RANK_ONE_CASE_II1, 3.0)
    with pytest.raises(InfeasibleGamma33):
        build_completion(mk(3, 0, 0, 0, 1, 2), C.RANK_ONE_CASE_II1, 0.5)
    # |b - f| too small for the circles once gamma_33 is far out
    with pytest.raises(NoIntersection):
        build_completion(mk(1, 0, 0, 0, 3, 0.5), C.RANK_ONE_CASE_II1, 50.0)
    # flat recipe on a middle block that is not flat
    with pytest.raises(RankMismatch):
        build_completion(mk(3, 0, 0, 0, 1, 2), C.FLAT_CASE_I, 3.0)
    # boundary recipe needs e >= a or the corner difference goes negative
    with pytest.raises(NotPsd):
        build_completion(mk(3, 0, 0, 0, 1, 0), C.DEGENERATE_BOUNDARY, 1.0)


def test_completed_sequence_reproduces_true_sixtic_moments(ref_seq):
    M2 = build_moment_matrix(ref_seq, 2)
    mid = middle_block(M2, golden.REF_W)
    comp = build_completion(mid, C.FLAT_CASE_I, mid.a)
    seq6 = completed_sequence(ref_seq, comp)
    true6 = golden.measure_sequence(golden.REF_ATOMS, golden.REF_WEIGHTS, 6)
    assert seq6.degree == 6
    worst = max(
        abs(seq6[(i, j)] - val) for (i, j), val in true6.as_dict().items()
    )
    assert worst < 1e-9


def test_flat_data_has_no_nontrivial_column_relation():
    seq6 = golden.measure_sequence(golden.REF_ATOMS, golden.REF_WEIGHTS, 6)
    M3 = build_moment_matrix(seq6, 3)
    basis2 = column_space_basis(build_moment_matrix(seq6, 2))
    # the conjugate-mixed column already lies in the degree-2 span, so
    # bordering the basis with it produces a singular system
    with pytest.raises(SingularBorderedSystem):
        extract_column_relation(M3, basis2)


# ------------------------------------------------- degree-8 reconstruction


def test_reconstruction_matches_report(rank_one_solution):
    seq, _, report = rank_one_solution
    ext = pipeline.reconstruct_extension(seq, report)
    assert ext.relation.alpha == pytest.approx(report.alpha, abs=1e-9)
    comp, mid = report.completion, report.middle
    transported = (comp.gamma42 - mid.b) / (comp.gamma33 - mid.a)
    assert report.alpha == pytest.approx(transported, abs=1e-7)
    for key, val in ext.degree7.items():
        mirror = ext.degree7[MonomialIndex(key.power, key.conj_power)]
        assert val == pytest.approx(complex(np.conjugate(mirror)), abs=1e-9)


def test_reconstruction_reproduces_true_moments(rank_one_solution):
    seq, mu, report = rank_one_solution
    ext = pipeline.reconstruct_extension(seq, report)
    true8 = moments_by_summation(mu.atoms, mu.weights, 8)
    worst = 0.0
    for (i, j), ref in true8.items():
        if i + j < 7:
            continue
        got = (
            ext.degree7[MonomialIndex(i, j)]
            if i + j == 7
            else ext.seq8[(i, j)]
        )
        worst = max(worst, abs(got - ref) / (1.0 + abs(ref)))
    assert worst < 1e-8
    assert ext.p4.leading == MonomialIndex(0, 4)
    assert numeric_rank(ext.M3.entries, 1e-8) == 7
    assert numeric_rank(ext.M4.entries, 1e-8) == 7


def test_rank_two_alpha_modulus_law(rank_two_solution):
    _, _, report = rank_two_solution
    comp, mid = report.completion, report.middle
    expected = math.sqrt((comp.gamma33 - mid.e) / (comp.gamma33 - mid.a))
    assert abs(report.alpha) == pytest.approx(expected, rel=1e-6)


# ------------------------------------------------------ end-to-end solves


def test_reference_solve_is_flat(ref_seq):
    mu, report = solve(ref_seq)
    assert report.case is C.FLAT_CASE_I
    assert report.rank_M2 == 6
    assert report.predicted_support == report.achieved_support == 6
    assert report.rank_M3 == 6
    assert report.rank_M4 is None
    assert report.alpha is None
    assert report.gamma33 == pytest.approx(12.0, abs=1e-9)
    assert report.notes == ()
    assert report.max_moment_residual < 1e-10
    golden.match_atoms(mu.atoms, golden.REF_ATOMS)
    assert_measure_matches(mu, golden.REF_ATOMS, golden.REF_WEIGHTS, tol=1e-9)


def test_rank_one_solve_recovers_the_input_measure(rank_one_solution):
    mu_in = golden.rank_one_measure()
    _, mu, report = rank_one_solution
    assert report.case is C.RANK_ONE_CASE_II1
    assert report.rank_M2 == 6
    assert report.achieved_support == report.predicted_support == 7
    assert report.rank_M3 == report.rank_M4 == 7
    assert report.notes == ()
    assert report.max_moment_residual < 1e-6
    assert_measure_matches(mu, mu_in.atoms, mu_in.weights, tol=1e-6)
    true_g33 = generate_moments(mu_in, 6)[(3, 3)].real
    assert abs(report.gamma33 - true_g33) < 1e-6 * (1.0 + abs(true_g33))


def test_rank_two_solve(rank_two_solution):
    seq, mu, report = rank_two_solution
    assert report.case is C.RANK_TWO_CASE_II2
    assert report.achieved_support == report.predicted_support == 8
    assert report.rank_M3 == report.rank_M4 == 8
    assert report.notes == ()
    assert report.max_moment_residual < 1e-8
    assert report.gamma33 > max(report.middle.a, report.middle.e)


def test_eight_atom_input_admits_seven_atom_measure(generic_eight_solution):
    # economical representation: the solver finds 7 atoms for data that
    # was synthesized from 8
    seq, mu, report = generic_eight_solution
    assert len(golden.generic_eight_measure()) == 8
    assert report.case is C.RANK_ONE_CASE_II1
    assert report.achieved_support == report.predicted_support == 7
    assert report.notes == ()
    assert report.max_moment_residual < 1e-12


def test_variety_instance_solve(variety_solution):
    _, mu, report = variety_solution
    assert report.case is C.RANK_ONE_CASE_II1
    assert report.achieved_support == 7
    assert report.notes == ()
    assert report.max_moment_residual < 1e-8


def test_rank_one_fallback_lands_in_rank_two_family(fallback_solution):
    _, mu, report = fallback_solution
    assert report.case is C.RANK_ONE_CASE_II1
    assert report.achieved_support == 8
    assert report.predicted_support == 7
    assert report.rank_M3 == 8
    assert report.notes == (
        "rank-one completion family admits no flat extension; falling back "
        "to the rank-two family",
        "achieved support 8 differs from predicted 7",
    )
    assert report.max_moment_residual < 1e-10


def test_degenerate_boundary_fails_honestly(degenerate_seq):
    with pytest.raises(FlatnessFailure, match="extends flatly"):
        solve(degenerate_seq)


def test_unsupported_family_raises(unsupported_seq):
    with pytest.raises(UnsupportedCase, match="open case"):
        solve(unsupported_seq)


def test_rootless_families_fail_honestly(rank_one_no_root_seq, rank_two_no_root_seq):
    with pytest.raises(FlatnessFailure):
        solve(rank_one_no_root_seq)
    with pytest.raises(FlatnessFailure):
        solve(rank_two_no_root_seq)


def test_gamma33_override_reproduces_the_scanned_solution(rank_one_solution):
    seq, mu, report = rank_one_solution
    mu2, rep2 = solve(seq, SolverConfig(gamma33_override=report.gamma33))
    assert rep2.achieved_support == 7
    assert rep2.gamma33 == report.gamma33
    golden.match_atoms(mu2.atoms, mu.atoms)


def test_gamma33_override_far_from_any_root_fails(rank_one_solution):
    seq, _, _ = rank_one_solution
    with pytest.raises(FlatnessFailure, match="overridden gamma_33"):
        solve(seq, SolverConfig(gamma33_override=1e6))


# ---------------------------------------------------------------- guards


def test_solve_requires_quintic_data():
    with pytest.raises(DegreeTooLow):
        solve(golden.measure_sequence(golden.REF_ATOMS, golden.REF_WEIGHTS, 4))
    with pytest.raises(DegreeTooLow):
        solve(golden.measure_sequence(golden.REF_ATOMS, golden.REF_WEIGHTS, 6))


def test_solve_rejects_indefinite_data():
    table = dict(golden.REF_TABLE)
    table[(2, 2)] = -8.0
    with pytest.raises(NotPsd):
        solve(validate_sequence(table, 5))


def test_solve_rejects_broken_range_inclusion():
    seq = golden.measure_sequence(golden.REF_ATOMS[:5], golden.REF_WEIGHTS[:5])
    table = seq.as_dict()
    table[MonomialIndex(0, 5)] += 0.5
    table[MonomialIndex(5, 0)] += 0.5
    with pytest.raises(RangeNotIncluded):
        solve(validate_sequence(table, 5))
