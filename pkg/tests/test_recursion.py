"""Recursive sequence extension against closed-form oracles.

The workhorse oracle is the uniform measure on the cube roots of unity:
z^3 = 1 holds on the support, so gamma_ij is 3 when i - j is divisible by
3 and 0 otherwise, exactly, at every degree.
"""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import golden
from tcmp.errors import ConflictingEntry, DegreeTooLow, MissingInitialData
from tcmp.moments import BivariatePolynomial, MonomialIndex, monomial, validate_sequence
from tcmp.recursion import (
    ExtensionWindow,
    GeneratingPolynomial,
    check_lien,
    conjugate_generating,
    extend_by_recurrence,
    is_generating,
)

CUBE_RELATION = GeneratingPolynomial(
    leading=MonomialIndex(0, 3), tail=monomial(0, 0, 1.0)
)


def cube_roots_table(degree):
    return {
        (i, j): complex(3.0 if (j - i) % 3 == 0 else 0.0)
        for i in range(degree + 1)
        for j in range(degree + 1 - i)
    }


def cube_roots_block(d):
    # full d x d seed block, the shape the recursion actually consumes
    return {
        (i, j): complex(3.0 if (j - i) % 3 == 0 else 0.0)
        for i in range(d)
        for j in range(d)
    }


def test_cube_roots_sequence_is_generated_exactly():
    seq = validate_sequence(cube_roots_table(8), 8)
    ok, worst = is_generating(seq, CUBE_RELATION, ExtensionWindow(5))
    assert ok
    assert worst == 0.0


def test_extension_reproduces_cube_roots_closed_form():
    seed = cube_roots_block(3)
    out = extend_by_recurrence(seed, CUBE_RELATION, 8)
    expected = cube_roots_table(8)
    for key, val in expected.items():
        assert abs(out.gamma(*key) - val) < 1e-12


def test_wrong_tail_is_not_generating():
    seq = validate_sequence(cube_roots_table(8), 8)
    bad = GeneratingPolynomial(MonomialIndex(0, 3), monomial(0, 0, 2.0))
    ok, worst = is_generating(seq, bad, ExtensionWindow(5))
    assert not ok
    assert worst == pytest.approx(3.0)


def test_extension_detects_conflicting_entry():
    seed = cube_roots_block(3)
    seed[(0, 3)] = 0.0  # recurrence forces gamma_03 = gamma_00 = 3
    seed[(3, 0)] = 0.0
    with pytest.raises(ConflictingEntry):
        extend_by_recurrence(seed, CUBE_RELATION, 4)


def test_extension_requires_full_seed_block():
    seed = cube_roots_block(3)
    del seed[(1, 1)]
    with pytest.raises(MissingInitialData):
        extend_by_recurrence(seed, CUBE_RELATION, 5)


def test_extension_requires_pure_power_leading():
    g = GeneratingPolynomial(MonomialIndex(1, 2), monomial(0, 1, 1.0))
    with pytest.raises(ValueError):
        extend_by_recurrence(cube_roots_table(3), g, 6)


def test_point_mass_extension():
    # z = 1 on the support of delta_1: every moment equals the mass
    g = GeneratingPolynomial(MonomialIndex(0, 1), monomial(0, 0, 1.0))
    out = extend_by_recurrence({(0, 0): 2.5}, g, 6)
    for i in range(7):
        for j in range(7 - i):
            assert out.gamma(i, j) == pytest.approx(2.5)


def test_conjugate_generating_is_involutive():
    g = GeneratingPolynomial(
        MonomialIndex(1, 2),
        BivariatePolynomial({(0, 1): 1 + 2j, (2, 0): -0.5j}),
    )
    gg = conjugate_generating(conjugate_generating(g))
    assert gg.leading == g.leading
    assert gg.tail.coeffs == g.tail.coeffs
    assert conjugate_generating(g).leading == MonomialIndex(2, 1)


def test_generating_polynomial_validation():
    with pytest.raises(ValueError):
        GeneratingPolynomial(MonomialIndex(0, 2), monomial(0, 2, 1.0))
    with pytest.raises(ValueError):
        GeneratingPolynomial(MonomialIndex(0, 1), monomial(0, 3, 1.0))
    with pytest.raises(ValueError):
        ExtensionWindow(-1)


def test_window_needs_enough_degree():
    seq = validate_sequence(cube_roots_table(4), 4)
    with pytest.raises(DegreeTooLow):
        is_generating(seq, CUBE_RELATION, ExtensionWindow(2))


def test_reference_relations_generate_and_vanish(ref_seq):
    g_z3 = GeneratingPolynomial(
        MonomialIndex(0, 3), BivariatePolynomial(golden.REF_RELATION_Z3)
    )
    g_mixed = GeneratingPolynomial(
        MonomialIndex(1, 2), BivariatePolynomial(golden.REF_RELATION_ZB_Z2)
    )
    ok, worst = is_generating(ref_seq, g_z3, ExtensionWindow(2))
    assert ok and worst < 1e-12
    ok, worst = is_generating(ref_seq, g_mixed, ExtensionWindow(2))
    assert ok and worst < 1e-12
    for g in (g_z3, g_mixed):
        p = g.relation()
        for atom in golden.REF_ATOMS:
            assert abs(p(atom)) < 1e-12


def test_check_lien_on_reference_relation(ref_seq):
    g = GeneratingPolynomial(
        MonomialIndex(1, 2), BivariatePolynomial(golden.REF_RELATION_ZB_Z2)
    )
    assert check_lien(ref_seq, g)
    skewed = dict(golden.REF_RELATION_ZB_Z2)
    skewed[(0, 2)] = skewed[(0, 2)] + 0.1
    bad = GeneratingPolynomial(MonomialIndex(1, 2), BivariatePolynomial(skewed))
    assert not check_lien(ref_seq, bad)
    with pytest.raises(ValueError):
        check_lien(ref_seq, GeneratingPolynomial(MonomialIndex(0, 2), monomial(0, 1)))


@given(
    z1=st.builds(complex, st.floats(-1.2, 1.2), st.floats(-1.2, 1.2)),
    z2=st.builds(complex, st.floats(-1.2, 1.2), st.floats(-1.2, 1.2)),
)
@settings(max_examples=25, deadline=None)
def test_two_atom_analytic_relation_extends(z1, z2):
    assume(abs(z1 - z2) > 0.2)
    # (z - z1)(z - z2) = 0 on the support
    g = GeneratingPolynomial(
        MonomialIndex(0, 2),
        BivariatePolynomial({(0, 1): z1 + z2, (0, 0): -z1 * z2}),
    )
    atoms = (z1, z2)
    weights = (1.0, 0.7)
    seed = golden.measure_sequence(atoms, weights, 2).as_dict()
    out = extend_by_recurrence(seed, g, 8)
    want = golden.measure_sequence(atoms, weights, 8)
    for idx in out.as_dict():
        got = out.gamma(*idx)
        ref = want.gamma(*idx)
        assert abs(got - ref) <= 1e-8 * (1.0 + abs(ref))
