from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cs3.errors import DegenerateRestriction, NotClosed, NotInAlgebra
from cs3.exact import PiRational, array_is_zero, exact_array
from cs3.lie import (
    CS_SCALE,
    BilinearForm,
    algebra_names,
    block_embedding,
    check_ad_invariance,
    get_algebra,
    is_symmetric_pair,
    maurer_cartan_cs_tensor,
    orthogonal_decomposition,
    perp_bracket_component,
    sl4_perp_matrix,
    sl4_perp_parts,
    standard_decomposition,
)

small_ints = st.integers(-4, 4)


@pytest.mark.parametrize("name", algebra_names())
def test_registry_algebras_satisfy_jacobi_and_trace_form_is_invariant(name):
    g = get_algebra(name)
    assert g.jacobi_residual() == 0
    assert g.is_exact
    assert check_ad_invariance(g.trace_form())
    assert g.trace_form().is_symmetric()


def test_so3_brackets_are_cyclic():
    so3 = get_algebra("so3")
    e = np.eye(3, dtype=int)
    assert list(so3.bracket(e[0], e[1])) == [0, 0, 1]
    assert list(so3.bracket(e[1], e[2])) == [1, 0, 0]
    assert list(so3.bracket(e[2], e[0])) == [0, 1, 0]


def test_dimensions():
    dims = {"so3": 3, "su2": 3, "so4": 6, "sl3": 8, "sl4": 15, "so21": 3, "so31": 6, "so22": 6}
    for name, d in dims.items():
        assert get_algebra(name).dim == d


def test_coordinates_roundtrip_and_rejection():
    sl3 = get_algebra("sl3")
    m = sl3.matrix([Fraction(i) for i in range(8)])
    assert list(sl3.coordinates(m)) == list(range(8))
    with pytest.raises(NotInAlgebra):
        get_algebra("so3").coordinates(exact_array(np.eye(3, dtype=int)))


def test_trace_form_example_and_scale():
    so3 = get_algebra("so3")
    form = so3.trace_form(CS_SCALE)
    assert form.scale == PiRational(Fraction(1, 16), -2)
    e = np.eye(3, dtype=int)
    assert so3.trace_form().pair(e[0], e[0]) == -2
    assert form.pair(e[0], e[0]) == Fraction(-2, 16)


@settings(max_examples=60, deadline=None)
@given(st.lists(small_ints, min_size=8, max_size=8), st.lists(small_ints, min_size=8, max_size=8),
       st.lists(small_ints, min_size=8, max_size=8))
def test_bracket_antisymmetric_and_invariant_sl3(x, y, z):
    g = get_algebra("sl3")
    form = g.trace_form()
    x, y, z = (exact_array(v) for v in (x, y, z))
    assert array_is_zero(g.bracket(x, y) + g.bracket(y, x), 0)
    assert form.pair(g.bracket(z, x), y) + form.pair(x, g.bracket(z, y)) == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(small_ints, min_size=6, max_size=6), st.lists(small_ints, min_size=6, max_size=6))
def test_bracket_matches_matrix_commutator_so22(x, y):
    g = get_algebra("so22")
    mx, my = g.matrix(exact_array(x)), g.matrix(exact_array(y))
    assert array_is_zero(g.matrix(g.bracket(exact_array(x), exact_array(y))) - (mx @ my - my @ mx), 0)


def test_symmetric_pairs():
    assert is_symmetric_pair(standard_decomposition("so4", "so3"))
    assert not is_symmetric_pair(standard_decomposition("sl4", "sl3"))
    assert is_symmetric_pair(standard_decomposition("so31", "so21"))


def test_decomposition_projectors():
    d = standard_decomposition("so4", "so3")
    assert array_is_zero(d.projector_top.dot(d.projector_top) - d.projector_top, 0)
    assert array_is_zero(d.projector_top + d.projector_perp - np.eye(6, dtype=int), 0)
    assert d.perp_basis.shape == (6, 3)


def test_degenerate_restriction_raises():
    so3 = get_algebra("so3")
    so4 = get_algebra("so4")
    zero = BilinearForm(so4, exact_array(np.zeros((6, 6), dtype=int)))
    with pytest.raises(DegenerateRestriction):
        orthogonal_decomposition(so4, so3, block_embedding(so3, so4), zero)


def test_non_homomorphic_embedding_raises():
    so3, so4 = get_algebra("so3"), get_algebra("so4")
    emb = block_embedding(so3, so4) * 2
    with pytest.raises(NotClosed):
        orthogonal_decomposition(so4, so3, emb, so4.trace_form())


def _perp_coords(d, a, x, z):
    return d.ambient.coordinates(sl4_perp_matrix(a, x, z))


def test_sl4_perp_bracket_formula_example():
    d = standard_decomposition("sl4", "sl3")
    x = [Fraction(1), 0, 0]
    z = [0, Fraction(1), 0]
    top, perp = perp_bracket_component(d, _perp_coords(d, 1, x, [0, 0, 0]), _perp_coords(d, 0, [0, 0, 0], z))
    a, xx, zz = sl4_perp_parts(d.ambient.matrix(perp))
    assert a == 0 and list(xx) == [0, 0, 0]
    assert list(zz) == [0, Fraction(4, 3), 0]


def test_maurer_cartan_cs_tensor_so3():
    so3 = get_algebra("so3")
    t = maurer_cartan_cs_tensor(so3, so3.trace_form(CS_SCALE))
    # CS(mu_3) = 6 T[0,1,2] w1^w2^psi = (2/16) pi^-2 w1^w2^psi
    assert 6 * t[0, 1, 2] == Fraction(2, 16)
    assert t[0, 1, 2] == -t[1, 0, 2] == t[1, 2, 0]
