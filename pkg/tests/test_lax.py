from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opertools.corners import Corner
from opertools.lax import (LaxModel, charpoly, hamiltonians, lax_for_corner, lax_rcm, lax_rrs, lax_tcm,
                           lax_trs, wronskian_lax)
from opertools.poly import Poly
from opertools.wronskian import Frame, TwistCollisionError, full_determinant

from conftest import distinct, random_fracs, small_frac

F = Fraction


def entries(model):
    return [[F(str(x)) if not isinstance(x, F) else x for x in row] for row in model.matrix.tolist()]


def test_single_particle_is_momentum():
    for model in (lax_trs(2, [3], [F(5)]), lax_tcm(1, [3], [F(5)]), lax_rrs(1, [3], [F(5)]),
                  lax_rcm([3], [F(5)])):
        assert entries(model) == [[5]]


def test_trs_example():
    assert entries(lax_trs(2, (1, 3), (1, 1))) == [[F(5, 4), F(-1, 4)], [F(3, 4), F(1, 4)]]
    assert hamiltonians(lax_trs(2, (1, 3), (F(2, 5), 10))) == [3, 2]


def test_tcm_examples():
    assert entries(lax_tcm(1, (1, 3), (0, 0))) == [[F(1, 2), F(1, 2)], [F(-3, 2), F(-3, 2)]]
    p1, p2 = F(2, 7), F(-5, 3)
    h1, h2 = hamiltonians(lax_tcm(1, (1, 3), (p1, p2)))
    assert h1 == p1 + p2 - 1
    assert h2 == p1 * p2 - (3 * p1 - p2) / 2


def test_rrs_examples():
    m = lax_rrs(1, (0, 1), (1, 1), variant=True)
    assert entries(m) == [[2, -1], [1, 0]]
    assert charpoly(m.matrix) == Poly([F(1), F(-2), F(1)])
    assert hamiltonians(m) == [2, 1]


def test_rrs_variant_is_conjugate():
    a = lax_rrs(1, (0, 1, 3), (F(1, 2), 2, 5))
    b = lax_rrs(1, (0, 1, 3), (F(1, 2), 2, 5), variant=True)
    assert charpoly(a.matrix) == charpoly(b.matrix)


def test_rcm_examples():
    assert entries(lax_rcm((0, 1), (0, 0))) == [[1, 1], [-1, -1]]
    p1, p2 = F(3, 4), F(-2)
    assert charpoly(lax_rcm((0, 1), (p1, p2)).matrix) == Poly([p1 * p2 - p1 + p2, -(p1 + p2), F(1)])


def test_hamiltonians_identity():
    eye = np.array([[F(int(i == j)) for j in range(3)] for i in range(3)], dtype=object)
    assert hamiltonians(eye) == [3, 3, 1]


def test_trs_warns_on_q_collision():
    with pytest.warns(UserWarning):
        lax_trs(2, (2, 1), (1, 1))


def test_collision_rejected():
    with pytest.raises(TwistCollisionError):
        lax_rcm((1, 1), (0, 0))


def test_unknown_tag():
    with pytest.raises(ValueError):
        LaxModel("XYZ", np.eye(2))


def test_float_inputs_give_complex():
    m = lax_trs(2.0, (1.0, 3.0), (1.0, 1.0))
    assert m.matrix.dtype == complex and not m.exact


CORNERS = [Corner.q(F(3, 2)), Corner.eps(F(1, 2)), Corner.rational(), Corner.trig()]


@pytest.mark.parametrize("corner", CORNERS, ids=lambda c: c.kind.value)
def test_lax_matches_wronskian_determinant(corner, rng):
    for n in range(1, 5):
        tw, p = random_fracs(rng, n), random_fracs(rng, n, nonzero=False)
        lam, _ = full_determinant(Frame.canonical(corner, tw, p))
        assert charpoly(lax_for_corner(corner, tw, p).matrix) == lam
        assert charpoly(wronskian_lax(Frame.canonical(corner, tw, p)).matrix) == lam


@given(distinct(small_frac, 3), st.lists(small_frac, min_size=3, max_size=3))
def test_hamiltonians_multilinear_in_momenta(tw, p):
    # H_k is affine in each single momentum
    def h(x):
        return hamiltonians(lax_rcm(tw, [x, p[1], p[2]]))

    h0, h1, h2 = h(F(0)), h(F(1)), h(F(2))
    assert all(c - b == b - a for a, b, c in zip(h0, h1, h2))


@given(distinct(small_frac, 3), st.lists(small_frac, min_size=3, max_size=3),
       st.permutations([0, 1, 2]))
def test_lax_spectrum_permutation_invariant(tw, p, perm):
    a = hamiltonians(lax_tcm(F(1, 3), tw, p))
    b = hamiltonians(lax_tcm(F(1, 3), [tw[i] for i in perm], [p[i] for i in perm]))
    assert a == b
