from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opertools.corners import Corner
from opertools.poly import (Poly, elem_sym, eval_poly, from_roots, partial_sym, roots, shift,
                            twisted_derivative)
from opertools.scalar import CRational

from conftest import distinct, small_frac

F = Fraction


def P(*c):
    return Poly([F(x) for x in c])


def test_eval_examples():
    assert eval_poly(P(2, -3, 1), 1) == 0
    assert eval_poly(Poly([]), 7) == 0
    assert eval_poly(P(F(-2, 5), 1), F(4, 5)) == F(2, 5)


def test_shift_examples():
    assert shift(P(1, 0, 1), Corner.q(2)) == P(1, 0, 4)
    assert shift(P(0, 1), Corner.eps(1)) == P(1, 1)
    assert shift(P(0, 0, 1), Corner.eps(1)) == P(1, 2, 1)


def test_twisted_derivative_examples():
    assert twisted_derivative(P(0, 1), 2, Corner.rational()) == P(1, 2)
    assert twisted_derivative(P(-3, 1), 1, Corner.trig()) == P(-3, 2)
    assert twisted_derivative(P(5), 0, Corner.rational()).is_zero()


def test_roots_examples():
    assert sorted(complex(r).real for r in roots(P(2, -3, 1))) == [1, 2]
    assert roots(P(F(-2, 5), 1)) == [F(2, 5)]
    rs = sorted(complex(r).real for r in roots(P(-6, 11, -6, 1)))
    assert np.allclose(rs, [1, 2, 3])


def test_roots_exact_quadratic_stays_exact():
    rs = roots(P(2, -3, 1))
    assert all(isinstance(r, (int, Fraction, CRational)) for r in rs)


def test_elem_sym_examples():
    assert elem_sym([1, 2, 3], 2) == 11
    assert elem_sym([4, 5], 0) == 1
    assert elem_sym([1, 3], 2) == 3


def test_partial_sym_examples():
    # j is 0-based here
    assert partial_sym([1, 3], 1, 0) == 3
    assert partial_sym([1, 3], 0, 1) == 1
    assert partial_sym([1, 2, 3], 2, 1) == 3


def test_exact_division_roundtrip():
    a, b = P(1, 2, 3), P(-1, 1)
    q, r = (a * b).divmod(b)
    assert q == a and r.is_zero()


def test_zero_polynomial_degree():
    assert Poly([]).is_zero()
    assert Poly([0, 0]).is_zero()


@given(distinct(small_frac, 3))
def test_from_roots_vieta(rs):
    p = from_roots(rs)
    n = len(rs)
    for k in range(n + 1):
        assert p.coeff(n - k) == (-1) ** k * elem_sym(rs, k)


@given(st.lists(small_frac, min_size=1, max_size=4), small_frac)
def test_q_shift_scales_argument(cs, z):
    p = Poly(cs)
    assert eval_poly(shift(p, Corner.q(3)), z) == eval_poly(p, 3 * z)


@given(st.lists(small_frac, min_size=1, max_size=4), small_frac)
def test_eps_shift_translates_argument(cs, z):
    p = Poly(cs)
    assert eval_poly(shift(p, Corner.eps(F(1, 2))), z) == eval_poly(p, z + F(1, 2))


@given(st.lists(small_frac, min_size=1, max_size=4), st.lists(small_frac, min_size=1, max_size=4))
def test_derivative_product_rule(a, b):
    pa, pb = Poly(a), Poly(b)
    assert (pa * pb).derivative() == pa.derivative() * pb + pa * pb.derivative()


@given(distinct(small_frac, 3), st.integers(min_value=0, max_value=2))
def test_partial_sym_recursion(vals, j):
    # e_k = S_{k,j} + x_j S_{k-1,j}
    for k in range(1, 3):
        assert elem_sym(vals, k) == partial_sym(vals, k, j) + vals[j] * partial_sym(vals, k - 1, j)
    assert elem_sym(vals, 3) == vals[j] * partial_sym(vals, 2, j)


@given(distinct(st.integers(min_value=-20, max_value=20), 4))
def test_float_roots_recover_integers(rs):
    p = from_roots([float(r) for r in rs])
    got = sorted(complex(r).real for r in roots(p))
    assert np.allclose(got, sorted(rs), atol=1e-6)
