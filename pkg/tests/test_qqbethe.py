from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opertools.corners import Corner
from opertools.poly import Poly
from opertools.qqbethe import (QQ_ORIENTATION, CartanMatrix, QQData, bethe_residual, dd_residual,
                               extract_Q, nondegenerate, pin_orientation, qq_relative_residual, qq_residual)
from opertools.wronskian import Frame, det_poly, det_scalar, minor_matrix, vandermonde

from conftest import distinct, random_fracs, small_frac

F = Fraction


def P(*c):
    return Poly([F(x) for x in c])


def all_zero(polys):
    return all(p.is_zero() for p in polys)


@pytest.fixture
def xxz():
    return Frame.canonical(Corner.q(2), (1, 3), (F(2, 5), 10))


def test_cartan_matrix():
    a = CartanMatrix(3)
    assert a[1, 1] == 2 and a[1, 2] == -1 and a[1, 3] == 0
    assert np.array_equal(a.matrix, a.matrix.T)


def test_extract_q_examples(xxz):
    assert extract_Q(xxz, 1, "plus")[0] == P(F(-2, 5), 1)
    assert extract_Q(xxz, 1, "minus")[0] == P(-10, 1)
    q2, lead = extract_Q(xxz, 2, "plus")
    assert q2 == P(2, -3, 1) and lead == 1


def test_extract_q_bad_node(xxz):
    with pytest.raises(IndexError):
        extract_Q(xxz, 3, "plus")
    with pytest.raises(IndexError):
        extract_Q(xxz, 2, "minus")
    with pytest.raises(ValueError):
        extract_Q(xxz, 1, "sideways")


def test_qq_constant_solution():
    data = QQData([P(1)], [P(1)], [P(1)])
    for corner in (Corner.q(2), Corner.eps(1), Corner.rational(), Corner.trig()):
        assert all_zero(qq_residual(data, (1, 3), corner))


def test_qq_xxz_example(xxz):
    data = QQData.from_frame(xxz)
    assert data.lambdas[-1] == P(2, -3, 1)
    assert all_zero(qq_residual(data, xxz.twist, xxz.corner))


def test_qq_perturbation_linear(xxz):
    data = QQData.from_frame(xxz)
    res = []
    for delta in (F(1, 100), F(1, 1000)):
        bumped = QQData([data.qplus[0] + P(delta)], data.qminus, data.lambdas)
        res.append(qq_relative_residual(bumped, xxz.twist, xxz.corner))
    assert res[0] > 0
    assert res[0] / res[1] == pytest.approx(10, rel=0.05)


def test_orientation_pinned():
    assert QQ_ORIENTATION["name"] == "swapped"
    assert pin_orientation(seed=3, trials=1) == "swapped"


def test_dd_constants():
    # d+ = d- = 1 closes with the (y_{i+1} - y_i) source on constants
    assert all_zero(dd_residual([P(1)], [P(1)], (0, 3)))
    # W(2, 2) = 2 * 3 * 2 while the boundary source stays 3 * 1 * 1
    assert dd_residual([P(2)], [P(2)], (0, 3))[0] == P(9)


def test_dd_from_rational_frame():
    fr = Frame.canonical(Corner.rational(), (0, 1, 3), (F(1, 2), 2, -1))

    def d(rows):
        v = det_scalar(vandermonde([fr.twist[r] for r in rows], fr.corner))
        return det_poly(minor_matrix(fr, rows)) * (1 / v)

    dp = [d([0]), d([0, 1]), d([0, 1, 2])]
    dm = [d([1]), d([0, 2])]
    assert all_zero(dd_residual(dp, dm, fr.twist))


def test_dd_wronskian_part_bilinear():
    dp, dm, tw = [P(1, 1)], [P(-2, 1)], (0, 2)
    source = P(tw[1] - tw[0])
    wr = dd_residual(dp, dm, tw)[0] + source
    scaled = dd_residual([p * 3 for p in dp], [p * 3 for p in dm], tw)[0] + source
    assert scaled == wr * 9


def test_nondegenerate_examples(xxz):
    data = QQData.from_frame(xxz)
    ok, issues = nondegenerate(data, xxz.twist, xxz.corner, window=8)
    assert ok and not issues
    bad = QQData([P(-2, 1)], [P(1)], [P(2, -3, 1)])
    ok, issues = nondegenerate(bad, (1, 3), Corner.q(2))
    assert not ok and any("shift 0" in s for s in issues)
    ok, issues = nondegenerate(data, (1, 2), Corner.q(2))
    assert not ok and any("twist" in s for s in issues)


def test_bethe_xxz_example(xxz):
    data = QQData.from_frame(xxz)
    terms = bethe_residual(data, xxz.twist, xxz.corner)
    assert len(terms) == 1 and terms[0].root == F(2, 5) and terms[0].value == 0


def test_bethe_rational_gaudin():
    data = QQData([P(1, 1)], [P(1)], [P(0, 1)])
    terms = bethe_residual(data, (0, 1), Corner.rational())
    assert terms[0].root == -1 and terms[0].value == 0


def test_bethe_trig_gaudin_printed():
    data = QQData([P(-1, 1)], [P(1)], [P(-2, 1)])
    terms = bethe_residual(data, (0, 1), Corner.trig(), trig_form="printed")
    assert terms[0].root == 1 and terms[0].value == 0


def test_bethe_trig_forms_differ():
    data = QQData([P(-1, 1)], [P(1)], [P(-2, 1)])
    assert bethe_residual(data, (0, 1), Corner.trig(), trig_form="qq")[0].value != 0
    with pytest.raises(ValueError):
        bethe_residual(data, (0, 1), Corner.trig(), trig_form="other")


CORNERS = [Corner.q(F(3, 2)), Corner.eps(F(1, 2)), Corner.rational(), Corner.trig()]


@pytest.mark.parametrize("corner", CORNERS, ids=lambda c: c.kind.value)
@given(momenta=distinct(small_frac, 3), twist=distinct(st.integers(min_value=1, max_value=12), 3))
def test_qq_from_minors_exact(corner, momenta, twist):
    fr = Frame.canonical(corner, [F(t, 2) for t in twist], momenta)
    try:
        data = QQData.from_frame(fr)
    except ArithmeticError:
        return
    assert all_zero(qq_residual(data, fr.twist, corner))


@pytest.mark.parametrize("corner", CORNERS, ids=lambda c: c.kind.value)
def test_bethe_holds_on_generic_frames(corner, rng):
    checked = 0
    for _ in range(10):
        n = int(rng.integers(2, 4))
        fr = Frame.canonical(corner, random_fracs(rng, n), random_fracs(rng, n))
        data = QQData.from_frame(fr)
        ok, _ = nondegenerate(data, fr.twist, corner)
        if not ok:
            continue
        for t in bethe_residual(data, fr.twist, corner):
            assert t.relative < 1e-8
        checked += 1
    assert checked >= 5
