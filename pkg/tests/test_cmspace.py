from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opertools.cmspace import (CMPoint, _dyad, build_T_from_diag, epsilon_level, limit_check, mirror_map,
                               rank_one_residual, rational_level, rational_mirror, relation_lhs)
from opertools.lax import charpoly, lax_trs
from opertools.poly import Poly

from conftest import distinct, small_frac

F = Fraction


def diag(vals):
    return np.diag(np.array(vals, dtype=complex))


def test_commuting_diagonals_zero_residual():
    pt = CMPoint(diag([1, 2]), diag([3, 4]), np.zeros(2), np.zeros(2), "q", 1)
    assert rank_one_residual(pt) == 0


def test_trs_lax_is_rank_one_partner():
    T = lax_trs(2, (1, 3), (1, 1)).matrix.astype(complex)
    pt = CMPoint(diag([1, 3]), T, np.zeros(2), np.zeros(2), "q", 2)
    u, v = _dyad(relation_lhs(pt))
    pt = CMPoint(pt.M, T, u, v, "q", 2)
    assert rank_one_residual(pt) < 1e-12


def test_perturbation_detected():
    pt = build_T_from_diag([1.0, 3.0], [1.0, 1.0], 2.0)
    res = []
    for delta in (1e-3, 1e-4):
        bumped = pt.T.copy()
        bumped[0, 1] += delta
        res.append(rank_one_residual(CMPoint(pt.M, bumped, pt.u, pt.v, "q", 2.0)))
    assert res[0] > 0 and res[0] / res[1] == pytest.approx(10, rel=1e-3)


def test_build_T_single_particle():
    pt = build_T_from_diag([F(3)], [F(5)], F(2))
    assert pt.T[0, 0] == 5
    assert pt.u[0] * pt.v[0] == 5 * 3 * (2 - 1)


def test_build_T_examples():
    pt = build_T_from_diag((1, 3), (F(2, 5), 10), 2)
    assert charpoly(pt.T) == Poly([F(2), F(-3), F(1)])
    assert rank_one_residual(pt) == 0
    pt = build_T_from_diag((1, 3), (1, 1), 2)
    assert charpoly(pt.T) == charpoly(lax_trs(2, (1, 3), (1, 1)).matrix)


def test_build_T_rejects_pole():
    with pytest.raises(ValueError):
        build_T_from_diag((1, 2), (1, 1), 2)


def test_mirror_fixed_point():
    d = diag([1, 2])
    pt = CMPoint(d, d.copy(), np.zeros(2), np.zeros(2), "q", 1)
    img = mirror_map(pt)
    assert np.array_equal(img.M, pt.M) and np.array_equal(img.T, pt.T) and img.param == 1


def test_mirror_level_guards():
    pt = rational_level((0, 1), (1, 2))
    with pytest.raises(ValueError):
        mirror_map(pt)
    with pytest.raises(ValueError):
        rational_mirror(build_T_from_diag((1, 3), (1, 1), 2))


@pytest.mark.parametrize("mode", ["tCM", "rRS"])
def test_epsilon_single_particle(mode):
    pt = epsilon_level(F(1, 2), [F(3)], [F(7)], mode=mode)
    assert relation_lhs(pt)[0, 0] == F(1, 2) * pt.T[0, 0]
    assert rank_one_residual(pt) == 0


def test_epsilon_bad_mode():
    with pytest.raises(ValueError):
        epsilon_level(1, (0, 1), (1, 1), mode="other")


def test_limit_guards():
    data = {"twist": [1.0, 2.0], "momenta": [0.5, 1.0]}
    with pytest.raises(ValueError):
        limit_check("tRS", "tCM", data, [1e-3])
    with pytest.raises(ValueError):
        limit_check("tRS", "tCM", data, [0.0, 1e-3])
    with pytest.raises(ValueError):
        limit_check("tRS", "tCM", data, [1e-3, 1e-3])
    with pytest.raises(ValueError):
        limit_check("rCM", "tRS", data)


def test_limit_first_order():
    rep = limit_check("tRS", "tCM", {"twist": [1.0, 2.0, 4.0], "momenta": [0.5, 1.0, 2.0], "eps": 1.0})
    assert rep.deviations[0] / rep.deviations[1] == pytest.approx(10, rel=0.1)
    assert max(rep.source_residuals) < 1e-8
    rep = limit_check("eps", "rCM", {"twist": [0.0, 1.0, 3.0], "momenta": [1.0, -1.0, 2.0]})
    assert rep.order == pytest.approx(1.0, abs=0.1)
    assert set(rep.to_json()) >= {"order", "deviations", "roundoff_dominated"}


@given(distinct(small_frac, 3), st.lists(small_frac, min_size=3, max_size=3))
def test_rank_one_exact_all_levels(tw, p):
    if any(F(5, 2) * a == b for a in tw for b in tw):
        return
    assert rank_one_residual(build_T_from_diag(tw, p, F(5, 2))) == 0
    assert rank_one_residual(epsilon_level(F(1, 3), tw, p, "tCM")) == 0
    assert rank_one_residual(epsilon_level(F(1, 3), tw, p, "rRS")) == 0
    assert rank_one_residual(rational_level(tw, p)) == 0


@given(distinct(small_frac, 3), st.lists(small_frac, min_size=3, max_size=3))
def test_mirror_is_involution(tw, p):
    if any(F(5, 2) * a == b for a in tw for b in tw):
        return
    pt = build_T_from_diag(tw, p, F(5, 2))
    img = mirror_map(pt)
    assert rank_one_residual(img) == 0
    back = mirror_map(img)
    assert back.param == pt.param
    assert all((back.u == pt.u).tolist()) and all((back.M == pt.M).ravel().tolist())


@given(distinct(small_frac, 3), st.lists(small_frac, min_size=3, max_size=3))
def test_rational_mirror_preserves_relation(tw, p):
    img = rational_mirror(rational_level(tw, p))
    assert rank_one_residual(img) == 0
