import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adslf.algebra import (
    E0,
    E1,
    E2,
    E3,
    E_MINUS,
    E_PLUS,
    AdsPoint,
    H2Point,
    SlVec,
    ad_action,
    bracket,
    bracket_identities_check,
    det2,
    exp_sl,
    from_gl_coords,
    gl_coords,
    gl_inner,
    project_orthogonal,
    sl_inner,
    to_mat,
    to_sl,
)
from adslf.errors import PreconditionViolated, SingularMatrix

finite = st.floats(-3, 3, allow_nan=False)
vec3 = arrays(float, 3, elements=finite)
mat2 = arrays(float, (2, 2), elements=finite)


def series_exp(m, terms=30):
    out = np.eye(2)
    term = np.eye(2)
    for k in range(1, terms + 1):
        term = term @ m / k
        out = out + term
    return out


def test_gl_inner_examples():
    assert gl_inner(E0, E0) == -1
    assert gl_inner(E2, E2) == 1
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert gl_inner(m, m) == pytest.approx(2.0, abs=1e-15)


def test_sl_inner_examples():
    assert sl_inner([1, 0, 0], [1, 0, 0]) == -1
    assert sl_inner([0, 0, 1], [0, 0, 1]) == 1
    v = np.array([1.0, 2.0, 0.0])
    assert sl_inner(v, v) == 3
    assert sl_inner(v, v) == pytest.approx(-det2(to_mat(v)))


def test_bracket_table():
    np.testing.assert_array_equal(bracket([1, 0, 0], [0, 1, 0]), [0, 0, 2])
    np.testing.assert_array_equal(bracket([0, 1, 0], [0, 0, 1]), [-2, 0, 0])
    np.testing.assert_array_equal(bracket([0.3, 1, 2], [0.3, 1, 2]), [0, 0, 0])


def test_bracket_matches_commutator(rng):
    u, v = rng.standard_normal((2, 50, 3))
    U, V = to_mat(u), to_mat(v)
    np.testing.assert_allclose(to_mat(bracket(u, v)), U @ V - V @ U, atol=1e-13)


def test_ad_action_examples():
    np.testing.assert_allclose(ad_action(np.eye(2), [0.2, 0.5, -1]), [0.2, 0.5, -1])
    s = 0.8
    g = exp_sl([0, 0, s / 2])
    np.testing.assert_allclose(ad_action(g, [1, 0, 0]), [np.cosh(s), np.sinh(s), 0], atol=1e-14)
    n = np.array([[1.0, 1.0], [0.0, 1.0]])
    got = ad_action(n, [1, 0, 0])
    np.testing.assert_allclose(to_mat(got), [[1, -2], [1, -1]], atol=1e-15)
    np.testing.assert_allclose(got, [1.5, -0.5, -1], atol=1e-15)
    assert sl_inner(got, got) == pytest.approx(-1)


def test_ad_action_singular():
    with pytest.raises(SingularMatrix):
        ad_action(np.zeros((2, 2)), [1, 0, 0])


def test_exp_examples():
    np.testing.assert_array_equal(exp_sl([0, 0, 0]), np.eye(2))
    np.testing.assert_allclose(exp_sl(0.7 * to_sl(E_PLUS)), np.eye(2) + 0.7 * E_PLUS, atol=1e-15)
    np.testing.assert_allclose(exp_sl([np.pi / 2, 0, 0]), E1, atol=1e-15)


def test_exp_frozen():
    np.testing.assert_allclose(
        exp_sl([0.3, 0.4, 0.5]),
        [[0.6372158401511128, 0.1054193197234146], [0.7379352380639019, 1.6914090373852584]],
        atol=1e-15,
    )
    np.testing.assert_allclose(
        exp_sl([0.5, 0.4, 0.1]),
        [[0.8615939667179771, -0.09867198985254909], [0.888047908672942, 1.0589379464230753]],
        atol=1e-15,
    )


def test_nilpotents():
    np.testing.assert_array_equal(E_PLUS @ E_PLUS, np.zeros((2, 2)))
    np.testing.assert_array_equal(E_MINUS @ E_MINUS, np.zeros((2, 2)))
    np.testing.assert_array_equal(E_PLUS @ E_MINUS, [[1, 0], [0, 0]])


def test_coordinates():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(gl_coords(m), [2.5, 0.5, 2.5, 1.5])
    np.testing.assert_allclose(from_gl_coords(gl_coords(m)), m)
    for e, c in ((E1, [1, 0, 0]), (E2, [0, 1, 0]), (E3, [0, 0, 1])):
        np.testing.assert_array_equal(to_sl(e), c)


def test_identities_on_basis():
    np.testing.assert_allclose(bracket_identities_check([0, 1, 0], [0, 0, 1], [1, 0, 0]), 0, atol=1e-15)


def test_identities_precondition():
    with pytest.raises(PreconditionViolated):
        bracket_identities_check([0, 1, 0], [0, 0, 1], [0, 1, 0])


def test_value_types():
    assert np.asarray(SlVec(1, 2, 3)).tolist() == [1, 2, 3]
    H2Point(SlVec(1.0, 0.0, 0.0))
    with pytest.raises(PreconditionViolated):
        H2Point(SlVec(-1.0, 0.0, 0.0))
    with pytest.raises(PreconditionViolated):
        AdsPoint(2 * np.eye(2))


@settings(max_examples=200, deadline=None)
@given(mat2)
def test_gl_inner_is_minus_det(m):
    assert abs(gl_inner(m, m) + det2(m)) <= 1e-14 * max(1.0, np.abs(m).max() ** 2)


@settings(max_examples=200, deadline=None)
@given(vec3)
def test_round_trip(v):
    np.testing.assert_allclose(to_sl(to_mat(v)), v, rtol=0, atol=4e-16 * max(1.0, np.abs(v).max()))


@settings(max_examples=200, deadline=None)
@given(arrays(float, 3, elements=st.integers(-2**20, 2**20).map(lambda k: k / 64)))
def test_round_trip_exact_on_dyadics(v):
    np.testing.assert_array_equal(to_sl(to_mat(v)), v)


@settings(max_examples=200, deadline=None)
@given(vec3, vec3, vec3)
def test_identities_random(x, y, z):
    if abs(sl_inner(x, x) * sl_inner(y, y) - sl_inner(x, y) ** 2) < 1e-3:
        return
    z = project_orthogonal(z, x, y)
    scale = 1 + np.linalg.norm(x) * np.linalg.norm(y) * (1 + np.linalg.norm(z) ** 2)
    assert bracket_identities_check(x, y, z, tol=1e-8).max() <= 1e-12 * scale


@settings(max_examples=200, deadline=None)
@given(arrays(float, 3, elements=st.floats(-1.15, 1.15)))
def test_exp_matches_series(v):
    np.testing.assert_allclose(exp_sl(v), series_exp(to_mat(v)), atol=1e-12)
    assert det2(exp_sl(v)) == pytest.approx(1, abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(arrays(float, 3, elements=st.floats(-1, 1)), vec3, vec3)
def test_ad_preserves_structure(a, x, y):
    g = exp_sl(a)
    gx, gy = ad_action(g, x), ad_action(g, y)
    assert sl_inner(gx, gy) == pytest.approx(sl_inner(x, y), abs=1e-11)
    np.testing.assert_allclose(bracket(gx, gy), ad_action(g, bracket(x, y)), atol=1e-11)


def test_nilpotent_branch_near_zero_det():
    v = np.array([1.0, 1.0, 1e-9])
    np.testing.assert_allclose(exp_sl(v), series_exp(to_mat(v)), atol=1e-14)
