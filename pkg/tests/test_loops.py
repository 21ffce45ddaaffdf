import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adslf.algebra import E_MINUS, E_PLUS, h2_normalize
from adslf.errors import NotInBigCell, PreconditionViolated, TruncationOverflow
from adslf.grid import Domain, GridField
from adslf.harmonic import adapted_frame
from adslf.loops import (
    LaurentLoop,
    McSplit,
    big_cell_factor,
    birkhoff_factor,
    hat_alpha,
    loop_mul,
    minus_inverse,
    split_mc_residual,
)
from adslf.presets import example33_potential
from adslf.algebra import to_sl


def random_loop(rng, lo, hi, scale=1.0):
    return LaurentLoop(lo, scale * rng.standard_normal((hi - lo + 1, 2, 2)))


def test_identity_product(rng):
    B = random_loop(rng, -2, 3)
    P = loop_mul(LaurentLoop.identity(), B)
    assert (P.dmin, P.dmax) == (-2, 3)
    np.testing.assert_array_equal(P.coeffs, B.coeffs)


def test_nilpotent_product():
    A = LaurentLoop.from_dict({1: E_PLUS})
    B = LaurentLoop.from_dict({-1: E_MINUS})
    P = A @ B
    np.testing.assert_array_equal(P.coeff(0), [[1, 0], [0, 0]])
    assert not P.coeff(1).any() and not P.coeff(-1).any()


def test_evaluation_homomorphism(rng):
    A = random_loop(rng, -2, 1)
    B = random_loop(rng, -1, 3)
    for lam in (2.0, 0.5 + 0.5j, -1.3):
        np.testing.assert_allclose((A @ B)(lam), A(lam) @ B(lam), atol=1e-12, rtol=1e-12)
    np.testing.assert_allclose(A(1.0), A.coeffs.sum(0), atol=1e-14)


def test_truncation_overflow(rng):
    A = random_loop(rng, -4, 4)
    with pytest.raises(TruncationOverflow):
        loop_mul(A, A, max_order=6)
    with pytest.raises(TruncationOverflow):
        A.padded(-2, 2)


def test_degree_range_must_contain_zero():
    with pytest.raises(ValueError):
        LaurentLoop(1, np.zeros((2, 2, 2)))


def test_hat_alpha_single_potential():
    x = np.linspace(-1, 1, 5)
    z = np.zeros((5, 3))
    ms = McSplit(z, to_sl(example33_potential(x)), z, z)
    xl, yl = hat_alpha(ms)
    assert (xl.dmin, xl.dmax, yl.dmin, yl.dmax) == (0, 1, -1, 0)
    np.testing.assert_allclose(xl.coeff(1), example33_potential(x), atol=1e-15)
    assert not xl.coeff(0).any() and not yl.coeffs.any()


def test_split_check_rejects_mixed_parts():
    z = np.zeros((3, 3))
    bad = z.copy()
    bad[:, 1] = 1.0
    with pytest.raises(PreconditionViolated):
        McSplit(bad, z, z, z).check()


def test_big_cell_examples():
    P = np.array([[2.0, 1.0], [4.0, 3.0]])
    L, U = big_cell_factor(P)
    np.testing.assert_array_equal(L, [[1, 0], [2, 1]])
    np.testing.assert_array_equal(U, [[2, 1], [0, 1]])
    with pytest.raises(NotInBigCell):
        big_cell_factor(np.array([[0.0, 1.0], [-1.0, 0.0]]))


def test_big_cell_random(rng):
    P = rng.standard_normal((10000, 2, 2))
    P = P[np.abs(P[:, 0, 0]) > 1e-3]
    L, U = big_cell_factor(P)
    np.testing.assert_allclose(L @ U, P, atol=1e-13 * np.abs(P).max())
    np.testing.assert_array_equal(L[:, 0, 1], 0)
    np.testing.assert_array_equal(np.diagonal(L, axis1=1, axis2=2), 1)
    np.testing.assert_array_equal(U[:, 1, 0], 0)


def near_identity_loop(rng, N, scale=0.1):
    """P = Hm Hp with Hm(inf) = I; such loops always admit the splitting."""
    m = scale * rng.standard_normal((N + 1, 2, 2))
    m[N] = np.eye(2)
    p = scale * rng.standard_normal((N + 1, 2, 2))
    p[0] += np.eye(2)
    return LaurentLoop(-N, m) @ LaurentLoop(0, p)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_birkhoff_random(N, seed):
    rng = np.random.default_rng(seed)
    P = near_identity_loop(rng, N)
    c = P.coeffs
    for norm in ("identity", "lu"):
        Hm, Hp = birkhoff_factor(P, N=N, normalization=norm)
        assert Hm.dmax == 0 and Hp.dmin == 0
        np.testing.assert_allclose((Hm @ Hp).padded(-N, N), c, atol=1e-10)
        h0 = Hm.coeff(0)
        if norm == "identity":
            np.testing.assert_array_equal(h0, np.eye(2))
        else:
            assert h0[0, 1] == 0 and h0[0, 0] == 1 and h0[1, 1] == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_birkhoff_small_perturbation(N, seed):
    # |P - I| < 1/2 on the circle, so det P cannot wind around 0
    rng = np.random.default_rng(seed)
    c = 0.25 / (2 * N + 1) * rng.standard_normal((2 * N + 1, 2, 2)).clip(-1, 1)
    c[N] += np.eye(2)
    Hm, Hp = birkhoff_factor(LaurentLoop(-N, c), N=N, normalization="identity")
    np.testing.assert_allclose((Hm @ Hp).padded(-N, N), c, atol=1e-10)


def test_birkhoff_exact_on_product(rng):
    m = np.stack([0.2 * rng.standard_normal((2, 2)), np.eye(2)])
    p = np.stack([np.eye(2) + 0.1 * rng.standard_normal((2, 2)), 0.2 * rng.standard_normal((2, 2))])
    Hm0 = LaurentLoop(-1, m)
    Hp0 = LaurentLoop(0, p)
    P = Hm0 @ Hp0
    Hm, Hp = birkhoff_factor(P, N=4, normalization="identity")
    np.testing.assert_allclose(Hm.padded(-4, 0)[-2:], m, atol=1e-12)
    np.testing.assert_allclose(Hp.padded(0, 4)[:2], p, atol=1e-12)


def test_minus_inverse_identity():
    C = np.zeros((5, 2, 2))
    C[2] = np.eye(2)
    Q = minus_inverse(C, 2)
    np.testing.assert_array_equal(Q[-1], np.eye(2))
    np.testing.assert_allclose(Q[:-1], 0, atol=1e-15)


def nonharmonic(h):
    t = Domain(-0.5, 0.5, h).t
    X, Y = np.meshgrid(t, t, indexing="ij")
    v = h2_normalize(np.stack([np.ones_like(X), X * Y, 0.5 * X + 0.2 * Y], -1))
    return GridField(t, t, v)


def test_split_residual_nonharmonic():
    _, ms = adapted_frame(nonharmonic(2e-2))
    r = split_mc_residual(ms, 2e-2).norms
    assert max(r[1], r[2]) > 1e-2


def test_split_residual_harmonic(skew_nu):
    _, ms = adapted_frame(skew_nu)
    ms.check()
    assert max(split_mc_residual(ms, 2e-2).norms) < 1e-5
