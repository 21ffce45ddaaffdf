"""Lorentz harmonic maps into H^2: Cauchy data, frames, the loop-group solver
and an independent characteristic-grid solver."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline

from .algebra import (
    E1,
    ad_action,
    adjugate,
    bracket,
    exp_sl,
    exp_traceless,
    h2_normalize,
    inv2,
    sl_inner,
    sl_norm2,
    to_mat,
    to_sl,
)
from .errors import (
    DegenerateDerivative,
    GridTooSmall,
    NotInBigCell,
    PreconditionViolated,
    SingularData,
    tolerance,
)
from .grid import Domain, GridField, mixed_c
from .loops import DEFAULT_ORDER, McSplit, big_cell_factor, minus_inverse

GAUSS2 = np.array([0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6])


@dataclass
class CauchyData1D:
    """Curve data N0 (in H^2) and N1 (spacelike, orthogonal to N0) on a uniform grid.

    ``fn(s)`` returns (N0, N1, N0', N1') at arbitrary parameters; for
    tabulated data it is built from quintic splines through the samples.
    """

    t: np.ndarray
    fn: object
    provenance: str = "preset"
    name: str = ""
    n0: np.ndarray = field(init=False, repr=False)
    n1: np.ndarray = field(init=False, repr=False)
    dn0: np.ndarray = field(init=False, repr=False)
    dn1: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if len(self.t) < 5:
            raise GridTooSmall("Cauchy data need at least 5 samples")
        steps = np.diff(self.t)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0) or steps[0] <= 0:
            raise ValueError("Cauchy data must live on a uniform increasing grid")
        self.n0, self.n1, self.dn0, self.dn1 = self.fn(self.t)

    @property
    def h(self):
        return self.t[1] - self.t[0]

    @classmethod
    def tabulated(cls, t, n0, n1, name="tabulated"):
        t = np.asarray(t, dtype=float)
        s0 = make_interp_spline(t, np.asarray(n0, dtype=float), k=5, axis=0)
        s1 = make_interp_spline(t, np.asarray(n1, dtype=float), k=5, axis=0)
        d0 = s0.derivative()
        d1 = s1.derivative()

        def fn(s):
            return s0(s), s1(s), d0(s), d1(s)

        return cls(t, fn, provenance="tabulated", name=name)

    def evaluate(self, s):
        return self.fn(np.asarray(s, dtype=float))

    def resample(self, t):
        return CauchyData1D(t, self.fn, self.provenance, self.name)

    def diagnostics(self):
        n0, n1, dn0 = self.n0, self.n1, self.dn0
        return {
            "h2_membership": float(np.abs(sl_norm2(n0) + 1).max()),
            "orthogonality": float(np.abs(sl_inner(n1, n0)).max()),
            "min_n1_norm2": float(sl_norm2(n1).min()),
            "b_min_abs": float(np.abs(sl_inner(n1, dn0 - n1)).min()),
            "b2_min_abs": float(np.abs(sl_inner(n1, 2 * dn0 - n1)).min()),
        }

    def check(self, tol=None):
        tol = tolerance(tol)
        d = self.diagnostics()
        if d["h2_membership"] > tol or np.any(self.n0[:, 0] <= 0):
            raise PreconditionViolated("N0 leaves the upper sheet of H^2")
        if d["orthogonality"] > tol:
            raise PreconditionViolated("N1 is not orthogonal to N0")
        if d["min_n1_norm2"] <= 0:
            raise DegenerateDerivative("N1 must be spacelike")
        return self


@dataclass
class AbcCoefficients:
    """Coefficients of the curve potential c e1 dx, -m/2 e2, (a e3 - b e2)/(2m).

    ``m`` is the length of N1 (1 for unit data); ``theta`` the accumulated
    stabilizer gauge, which rotates the p-parts.
    """

    t: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    m: np.ndarray
    theta: np.ndarray = None
    c_quotient: np.ndarray = None

    def __post_init__(self):
        if self.theta is None:
            self.theta = np.zeros_like(self.c)

    def split(self):
        """Curve potential as an McSplit (x-part in U, the lambda^-1 part in V)."""
        zero = np.zeros_like(self.a)
        up = np.stack([zero, -self.m / 2, zero], -1)
        vp = np.stack([zero, -self.b / (2 * self.m), self.a / (2 * self.m)], -1)
        g = exp_sl(np.stack([-self.theta, zero, zero], -1))
        return McSplit(
            Uk=np.stack([self.c, zero, zero], -1),
            Up=ad_action(g, up),
            Vk=np.stack([zero, zero, zero], -1),
            Vp=ad_action(g, vp),
        )


def _curve_coefficients(n0, n1, dn0, dn1):
    m = np.sqrt(sl_norm2(n1))
    v = dn0 - n1
    b = sl_inner(n1, v)
    a = 0.5 * sl_inner(v, bracket(n1, n0))
    c = 0.25 * sl_inner(dn1, bracket(n0, n1)) / m**2
    return a, b, c, m


def abc_from_data(cd, strict=True, tol=None):
    """Potential coefficients from curve data.

    a = 1/2 <N0' - N1, [N1, N0]>, b = <N1, N0' - N1>, and c is the rotation
    rate of the adapted frame, 1/4 <N1', [N0, N1]> / |N1|^2. The quotient
    a'/(2b), with a' = <N0' - N1, [N1', N0]>, is kept for comparison.
    """
    a, b, c, m = _curve_coefficients(cd.n0, cd.n1, cd.dn0, cd.dn1)
    if strict and np.any(np.abs(b) < tolerance(tol)):
        raise SingularData("b = <N1, N0' - N1> vanishes", nodes=np.flatnonzero(np.abs(b) < tolerance(tol)))
    ax = sl_inner(cd.dn0 - cd.n1, bracket(cd.dn1, cd.n0))
    with np.errstate(divide="ignore", invalid="ignore"):
        cq = ax / (2 * b)
    return AbcCoefficients(cd.t.copy(), a, b, c, m, c_quotient=cq)


def gauge_shift(abc, theta, dtheta):
    """Stabilizer gauge by exp(theta e1): c -> c + theta', a and b unchanged."""
    theta = np.broadcast_to(np.asarray(theta, dtype=float), abc.c.shape)
    dtheta = np.broadcast_to(np.asarray(dtheta, dtype=float), abc.c.shape)
    return AbcCoefficients(
        abc.t, abc.a, abc.b, abc.c + dtheta, abc.m, abc.theta + theta, abc.c_quotient
    )


def frame_at_point(n):
    """K in SL(2,R) with Ad_K e1 = n: a boost about e3 followed by one about e2."""
    n = np.asarray(n, dtype=float)
    s = np.arcsinh(n[..., 1])
    u = np.arcsinh(-n[..., 2] / np.cosh(s))
    zero = np.zeros_like(s)
    ku = exp_sl(np.stack([zero, u / 2, zero], -1))
    ks = exp_sl(np.stack([zero, zero, s / 2], -1))
    return ku @ ks


def adapted_frame_point(n, direction):
    """Frame F with Ad_F e1 = n and Ad_F e3 along the spacelike ``direction``."""
    K = frame_at_point(n)
    c = to_sl(inv2(K) @ to_mat(direction) @ K)
    phi = 0.5 * np.arctan2(-c[..., 1], c[..., 2])
    zero = np.zeros_like(phi)
    return K @ exp_sl(np.stack([phi, zero, zero], -1))


def adapted_frame(nu, tol=None):
    """Frame field with Ad_F e1 = nu and Ad_F e3 = nu_x/|nu_x|, and its split form.

    The p-parts are 1/4 Ad_F^-1 [nu, nu_x] and 1/4 Ad_F^-1 [nu, nu_y]; in
    particular Up = -(|nu_x|/2) e2. The k-parts come from differencing F.
    """
    v = nu.values
    vx = nu.dx()
    vy = nu.dy()
    m2 = sl_norm2(vx)
    if np.any(m2 < tolerance(tol)):
        raise DegenerateDerivative("nu_x vanishes or is not spacelike", nodes=np.argwhere(m2 < tolerance(tol)))
    F = adapted_frame_point(v, vx)
    Fg = GridField(nu.x, nu.y, F)
    Fi = inv2(F)
    ax = to_sl(Fi @ Fg.dx())
    ay = to_sl(Fi @ Fg.dy())
    zero = np.zeros_like(ax[..., 0])
    ms = McSplit(
        Uk=np.stack([ax[..., 0], zero, zero], -1),
        Up=ad_action(Fi, 0.25 * bracket(v, vx)),
        Vk=np.stack([ay[..., 0], zero, zero], -1),
        Vp=ad_action(Fi, 0.25 * bracket(v, vy)),
    )
    return Fg, ms


def integrate_potential(pot, init, t, k0=0):
    """Solve X^-1 X' = pot(t) on the grid t, starting from X(t[k0]) = init.

    Fourth-order Magnus stepping with two Gauss points per step; each step
    multiplies on the right by a closed-form exponential and rescales to
    det 1. ``pot`` may return a batch of matrices (..., 2, 2), real or
    complex. Returns an array of shape (len(t), ..., 2, 2).
    """
    t = np.asarray(t, dtype=float)
    init = np.asarray(init)
    probe = np.asarray(pot(t[k0]))
    shape = np.broadcast_shapes(probe.shape, init.shape)
    dtype = np.result_type(probe, init, float)
    X = np.empty((len(t),) + shape, dtype=dtype)
    X[k0] = np.broadcast_to(init, shape)
    c3 = np.sqrt(3) / 12
    for step in (1, -1):
        stop = len(t) - 1 if step == 1 else 0
        for k in range(k0, stop, step):
            h = t[k + step] - t[k]
            A1 = pot(t[k] + GAUSS2[0] * h)
            A2 = pot(t[k] + GAUSS2[1] * h)
            om = h / 2 * (A1 + A2) + c3 * h * h * (A1 @ A2 - A2 @ A1)
            nxt = X[k] @ exp_traceless(om)
            d = nxt[..., 0, 0] * nxt[..., 1, 1] - nxt[..., 0, 1] * nxt[..., 1, 0]
            X[k + step] = nxt / np.sqrt(d)[..., None, None]
    return X


def _potential_parts(cd, s, gauge=None):
    """k-part and p-parts of the diagonal potential at parameters s."""
    n0, n1, dn0, dn1 = cd.evaluate(s)
    a, b, c, m = _curve_coefficients(n0, n1, dn0, dn1)
    zero = np.zeros_like(a)
    k = np.stack([c, zero, zero], -1)
    up = np.stack([zero, -m / 2, zero], -1)
    vp = np.stack([zero, -b / (2 * m), a / (2 * m)], -1)
    if gauge is not None:
        th, dth = gauge(s)
        g = exp_sl(np.stack([-np.asarray(th) + zero, zero, zero], -1))
        up = ad_action(g, up)
        vp = ad_action(g, vp)
        k = k + np.stack([np.asarray(dth) + zero, zero, zero], -1)
    return k, up, vp


def _base_frame(cd, k0, gauge=None):
    K = adapted_frame_point(cd.n0[k0], cd.n1[k0])
    if gauge is not None:
        th, _ = gauge(cd.t[k0])
        K = K @ exp_sl(np.array([float(th), 0.0, 0.0]))
    return K


def loop_frames(cd, M=64, gauge=None, k0=None):
    """Extended frame along the curve, sampled at M points of the unit circle."""
    t = cd.t
    if k0 is None:
        k0 = len(t) // 2
    lam = np.exp(2j * np.pi * np.arange(M) / M)

    def pot(s):
        k, up, vp = _potential_parts(cd, np.array([s]), gauge)
        return (
            to_mat(k[0])[None]
            + lam[:, None, None] * to_mat(up[0])[None]
            + to_mat(vp[0])[None] / lam[:, None, None]
        )

    X = integrate_potential(pot, _base_frame(cd, k0, gauge).astype(complex), t, k0)
    return X, lam


def _nu_from_frames(F):
    return to_sl(F @ E1 @ inv2(F))


def dalembert_solve(cd, domain=None, N=DEFAULT_ORDER, M=64, method="loop", gauge=None, tol=None):
    """Harmonic map with nu(t, t) = N0(t) and nu_x(t, t) = N1(t).

    The curve potential is integrated for lambda on the unit circle, giving
    X(x) = Y(x). For every node, Phi = X(x)^-1 Y(y) is split as Hm Hp with
    Hm normalized to I at infinity, and nu = Ad_F e1 with F = X(x) Hm(1).
    ``method="pointwise"`` instead factors Phi(1) in the big cell at lambda = 1.
    Returns a GridField of sl(2,R) coordinates on the square grid of ``cd``.
    """
    if domain is not None:
        cd = cd.resample(domain.t if isinstance(domain, Domain) else domain)
    t = cd.t
    n = len(t)
    if 2 * N + 2 > M:
        raise ValueError("need M > 2N + 1 circle samples")
    if method == "pointwise":
        return _pointwise_solve(cd, gauge, tol)
    if method != "loop":
        raise ValueError("method must be 'loop' or 'pointwise'")
    X, lam = loop_frames(cd, M, gauge)
    Xi = adjugate(X)
    X1 = X[:, 0].real
    nu = np.empty((n, n, 3))
    for i in range(n):
        phi = Xi[i][None] @ X
        four = np.fft.fft(phi, axis=1).real / M
        C = np.stack([four[:, d % M] for d in range(-N, N + 1)])
        try:
            Q = minus_inverse(C, N)
        except np.linalg.LinAlgError as exc:
            raise NotInBigCell(f"Birkhoff splitting failed on row {i}", nodes=[(i, j) for j in range(n)]) from exc
        Q1 = Q.sum(axis=0)
        F = X1[i][None] @ inv2(Q1)
        nu[i] = _nu_from_frames(F)
    bad = ~np.isfinite(nu).all(-1) | (np.abs(sl_norm2(nu) + 1) > 1e-6)
    if np.any(bad):
        raise NotInBigCell("nodes outside the big cell", nodes=np.argwhere(bad))
    return GridField(t, t, nu)


def _pointwise_solve(cd, gauge, tol):
    t = cd.t
    k0 = len(t) // 2

    def pot(s):
        k, up, vp = _potential_parts(cd, np.array([s]), gauge)
        return to_mat(k[0] + up[0] + vp[0])

    X = integrate_potential(pot, _base_frame(cd, k0, gauge), t, k0)
    phi = inv2(X)[:, None] @ X[None, :]
    L, _ = big_cell_factor(phi, tol)
    F = X[:, None] @ L
    return GridField(t, t, _nu_from_frames(F))


def _march_lower(data, t):
    """Characteristic marching on the half x > y; data(s) -> (nu, nu_x, nu_y) on the diagonal."""
    n = len(t)
    h = t[1] - t[0]
    nu = np.full((n, n, 3), np.nan)
    n0, _, _ = data(t)
    idx = np.arange(n)
    nu[idx, idx] = n0
    m0, mx, my = data((t[:-1] + t[1:]) / 2)
    nxy = sl_inner(mx, my)[:, None] * m0
    A = n0[:-1]
    B = n0[1:]
    P = 0.5 * ((A + B - h * h * nxy) + h * (mx - my))
    nu[idx[1:], idx[:-1]] = h2_normalize(P)
    for d in range(2, n):
        i = np.arange(d, n)
        j = i - d
        A = nu[i - 1, j]
        B = nu[i, j + 1]
        C = nu[i - 1, j + 1]
        P = A + B - C
        for _ in range(2):
            mid = (A + B + C + P) / 4
            vx = ((P - A) + (B - C)) / (2 * h)
            vy = ((B - P) + (C - A)) / (2 * h)
            P = A + B - C - h * h * sl_inner(vx, vy)[:, None] * mid
        nu[i, j] = h2_normalize(P)
    return nu


def characteristic_oracle(cd, domain=None):
    """Second-order characteristic-rectangle solver for nu_xy = <nu_x, nu_y> nu.

    Marches outward from the diagonal, where nu = N0, nu_x = N1 and
    nu_y = N0' - N1. The half y > x is the same march with the roles of
    x and y exchanged.
    """
    if domain is not None:
        cd = cd.resample(domain.t if isinstance(domain, Domain) else domain)
    t = cd.t

    def lower(s):
        n0, n1, dn0, _ = cd.evaluate(s)
        return n0, n1, dn0 - n1

    def upper(s):
        n0, n1, dn0, _ = cd.evaluate(s)
        return n0, dn0 - n1, n1

    lo = _march_lower(lower, t)
    up = _march_lower(upper, t)
    nu = lo.copy()
    iu = np.triu_indices(len(t), 1)
    nu[iu] = np.transpose(up, (1, 0, 2))[iu]
    return GridField(t, t, nu)


def harmonicity_residual(nu):
    """max over interior nodes of |[nu, nu_xy]| with centred differences."""
    v = nu.values
    if min(v.shape[:2]) < 3:
        raise GridTooSmall("harmonicity_residual needs at least 3 nodes per axis")
    r = bracket(v[1:-1, 1:-1], mixed_c(v, nu.hx, nu.hy))
    return float(np.linalg.norm(r, axis=-1).max())
