"""Truncated Laurent loops, the spectral Maurer-Cartan form and factorizations."""

from dataclasses import dataclass

import numpy as np

from .algebra import bracket, det2, inv2, to_mat
from .errors import (
    GridTooSmall,
    NoConvergence,
    NotInBigCell,
    PreconditionViolated,
    TruncationOverflow,
    tolerance,
)
from .grid import d1c

DEFAULT_ORDER = 12


class LaurentLoop:
    """Laurent polynomial sum_d coeffs[d - dmin] lambda^d with 2x2 coefficients.

    ``coeffs`` has shape (n, ..., 2, 2); extra axes hold a batch of loops.
    """

    def __init__(self, dmin, coeffs):
        coeffs = np.asarray(coeffs)
        if coeffs.ndim < 3 or coeffs.shape[-2:] != (2, 2):
            raise ValueError("coefficients must have shape (n, ..., 2, 2)")
        self.dmin = int(dmin)
        self.coeffs = coeffs
        if self.dmin > 0 or self.dmax < 0:
            raise ValueError("degree range must contain 0")

    @property
    def dmax(self):
        return self.dmin + len(self.coeffs) - 1

    @classmethod
    def identity(cls):
        return cls(0, np.eye(2)[None])

    @classmethod
    def from_dict(cls, terms):
        lo = min(min(terms), 0)
        hi = max(max(terms), 0)
        c = np.zeros((hi - lo + 1, 2, 2))
        for d, m in terms.items():
            c[d - lo] = m
        return cls(lo, c)

    def coeff(self, d):
        if d < self.dmin or d > self.dmax:
            return np.zeros(self.coeffs.shape[1:], dtype=self.coeffs.dtype)
        return self.coeffs[d - self.dmin]

    def __call__(self, lam):
        lam = np.asarray(lam)
        powers = lam[..., None] ** np.arange(self.dmin, self.dmax + 1)
        return np.einsum("...k,k...ij->...ij", powers, self.coeffs)

    def padded(self, lo, hi):
        """Coefficients on the degree range [lo, hi]."""
        if lo > self.dmin or hi < self.dmax:
            raise TruncationOverflow("loop does not fit in the requested range")
        out = np.zeros((hi - lo + 1,) + self.coeffs.shape[1:], dtype=self.coeffs.dtype)
        out[self.dmin - lo : self.dmax - lo + 1] = self.coeffs
        return out

    def truncated(self, lo, hi):
        lo = max(lo, self.dmin)
        hi = min(hi, self.dmax)
        return LaurentLoop(lo, self.coeffs[lo - self.dmin : hi - self.dmin + 1])

    def __matmul__(self, other):
        return loop_mul(self, other)


def loop_mul(A, B, max_order=None):
    """Product of two loops by convolution of coefficients."""
    lo = A.dmin + B.dmin
    hi = A.dmax + B.dmax
    if max_order is not None and max(-lo, hi) > max_order:
        raise TruncationOverflow(f"product degree range [{lo}, {hi}] exceeds order {max_order}")
    shape = np.broadcast_shapes(A.coeffs.shape[1:], B.coeffs.shape[1:])
    dtype = np.result_type(A.coeffs, B.coeffs)
    out = np.zeros((hi - lo + 1,) + shape, dtype=dtype)
    for i, a in enumerate(A.coeffs):
        out[i : i + len(B.coeffs)] += a @ B.coeffs
    return LaurentLoop(lo, out)


@dataclass
class McSplit:
    """k- and p-parts of a Maurer-Cartan form U dx + V dy, in coordinates."""

    Uk: np.ndarray
    Up: np.ndarray
    Vk: np.ndarray
    Vp: np.ndarray

    def __post_init__(self):
        for name in ("Uk", "Up", "Vk", "Vp"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))

    def check(self, tol=1e-10):
        bad_k = max(np.abs(self.Uk[..., 1:]).max(), np.abs(self.Vk[..., 1:]).max())
        bad_p = max(np.abs(self.Up[..., 0]).max(), np.abs(self.Vp[..., 0]).max())
        if bad_k > tol or bad_p > tol:
            raise PreconditionViolated("k-parts must lie along e1 and p-parts in span{e2, e3}")
        return self


def hat_alpha(ms):
    """Spectral 1-form (Uk + lambda Up) dx + (Vk + lambda^-1 Vp) dy as two loops."""
    ms.check()
    xl = LaurentLoop(0, np.stack([to_mat(ms.Uk), to_mat(ms.Up)]))
    yl = LaurentLoop(-1, np.stack([to_mat(ms.Vp), to_mat(ms.Vk)]))
    return xl, yl


@dataclass
class McResidual:
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray

    @property
    def norms(self):
        return tuple(float(np.abs(r).max()) if r.size else 0.0 for r in (self.r1, self.r2, self.r3))


def split_mc_residual(ms, h):
    """Residuals of the graded Maurer-Cartan system on interior grid nodes.

    R1 = dy Uk - dx Vk - [Up, Vp], R2 = dy Up - [Up, Vk], R3 = dx Vp + [Uk, Vp],
    with second-order centred differences. ``h`` is a step or a pair (hx, hy).
    """
    hx, hy = (h, h) if np.isscalar(h) else h
    Uk, Up, Vk, Vp = ms.Uk, ms.Up, ms.Vk, ms.Vp
    if Uk.ndim < 3 or min(Uk.shape[:2]) < 3:
        raise GridTooSmall("split_mc_residual needs at least 3 nodes per axis")

    def dx(v):
        return d1c(v, hx, 0)[:, 1:-1]

    def dy(v):
        return d1c(v, hy, 1)[1:-1]

    def mid(v):
        return v[1:-1, 1:-1]

    r1 = dy(Uk) - dx(Vk) - bracket(mid(Up), mid(Vp))
    r2 = dy(Up) - bracket(mid(Up), mid(Vk))
    r3 = dx(Vp) + bracket(mid(Uk), mid(Vp))
    return McResidual(r1, r2, r3)


def big_cell_factor(P, tol=None):
    """P = L U with L lower unipotent and U upper triangular (broadcasts)."""
    P = np.asarray(P, dtype=float)
    p11 = P[..., 0, 0]
    bad = np.abs(p11) < tolerance(tol)
    if np.any(bad):
        raise NotInBigCell("matrix has vanishing (1,1) entry", nodes=np.argwhere(np.atleast_1d(bad)))
    L = np.zeros_like(P)
    L[..., 0, 0] = 1.0
    L[..., 1, 1] = 1.0
    L[..., 1, 0] = P[..., 1, 0] / p11
    U = np.zeros_like(P)
    U[..., 0, 0] = p11
    U[..., 0, 1] = P[..., 0, 1]
    U[..., 1, 1] = det2(P) / p11
    return L, U


def minus_inverse(C, N):
    """Projection step of the Birkhoff splitting.

    ``C`` holds loop coefficients of degrees -N..N (shape (2N+1, ..., 2, 2)).
    Returns Q of degrees -N..0 with Q_0 = I such that Q C has no terms of
    degree -N..-1, i.e. Q approximates the inverse of the minus factor
    normalized to I at infinity.
    """
    C = np.asarray(C)
    batch = C.shape[1:-2]

    def c(d):
        return C[d + N]

    T = np.zeros(batch + (2 * N, 2 * N), dtype=C.dtype)
    for a in range(N):
        for b in range(N):
            T[..., 2 * a : 2 * a + 2, 2 * b : 2 * b + 2] = c(a - b)
    R = np.concatenate([-c(-(b + 1)) for b in range(N)], axis=-1)
    Qrow = np.swapaxes(np.linalg.solve(np.swapaxes(T, -1, -2), np.swapaxes(R, -1, -2)), -1, -2)
    Q = np.zeros((N + 1,) + batch + (2, 2), dtype=C.dtype)
    Q[N] = np.eye(2)
    for k in range(1, N + 1):
        Q[N - k] = Qrow[..., :, 2 * (k - 1) : 2 * k]
    return Q


def _loop_inverse(coeffs, lo, keep_lo, keep_hi, M):
    """Coefficients of the inverse loop on [keep_lo, keep_hi], by sampling the circle."""
    lam = np.exp(2j * np.pi * np.arange(M) / M)
    vals = np.einsum("mk,kij->mij", lam[:, None] ** np.arange(lo, lo + len(coeffs)), coeffs)
    inv = inv2(vals)
    four = np.fft.fft(inv, axis=0) / M
    return np.stack([four[d % M] for d in range(keep_lo, keep_hi + 1)]).real


def birkhoff_factor(P, N=8, normalization="lu", tol=None, max_iter=50):
    """Factor a loop P = Hm Hp with Hm of degrees [-N, 0] and Hp of degrees [0, N].

    The product matches P on the retained degrees -N..N. The degree-0 part
    of Hm is lower unipotent ("lu") or the identity ("identity").
    """
    if normalization not in ("lu", "identity"):
        raise ValueError("normalization must be 'lu' or 'identity'")
    C = P.padded(-N, N).astype(float)
    if C.ndim != 3:
        raise ValueError("birkhoff_factor works on a single loop")
    Q = minus_inverse(C, N)
    Hm = _loop_inverse(Q, -N, -N, 0, 8 * (N + 1))
    Hm[N] = np.eye(2)
    QP = loop_mul(LaurentLoop(-N, Q), LaurentLoop(-N, C))
    Hp = QP.padded(-2 * N, N)[2 * N :]

    shift = np.zeros((2 * N + 1, N + 1, N + 1))
    for d in range(N + 1):
        for k in range(N + 1):
            shift[d + k, d, k] = 1.0
    eye = np.eye(2)
    scale = max(1.0, np.abs(C).max())
    target = 1e-14 * scale * (N + 1)

    def residual(hm, hp):
        return np.einsum("edk,dij,kjl->eil", shift, hm, hp) - C

    for it in range(max_iter):
        R = residual(Hm, Hp)
        if np.abs(R).max() <= target:
            break
        Jm = np.einsum("edk,ia,kbj->eijdab", shift, eye, Hp).reshape(4 * (2 * N + 1), -1)
        Jp = np.einsum("edk,dia,jb->eijkab", shift, Hm, eye).reshape(4 * (2 * N + 1), -1)
        J = np.concatenate([Jm[:, : 4 * N], Jp], axis=1)
        step = np.linalg.solve(J, -R.reshape(-1))
        Hm = Hm.copy()
        Hm[:N] += step[: 4 * N].reshape(N, 2, 2)
        Hp = Hp + step[4 * N :].reshape(N + 1, 2, 2)
    else:
        if np.abs(residual(Hm, Hp)).max() > max(target, 1e-10 * scale):
            raise NoConvergence(f"Birkhoff Newton iteration did not converge in {max_iter} passes")

    if normalization == "lu":
        L, U = big_cell_factor(Hp[0], tol)
        Hm = Hm @ L
        Hp = inv2(L) @ Hp
        Hp[0] = U
    return LaurentLoop(-N, Hm), LaurentLoop(0, Hp)
