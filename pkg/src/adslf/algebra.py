"""Matrix models of gl(2,R), sl(2,R), the hyperbolic plane and AdS3.

Elements of sl(2,R) are handled as coordinate arrays of shape (..., 3) in
the basis (e1, e2, e3); general matrices as arrays of shape (..., 2, 2).
All functions broadcast over leading axes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionViolated, SingularMatrix, tolerance

E0 = np.eye(2)
E1 = np.array([[0.0, -1.0], [1.0, 0.0]])
E2 = np.array([[0.0, 1.0], [1.0, 0.0]])
E3 = np.array([[-1.0, 0.0], [0.0, 1.0]])
BASIS = np.stack([E1, E2, E3])

# nilpotent upper and lower elements
E_PLUS = 0.5 * (E2 - E1)
E_MINUS = 0.5 * (E2 + E1)

SL_METRIC = np.array([-1.0, 1.0, 1.0])


def to_mat(v):
    """sl(2,R) coordinates -> traceless matrix."""
    v = np.asarray(v)
    return np.einsum("...i,ijk->...jk", v, BASIS)


def to_sl(m):
    """Traceless part of a matrix, as (e1, e2, e3) coordinates."""
    m = np.asarray(m)
    return np.stack(
        [
            (m[..., 1, 0] - m[..., 0, 1]) / 2,
            (m[..., 1, 0] + m[..., 0, 1]) / 2,
            (m[..., 1, 1] - m[..., 0, 0]) / 2,
        ],
        axis=-1,
    )


def gl_coords(m):
    """Coordinates (x0, x1, x2, x3) of a matrix in the basis (e0, e1, e2, e3)."""
    m = np.asarray(m)
    x0 = (m[..., 0, 0] + m[..., 1, 1]) / 2
    return np.concatenate([x0[..., None], to_sl(m)], axis=-1)


def from_gl_coords(x):
    x = np.asarray(x)
    return x[..., 0, None, None] * E0 + to_mat(x[..., 1:])


def det2(m):
    m = np.asarray(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def adjugate(m):
    m = np.asarray(m)
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out


def inv2(m):
    return adjugate(m) / det2(m)[..., None, None]


def gl_inner(X, Y):
    """Split-signature inner product -1/2 trace(X adj Y) on gl(2,R)."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    return -0.5 * np.einsum("...ij,...ji->...", X, adjugate(Y))


def sl_inner(u, v):
    """Lorentzian inner product 1/2 trace(XY) in coordinates."""
    u = np.asarray(u)
    v = np.asarray(v)
    return -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


def sl_norm2(u):
    return sl_inner(u, u)


def bracket(u, v):
    """Lie bracket in coordinates: twice a signed cross product."""
    u = np.asarray(u)
    v = np.asarray(v)
    c = np.cross(u, v)
    return 2.0 * c * SL_METRIC


def ad_action(g, v, tol=None):
    """Coordinates of g X g^-1 for X with coordinates v."""
    g = np.asarray(g, dtype=float)
    d = det2(g)
    if np.any(np.abs(d) < tolerance(tol)):
        raise SingularMatrix("ad_action: singular group element")
    return to_sl(g @ to_mat(v) @ inv2(g))


def exp_traceless(m):
    """Exponential of traceless 2x2 matrices, real or complex.

    Uses X^2 = -det(X) I, so exp(X) = cosh(w) I + sinh(w)/w X with w^2 = -det X.
    """
    m = np.asarray(m)
    w2 = -det2(m)
    w = np.sqrt(w2.astype(complex))
    small = np.abs(w2) < 1e-12
    ws = np.where(small, 1.0, w)
    c = np.where(small, 1 + w2 / 2, np.cosh(ws))
    s = np.where(small, 1 + w2 / 6, np.sinh(ws) / ws)
    if not np.iscomplexobj(m):
        c = c.real
        s = s.real
    return c[..., None, None] * np.eye(2) + s[..., None, None] * m


def exp_sl(v):
    """Closed-form exponential of an sl(2,R) element given by coordinates.

    det X > 0 gives the trigonometric branch, det X < 0 the hyperbolic one
    and |det X| < 1e-12 the nilpotent one (with a second-order correction).
    """
    v = np.asarray(v, dtype=float)
    X = to_mat(v)
    d = sl_norm2(v) * -1.0  # det X
    small = np.abs(d) < 1e-12
    w = np.sqrt(np.abs(d))
    ws = np.where(small, 1.0, w)
    c = np.where(d > 0, np.cos(ws), np.cosh(ws))
    s = np.where(d > 0, np.sin(ws) / ws, np.sinh(ws) / ws)
    c = np.where(small, 1 - d / 2, c)
    s = np.where(small, 1 - d / 6, s)
    return c[..., None, None] * E0 + s[..., None, None] * X


def h2_normalize(v):
    """Scale timelike vectors onto the upper sheet of H^2."""
    v = np.asarray(v, dtype=float)
    n = np.sqrt(-sl_norm2(v))
    return v / n[..., None] * np.sign(v[..., 0])[..., None]


def project_orthogonal(z, x, y):
    """Remove from z its metric components along span{x, y}."""
    G = np.array([[sl_inner(x, x), sl_inner(x, y)], [sl_inner(y, x), sl_inner(y, y)]])
    rhs = np.array([sl_inner(z, x), sl_inner(z, y)])
    a, b = np.linalg.lstsq(G, rhs, rcond=None)[0]
    return np.asarray(z) - a * np.asarray(x) - b * np.asarray(y)


def bracket_identities_check(X, Y, Z, tol=None):
    """Residuals of the four bracket/metric identities for Z orthogonal to X, Y."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    scale = 1.0 + np.linalg.norm(Z) * (np.linalg.norm(X) + np.linalg.norm(Y))
    if max(abs(sl_inner(Z, X)), abs(sl_inner(Z, Y))) > tolerance(tol) * scale:
        raise PreconditionViolated("Z must be orthogonal to X and Y")
    XY = bracket(X, Y)
    r1 = abs(sl_inner(X, XY))
    r2 = abs(sl_inner(XY, XY) - 4 * (sl_inner(X, Y) ** 2 - sl_inner(X, X) * sl_inner(Y, Y)))
    zz = sl_inner(Z, Z)
    r3 = np.linalg.norm(bracket(bracket(Z, X), bracket(Z, Y)) + 4 * zz * XY)
    r4 = abs(sl_inner(bracket(Z, X), bracket(Z, Y)) + 4 * zz * sl_inner(X, Y))
    return np.array([r1, r2, r3, r4])


@dataclass(frozen=True)
class Mat2:
    a11: float
    a12: float
    a21: float
    a22: float

    @classmethod
    def from_array(cls, m):
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def __array__(self, dtype=None, copy=None):
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=dtype)


@dataclass(frozen=True)
class SlVec:
    v1: float
    v2: float
    v3: float

    @classmethod
    def from_mat(cls, m):
        return cls(*to_sl(np.asarray(m, dtype=float)))

    def mat(self):
        return to_mat(np.asarray(self))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.v1, self.v2, self.v3], dtype=dtype)


@dataclass(frozen=True)
class H2Point:
    v: SlVec
    tol: float = None

    def __post_init__(self):
        a = np.asarray(self.v)
        if abs(sl_norm2(a) + 1) > tolerance(self.tol) or a[0] <= 0:
            raise PreconditionViolated("point is not on the upper sheet of H^2")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.v, dtype=dtype)


@dataclass(frozen=True)
class AdsPoint:
    m: Mat2
    tol: float = None

    def __post_init__(self):
        if abs(det2(np.asarray(self.m)) - 1) > tolerance(self.tol):
            raise PreconditionViolated("matrix does not have determinant 1")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.m, dtype=dtype)
