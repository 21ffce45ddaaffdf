"""Closed-form data of the worked examples, plus one immersive test case."""

import numpy as np

from .algebra import E0, E1, E2, E3, to_sl
from .harmonic import CauchyData1D

NAMES = ("example-3.3", "example-4.2", "example-5.7", "example-6.2", "skew-immersion")


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), -1)


def line_data(s):
    """nu = cosh t e1 + sinh t e3 with nu_x = N0', so nu_y = 0."""
    z = np.zeros_like(s)
    n0 = _stack(np.cosh(s), z, np.sinh(s))
    n1 = _stack(np.sinh(s), z, np.cosh(s))
    return n0, n1, n1.copy(), n0.copy()


def example42_data(s):
    phi = 2 * np.arctanh(s)
    q = 1 - s * s
    z = np.zeros_like(s)
    n0 = _stack(np.cosh(phi), z, np.sinh(phi))
    tang = _stack(np.sinh(phi), z, np.cosh(phi))
    n1 = tang / q[..., None]
    dn0 = 2 * n1
    dn1 = (2 * s / q**2)[..., None] * tang + (2 / q**2)[..., None] * n0
    return n0, n1, dn0, dn1


def skew_data(s, p=0.5, q=0.3):
    """N0 as in example-3.3 but N1 tilted out of the tangent plane of the curve."""
    z = np.zeros_like(s)
    n0 = _stack(np.cosh(s), z, np.sinh(s))
    tang = _stack(np.sinh(s), z, np.cosh(s))
    n1 = p * tang + q * _stack(z, 1 + z, z)
    return n0, n1, tang, p * n0


def example42_exact(x, y):
    """H^2 normalization of the printed Example 4.2 map."""
    u = np.arctanh(x)[:, None] + np.arctanh(y)[None, :]
    return _stack(np.cosh(u), 0 * u, np.sinh(u))


def example42_printed(x, y):
    """The printed Example 4.2 map as coordinates, not normalized."""
    X, Y = np.meshgrid(x, y, indexing="ij")
    q = 1 - X * Y
    m = np.empty(X.shape + (2, 2))
    m[..., 0, 0] = -(X + Y) / q
    m[..., 0, 1] = -(1 + X * Y) / q
    m[..., 1, 0] = (1 + X * Y) / q
    m[..., 1, 1] = (X + Y) / q
    return to_sl(m)


def example33_nu(x):
    """Printed one-variable map [[-sinh x, -cosh x], [cosh x, sinh x]]."""
    z = np.zeros_like(x)
    return _stack(np.cosh(x), z, np.sinh(x))


def example33_potential(x):
    """A(x) = 1/2 (tanh x e3 - sech x e2) as a matrix."""
    x = np.asarray(x, dtype=float)[..., None, None]
    return 0.5 * (np.tanh(x) * E3 - E2 / np.cosh(x))


def example33_printed_frame(x):
    c = np.sqrt(np.cosh(x))
    return np.array([[c, -np.sinh(x) / c], [0.0, 1 / c]])


def example57_frame(x):
    """Frame of the one-variable map used in the constant curvature -1 example."""
    x = np.asarray(x, dtype=float)
    c = np.sqrt(np.cosh(x))
    F = np.zeros(x.shape + (2, 2))
    F[..., 0, 0] = 1 / c
    F[..., 0, 1] = -np.sinh(x) / c
    F[..., 1, 1] = c
    return F


def example57_coefficients(theta):
    return 0.25 * np.cos(2 * theta), 0.25 * np.sin(2 * theta)


def example57_init(theta):
    return np.cos(theta) * E0 + np.sin(theta) * E1


def example57_surface(x, y, theta):
    X, Y = np.meshgrid(x, y, indexing="ij")
    c = [
        np.cos(theta) * np.cosh((X + Y) / 2),
        np.sin(theta) * np.cosh((X - Y) / 2),
        np.cos(theta) * np.sinh((X + Y) / 2),
        np.sin(theta) * np.sinh((X - Y) / 2),
    ]
    return (
        c[0][..., None, None] * E0
        + c[1][..., None, None] * E1
        + c[2][..., None, None] * E2
        + c[3][..., None, None] * E3
    )


def example62_curve(t, r=2.0):
    """Printed curve data: f, f', f'', nu, nu', nu''."""
    t = np.asarray(t, dtype=float)
    f = np.zeros(t.shape + (2, 2))
    f[..., 0, 0] = 1 - t * t / (4 * r * (r + 1))
    f[..., 0, 1] = t / (2 * r)
    f[..., 1, 0] = -t / (2 * (r + 1))
    f[..., 1, 1] = 1.0
    df = np.zeros_like(f)
    df[..., 0, 0] = -t / (2 * r * (r + 1))
    df[..., 0, 1] = 1 / (2 * r)
    df[..., 1, 0] = -1 / (2 * (r + 1))
    ddf = np.zeros_like(f)
    ddf[..., 0, 0] = -1 / (2 * r * (r + 1))
    n0, n1, dn0, dn1 = example42_data(t)
    return f, df, ddf, n0, dn0, 2 * dn1


def example62_surface(x, y, r=2.0):
    X, Y = np.meshgrid(x, y, indexing="ij")
    f = np.zeros(X.shape + (2, 2))
    f[..., 0, 0] = 1 - X * Y / (4 * r * (r + 1))
    f[..., 0, 1] = X / (2 * r)
    f[..., 1, 0] = -Y / (2 * (r + 1))
    f[..., 1, 1] = 1.0
    return f


def cauchy_preset(name, t):
    """Harmonic Cauchy data of a named preset on the grid t."""
    if name in ("example-3.3", "example-5.7"):
        return CauchyData1D(t, line_data, name=name)
    if name == "example-4.2":
        return CauchyData1D(t, example42_data, name=name)
    if name == "skew-immersion":
        return CauchyData1D(t, skew_data, name=name)
    if name == "example-6.2":
        from .gcp import gcp_preset, gcp_translate

        return gcp_translate(gcp_preset(t))[0]
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(NAMES)}")
