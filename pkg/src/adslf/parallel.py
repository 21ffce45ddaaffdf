"""Parallel surfaces f cos(theta) + N sin(theta) and their curvature laws."""

import numpy as np

from .algebra import det2, inv2, to_sl
from .errors import FullySingular, InvalidParameter, NoRealAngle, SingularAngle, tolerance
from .gcp import GeometricCauchyData
from .surfaces import SurfaceField, fundamental_forms


def singularity_mask(geometry, theta, tol=None):
    """True where the differential of the parallel map has full rank.

    With II = <d d f, N> the normal moves by dN = -df S, so
    d f^theta = df (cos(theta) I - sin(theta) S).
    """
    S = geometry.S
    M = np.cos(theta) * np.eye(2) - np.sin(theta) * S
    d = det2(M)
    return np.isfinite(d) & (np.abs(d) > tolerance(tol))


def parallel_surface(sf, theta, geometry=None, tol=None):
    """f^theta = f cos(theta) + N sin(theta) with normal N cos(theta) - f sin(theta)."""
    if geometry is None:
        geometry = fundamental_forms(sf, tol=tol)
    mask = singularity_mask(geometry, theta, tol) & sf.mask
    if not mask.any():
        raise FullySingular("parallel surface is singular at every node")
    c, s = np.cos(theta), np.sin(theta)
    f = c * sf.f + s * sf.N
    N = c * sf.N - s * sf.f
    f[~mask] = np.nan
    N[~mask] = np.nan
    nu = to_sl(inv2(f) @ N) if mask.all() else None
    return SurfaceField(sf.x, sf.y, f, N, nu, mask, {"theta": theta})


def parallel_curvatures(K, H, theta, tol=None):
    """Curvatures of the parallel surface from the intrinsic K and mean H of f.

    The returned mean curvature refers to the normal -N^theta.
    """
    s2 = np.sin(2 * theta)
    den = K * np.sin(theta) ** 2 - H * s2 + 1
    if np.any(np.abs(den) < tolerance(tol)):
        raise SingularAngle("K sin^2(theta) - H sin(2 theta) + 1 vanishes")
    Kt = (K * np.cos(2 * theta) + 2 * H * s2) / den
    Ht = (K * np.sin(theta) * np.cos(theta) - H * np.cos(2 * theta)) / den
    return Kt, Ht


def theta_for_cgc(H):
    """Angle with tan(2 theta) = 1/H in (0, pi/2) and the resulting K^theta."""
    theta = 0.5 * np.arctan2(1.0, H)
    return theta, 1 / np.tan(theta) ** 2 - 1


def theta_for_cmc(K):
    """Angle with tan^2(theta) = 1/(K+1) and the resulting H^theta = 1/tan(2 theta)."""
    if not K + 1 > 0:
        raise NoRealAngle(f"K + 1 = {K + 1:g} admits no real parallel CMC surface")
    theta = np.arctan(1 / np.sqrt(K + 1))
    return theta, np.cos(2 * theta) / np.sin(2 * theta)


def gcp_transfer(t, f, N, theta, H=None, K=None, tol=None):
    """Carry curve data (f, N) to the parallel surface at angle theta.

    Returns GeometricCauchyData for f cos + N sin with Gauss map
    (f^theta)^-1 N^theta. ``rho`` is left unset: the parallel CGC surface
    has K + 1 = 1/tan^2(theta) > 0, outside the range K + 1 = -rho^2.
    """
    if H is not None and abs(np.sin(2 * theta) * H - np.cos(2 * theta)) > 1e-9:
        raise InvalidParameter("theta does not satisfy tan(2 theta) = 1/H")
    if H is not None and K is not None:
        if abs(K * np.sin(theta) ** 2 - H * np.sin(2 * theta) + 1) < tolerance(tol):
            raise SingularAngle("parallel map is singular along the curve")
    c, s = np.cos(theta), np.sin(theta)
    ft = c * np.asarray(f) + s * np.asarray(N)
    Nt = c * np.asarray(N) - s * np.asarray(f)
    return GeometricCauchyData(t, f=ft, nu=to_sl(inv2(ft) @ Nt), validate=False)
