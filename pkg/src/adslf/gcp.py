"""Geometric Cauchy problem: a CGC surface through a curve with given Gauss map."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline

from .algebra import bracket, det2, inv2, sl_inner, sl_norm2, to_mat, to_sl
from .errors import DegenerateData, IncompatibleData, InvalidParameter, PreconditionViolated, tolerance
from .grid import Domain
from .harmonic import CauchyData1D, dalembert_solve
from .loops import DEFAULT_ORDER
from .surfaces import reconstruct_case1


def _spline_curve(t, f, nu):
    sf = make_interp_spline(t, np.asarray(f, dtype=float), k=5, axis=0)
    sn = make_interp_spline(t, np.asarray(nu, dtype=float), k=5, axis=0)
    df, ddf = sf.derivative(), sf.derivative(2)
    dn, ddn = sn.derivative(), sn.derivative(2)

    def fn(s):
        return sf(s), df(s), ddf(s), sn(s), dn(s), ddn(s)

    return fn


@dataclass
class GeometricCauchyData:
    """Curve f~ in AdS3, Gauss map nu~ along it, and the curvature parameter rho.

    ``fn(s)`` returns (f, f', f'', nu, nu', nu''); tabulated data get
    quintic splines. ``rho`` may be None for data not yet assigned a
    curvature (e.g. the output of a parallel transfer).
    """

    t: np.ndarray
    fn: object = None
    rho: float = None
    f: np.ndarray = None
    nu: np.ndarray = None
    name: str = ""
    validate: bool = True
    tol: float = None
    samples: tuple = field(init=False, repr=False)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.fn is None:
            if self.f is None or self.nu is None:
                raise ValueError("give either fn or sampled f and nu")
            self.fn = _spline_curve(self.t, self.f, self.nu)
        self.samples = self.fn(self.t)
        self.f, self.nu = self.samples[0], self.samples[3]
        if self.rho is not None and (self.rho <= 0 or abs(self.rho - 1) < 1e-6):
            raise InvalidParameter("rho must be positive and different from 1")
        if self.validate:
            self.check(self.tol)

    @property
    def normal(self):
        return self.f @ to_mat(self.nu)

    def tangent_form(self, s=None):
        """T = f^-1 f' and its derivative, in sl(2,R) coordinates."""
        f, df, ddf = self.samples[:3] if s is None else self.fn(np.asarray(s, dtype=float))[:3]
        fi = inv2(f)
        T = fi @ df
        dT = fi @ ddf - T @ T
        return to_sl(T), to_sl(dT)

    def diagnostics(self):
        T, _ = self.tangent_form()
        return {
            "det_f": float(np.abs(det2(self.f) - 1).max()),
            "h2_membership": float(np.abs(sl_norm2(self.nu) + 1).max()),
            "min_speed2": float(sl_norm2(T).min()),
            "compatibility": float(np.abs(sl_inner(T, self.nu)).max()),
        }

    def check(self, tol=None):
        tol = tolerance(tol)
        d = self.diagnostics()
        if d["det_f"] > tol or d["h2_membership"] > tol:
            raise PreconditionViolated("curve leaves AdS3 or Gauss map leaves H^2")
        if d["min_speed2"] <= 0:
            raise PreconditionViolated("curve is not spacelike")
        if d["compatibility"] > tol:
            raise IncompatibleData(f"<f^-1 f', nu> reaches {d['compatibility']:.3g}")
        return self

    def resample(self, t):
        return GeometricCauchyData(t, self.fn, self.rho, name=self.name, validate=False)


def _translate(gcd, s):
    rho = gcd.rho
    f, df, ddf, nu, dnu, ddnu = gcd.fn(s)
    fi = inv2(f)
    T = to_sl(fi @ df)
    dT = to_sl(fi @ ddf - (fi @ df) @ (fi @ df))
    w = -0.5 * bracket(nu, T)
    dw = -0.5 * (bracket(dnu, T) + bracket(nu, dT))
    c = (rho - 1) / (2 * rho)
    n1 = c * (dnu + (rho + 1) * w)
    dn1 = c * (ddnu + (rho + 1) * dw)
    return nu, n1, dnu, dn1, w


def gcp_translate(gcd, tol=None):
    """Harmonic Cauchy data N0 = nu~, N1 = (rho-1)/(2 rho) (nu~' + (rho+1) w)
    with w = -1/2 [nu~, f~^-1 f~']. Returns (CauchyData1D, w samples)."""
    if gcd.rho is None:
        raise InvalidParameter("geometric Cauchy data need rho")

    def fn(s):
        return _translate(gcd, s)[:4]

    cd = CauchyData1D(gcd.t, fn, provenance="gcp", name=gcd.name)
    nu, n1, dnu, _, w = _translate(gcd, gcd.t)
    rho = gcd.rho
    q = sl_inner(dnu + (rho + 1) * w, dnu - (rho - 1) * w)
    if np.mean(np.abs(q) > tolerance(tol)) < 0.9:
        raise DegenerateData("nondegeneracy quantity vanishes on the curve")
    return cd, w


@dataclass
class GcpResult:
    nu: object
    surface: object
    w: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def gcp_solve(gcd, domain=None, N=DEFAULT_ORDER, tol=None):
    """Solve the harmonic Cauchy problem for the translated data and integrate
    f^-1 df = [nu, nu_x]/(2(rho-1)) dx - [nu, nu_y]/(2(rho+1)) dy from the curve."""
    if domain is not None:
        gcd = gcd.resample(domain.t if isinstance(domain, Domain) else domain)
    cd, w = gcp_translate(gcd, tol)
    nu = dalembert_solve(cd, N=N, tol=tol)
    rho = gcd.rho
    k0 = len(gcd.t) // 2
    sf = reconstruct_case1(nu, (rho - 1) / 2, init=gcd.f[k0], base=(k0, k0), tol=tol)
    k = np.arange(len(gcd.t))
    vx, vy = nu.dx()[k, k], nu.dy()[k, k]
    dnu = gcd.samples[4]
    diag = {
        "curve_containment": float(np.abs(sf.f[k, k] - gcd.f).max()),
        "diagonal_gauss_map": float(np.abs(nu.values[k, k] - gcd.nu).max()),
        "w_identity_printed": float(np.abs(w - dnu / (rho**2 - 1)).max()),
        "w_identity_general": float(np.abs(w - (rho * (vx - vy) + dnu) / (rho**2 - 1)).max()),
        "compatibility": gcd.diagnostics()["compatibility"],
        "alpha_coefficient_gap": abs(1 / (2 * (rho - 1)) - 1 / (4 * ((rho - 1) / 2))),
    }
    return GcpResult(nu, sf, w, diag)


def gcp_preset(t, r=2.0):
    """The printed curve example with rho = |2r + 1| (not compatible; unvalidated)."""
    from .presets import example62_curve

    return GeometricCauchyData(
        t, lambda s: example62_curve(s, r), rho=abs(2 * r + 1), name="example-6.2", validate=False
    )


def curve_from_surface(sf, rho, k=None):
    """Geometric Cauchy data read off the diagonal of a reconstructed surface."""
    idx = np.arange(len(sf.x))
    return GeometricCauchyData(sf.x, rho=rho, f=sf.f[idx, idx], nu=sf.nu[idx, idx], name="diagonal")
