"""Spacelike surfaces in AdS3 from harmonic Gauss maps, and their geometry."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline

from .algebra import (
    ad_action,
    bracket,
    det2,
    exp_traceless,
    gl_inner,
    inv2,
    sl_inner,
    to_mat,
    to_sl,
)
from .errors import (
    DegenerateGaussMap,
    DegenerateOmega,
    DegenerateTangent,
    GridTooSmall,
    InvalidParameter,
    tolerance,
)
from .grid import GridField, d1, d1c
from .harmonic import GAUSS2

SPACELIKE, LORENTZIAN, DEGENERATE = 1, -1, 0


@dataclass
class SurfaceField:
    """Immersion f on a grid with normal N = f nu; masked nodes hold NaN."""

    x: np.ndarray
    y: np.ndarray
    f: np.ndarray
    N: np.ndarray
    nu: np.ndarray = None
    mask: np.ndarray = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mask is None:
            self.mask = np.ones(self.f.shape[:2], dtype=bool)

    @property
    def hx(self):
        return self.x[1] - self.x[0]

    @property
    def hy(self):
        return self.y[1] - self.y[0]


@dataclass
class SurfaceGeometry:
    I: np.ndarray
    II: np.ndarray
    S: np.ndarray
    kext: np.ndarray
    H: np.ndarray
    causal: np.ndarray

    @property
    def kp1(self):
        """K + 1 = det II / det I, the extrinsic curvature."""
        return self.kext


@dataclass
class OmegaField:
    values: np.ndarray
    A: float = None
    B: float = None


def _integrate_lines(B, init, k0, h):
    """Integrate f^-1 f' = B along axis 0 for every line of the second axis.

    B has shape (n, m, 3); init has shape (m, 2, 2). The coefficient is
    interpolated at the Gauss points by a quintic spline along each line.
    """
    n = B.shape[0]
    s = np.arange(n, dtype=float)
    sp = make_interp_spline(s, B, k=5 if n > 5 else (3 if n > 3 else 1), axis=0)
    out = np.empty((n,) + init.shape)
    out[k0] = init
    c3 = np.sqrt(3) / 12
    for step in (1, -1):
        stop = n - 1 if step == 1 else 0
        for k in range(k0, stop, step):
            A1 = to_mat(sp(k + step * GAUSS2[0]))
            A2 = to_mat(sp(k + step * GAUSS2[1]))
            hh = h * step
            om = hh / 2 * (A1 + A2) + c3 * hh * hh * (A1 @ A2 - A2 @ A1)
            nxt = out[k] @ exp_traceless(om)
            out[k + step] = nxt / np.sqrt(det2(nxt))[..., None, None]
    return out


def integrate_form(bx, by, init, base, hx, hy, order="row"):
    """Integrate f^-1 df = bx dx + by dy from f(base) = init.

    ``order="row"`` runs along the base row (in x) first, then along every
    column (in y); ``order="column"`` does the opposite.
    """
    i0, j0 = base
    init = np.asarray(init, dtype=float)
    if order == "row":
        row = _integrate_lines(bx[:, j0][:, None], init[None], i0, hx)[:, 0]
        return np.swapaxes(_integrate_lines(np.swapaxes(by, 0, 1), row, j0, hy), 0, 1)
    col = _integrate_lines(by[i0][:, None], init[None], j0, hy)[:, 0]
    return _integrate_lines(bx, col, i0, hx)


def flatness_residual(bx, by, hx, hy):
    """max |d_x by - d_y bx + [bx, by]| on interior nodes (centred differences)."""
    r = d1c(by, hx, 0)[:, 1:-1] - d1c(bx, hy, 1)[1:-1] + bracket(bx[1:-1, 1:-1], by[1:-1, 1:-1])
    return float(np.abs(r).max())


def _base_node(x, y, base):
    if base is None:
        return int(np.argmin(np.abs(x))), int(np.argmin(np.abs(y)))
    return base


def _finish(nu, f, bx, by, base, init, extra):
    N = f @ to_mat(nu.values)
    fc = integrate_form(bx, by, init, base, nu.hx, nu.hy, order="column")
    diag = {
        "det_drift": float(np.abs(det2(f) - 1).max()),
        "path_independence": float(np.abs(fc - f).max()),
        "flatness": flatness_residual(bx, by, nu.hx, nu.hy),
        "base": base,
    }
    diag.update(extra)
    return SurfaceField(nu.x, nu.y, f, N, nu.values, None, diag)


def reconstruct_case1(nu, r, init=None, base=None, tol=None):
    """Surface with Gauss map nu and f^-1 df = [nu, nu_x]/(4r) dx - [nu, nu_y]/(4(r+1)) dy."""
    if abs(r) < 1e-12 or abs(r + 1) < 1e-12:
        raise InvalidParameter("r must differ from 0 and -1")
    v, vx, vy = nu.values, nu.dx(), nu.dy()
    cross = np.linalg.norm(bracket(vx, vy), axis=-1)
    scale = np.linalg.norm(vx, axis=-1) * np.linalg.norm(vy, axis=-1)
    if np.any(cross <= np.sqrt(tolerance(tol)) * np.maximum(scale, 1.0)):
        raise DegenerateGaussMap(
            "Gauss map is not an immersion; use the case with nu_y = 0",
            nodes=np.argwhere(cross <= np.sqrt(tolerance(tol)) * np.maximum(scale, 1.0)),
        )
    bx = bracket(v, vx) / (4 * r)
    by = -bracket(v, vy) / (4 * (r + 1))
    base = _base_node(nu.x, nu.y, base)
    init = np.eye(2) if init is None else np.asarray(init, dtype=float)
    f = integrate_form(bx, by, init, base, nu.hx, nu.hy)
    return _finish(nu, f, bx, by, base, init, {"r": r})


def solve_omega(F, A, B):
    """Closed-form solution of w2' = sech x w3, w3' = -sech x w2, moved by Ad_F.

    ``F`` is a GridField of frames; the returned field has <omega, nu> = 0.
    """
    x = F.x[:, None] + 0 * F.y[None, :]
    w2 = -A * np.tanh(x) - B / np.cosh(x)
    w3 = -A / np.cosh(x) + B * np.tanh(x)
    local = np.stack([np.zeros_like(x), w2, w3], -1)
    return OmegaField(ad_action(F.values, local), A, B)


def reconstruct_case2(nu, omega, init=None, base=None, tol=None):
    """Surface with f^-1 df = -1/4 [nu, nu_x] dx + [nu, omega] dy, for nu_y = 0."""
    v, vx, vy = nu.values, nu.dx(), nu.dy()
    if np.abs(vy).max() > np.sqrt(tolerance(tol)):
        raise DegenerateGaussMap("this construction needs nu_y = 0")
    w = np.asarray(omega.values if isinstance(omega, OmegaField) else omega, dtype=float)
    c = np.linalg.norm(bracket(vx, w), axis=-1)
    if np.any(c < tolerance(tol)):
        raise DegenerateOmega("[nu_x, omega] vanishes", nodes=np.argwhere(c < tolerance(tol)))
    bx = -0.25 * bracket(v, vx)
    by = bracket(v, w)
    base = _base_node(nu.x, nu.y, base)
    init = np.eye(2) if init is None else np.asarray(init, dtype=float)
    f = integrate_form(bx, by, init, base, nu.hx, nu.hy)
    wx = d1(w, nu.hx, 0)
    return _finish(
        nu, f, bx, by, base, init,
        {"omega_nu": float(np.abs(sl_inner(w, v)).max()), "nu_omega_x": float(np.abs(bracket(v, wx)).max())},
    )


def fundamental_forms(sf, orientation=1, tol=None):
    """First and second fundamental forms by 4th-order differences of f.

    I_ij = <d_i f, d_j f>, II_ij = <d_i d_j f, N>, S = I^-1 II,
    extrinsic curvature det S and H = trace(S)/2.
    """
    if min(sf.f.shape[:2]) < 5:
        raise GridTooSmall("fundamental_forms needs at least 5 nodes per axis")
    f, hx, hy = sf.f, sf.hx, sf.hy
    N = orientation * sf.N
    fx = d1(f, hx, 0)
    fy = d1(f, hy, 1)
    fxx = d1(fx, hx, 0)
    fxy = d1(fx, hy, 1)
    fyy = d1(fy, hy, 1)

    def form(a, b, c):
        return np.stack([np.stack([a, b], -1), np.stack([b, c], -1)], -2)

    I = form(gl_inner(fx, fx), gl_inner(fx, fy), gl_inner(fy, fy))
    II = form(gl_inner(fxx, N), gl_inner(fxy, N), gl_inner(fyy, N))
    dI = det2(I)
    t = tolerance(tol)
    causal = np.where(dI > t, np.where(I[..., 0, 0] > 0, SPACELIKE, DEGENERATE), np.where(dI < -t, LORENTZIAN, DEGENERATE))
    ok = (np.abs(dI) > t) & sf.mask
    S = np.full_like(I, np.nan)
    S[ok] = np.linalg.solve(I[ok], II[ok])
    return SurfaceGeometry(I, II, S, det2(S), 0.5 * (S[..., 0, 0] + S[..., 1, 1]), causal)


@dataclass
class FrameRatios:
    r: np.ndarray
    s: np.ndarray
    max_sum: float
    r_std: float


def frame_ratios(sf, nu, F=None, interior=4):
    """Scalar ratios r, s with Up = r omega1 and Vp = s omega2 at every node.

    omega_i = Ad_F^-1 (f^-1 d_i f); since Up = 1/4 Ad_F^-1 [nu, nu_x] the
    frame cancels from the least-squares ratio, so ``F`` is optional.
    """
    v, vx, vy = nu.values, nu.dx(), nu.dy()
    fi = inv2(sf.f)
    w1 = to_sl(fi @ d1(sf.f, sf.hx, 0))
    w2 = to_sl(fi @ d1(sf.f, sf.hy, 1))
    up = 0.25 * bracket(v, vx)
    vp = 0.25 * bracket(v, vy)
    if F is not None:
        Fi = inv2(np.asarray(F.values if isinstance(F, GridField) else F))
        w1, w2, up, vp = (ad_action(Fi, q) for q in (w1, w2, up, vp))
    n1 = sl_inner(w1, w1)
    n2 = sl_inner(w2, w2)
    if np.any(np.abs(n1) < 1e-14) or np.any(np.abs(n2) < 1e-14):
        raise DegenerateTangent("f^-1 df has a null or vanishing component")
    r = sl_inner(up, w1) / n1
    s = sl_inner(vp, w2) / n2
    k = interior
    sl_ = np.s_[k:-k, k:-k] if k else np.s_[:, :]
    return FrameRatios(r, s, float(np.abs(1 + r + s)[sl_].max()), float(r[sl_].std()))
