"""CSV and OBJ export, curve input, TOML configuration and R^3 projection."""

import csv
import math
import sys

import numpy as np

from .algebra import from_gl_coords, gl_coords, to_mat, to_sl

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SURFACE_HEADER = ["x", "y", "nu11", "nu12", "nu21", "nu22", "f11", "f12", "f21", "f22", "Kp1", "H", "causal"]
CURVE_HEADER = ["t", "f11", "f12", "f21", "f22", "nu11", "nu12", "nu21", "nu22"]
CAUSAL_NAMES = {1: "spacelike", -1: "lorentzian", 0: "degenerate"}
CAUSAL_CODES = {v: k for k, v in CAUSAL_NAMES.items()}


def project_r3(m, drop=0):
    """Drop one coordinate of (x0, x1, x2, x3) in the basis (e0, e1, e2, e3)."""
    x = gl_coords(np.asarray(m, dtype=float))
    keep = [k for k in range(4) if k != drop]
    return x[..., keep]


def fmt(v):
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def export_csv(path, x, y, nu=None, f=None, kp1=None, H=None, causal=None):
    """Write per-node values, rows ordered by y then x; missing values are nan.

    ``nu`` may be given in sl(2,R) coordinates or as 2x2 matrices.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = (len(x), len(y))
    if nu is None:
        numat = np.full(shape + (2, 2), np.nan)
    else:
        nu = np.asarray(nu, dtype=float)
        numat = nu if nu.shape[-2:] == (2, 2) else to_mat(nu)
    fm = np.full(shape + (2, 2), np.nan) if f is None else np.asarray(f, dtype=float)
    kp1 = np.full(shape, np.nan) if kp1 is None else np.asarray(kp1)
    H = np.full(shape, np.nan) if H is None else np.asarray(H)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SURFACE_HEADER)
        for j in range(len(y)):
            for i in range(len(x)):
                c = "nan" if causal is None else CAUSAL_NAMES.get(int(causal[i, j]), "nan")
                w.writerow(
                    [fmt(x[i]), fmt(y[j])]
                    + [fmt(v) for v in numat[i, j].ravel()]
                    + [fmt(v) for v in fm[i, j].ravel()]
                    + [fmt(kp1[i, j]), fmt(H[i, j]), c]
                )


def read_surface_csv(path):
    """Inverse of export_csv: returns a dict of grid arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != SURFACE_HEADER:
        raise ValueError(f"{path}: unexpected header")
    body = rows[1:]
    xs = sorted({float(r[0]) for r in body})
    ys = sorted({float(r[1]) for r in body})
    nx, ny = len(xs), len(ys)
    if nx * ny != len(body):
        raise ValueError(f"{path}: rows do not form a full grid")
    data = np.array([[float(v) for v in r[:12]] for r in body]).reshape(ny, nx, 12).swapaxes(0, 1)
    causal = np.array([CAUSAL_CODES.get(r[12], -9) for r in body]).reshape(ny, nx).T
    return {
        "x": np.array(xs),
        "y": np.array(ys),
        "nu": to_sl(data[..., 2:6].reshape(nx, ny, 2, 2)),
        "numat": data[..., 2:6].reshape(nx, ny, 2, 2),
        "f": data[..., 6:10].reshape(nx, ny, 2, 2),
        "Kp1": data[..., 10],
        "H": data[..., 11],
        "causal": causal,
        "causal_text": np.array([r[12] for r in body]).reshape(ny, nx).T,
    }


def read_curve_csv(path):
    """Curve samples t, f (n, 2, 2), nu (n, 3) from the curve schema."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != CURVE_HEADER:
        raise ValueError(f"{path}: expected header {','.join(CURVE_HEADER)}")
    a = np.array([[float(v) for v in r] for r in rows[1:] if r])
    if len(a) < 9:
        raise ValueError("curve input needs at least 9 samples")
    return a[:, 0], a[:, 1:5].reshape(-1, 2, 2), to_sl(a[:, 5:9].reshape(-1, 2, 2))


def write_curve_csv(path, t, f, nu):
    numat = to_mat(np.asarray(nu))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for k in range(len(t)):
            w.writerow([fmt(t[k])] + [fmt(v) for v in f[k].ravel()] + [fmt(v) for v in numat[k].ravel()])


def export_obj(path, f, mask=None, curve=None, drop=0):
    """Quad mesh of project_r3(f) with polylines for the curve and the mask boundary.

    ``curve`` is a list of grid nodes (i, j) traced as the initial curve;
    masked or non-finite nodes are omitted together with their faces.
    """
    f = np.asarray(f, dtype=float)
    nx, ny = f.shape[:2]
    p = project_r3(f, drop)
    ok = np.isfinite(p).all(-1)
    if mask is not None:
        ok &= np.asarray(mask, dtype=bool)
    index = np.zeros((nx, ny), dtype=int)
    lines = [f"# projection: drop x{drop} of (x0, x1, x2, x3)", "o surface"]
    n = 0
    for j in range(ny):
        for i in range(nx):
            if ok[i, j]:
                n += 1
                index[i, j] = n
                lines.append("v " + " ".join(fmt(v) for v in p[i, j]))
    present = np.zeros((max(nx - 1, 0), max(ny - 1, 0)), dtype=bool)
    for j in range(ny - 1):
        for i in range(nx - 1):
            if ok[i, j] and ok[i + 1, j] and ok[i + 1, j + 1] and ok[i, j + 1]:
                present[i, j] = True
                lines.append(f"f {index[i, j]} {index[i + 1, j]} {index[i + 1, j + 1]} {index[i, j + 1]}")
    if curve is not None:
        pts = [index[i, j] for i, j in curve if ok[i, j]]
        if len(pts) > 1:
            lines.append("o initial_curve")
            lines.append("l " + " ".join(str(q) for q in pts))
    edges = _mask_boundary(present)
    if edges:
        lines.append("o mask_boundary")
        for (a, b) in edges:
            lines.append(f"l {index[a]} {index[b]}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return n, int(present.sum())


def _mask_boundary(present):
    """Grid edges between a present face and a missing interior face."""
    nx, ny = present.shape
    edges = []
    for i in range(nx):
        for j in range(ny):
            if not present[i, j]:
                continue
            if i + 1 < nx and not present[i + 1, j]:
                edges.append(((i + 1, j), (i + 1, j + 1)))
            if i > 0 and not present[i - 1, j]:
                edges.append(((i, j), (i, j + 1)))
            if j + 1 < ny and not present[i, j + 1]:
                edges.append(((i, j + 1), (i + 1, j + 1)))
            if j > 0 and not present[i, j - 1]:
                edges.append(((i, j), (i + 1, j)))
    return edges


def read_obj(path):
    verts, faces, polylines = [], [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(v) for v in parts[1:]])
            elif parts[0] == "f":
                faces.append([int(v) for v in parts[1:]])
            elif parts[0] == "l":
                polylines.append([int(v) for v in parts[1:]])
    return np.array(verts).reshape(-1, 3), faces, polylines


def load_config(path):
    """Read a TOML run configuration with [domain], [params] and [output] tables."""
    with open(path, "rb") as fh:
        cfg = tomllib.load(fh)
    unknown = set(cfg) - {"domain", "params", "output"}
    if unknown:
        raise ValueError(f"unknown config sections: {', '.join(sorted(unknown))}")
    return cfg


__all__ = [
    "project_r3",
    "export_csv",
    "read_surface_csv",
    "read_curve_csv",
    "write_curve_csv",
    "export_obj",
    "read_obj",
    "load_config",
    "from_gl_coords",
]
