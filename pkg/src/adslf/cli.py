"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 numeric failure (the offending nodes are reported on stderr).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .algebra import inv2, to_sl
from .errors import AdslfError, NumericFailure
from .grid import Domain, GridField
from .io import (
    export_csv,
    export_obj,
    load_config,
    read_curve_csv,
    read_surface_csv,
)
from .presets import NAMES

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--preset", choices=NAMES)
    p.add_argument("--input", help="curve CSV (t,f11..f22,nu11..nu22) or surface CSV")
    p.add_argument("--config", help="TOML file with [domain], [params], [output]")
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--order", type=int, help="Laurent truncation order N")
    p.add_argument("--method", choices=("loop", "pointwise"))
    p.add_argument("--out-dir")
    p.add_argument("--tol", type=float)
    p.add_argument("--drop", type=int, choices=(0, 1, 2, 3), help="coordinate dropped by the R^3 projection")
    p.add_argument("--allow-singular", action="store_true")
    p.add_argument("--format", choices=("csv", "obj", "both"))


def build_parser():
    parser = _Parser(prog="adslf", description="Harmonic maps into H^2 and CGC surfaces in AdS3.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    groups = {
        "harmonic": ["solve"],
        "surface": ["case1", "case2"],
        "gcp": ["solve"],
        "parallel": ["apply"],
        "verify": ["all"],
    }
    for g, actions in groups.items():
        gp = sub.add_parser(g)
        asub = gp.add_subparsers(dest="action", required=True, parser_class=_Parser)
        for a in actions:
            p = asub.add_parser(a)
            _common(p)
            if g == "verify":
                p.add_argument("--disable", action="append", default=[], help="skip a module (repeatable)")
    _common(sub.add_parser("export"))
    return parser


DEFAULTS = {
    "lo": -0.5,
    "hi": 0.5,
    "step": 1e-2,
    "r": 2.0,
    "rho": None,
    "theta": 0.3,
    "A": None,
    "B": None,
    "order": None,
    "method": "loop",
    "out_dir": ".",
    "drop": 0,
    "format": "both",
    "preset": None,
}


def resolve(args):
    """Merge defaults, the TOML file and command-line flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            raw = load_config(args.config)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        for section in ("domain", "params", "output"):
            for k, v in raw.get(section, {}).items():
                key = k.replace("-", "_")
                if key == "h":
                    key = "step"
                if key not in cfg:
                    raise UsageError(f"unknown config key {section}.{k}")
                cfg[key] = v
    for k in cfg:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if not cfg["step"] > 0 or not cfg["hi"] > cfg["lo"]:
        raise UsageError("domain needs step > 0 and hi > lo")
    cfg["tol"] = args.tol
    cfg["input"] = args.input
    cfg["allow_singular"] = args.allow_singular
    return cfg


def _domain(cfg):
    d = Domain(float(cfg["lo"]), float(cfg["hi"]), float(cfg["step"]))
    singular = cfg["preset"] in ("example-4.2", "example-6.2")
    if singular and not cfg["allow_singular"] and max(abs(d.lo), abs(d.hi)) >= 1:
        raise UsageError("domain meets the singular set |t| = 1 (xy = 1); pass --allow-singular to proceed")
    return d


def _order(cfg):
    from .loops import DEFAULT_ORDER

    return DEFAULT_ORDER if cfg["order"] is None else int(cfg["order"])


def _diag(d):
    out = {}
    for k, v in d.items():
        if isinstance(v, (float, np.floating)):
            out[k] = float(v)
        elif isinstance(v, (int, np.integer)):
            out[k] = int(v)
        elif isinstance(v, tuple):
            out[k] = [int(q) for q in v]
    return out


def _write_outputs(cfg, command, x, y, nu=None, sf=None, geometry=None, curve=None, extra=None):
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    files = []
    f = None if sf is None else sf.f
    kp1 = H = causal = None
    if geometry is not None:
        kp1, H, causal = geometry.kp1, geometry.H, geometry.causal
    if cfg["format"] in ("csv", "both"):
        export_csv(os.path.join(out, "surface.csv"), x, y, nu, f, kp1, H, causal)
        files.append("surface.csv")
    if sf is not None and cfg["format"] in ("obj", "both"):
        export_obj(os.path.join(out, "surface.obj"), sf.f, sf.mask, curve, drop=int(cfg["drop"]))
        files.append("surface.obj")
    meta = {
        "command": command,
        "version": __version__,
        "preset": cfg["preset"],
        "input": cfg["input"],
        "domain": {"lo": float(x[0]), "hi": float(x[-1]), "step": float(cfg["step"]), "nodes": [len(x), len(y)]},
        "params": {k: cfg[k] for k in ("r", "rho", "theta", "A", "B", "order", "method", "tol")},
        "projection": {
            "basis": ["e0", "e1", "e2", "e3"],
            "coordinates": "x0=(a11+a22)/2, x1=(a21-a12)/2, x2=(a21+a12)/2, x3=(a22-a11)/2",
            "dropped": f"x{int(cfg['drop'])}",
        },
        "files": files,
    }
    if sf is not None:
        meta["diagnostics"] = _diag(sf.diagnostics)
    if geometry is not None:
        k = geometry.kp1[4:-4, 4:-4] if min(geometry.kp1.shape) > 8 else geometry.kp1
        meta["curvature"] = {"Kp1_mean": float(np.nanmean(k)), "Kp1_std": float(np.nanstd(k))}
    if extra:
        meta.update(extra)
    with open(os.path.join(out, "run.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta


def _harmonic_input(cfg, t):
    """Harmonic Cauchy data from a preset or from a curve file (needs rho)."""
    from .gcp import GeometricCauchyData, gcp_translate
    from .presets import cauchy_preset

    if cfg["input"]:
        if cfg["rho"] is None:
            raise UsageError("curve input needs --rho to build harmonic Cauchy data")
        gcd = _curve_input(cfg)
        return gcp_translate(GeometricCauchyData(gcd.t, gcd.fn, float(cfg["rho"]), validate=False), cfg["tol"])[0]
    if cfg["preset"] is None:
        raise UsageError("give --preset or --input")
    if cfg["preset"] == "example-6.2":
        from .gcp import gcp_preset

        return gcp_translate(gcp_preset(t, cfg["r"]), cfg["tol"])[0]
    return cauchy_preset(cfg["preset"], t)


def _curve_input(cfg, rho=None):
    from .gcp import GeometricCauchyData

    try:
        t, f, nu = read_curve_csv(cfg["input"])
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return GeometricCauchyData(t, rho=rho, f=f, nu=nu, name=os.path.basename(cfg["input"]), validate=False)


def _diagonal(n):
    return [(k, k) for k in range(n)]


def cmd_harmonic_solve(cfg):
    from .harmonic import dalembert_solve

    t = _domain(cfg).t
    cd = _harmonic_input(cfg, t).resample(t)
    nu = dalembert_solve(cd, N=_order(cfg), method=cfg["method"], tol=cfg["tol"])
    _write_outputs(cfg, "harmonic solve", t, t, nu=nu.values)
    return EXIT_OK


def cmd_surface_case1(cfg):
    from .harmonic import dalembert_solve
    from .surfaces import fundamental_forms, reconstruct_case1

    t = _domain(cfg).t
    cd = _harmonic_input(cfg, t).resample(t)
    nu = dalembert_solve(cd, N=_order(cfg), method=cfg["method"], tol=cfg["tol"])
    sf = reconstruct_case1(nu, float(cfg["r"]), tol=cfg["tol"])
    geo = fundamental_forms(sf, tol=cfg["tol"])
    _write_outputs(cfg, "surface case1", t, t, nu.values, sf, geo, _diagonal(len(t)))
    return EXIT_OK


def cmd_surface_case2(cfg):
    from .presets import example33_nu, example57_coefficients, example57_frame, example57_init
    from .surfaces import fundamental_forms, reconstruct_case2, solve_omega

    if cfg["preset"] not in (None, "example-5.7"):
        raise UsageError("surface case2 runs on the one-variable map (preset example-5.7)")
    cfg["preset"] = "example-5.7"
    x = _domain(cfg).t
    n = len(x)
    theta = float(cfg["theta"])
    A0, B0 = example57_coefficients(theta)
    A = A0 if cfg["A"] is None else float(cfg["A"])
    B = B0 if cfg["B"] is None else float(cfg["B"])
    cfg["A"], cfg["B"] = A, B
    nu = GridField(x, x, np.broadcast_to(example33_nu(x)[:, None], (n, n, 3)).copy())
    F = GridField(x, x, np.broadcast_to(example57_frame(x)[:, None], (n, n, 2, 2)).copy())
    sf = reconstruct_case2(nu, solve_omega(F, A, B), example57_init(theta), tol=cfg["tol"])
    geo = fundamental_forms(sf, tol=cfg["tol"])
    _write_outputs(cfg, "surface case2", x, x, nu.values, sf, geo, _diagonal(n))
    return EXIT_OK


def cmd_gcp_solve(cfg):
    from .gcp import GeometricCauchyData, curve_from_surface, gcp_preset, gcp_solve
    from .harmonic import dalembert_solve
    from .presets import cauchy_preset
    from .surfaces import fundamental_forms, reconstruct_case1

    t = _domain(cfg).t
    if cfg["input"]:
        if cfg["rho"] is None:
            raise UsageError("curve input needs --rho")
        gcd = _curve_input(cfg)
        gcd = GeometricCauchyData(gcd.t, gcd.fn, float(cfg["rho"]), name=gcd.name, validate=False)
        t = gcd.t
    elif cfg["preset"] == "example-6.2":
        gcd = gcp_preset(t, float(cfg["r"]))
    elif cfg["preset"] == "skew-immersion":
        r = float(cfg["r"]) if cfg["rho"] is None else (float(cfg["rho"]) - 1) / 2
        sf0 = reconstruct_case1(dalembert_solve(cauchy_preset("skew-immersion", t)), r)
        gcd = curve_from_surface(sf0, 2 * r + 1)
    else:
        raise UsageError("gcp solve needs --input or --preset example-6.2 / skew-immersion")
    cfg["rho"] = gcd.rho
    res = gcp_solve(gcd, N=_order(cfg), tol=cfg["tol"])
    geo = fundamental_forms(res.surface, tol=cfg["tol"])
    _write_outputs(
        cfg, "gcp solve", t, t, res.nu.values, res.surface, geo, _diagonal(len(t)),
        {"gcp": _diag(res.diagnostics)},
    )
    return EXIT_OK


def _surface_from_csv(path):
    from .surfaces import SurfaceField

    try:
        d = read_surface_csv(path)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    f = d["f"]
    if not np.isfinite(f).any():
        raise UsageError(f"{path} holds no surface values")
    N = f @ d["numat"]
    mask = np.isfinite(f).all(axis=(-1, -2)) & np.isfinite(N).all(axis=(-1, -2))
    return SurfaceField(d["x"], d["y"], f, N, d["nu"], mask), d


def cmd_parallel_apply(cfg):
    from .parallel import parallel_surface
    from .surfaces import fundamental_forms

    if not cfg["input"]:
        raise UsageError("parallel apply needs --input surface.csv")
    sf, _ = _surface_from_csv(cfg["input"])
    geo = fundamental_forms(sf, tol=cfg["tol"])
    p = parallel_surface(sf, float(cfg["theta"]), geo, tol=cfg["tol"])
    gp = fundamental_forms(p, orientation=-1, tol=cfg["tol"])
    nu = to_sl(inv2(p.f) @ p.N)
    cfg["step"] = float(sf.hx)
    _write_outputs(
        cfg, "parallel apply", sf.x, sf.y, nu, p, gp, _diagonal(min(len(sf.x), len(sf.y))),
        {"masked_nodes": int((~p.mask).sum()), "normal": "-N^theta"},
    )
    return EXIT_OK


def cmd_export(cfg):
    if not cfg["input"]:
        raise UsageError("export needs --input surface.csv")
    sf, d = _surface_from_csv(cfg["input"])
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    n = min(len(sf.x), len(sf.y))
    nv, nf = export_obj(os.path.join(out, "surface.obj"), sf.f, sf.mask, _diagonal(n), drop=int(cfg["drop"]))
    meta = {
        "command": "export",
        "input": cfg["input"],
        "projection": {"basis": ["e0", "e1", "e2", "e3"], "dropped": f"x{int(cfg['drop'])}"},
        "vertices": nv,
        "faces": nf,
    }
    with open(os.path.join(out, "run.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def cmd_verify_all(cfg, disable):
    from .ledger import MODULES, run_verification_ledger

    unknown = set(disable) - set(MODULES)
    if unknown:
        raise UsageError(f"unknown module(s): {', '.join(sorted(unknown))}")
    out = cfg["out_dir"]
    os.makedirs(out, exist_ok=True)
    modules = [m for m in MODULES if m not in disable]
    entries, code = run_verification_ledger(modules, tol=cfg["tol"], path=os.path.join(out, "ledger.csv"))
    counts = {}
    for e in entries:
        counts[e.status] = counts.get(e.status, 0) + 1
    summary = ", ".join(f"{k}: {counts[k]}" for k in sorted(counts)) or "no checks run"
    print(f"{len(entries)} checks ({summary})")
    for e in entries:
        if e.status == "property-fail":
            print(f"FAIL {e.id}: measured {e.measured:.3e}, tolerance {e.tolerance:.1e}")
    return code


COMMANDS = {
    ("harmonic", "solve"): cmd_harmonic_solve,
    ("surface", "case1"): cmd_surface_case1,
    ("surface", "case2"): cmd_surface_case2,
    ("gcp", "solve"): cmd_gcp_solve,
    ("parallel", "apply"): cmd_parallel_apply,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        if args.group == "verify":
            return cmd_verify_all(cfg, args.disable)
        if args.group == "export":
            return cmd_export(cfg)
        return COMMANDS[(args.group, args.action)](cfg)
    except UsageError as exc:
        print(f"adslf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"adslf: numeric failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        nodes = getattr(exc, "nodes", None)
        if nodes is not None and len(nodes):
            shown = [list(map(int, np.atleast_1d(q))) for q in list(nodes)[:10]]
            print(f"adslf: {len(nodes)} node(s), first: {shown}", file=sys.stderr)
        return EXIT_NUMERIC
    except (AdslfError, ValueError) as exc:
        print(f"adslf: error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
