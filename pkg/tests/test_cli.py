import json

import numpy as np
import pytest

from adslf.algebra import E1, sl_inner, to_mat
from adslf.cli import main
from adslf.io import (
    SURFACE_HEADER,
    export_csv,
    export_obj,
    load_config,
    project_r3,
    read_curve_csv,
    read_obj,
    read_surface_csv,
    write_curve_csv,
)
from adslf.ledger import run_verification_ledger


def test_projection_examples(rng):
    np.testing.assert_array_equal(project_r3(np.eye(2)), [0, 0, 0])
    np.testing.assert_array_equal(project_r3(E1), [1, 0, 0])
    np.testing.assert_array_equal(project_r3(np.array([[1.0, 2.0], [3.0, 4.0]])), [0.5, 2.5, 1.5])
    v = rng.standard_normal((50, 3))
    p = project_r3(to_mat(v))
    np.testing.assert_allclose(sl_inner(v, v), -p[:, 0] ** 2 + p[:, 1] ** 2 + p[:, 2] ** 2, atol=1e-13)
    np.testing.assert_array_equal(project_r3(np.array([[1.0, 2.0], [3.0, 4.0]]), drop=3), [2.5, 0.5, 2.5])


def test_csv_empty(tmp_path):
    p = tmp_path / "e.csv"
    export_csv(p, [], [])
    assert p.read_text() == ",".join(SURFACE_HEADER) + "\n"


def test_csv_round_trip(tmp_path, skew_surface, skew_nu):
    from adslf.surfaces import fundamental_forms

    g = fundamental_forms(skew_surface)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(a, skew_nu.x, skew_nu.y, skew_nu.values, skew_surface.f, g.kp1, g.H, g.causal)
    d = read_surface_csv(a)
    np.testing.assert_array_equal(d["f"], skew_surface.f)
    np.testing.assert_array_equal(d["Kp1"], g.kp1)
    export_csv(b, d["x"], d["y"], d["numat"], d["f"], d["Kp1"], d["H"], d["causal"])
    assert a.read_bytes() == b.read_bytes()


def test_csv_missing_values(tmp_path):
    x = np.linspace(0, 1, 3)
    p = tmp_path / "m.csv"
    export_csv(p, x, x)
    d = read_surface_csv(p)
    assert np.isnan(d["f"]).all()
    assert (d["causal_text"] == "nan").all()


def test_curve_round_trip(tmp_path, skew_surface):
    k = np.arange(len(skew_surface.x))
    p = tmp_path / "c.csv"
    write_curve_csv(p, skew_surface.x, skew_surface.f[k, k], skew_surface.nu[k, k])
    t, f, nu = read_curve_csv(p)
    np.testing.assert_array_equal(f, skew_surface.f[k, k])
    np.testing.assert_allclose(nu, skew_surface.nu[k, k], atol=1e-15)
    short = tmp_path / "s.csv"
    write_curve_csv(short, t[:5], f[:5], nu[:5])
    with pytest.raises(ValueError):
        read_curve_csv(short)


def test_obj_small(tmp_path):
    f = np.broadcast_to(np.eye(2), (2, 2, 2, 2)).copy()
    f[1, 1] = [[1, 1], [0, 1]]
    nv, nf = export_obj(tmp_path / "s.obj", f)
    assert (nv, nf) == (4, 1)
    v, faces, _ = read_obj(tmp_path / "s.obj")
    assert v.shape == (4, 3) and faces == [[1, 2, 4, 3]]


def test_obj_mask(tmp_path, skew_surface):
    mask = np.ones(skew_surface.f.shape[:2], bool)
    mask[10:15, 20:22] = False
    n = len(skew_surface.x)
    nv, nf = export_obj(tmp_path / "m.obj", skew_surface.f, mask, [(k, k) for k in range(n)])
    assert nv == mask.sum()
    v, faces, lines = read_obj(tmp_path / "m.obj")
    assert len(v) == nv and len(faces) == nf
    assert len(lines[0]) == n
    assert len(lines) > 1
    order = np.swapaxes(skew_surface.f, 0, 1)[mask.T]
    np.testing.assert_allclose(v, project_r3(order), atol=1e-15)


def test_config(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text('[domain]\nlo = -0.3\nhi = 0.3\nstep = 0.02\n[params]\nr = 3.0\npreset = "skew-immersion"\n[output]\nout_dir = "o"\n')
    cfg = load_config(p)
    assert cfg["params"]["r"] == 3.0
    bad = tmp_path / "bad.toml"
    bad.write_text("[extra]\na = 1\n")
    with pytest.raises(ValueError):
        load_config(bad)


def test_cli_case1_deterministic(tmp_path):
    for d in ("a", "b"):
        code = main(["surface", "case1", "--preset", "skew-immersion", "--step", "0.05", "--out-dir", str(tmp_path / d)])
        assert code == 0
    for name in ("surface.csv", "surface.obj", "run.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    meta = json.loads((tmp_path / "a" / "run.json").read_text())
    assert meta["projection"]["dropped"] == "x0"
    assert meta["curvature"]["Kp1_mean"] == pytest.approx(-25, abs=1e-3)


def test_cli_config_and_flags(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text(f'[domain]\nlo = -0.3\nhi = 0.3\nstep = 0.05\n[params]\nr = 3.0\npreset = "skew-immersion"\n[output]\nout_dir = "{tmp_path / "o"}"\n')
    assert main(["surface", "case1", "--config", str(p), "--r", "2.5"]) == 0
    meta = json.loads((tmp_path / "o" / "run.json").read_text())
    assert meta["params"]["r"] == 2.5
    assert meta["domain"]["nodes"] == [13, 13]
    assert meta["curvature"]["Kp1_mean"] == pytest.approx(-36, abs=1e-2)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["surface", "case2", "--B", "0", "--out-dir", str(tmp_path / "x")]) == 3
    assert "DegenerateOmega" in capsys.readouterr().err
    assert main(["gcp", "solve", "--preset", "example-6.2", "--step", "0.05", "--out-dir", str(tmp_path / "g")]) == 3
    assert main(["harmonic", "solve", "--preset", "example-4.2", "--hi", "1.0", "--out-dir", str(tmp_path / "h")]) == 1
    assert main(["harmonic", "solve", "--out-dir", str(tmp_path / "h")]) == 1
    assert main(["surface", "case1", "--preset", "skew-immersion", "--step", "-1"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["verify", "all", "--bogus-flag"])
    assert exc.value.code == 1


def test_cli_pipeline(tmp_path):
    c2 = tmp_path / "c2"
    assert main(["surface", "case2", "--theta", "0.4", "--lo", "-1", "--hi", "1", "--step", "0.05", "--out-dir", str(c2)]) == 0
    assert main(["parallel", "apply", "--input", str(c2 / "surface.csv"), "--theta", "0.3", "--out-dir", str(tmp_path / "p")]) == 0
    d = read_surface_csv(tmp_path / "p" / "surface.csv")
    m = np.isfinite(d["f"]).all(axis=(-1, -2))
    from adslf.algebra import gl_inner

    assert np.abs(gl_inner(d["f"], d["f"]) + 1)[m].max() < 1e-10
    assert main(["export", "--input", str(c2 / "surface.csv"), "--drop", "2", "--out-dir", str(tmp_path / "e")]) == 0
    v, faces, _ = read_obj(tmp_path / "e" / "surface.obj")
    assert len(v) == 41 * 41 and len(faces) == 40 * 40


def test_cli_gcp_from_curve_file(tmp_path, skew_surface):
    k = np.arange(len(skew_surface.x))
    p = tmp_path / "curve.csv"
    write_curve_csv(p, skew_surface.x, skew_surface.f[k, k], skew_surface.nu[k, k])
    assert main(["gcp", "solve", "--input", str(p), "--rho", "5", "--out-dir", str(tmp_path / "g")]) == 0
    meta = json.loads((tmp_path / "g" / "run.json").read_text())
    assert meta["gcp"]["curve_containment"] < 1e-6
    assert main(["gcp", "solve", "--input", str(p), "--out-dir", str(tmp_path / "g2")]) == 1


def test_ledger_contents():
    entries, code = run_verification_ledger(["algebra", "loops", "cli"])
    assert code == 0
    ids = [e.id for e in entries]
    assert len(ids) == len(set(ids))
    status = {e.id: e.status for e in entries}
    assert status["algebra.printed_nilpotents"] == "mismatch"
    assert status["algebra.bracket_e1e2"] == "match"
    assert status["loops.lambda1_pointwise"] == "mismatch"


def test_ledger_empty_and_tight():
    assert run_verification_ledger([]) == ([], 2)
    entries, code = run_verification_ledger(["algebra", "harmonic"], tol=1e-15)
    assert code == 2
    status = {e.id: e.status for e in entries}
    assert status["harmonic.skew-immersion.oracle"] == "property-fail"


def test_ledger_env_override(monkeypatch):
    monkeypatch.setenv("ADSLF_TOL", "1e-30")
    entries, code = run_verification_ledger(["algebra"])
    assert code == 2
    assert all(e.tolerance == 1e-30 for e in entries)


def test_verify_cli(tmp_path, capsys):
    code = main(["verify", "all", "--disable", "harmonic", "--disable", "surfaces", "--disable", "gcp",
                 "--disable", "parallel", "--out-dir", str(tmp_path)])
    assert code == 0
    text = (tmp_path / "ledger.csv").read_text().splitlines()
    assert text[0] == "id,module,location,status,measured,expected,tolerance"
    assert main(["verify", "all", "--disable", "nothing", "--out-dir", str(tmp_path)]) == 1
