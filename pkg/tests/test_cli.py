import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from walkergeom import __version__
from walkergeom.cli import main

CONFIGS = Path(__file__).parent.parent / "configs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_parakahler(capsys, tmp_path):
    out_json = tmp_path / "r.json"
    code, out, _ = run(capsys, "classify", CONFIGS / "parakahler.toml", "--json", out_json)
    assert code == 0
    assert "osserman: yes" in out and "jacobi types: Ia" in out
    report = json.loads(out_json.read_text())
    assert set(report) == {"summary", "points", "provenance"}
    s = report["summary"]
    assert s["is_selfdual"] and s["is_einstein"] and s["is_osserman"] and s["is_jordan_osserman"]
    assert s["jordan_types"] == ["Ia"]
    assert s["spectrum"] == pytest.approx([0, 0.25, 0.25, 1], abs=1e-8)
    assert report["provenance"]["version"] == __version__
    rec = report["points"][0]
    for key in ("point", "tau", "selfdual_residuals", "einstein_residuals", "wplus", "jordan_type", "spectrum"):
        assert key in rec
    assert len(rec["selfdual_residuals"]) == 5 and len(rec["einstein_residuals"]) == 6


def test_classify_type_ii(capsys, tmp_path):
    out_json = tmp_path / "r.json"
    code, _, _ = run(capsys, "classify", CONFIGS / "typeII_tau24_Qx4sq.toml", "--json", out_json)
    s = json.loads(out_json.read_text())["summary"]
    assert code == 0
    assert s["jordan_types"] == ["II"] and s["wplus_classes"] == ["II-double-root"]
    assert s["spectrum"] == pytest.approx([0, 1, 1, 4], abs=1e-8)


def test_classify_q_x3_reports_ia(capsys, tmp_path):
    out_json = tmp_path / "r.json"
    run(capsys, "classify", CONFIGS / "typeII_tau24_Qx3.toml", "--json", out_json)
    s = json.loads(out_json.read_text())["summary"]
    assert s["jordan_types"] == ["Ia"]
    assert s["spectrum"] == pytest.approx([0, 1, 1, 4], abs=1e-8)


def test_classify_not_selfdual(capsys, tmp_path):
    out_json = tmp_path / "r.json"
    code, out, _ = run(capsys, "classify", CONFIGS / "raw_x2sq.toml", "--json", out_json)
    assert "self-dual: no" in out
    s = json.loads(out_json.read_text())["summary"]
    assert s["selfdual_residual_max"][0] == 2.0
    assert not s["is_selfdual"]


def test_json_deterministic_and_seed_override(capsys, tmp_path):
    paths = [tmp_path / f"{i}.json" for i in range(3)]
    cfg = CONFIGS / "m1_raw.toml"
    run(capsys, "classify", cfg, "--json", paths[0])
    run(capsys, "classify", cfg, "--json", paths[1])
    run(capsys, "classify", cfg, "--json", paths[2], "--seed", 99)
    a, b, c = (p.read_bytes() for p in paths)
    assert a == b
    assert a != c
    assert json.loads(c)["provenance"]["seed"] == 99


def test_workers_do_not_change_report(capsys, tmp_path):
    base = (CONFIGS / "m1_raw.toml").read_text()
    one, four = tmp_path / "one.toml", tmp_path / "four.toml"
    one.write_text(base)
    four.write_text(base + "samples.workers = 4\n")
    run(capsys, "classify", one, "--json", tmp_path / "one.json")
    run(capsys, "classify", four, "--json", tmp_path / "four.json")
    r1 = json.loads((tmp_path / "one.json").read_text())
    r4 = json.loads((tmp_path / "four.json").read_text())
    assert r1["points"] == r4["points"] and r1["summary"] == r4["summary"]


def test_classify_bad_config(capsys, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "raw"\nexpr.a = "x1 +"\n')
    code, _, err = run(capsys, "classify", bad)
    assert code == 1 and "error" in err
    code, _, _ = run(capsys, "classify", tmp_path / "missing.toml")
    assert code == 1


def test_classify_domain_error(capsys, tmp_path):
    cfg = tmp_path / "div.toml"
    cfg.write_text('kind = "raw"\nexpr.a = "1/(x1-x1)"\nsamples.points = 1\nsamples.dirs = 1\n')
    code, _, err = run(capsys, "classify", cfg)
    assert code == 1 and "division by zero" in err


def test_indeterminate_exit_code(capsys, tmp_path, monkeypatch):
    import walkergeom.cli as cli

    real = cli.classify

    def fake(cfg):
        r = real(cfg)
        r["summary"]["indeterminate_count"] = 1
        return r

    monkeypatch.setattr(cli, "classify", fake)
    code, _, _ = run(capsys, "classify", CONFIGS / "flat.toml")
    assert code == 2


def test_audit(capsys):
    code, out, _ = run(capsys, "audit", CONFIGS / "m1_raw.toml")
    assert code == 0 and "FAIL" not in out
    for table in ("connection", "riemann", "ricci", "weyl", "wplus", "wminus"):
        assert table in out


def test_audit_flat_zero(capsys):
    code, out, _ = run(capsys, "audit", CONFIGS / "flat.toml")
    assert code == 0
    assert all("0.000e+00" in line for line in out.splitlines()[1:])


@pytest.mark.parametrize("table", ["riemann", "connection", "wplus"])
def test_audit_fault_injection(capsys, table):
    code, out, _ = run(capsys, "audit", CONFIGS / "m1_raw.toml", "--inject-fault", table)
    assert code == 1 and "FAIL" in out


@pytest.mark.parametrize("name", ["selfdual", "typeII_tau24_Qx4sq", "typeII_tau24_Qx3", "strict", "parakahler",
                                  "antiselfdual", "ricciflat_typeIII"])
def test_verify_family_passes(capsys, name):
    code, out, _ = run(capsys, "verify-family", CONFIGS / f"{name}.toml")
    assert code == 0, out
    assert "[FAIL]" not in out


def test_verify_family_ricciflat_failure(capsys):
    code, out, _ = run(capsys, "verify-family", CONFIGS / "ricciflat_Qx4.toml")
    assert code == 1
    fail = [line for line in out.splitlines() if line.startswith("[FAIL]")]
    assert fail and "2" in fail[0]


def test_verify_family_rejects_raw(capsys):
    code, _, err = run(capsys, "verify-family", CONFIGS / "m1_raw.toml")
    assert code == 1 and "raw" in err


def test_families_list(capsys):
    code, out, _ = run(capsys, "families", "list")
    assert code == 0
    for kind in ("raw", "selfdual", "typeII", "ricciflat-selfdual", "strict", "parakahler", "antiselfdual-example"):
        assert kind in out


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


@pytest.mark.skipif(shutil.which("walkergeom") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["walkergeom", "families", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and "typeII" in res.stdout


def test_module_entry():
    res = subprocess.run([sys.executable, "-m", "walkergeom.cli", "families", "list"], capture_output=True, text=True)
    assert res.returncode == 0
