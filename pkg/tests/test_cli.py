import csv
import io
import json

import numpy as np
import pytest

from gbwork import cli
from gbwork.config import DEFAULTS, ENV_VAR, load_config
from gbwork.errors import ConfigurationError, IntegrationError
from gbwork.model import Model

SMALL = {
    "spatial": {"dimension": 2, "divisions": 4},
    "time": {"samples": 200},
    "truncation": {"particles": 2, "hermite": 4, "scalar_modes": 1, "coexact_modes": 1},
    "samples": {"bridge_pairs": 5, "frequency_pairs": 3, "dual_forms": 3, "pairs": 2},
    "fock": {"npoint": [2]},
}


@pytest.fixture
def small_config(tmp_path):
    p = tmp_path / "small.json"
    p.write_text(json.dumps(SMALL))
    return str(p)


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_rows_and_kernel_flags(small_config, capsys):
    code, out, _ = _run(["spectrum", "--config", small_config], capsys)
    assert code == 0
    rows = _rows(out)
    n = 4
    assert len(rows) == n * n + 2 * n * n + n * n
    for k, betti in enumerate((1, 2, 1)):
        assert sum(int(r["is_kernel"]) for r in rows if r["degree"] == str(k)) == betti
    h = 2 * np.pi / n
    s = 4 / h**2 * np.sin(np.pi * np.arange(n) / n) ** 2
    ref = np.sort((s[:, None] + s[None, :]).ravel())
    lam = np.array([float(r["eigenvalue"]) for r in rows if r["degree"] == "0"])
    np.testing.assert_allclose(lam, ref, atol=1e-10)


def test_verify_report_structure_and_timings(small_config, tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, err = _run(["verify", "--config", small_config, "--suite", "geometry", "--suite", "frequency",
                         "--out", str(out)], capsys)
    assert code == 0, err
    rep = json.loads(out.read_text())
    assert rep["schema_version"] == "1.0"
    assert set(rep) == {"schema_version", "environment", "config", "conventions", "normalization", "checks", "summary"}
    assert [c["suite"] for c in rep["checks"]] == ["geometry"] * 3 + ["frequency"] * 2
    assert all("runtime" not in c for c in rep["checks"])
    assert rep["summary"]["status"] == "pass"
    for c in rep["checks"]:
        assert {"name", "anchor", "tolerance", "relation", "residual", "status"} <= set(c)
    code, _, _ = _run(["verify", "--config", small_config, "--suite", "geometry", "--timings", "--out", str(out)],
                      capsys)
    assert all("runtime" in c for c in json.loads(out.read_text())["checks"])


def test_failing_tolerance_exits_one(tmp_path, capsys):
    cfg = dict(SMALL, tolerances={"bridge_identity": 1e-300})
    p = tmp_path / "tight.json"
    p.write_text(json.dumps(cfg))
    code, out, _ = _run(["verify", "--config", str(p), "--suite", "propagation"], capsys)
    assert code == 1
    rec = {c["name"]: c for c in json.loads(out)["checks"]}
    assert rec["bridge_identity"]["status"] == "fail"
    assert rec["bridge_identity"]["tolerance"] == 1e-300


def test_invalid_config_exits_two_with_field_path(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("spatial:\n  dimension: 3\ntruncation:\n  particles: 0\nbogus: 1\n")
    code, _, err = _run(["verify", "--config", str(p)], capsys)
    assert code == 2
    assert "spatial/dimension" in err and "truncation/particles" in err and "bogus" in err
    code, _, err = _run(["spectrum", "--config", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_internal_error_exits_three(monkeypatch, small_config, capsys):
    def boom(args, config):
        raise IntegrationError("blow-up")

    monkeypatch.setattr(cli, "cmd_spectrum", boom)
    code, _, err = _run(["spectrum", "--config", small_config], capsys)
    assert code == 3 and "IntegrationError" in err


def test_env_var_config_and_overrides(monkeypatch, small_config):
    monkeypatch.setenv(ENV_VAR, small_config)
    cfg = load_config(None, {"seed": 5})
    assert cfg["spatial"]["divisions"] == 4 and cfg["seed"] == 5
    assert cfg["xi"] == DEFAULTS["xi"]
    monkeypatch.delenv(ENV_VAR)
    assert load_config(None) == DEFAULTS
    with pytest.raises(ConfigurationError):
        load_config(None, {"seed": -1})


def test_truncation_skip_marking(tmp_path, capsys):
    cfg = dict(SMALL, truncation={"particles": 1, "hermite": 4, "scalar_modes": 1, "coexact_modes": 1},
               fock={"npoint": [2, 4]})
    p = tmp_path / "n1.json"
    p.write_text(json.dumps(cfg))
    code, out, _ = _run(["verify", "--config", str(p), "--suite", "fock"], capsys)
    rec = {c["name"]: c for c in json.loads(out)["checks"]}
    for name in ("wick_four_point", "gb_condition"):
        assert rec[name]["status"] == "skipped: truncation insufficient"
        assert rec[name]["residual"] is None
    assert rec["two_point_antisymmetry"]["status"] == "pass"
    assert json.loads(out)["summary"]["skipped"] == 2
    assert code == 0


def test_seed_changes_report_and_repeats_identically(small_config, capsys):
    runs = [_run(["verify", "--config", small_config, "--suite", "one_particle", "--seed", s], capsys)[1]
            for s in ("1", "1", "2")]
    assert runs[0] == runs[1]
    assert runs[0] != runs[2]


def test_twopoint_origin_matches_krein_product(small_config, capsys):
    code, out, _ = _run(["twopoint", "--config", small_config, "--samples", "256", "--fourier"], capsys)
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 256
    origin = [r for r in rows if float(r["time"]) == 0.0][0]
    assert float(origin["re_F"]) == pytest.approx(float(origin["F0_re"]), abs=1e-10)
    assert float(origin["im_F"]) == pytest.approx(float(origin["F0_im"]), abs=1e-10)
    assert float(rows[0]["negative_mass_ratio"]) <= 1e-6


def test_twopoint_single_mode_peak(small_config, capsys):
    code, out, _ = _run(["twopoint", "--config", small_config, "--samples", "512", "--fourier", "--single-mode"],
                        capsys)
    assert code == 0
    rows = _rows(out)
    freq = np.array([float(r["frequency"]) for r in rows])
    mag = np.array([float(r["magnitude"]) for r in rows])
    m = Model(load_config(small_config))
    e = m.corpus.exact[0]
    lam = e @ (m.complex.mass[1] * (m.complex.laplacian_matrix(1) @ e)) / (e @ (m.complex.mass[1] * e))
    assert abs(freq[np.argmax(mag)] - np.sqrt(lam)) <= np.diff(freq).max()


def test_one_dimensional_torus_passes(tmp_path, capsys):
    cfg = dict(SMALL, spatial={"dimension": 1, "divisions": 8})
    p = tmp_path / "line.json"
    p.write_text(json.dumps(cfg))
    code, out, err = _run(["verify", "--config", str(p), "--suite", "geometry", "--suite", "one_particle",
                           "--suite", "fock"], capsys)
    assert code == 0, err
    assert json.loads(out)["summary"]["fail"] == 0
