import json

import pytest

from hfmdot import cli, spectrum
from hfmdot.config import PINNED_REFERENCE_CONFIG, ConfigError, RunConfig, config_from_dict, load_config, parse_range
from hfmdot.hyperangular import AngularGrid


def test_parse_range():
    assert parse_range("0:2:5") == (0.0, 2.0, 5)
    assert parse_range("1.5") == (1.5, 1.5, 1)
    assert parse_range([0, 1, 3]) == (0.0, 1.0, 3)
    for bad in ("0:1", "a:b:c", "0:1:0"):
        with pytest.raises(ConfigError):
            parse_range(bad)


def test_precedence(tmp_path):
    cfg_file = tmp_path / "c.json"
    cfg_file.write_text(json.dumps({"k_max": 2, "n_max": 7, "rho0": 2.0, "b_range": "0:1:3"}))
    env = {"HFMDOT_N_MAX": "9", "HFMDOT_RHO0": "3.0"}
    cfg = load_config(cfg_file, {"rho0": 4.0, "k_max": None}, environ=env)
    assert (cfg.k_max, cfg.n_max, cfg.rho0) == (2, 9, 4.0)
    assert cfg.b_values() == [0.0, 0.5, 1.0]
    assert load_config(environ={}) == RunConfig()


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="unknown"):
        load_config(overrides={"kmax": 3}, environ={})
    with pytest.raises(ConfigError):
        load_config(environ={"HFMDOT_BOGUS": "1"})
    with pytest.raises(ConfigError):
        load_config(overrides={"k_max": 2.5}, environ={})
    with pytest.raises(ConfigError):
        load_config(overrides={"symmetry": "bosonic"}, environ={})
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(bad, environ={})


def test_config_dict_round_trip():
    cfg = RunConfig(k_max=4, beta_meV=3.0, b_range=(0.0, 2.0, 3))
    assert config_from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    assert config_from_dict({"beta_meV": None}).beta_meV is None
    assert load_config(environ={"HFMDOT_BETA_MEV": "null"}).beta_meV is None


def test_pinned_configuration():
    cfg = PINNED_REFERENCE_CONFIG
    assert (cfg.k_max, cfg.n_max, cfg.symmetry, cfg.prefactor, cfg.rho0) == (6, 20, "symmetric", "paper", 1.0)
    assert cfg.dot().beta_mev == pytest.approx(7.9564, abs=1e-4)


def test_cm_spectrum_with_manifest(tmp_path):
    out = tmp_path / "cm.csv"
    assert cli.main(["cm-spectrum", "--b", "0:1:2", "--m-max", "2", "--out", str(out)]) == 0
    table = spectrum.SpectrumTable.from_csv(out)
    assert table.column("energy_meV")[:5].tolist() == [5.0, 10.0, 10.0, 15.0, 15.0]
    assert table.column("m")[:5].tolist() == [0, 1, -1, 2, -2]
    assert len(table.rows) == 2 * 2 * 5
    assert out.read_text().startswith("# manifest: cm.csv.manifest.json")
    manifest = cli.RunManifest.from_json(cli.manifest_path(out).read_text())
    assert manifest.subcommand == "cm-spectrum"
    assert manifest.outputs == ["cm.csv"]
    assert manifest.config["cm_m_max"] == 2
    assert manifest.code_version == spectrum.code_version()


def test_ground_state_outputs(tmp_path):
    out = tmp_path / "gs.json"
    assert cli.main(["ground-state", "--k-max", "4", "--n-max", "8", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["coefficient_norm"] == pytest.approx(1.0)
    assert set(payload["trace_meV"]) == {"0", "2", "4"}
    trace = spectrum.SpectrumTable.from_csv(tmp_path / payload["trace_csv"])
    assert trace.column("energy_meV")[-1] == payload["energy_meV"]
    assert json.loads(cli.manifest_path(out).read_text())["outputs"] == ["gs.json", "gs_trace.csv"]


def test_stdout_output(capsys):
    assert cli.main(["rel-spectrum", "--k-max", "0", "--n-max", "1"]) == 0
    assert "B_T,K,L,N,energy_meV" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    assert cli.main(["sweep", "--k-max", "-1"]) == cli.EXIT_CONFIG
    assert cli.main(["sweep", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_CONFIG
    assert cli.main(["sweep", "--threads", "0"]) == cli.EXIT_CONFIG
    assert cli.main(["sweep", "--k-max", "0", "--L", "1"]) == cli.EXIT_SOLVER
    assert cli.main(["cm-spectrum", "--out", str(tmp_path / "no" / "x.csv")]) == cli.EXIT_IO
    err = capsys.readouterr().err
    assert "configuration error" in err and "solver error" in err and "I/O error" in err


def test_selfcheck_passes(capsys):
    assert cli.main(["selfcheck"]) == cli.EXIT_OK
    assert "selfcheck passed" in capsys.readouterr().out


def test_selfcheck_names_induced_failure(capsys):
    assert cli.main(["selfcheck", "--n-alpha", "4", "--n-phi", "4"]) == cli.EXIT_INVARIANT
    out = capsys.readouterr().out
    assert "FAIL  orthonormality" in out
    assert "selfcheck failed: orthonormality" in out


def test_selfcheck_function():
    names = [name for name, ok, _ in cli.selfcheck(AngularGrid(32, 32), verbose=False) if ok]
    assert names == ["orthonormality", "rr-unitarity", "log-elements", "beta0-reduction"]


def test_cm_default_first_row_and_rerun(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert cli.main(["cm-spectrum", "--out", str(out)]) == 0
    table = spectrum.SpectrumTable.from_csv(a)
    assert table.rows[0] == (0.0, 0, 0, 5.0, 0.0)
    assert len(table.rows) == 1 * 2 * 11
    assert a.read_text().replace("a.csv", "x") == b.read_text().replace("b.csv", "x")
    ma = json.loads(cli.manifest_path(a).read_text())
    mb = json.loads(cli.manifest_path(b).read_text())
    for m in (ma, mb):
        m.pop("started_at"), m.pop("wall_clock_s"), m.pop("outputs")
    assert ma == mb


def test_manifest_round_trip():
    m = cli.RunManifest("sweep", RunConfig().to_dict(), ["x.csv"], "v", "2026-01-01T00:00:00+00:00", 1.5, {"threads": 2})
    assert cli.RunManifest.from_json(m.to_json()) == m


def test_ground_state_beta_zero_is_oscillator_minimum(capsys):
    assert cli.main(["ground-state", "--beta-mev", "0", "--k-max", "2", "--n-max", "3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["energy_meV"] == pytest.approx(10.0, abs=1e-12)


def test_ground_state_requires_even_k_max():
    assert cli.main(["ground-state", "--k-max", "3"]) == cli.EXIT_CONFIG


def test_selfcheck_time_budget():
    import time

    from hfmdot import hyperangular as ha

    ha._rr_cached.cache_clear()
    ha._perm_cached.cache_clear()
    ha._symmetrize_cached.cache_clear()
    t0 = time.perf_counter()
    assert all(ok for _, ok, _ in cli.selfcheck(verbose=False))
    assert time.perf_counter() - t0 < 60
