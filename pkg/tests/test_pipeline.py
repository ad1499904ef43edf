import json

import numpy as np
import pytest

from kickedtop import cli, pipeline
from kickedtop.errors import ConfigError
from kickedtop.pipeline import ComparisonCurve, ExperimentConfig, extremal_window, windows_meet


def small(tmp_path, **kw):
    d = dict(J=12, resolution=(24, 24), taus=(1, 10, 100), horizon=1000, output_dir=str(tmp_path))
    d.update(kw)
    return pipeline.profile("desk", **d)


def test_config_round_trip():
    cfg = ExperimentConfig(k=2.5, sigma2=0.01, taus=(1, 5), horizon=100, k_list=(1, 2))
    back = ExperimentConfig.from_json(cfg.to_json())
    assert back == cfg
    assert back.config_hash() == cfg.config_hash()
    assert cfg.replace(output_dir="elsewhere").config_hash() == cfg.config_hash()
    assert cfg.replace(seed=1).config_hash() != cfg.config_hash()


@pytest.mark.parametrize("bad", [dict(J=0), dict(grid_mode="cube"), dict(taus=()), dict(horizon=10),
                                 dict(measure="x"), dict(sigma2=-1.0), dict(warmup_mode="sideways")])
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig(**bad)


def test_config_unknown_key():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"kick": 3})


def test_profiles():
    assert pipeline.profile("desk").J == 100
    assert pipeline.profile("paper").J == 500
    with pytest.raises(ConfigError):
        pipeline.profile("huge")


def test_extremal_window():
    taus = [1, 3, 10, 30, 100]
    assert extremal_window([0.1, 0.5, 0.52, 0.515, 0.3], taus, "max") == (2, 3, 2)
    assert extremal_window([0.4, 0.2, 0.3, 0.3, 0.3], taus, "min") == (1, 1, 1)
    assert windows_meet((1, 2), (3, 4)) and windows_meet((1, 3), (2, 2)) and not windows_meet((0, 0), (2, 3))


def test_curve_length_check():
    with pytest.raises(ValueError):
        ComparisonCurve([1, 2], [0.1], [0.2, 0.3], 10, 3.0, 0.84)


def test_single_window_curve(tmp_path):
    res = pipeline.run_correspondence(small(tmp_path, taus=(1,)))
    c = res.curve
    assert c.taus == [1] and len(c.pearson) == 1 and len(c.js) == 1
    assert c.pearson_window == (1, 1) and c.js_window == (1, 1) and c.windows_agree


def test_resume_matches_uninterrupted(tmp_path):
    full = pipeline.run_correspondence(small(tmp_path / "full"))
    cfg = small(tmp_path / "part")
    part = pipeline.run_correspondence(cfg, stop_after="tau:10")
    assert part.curve is None and not part.manifest["complete"]
    assert "tau:100" not in part.manifest["stages"]
    done = pipeline.run_correspondence(cfg)
    assert done.curve.to_dict() == full.curve.to_dict()
    a = (tmp_path / "full" / "comparison_curve.dat").read_bytes()
    assert (tmp_path / "part" / "comparison_curve.dat").read_bytes() == a


def test_changed_config_discards_stages(tmp_path):
    pipeline.run_correspondence(small(tmp_path))
    res = pipeline.run_correspondence(small(tmp_path, seed=9))
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["config"]["seed"] == 9 and res.curve is not None


def test_emit_files(tmp_path):
    cfg = small(tmp_path)
    pipeline.run_correspondence(cfg)
    files = pipeline.emit_figure_data(tmp_path, render=True)
    names = {p.name for p in files}
    assert {"pr_field.mat", "pearson_curve.dat", "js_curve.dat", "comparison_curve.png"} <= names
    for p in files:
        if p.suffix in (".mat", ".dat"):
            assert p.read_text().startswith(f"# config_hash={cfg.config_hash()}")
    mat = np.genfromtxt(tmp_path / "plots" / "gftle_tau000010.mat", comments="#")
    assert mat.shape == (24, 24)
    for p in (tmp_path / "plots").glob("hist_*.dat"):
        dens = np.loadtxt(p, comments="#")[:, 3]
        assert abs(dens.sum() - 1.0) < 1e-9


def test_emit_incomplete_run(tmp_path):
    pipeline.run_correspondence(small(tmp_path), stop_after="pr")
    with pytest.raises(ValueError):
        pipeline.emit_figure_data(tmp_path)


def test_phase_diagram_free_row(tmp_path):
    cfg = small(tmp_path, k_list=(0.0, 3.0), n_samples=100, horizon=2000)
    rows = pipeline.run_phase_diagram(cfg)
    assert rows[0]["mu"] == 0.0
    # diagonal eigenbasis: PR of a coherent state is 1/(N sum |c_m|^4), of order 1/sqrt(J)
    assert rows[0]["mean_pr"] < rows[1]["mean_pr"]
    assert (tmp_path / "phase_diagram.dat").exists()
    assert pipeline.emit_figure_data(tmp_path, render=False)


def test_cli_exit_codes(tmp_path, capsys):
    base = ["--J", "12", "--resolution", "24", "--taus", "1,10", "--horizon", "500",
            "--output-dir", str(tmp_path / "run")]
    assert cli.main(["compare"] + base) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[1].split("\t") == ["tau", "pearson", "js", "n_points"]
    assert cli.main(["emit-plots", "--no-render"] + base) == 0
    assert cli.main(["compare", "--J", "0"]) == 2
    assert cli.main(["compare", "--horizon", "5"]) == 2
    assert cli.main(["emit-plots", str(tmp_path / "missing")]) == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["spectrum", "--config", str(bad)]) == 2
    assert cli.main(["spectrum", "--config", str(tmp_path / "absent.json")]) == 4


def test_cli_config_file_and_override(tmp_path, capsys):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"J": 9, "k": 2.0}))
    assert cli.main(["spectrum", "--config", str(cfgfile), "--k", "4"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split("\t")
    assert row[:2] == ["9", "4.0"]


def test_cli_stepwise(tmp_path, capsys):
    base = ["--J", "12", "--resolution", "24", "--taus", "1,10", "--horizon", "500",
            "--output-dir", str(tmp_path)]
    assert cli.main(["ftle-field"] + base) == 0
    assert cli.main(["gftle"] + base) == 0
    assert cli.main(["pr-field", "--mask", str(tmp_path / "lyapunov_T.csv")] + base) == 0
    for name in ("ftle_tau000010.csv", "gftle_tau000010.csv", "pr_field.csv", "lyapunov_T.csv"):
        assert (tmp_path / name).exists()


def test_cli_numerical_failure(monkeypatch, tmp_path):
    from kickedtop.errors import NonUnitaryError

    def boom(*a, **k):
        raise NonUnitaryError("forced", residual=1.0)

    monkeypatch.setattr(cli.SpectrumCache, "get", boom)
    assert cli.main(["spectrum", "--J", "5"]) == 3
