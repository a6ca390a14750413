from pathlib import Path

import pytest
import yaml

from kdpc.cli import EXIT_ARTIFACT, EXIT_CONFIG, EXIT_DIVERGED, EXIT_FIT, EXIT_OK, EXIT_PE, EXIT_USAGE, main
from kdpc.config import load_config
from kdpc.plants import VanDerPolPlant
from kdpc.predictors import load_predictors, open_loop_validate
from kdpc.utils.io import directory_digest, read_manifest, read_yaml

# small enough that collect and fit take well under a second
SMALL = {
    "excitation": {"length": 8, "levels": [0.0, 0.5, 1.0], "bursts": 2},
    "controller": {"t_ini": 3, "n_horizon": 4},
    "scenarios": [{
        "name": "short",
        "duration": 2.0,
        "reference": {"breakpoints": [0.5], "values": [0.0, 0.5]},
        "controllers": ["nmpc"],
    }],
}


def _write(tmp_path: Path, data: dict, name: str = "config.yaml") -> str:
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def _small(tmp_path: Path, **changes) -> str:
    data = dict(SMALL)
    data.update(changes)
    return _write(tmp_path, data)


def test_usage_errors(tmp_path):
    assert main([]) == EXIT_USAGE
    assert main(["calibrate"]) == EXIT_USAGE
    assert main(["collect", "--seed", "x"]) == EXIT_USAGE
    assert main(["collect", "--config", _small(tmp_path, scenarios=[]), "--out", str(tmp_path)]) == EXIT_USAGE
    config = _small(tmp_path, scenarios=[{"name": "idle", "duration": 1.0, "reference": {}, "controllers": []}])
    assert main(["run", "--config", config, "--out", str(tmp_path)]) == EXIT_USAGE


def test_config_errors(tmp_path):
    assert main(["collect", "--config", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG
    config = _small(tmp_path, predictor={"lambda_reg": 0.0})
    assert main(["fit", "--config", config, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_missing_artifacts(tmp_path):
    config = _small(tmp_path)
    assert main(["fit", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_ARTIFACT
    kdpc_scenario = dict(SMALL["scenarios"][0], controllers=["kdpc"])
    config = _small(tmp_path, scenarios=[kdpc_scenario])
    assert main(["run", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_ARTIFACT


def test_strict_pe_failure(tmp_path):
    config = _small(tmp_path, pe={"threshold": 1e9, "strict": True})
    assert main(["collect", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_PE
    assert not (tmp_path / "out" / "dataset").exists()


def test_collect_is_seeded(tmp_path):
    config = _small(tmp_path)
    assert main(["collect", "--config", config, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["collect", "--config", config, "--out", str(tmp_path / "b")]) == EXIT_OK
    assert main(["collect", "--config", config, "--out", str(tmp_path / "c"), "--seed", "1"]) == EXIT_OK

    digests = [read_yaml(tmp_path / name / "dataset" / "metadata.yaml")["digest"] for name in "abc"]
    assert digests[0] == digests[1] != digests[2]
    manifest = read_manifest(tmp_path / "a" / "dataset")
    assert manifest["dataset_digest"] == digests[0]
    assert manifest["content_digest"] == directory_digest(tmp_path / "a" / "dataset")


def test_collect_reports_window_count(tmp_path, capsys):
    assert main(["collect", "--config", _small(tmp_path), "--out", str(tmp_path)]) == EXIT_OK
    # 3 levels x 2 antithetic pairs, mirrored, plus 3 rest runs per level, mirrored except the origin rest run
    assert "T = 41" in capsys.readouterr().out


def test_fit_writes_validated_predictors(tmp_path):
    config = _small(tmp_path)
    out = tmp_path / "out"
    assert main(["collect", "--config", config, "--out", str(out)]) == EXIT_OK
    assert main(["fit", "--config", config, "--out", str(out)]) == EXIT_OK
    first = directory_digest(out / "predictors")
    assert main(["fit", "--config", config, "--out", str(out)]) == EXIT_OK
    assert directory_digest(out / "predictors") == first

    cfg = load_config(config)
    report = open_loop_validate(load_predictors(out / "predictors"), VanDerPolPlant(cfg.plant), cfg.excitation)
    assert read_yaml(out / "predictors" / "validation.yaml")["rmse"] == pytest.approx(report.rmse, rel=1e-12)
    manifest = read_manifest(out / "predictors")
    assert manifest["dataset_digest"] == read_yaml(out / "dataset" / "metadata.yaml")["digest"]


def test_fit_rejects_mismatched_horizons(tmp_path):
    out = tmp_path / "out"
    assert main(["collect", "--config", _small(tmp_path), "--out", str(out)]) == EXIT_OK
    config = _small(tmp_path, controller={"t_ini": 4, "n_horizon": 4})
    assert main(["fit", "--config", config, "--out", str(out)]) == EXIT_ARTIFACT


def test_run_writes_results(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--config", _small(tmp_path), "--out", str(out)]) == EXIT_OK
    directory = out / "results" / "short"
    for name in ("nmpc.csv", "metrics.yaml", "plot.svg", "manifest.yaml"):
        assert (directory / name).is_file()
    assert set(read_yaml(directory / "metrics.yaml")["controllers"]) == {"nmpc"}
    assert "predictors_digest" not in read_manifest(directory)


def test_failed_fit(tmp_path):
    # two identical rest windows make the past Gram matrix singular, and the regularizer is lost in round-off
    config = _small(tmp_path, excitation={"length": 8, "levels": [0.0, 0.0], "bursts": 0, "pulse": 0.0},
                    predictor={"lambda_reg": 1e-300})
    out = tmp_path / "out"
    assert main(["collect", "--config", config, "--out", str(out)]) == EXIT_OK
    assert main(["fit", "--config", config, "--out", str(out)]) == EXIT_FIT
    assert not (out / "predictors").exists()


def test_diverged_run_is_written(tmp_path):
    scenario = dict(SMALL["scenarios"][0], x0=[1e100, 1e100])
    out = tmp_path / "out"
    assert main(["run", "--config", _small(tmp_path, scenarios=[scenario]), "--out", str(out)]) == EXIT_DIVERGED
    directory = out / "results" / "short"
    for name in ("nmpc.csv", "metrics.yaml", "manifest.yaml"):
        assert (directory / name).is_file()
    assert len((directory / "nmpc.csv").read_text().splitlines()) == 3


@pytest.mark.slow
def test_all_is_deterministic(tmp_path):
    scenario = {
        "name": "step",
        "duration": 8.0,
        "reference": {"breakpoints": [2.0], "values": [0.0, 1.0]},
        "disturbances": [{"t_start": 4.0, "t_end": 6.0, "value": 0.2, "channel": "input"}],
    }
    config = _write(tmp_path, {"scenarios": [scenario]})
    assert main(["all", "--config", config, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["all", "--config", config, "--out", str(tmp_path / "b"), "--parallel"]) == EXIT_OK

    results = Path("results") / "step"
    for name in ("kdpc.csv", "nmpc.csv"):
        assert (tmp_path / "a" / results / name).read_bytes() == (tmp_path / "b" / results / name).read_bytes()
    assert set(read_yaml(tmp_path / "a" / results / "metrics.yaml")["controllers"]) == {"kdpc", "nmpc"}
    manifest = read_manifest(tmp_path / "a" / results)
    assert manifest["predictors_digest"] == read_manifest(tmp_path / "a" / "predictors")["content_digest"]
