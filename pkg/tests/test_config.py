from pathlib import Path

import pytest

from kdpc.config import config_digest, config_to_dict, default_config, load_config, parse_config
from kdpc.plants import Channel
from kdpc.utils.checks import ConfigError

EXAMPLE = Path(__file__).resolve().parent.parent / "config" / "default.yaml"


def test_example_file_documents_the_defaults():
    assert config_digest(load_config(EXAMPLE)) == config_digest(default_config())


def test_canonical_dict_loads_back():
    cfg = default_config()
    assert config_digest(parse_config(config_to_dict(cfg))) == config_digest(cfg)


def test_empty_mapping_gives_defaults():
    assert config_digest(parse_config({})) == config_digest(default_config())
    assert config_digest(parse_config(None)) == config_digest(default_config())


def test_default_regularization():
    cfg = default_config()
    assert cfg.predictor.lambda_reg == 1e-3
    assert cfg.predictor.mu_reg == 1e-3


def test_sections_override_defaults():
    cfg = parse_config({"seed": 7, "controller": {"t_ini": 4, "n_horizon": 6}, "predictor": {"bandwidth_past": 2.5}})
    assert cfg.excitation.seed == 7
    assert (cfg.controller.t_ini, cfg.controller.n_horizon) == (4, 6)
    assert cfg.predictor.bandwidth_past == 2.5
    assert cfg.predictor.bandwidth_future == "median"


def test_scenarios_are_parsed():
    cfg = parse_config({"scenarios": [{
        "name": "pulse",
        "duration": 12.0,
        "reference": {"breakpoints": [2.0, 8.0], "values": [0.0, 1.0, 0.5]},
        "disturbances": [{"t_start": 4.0, "t_end": 6.0, "value": -0.1, "channel": "output"}],
        "controllers": ["kdpc"],
    }]})
    (scenario,) = cfg.scenarios
    assert scenario.reference.value_at(9.0) == 0.5
    assert scenario.disturbance.value_at(5.0, Channel.OUTPUT) == -0.1
    assert scenario.controllers == ("kdpc",)


@pytest.mark.parametrize("data", [
    {"plants": {}},
    {"plant": {"mu": 1.0}},
    {"excitation": {"seed": 3}},
    {"scenarios": [{"name": "s", "reference": {"times": [1.0]}}]},
    {"scenarios": [{"name": "s", "colour": "red"}]},
    {"scenarios": [{"name": "s", "seed": 1}]},
])
def test_unknown_keys_are_rejected(data):
    with pytest.raises(ConfigError):
        parse_config(data)


@pytest.mark.parametrize("data", [
    {"predictor": {"lambda_reg": 0.0}},
    {"predictor": {"mu_reg": -1.0}},
    {"controller": {"du_min": 1.0}},
    {"scenarios": [{"duration": 3.0}]},
    {"scenarios": [{"name": "s", "controllers": ["pid"]}]},
    {"seed": "zero"},
    {"plant": [1.0]},
])
def test_invalid_values_are_rejected(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_seed_override():
    cfg = default_config().with_seed(11)
    assert cfg.seed == 11
    assert cfg.excitation.seed == 11
    assert config_digest(cfg) != config_digest(default_config())


def test_output_does_not_change_digest():
    assert config_digest(parse_config({"output": "elsewhere"})) == config_digest(default_config())


def test_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    broken = tmp_path / "broken.yaml"
    broken.write_text("plant: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(broken)
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_config(listing)
