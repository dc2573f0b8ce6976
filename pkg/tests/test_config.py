import json

import pytest

from centerkit.config import Config, ConfigError, load_config


def test_defaults():
    cfg = load_config(environ={})
    assert cfg == Config()
    assert cfg.gb_seconds == 1800 and cfg.integration_tol == 1e-9
    b = cfg.budget()
    assert b.seconds == 1800 and b.max_steps == 10 ** 7


def test_file_then_environment(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"gb_seconds": 60, "desing_depth": 4}))
    cfg = load_config(str(path), environ={"CENTERKIT_DESING_DEPTH": "8"})
    assert cfg.gb_seconds == 60.0 and cfg.desing_depth == 8


def test_config_path_from_environment(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"integration_steps": 500}))
    cfg = load_config(environ={"CENTERKIT_CONFIG": str(path)})
    assert cfg.integration_steps == 500


def test_scientific_integers():
    assert load_config(environ={"CENTERKIT_GB_STEPS": "1e5"}).gb_steps == 100000


@pytest.mark.parametrize("content", ['{"colour": 1}', "[1, 2]", "{not json", '{"gb_steps": "x"}'])
def test_bad_files(tmp_path, content):
    path = tmp_path / "c.json"
    path.write_text(content)
    with pytest.raises(ConfigError):
        load_config(str(path), environ={})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "none.json"), environ={})


def test_bad_environment_value():
    with pytest.raises(ConfigError):
        load_config(environ={"CENTERKIT_INTEGRATION_TOL": "small"})


def test_to_json_roundtrip(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(Config().to_json()))
    assert load_config(str(path), environ={}) == Config()
