"""
Tests for the configuration manager.
"""

import json
import os

import pytest

from modules.utils.config_manager import ConfigManager

from tests.conftest import DATA_DIR


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def test_defaults_without_file():
    config = ConfigManager()
    assert config.config_path is None
    assert config.get('query.mode') == 'pruned'
    assert config.get('generator.seed') == 42
    assert config.get('bench.engines') == ['single', 'vp', 'rmtt-sound', 'rmtt-pruned']


def test_dot_access():
    config = ConfigManager()
    assert config.get('query.missing', 'fallback') == 'fallback'
    assert config.get('query.mode.deeper') is None
    config.set('bench.repetitions', 9)
    config.set('report.columns.extra', True)
    assert config.get('bench.repetitions') == 9
    assert config.get('report.columns') == {'extra': True}


def test_example_file_matches_defaults():
    with open(os.path.join(DATA_DIR, 'config.example.json'), encoding='utf-8') as f:
        example = json.load(f)
    defaults = ConfigManager().config
    assert set(example) <= set(defaults)
    assert 'store' not in defaults
    for section, values in example.items():
        if isinstance(values, dict):
            assert set(values) <= set(defaults[section]), section


def test_file_is_deep_merged(tmp_path):
    path = tmp_path / "custom.json"
    path.write_text(json.dumps({'generator': {'seed': 7}, 'logging': {'level': 'DEBUG'}}))
    config = ConfigManager(str(path))
    assert config.get('generator.seed') == 7
    assert config.get('generator.universities') == 2
    assert config.get('logging.level') == 'DEBUG'
    assert config.get('logging.file') is None


def test_default_location_is_picked_up(tmp_path):
    (tmp_path / "data").mkdir()
    (tmp_path / "data" / "config.json").write_text(json.dumps({'query': {'distinct': True}}))
    config = ConfigManager()
    assert config.config_path.endswith("config.json")
    assert config.get('query.distinct') is True


def test_save_and_reload(tmp_path):
    config = ConfigManager()
    config.set('bench.progress', False)
    path = str(tmp_path / "out" / "config.json")
    assert config.save(path)
    assert ConfigManager(path).get('bench.progress') is False


def test_missing_explicit_file():
    with pytest.raises(FileNotFoundError):
        ConfigManager("nope.json")


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_invalid_file(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(ValueError):
        ConfigManager(str(path))
