#!/usr/bin/env python3
"""
Settings tests
"""

import pytest

from hypchroma.config import DEFAULT_BUDGET, get_settings, reset_settings
from hypchroma.errors import ConfigError, SizeLimitError
from hypchroma.treegeom import build_ball


def test_defaults(tmp_path):
    settings = get_settings()
    assert settings.budget == DEFAULT_BUDGET
    assert settings.jobs == 1
    assert settings.results_dir == str(tmp_path / "results")
    assert get_settings() is settings


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("HYPCHROMA_BUDGET", "500")
    monkeypatch.setenv("HYPCHROMA_JOBS", "4")
    monkeypatch.setenv("HYPCHROMA_LOG_LEVEL", "debug")
    reset_settings()
    settings = get_settings()
    assert (settings.budget, settings.jobs, settings.log_level) == (500, 4, "debug")


def test_vertex_cap_guards_constructions(monkeypatch):
    monkeypatch.setenv("HYPCHROMA_VERTEX_CAP", "20")
    reset_settings()
    with pytest.raises(SizeLimitError):
        build_ball(3, 3, 5)


@pytest.mark.parametrize("name, value", [
    ("HYPCHROMA_VERTEX_CAP", "0"),
    ("HYPCHROMA_BUDGET", "lots"),
    ("HYPCHROMA_JOBS", "0"),
    ("HYPCHROMA_LOG_LEVEL", "LOUD"),
])
def test_invalid_environment_raises_config_error(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    reset_settings()
    with pytest.raises(ConfigError):
        get_settings()
