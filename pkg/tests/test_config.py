"""
Tests for run configuration resolution.
"""

import json

import pytest

from zeta_boundary.config import (
    DEFAULT_GRID,
    RunConfig,
    load_config,
    merge_overrides,
    resolve_config,
)
from zeta_boundary.exceptions import ConfigError, ValidationError


class TestRunConfig:
    """Test RunConfig defaults and validation."""

    def test_defaults(self):
        config = RunConfig()
        assert config.curve == "11a"
        assert config.grid == DEFAULT_GRID
        assert config.fmt == "csv"
        assert config.variant == "qE"

    def test_plan_from_grid(self):
        plan = RunConfig(grid=(0.5, 1.0, 10)).plan()
        assert plan.T == pytest.approx(80.0)
        assert RunConfig(T=500.0).plan().T == 500.0

    def test_invalid_values(self):
        with pytest.raises(ValidationError):
            RunConfig(fmt="xml")
        with pytest.raises(ValidationError):
            RunConfig(threads=0)
        with pytest.raises(ValidationError):
            RunConfig(grid=(1.0, 0.5, 10))
        with pytest.raises(ValidationError):
            RunConfig(variant="other")
        with pytest.raises(ValidationError):
            RunConfig(R=1.0)

    def test_format_normalised(self):
        assert RunConfig(fmt="JSON").fmt == "json"

    def test_from_dict(self):
        config = RunConfig.from_dict({"curve": "37a", "grid": [0.25, 0.5, 20], "seed": 3})
        assert config.curve == "37a"
        assert config.grid == (0.25, 0.5, 20)
        assert config.seed == 3

    def test_from_dict_unknown_keys(self):
        with pytest.raises(ConfigError, match="Unknown config keys: colour"):
            RunConfig.from_dict({"colour": "red"})

    def test_hashable_dict(self):
        data = RunConfig(out="x.csv", threads=4, verbose=True).hashable_dict()
        assert "out" not in data
        assert "threads" not in data
        assert "verbose" not in data
        assert data["grid"] == list(DEFAULT_GRID)

    def test_budget_and_curve(self):
        config = RunConfig(curve="37a", rel_tol=1e-10)
        assert config.budget().rel_tol == 1e-10
        assert config.load_curve().conductor == 37


class TestEnvironment:
    """Test ZETA_BOUNDARY_* environment variables."""

    def test_from_env(self, clean_env):
        clean_env.setenv("ZETA_BOUNDARY_SEED", "42")
        clean_env.setenv("ZETA_BOUNDARY_THREADS", "3")
        clean_env.setenv("ZETA_BOUNDARY_FORMAT", "json")
        config = RunConfig.from_env()
        assert config.seed == 42
        assert config.threads == 3
        assert config.fmt == "json"

    def test_empty_values_use_defaults(self, clean_env):
        clean_env.setenv("ZETA_BOUNDARY_SEED", "")
        assert RunConfig.from_env().seed == 0

    def test_invalid_value(self, clean_env):
        clean_env.setenv("ZETA_BOUNDARY_REL_TOL", "tiny")
        with pytest.raises(ConfigError, match="ZETA_BOUNDARY_REL_TOL"):
            RunConfig.from_env()


class TestResolution:
    """Test precedence: CLI flags > config file > environment > defaults."""

    def test_load_config(self, tmp_path, clean_env):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"curve": "37a", "R": 30.0}))
        config = load_config(path)
        assert config.curve == "37a"
        assert config.R == 30.0

    def test_load_config_errors(self, tmp_path, clean_env):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(bad)
        listed = tmp_path / "list.json"
        listed.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(listed)

    def test_merge_overrides_skips_none(self):
        config = RunConfig(seed=5)
        assert merge_overrides(config, {"seed": None}) is config
        assert merge_overrides(config, {"seed": 9}).seed == 9

    def test_precedence(self, tmp_path, clean_env):
        clean_env.setenv("ZETA_BOUNDARY_SEED", "1")
        clean_env.setenv("ZETA_BOUNDARY_THREADS", "2")
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 7, "curve": "37a"}))
        config = resolve_config(str(path), {"curve": "11a", "fmt": None})
        assert config.curve == "11a"
        assert config.seed == 7
        assert config.threads == 2

    def test_no_file(self, clean_env):
        config = resolve_config(None, {"seed": 4})
        assert config.seed == 4
        assert config.curve == "11a"
