"""Tests for layered RunConfig loading."""

from pathlib import Path

import pytest

from src.config.run_config import RunConfig, env_settings, load_config, read_config_file
from src.errors import ConfigError


@pytest.fixture
def toml_file(tmp_path: Path) -> Path:
    """Config file with a few solver settings."""
    path = tmp_path / "run.toml"
    path.write_text(
        'command = "solve"\n'
        'seed = "perturbed_disk"\n'
        "refine = 3\n"
        "grad-tol = 1e-6\n"
        "[seed_params]\n"
        "lift = 0.1\n"
    )
    return path


class TestLayers:
    """Defaults < file < environment < overrides."""

    def test_defaults(self) -> None:
        """An empty environment yields the model defaults."""
        config = load_config(environ={})
        assert config == RunConfig()
        assert config.checks == ("main_theorem",)
        assert config.rng_seed == 42

    def test_toml_file(self, toml_file: Path) -> None:
        """Hyphenated keys and nested tables are read."""
        config = load_config(toml_file, environ={})
        assert config.command == "solve"
        assert config.grad_tol == 1e-6
        assert config.seed_arguments() == {"lift": 0.1, "refine_level": 3}

    def test_yaml_file(self, tmp_path: Path) -> None:
        """YAML files carry the same keys."""
        path = tmp_path / "run.yaml"
        path.write_text("command: verify\nchecks: [main, lemma_c]\nk: 2\n")
        config = load_config(path, environ={})
        assert config.checks == ("main_theorem", "lemma_c")
        assert config.k == 2

    def test_environment_beats_file(self, toml_file: Path) -> None:
        """BALLAREA_ variables override file values."""
        config = load_config(toml_file, environ={"BALLAREA_REFINE": "4"})
        assert config.refine == 4

    def test_overrides_beat_environment(self) -> None:
        """Command-line values win; None leaves lower layers alone."""
        config = load_config(
            overrides={"samples": 100, "k": None},
            environ={"BALLAREA_SAMPLES": "5", "BALLAREA_K": "4"},
        )
        assert config.samples == 100
        assert config.k == 4

    def test_comma_separated_lists(self) -> None:
        """List settings accept comma-separated strings."""
        config = load_config(
            environ={
                "BALLAREA_CHECKS": "tangency, monotonicity",
                "BALLAREA_RADII": "0.1,0.2",
                "BALLAREA_POINT": "0,0,0",
            }
        )
        assert config.checks == ("equality_tangency", "monotonicity")
        assert config.radii == (0.1, 0.2)
        assert config.point == (0.0, 0.0, 0.0)

    def test_bare_log_level(self) -> None:
        """LOG_LEVEL is honoured unless the prefixed form is set."""
        assert env_settings({"LOG_LEVEL": "debug"}) == {"log_level": "debug"}
        both = env_settings({"LOG_LEVEL": "debug", "BALLAREA_LOG_LEVEL": "error"})
        assert both == {"log_level": "error"}
        assert load_config(environ={"LOG_LEVEL": "debug"}).log_level == "DEBUG"

    def test_solve_options(self) -> None:
        """Solver settings flow into SolveOptions."""
        opts = load_config(overrides={"max_iters": 7, "grad_tol": 1e-5}, environ={}).solve_options()
        assert (opts.max_iters, opts.grad_tol) == (7, 1e-5)


class TestValidation:
    """Invalid settings name their field."""

    @pytest.mark.parametrize(
        ("overrides", "field"),
        [
            ({"checks": ["lemma_z"]}, "checks"),
            ({"radius": 1.5}, "radius"),
            ({"radii": [0.1, -0.2]}, "radii"),
            ({"log_level": "LOUD"}, "log_level"),
            ({"command": "serve"}, "command"),
            ({"max_iters": 0}, "max_iters"),
            ({"colour": "blue"}, "colour"),
        ],
    )
    def test_field_is_named(self, overrides: dict[str, object], field: str) -> None:
        """ConfigError.field points at the bad setting."""
        with pytest.raises(ConfigError) as excinfo:
            load_config(overrides=overrides, environ={})
        assert excinfo.value.field == field

    def test_missing_file(self, tmp_path: Path) -> None:
        """A missing config file is a config error."""
        with pytest.raises(ConfigError) as excinfo:
            read_config_file(tmp_path / "absent.toml")
        assert excinfo.value.field == "config"

    def test_unsupported_suffix(self, tmp_path: Path) -> None:
        """Only TOML and YAML are read."""
        path = tmp_path / "run.ini"
        path.write_text("[run]\n")
        with pytest.raises(ConfigError, match="unsupported"):
            read_config_file(path)

    def test_yaml_must_be_mapping(self, tmp_path: Path) -> None:
        """A YAML list is not a configuration."""
        path = tmp_path / "run.yml"
        path.write_text("- a\n- b\n")
        with pytest.raises(ConfigError, match="mapping"):
            read_config_file(path)

    def test_malformed_toml(self, tmp_path: Path) -> None:
        """Parse errors are wrapped."""
        path = tmp_path / "run.toml"
        path.write_text("refine = = 3\n")
        with pytest.raises(ConfigError, match="cannot parse"):
            read_config_file(path)
