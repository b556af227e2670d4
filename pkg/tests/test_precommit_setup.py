"""Tests for pre-commit hooks setup and the no-noqa rule."""

import re
import tomllib
from pathlib import Path

import pytest
import yaml

REPO_ROOT = Path(__file__).parent.parent
NOQA = "#" + " noqa"


@pytest.fixture(scope="module")
def hooks() -> dict[str, dict[str, object]]:
    """Hook definitions keyed by id."""
    with (REPO_ROOT / ".pre-commit-config.yaml").open() as fh:
        config = yaml.safe_load(fh)
    assert isinstance(config, dict)
    return {hook["id"]: hook for repo in config["repos"] for hook in repo["hooks"]}


class TestPrecommitSetup:
    """Test suite for pre-commit hooks configuration."""

    def test_required_hooks(self, hooks: dict[str, dict[str, object]]) -> None:
        """Ruff, mypy, standard cleanup and the noqa guard are configured."""
        required = {
            "ruff",
            "ruff-format",
            "mypy",
            "trailing-whitespace",
            "end-of-file-fixer",
            "check-yaml",
            "check-toml",
            "forbid-noqa",
        }
        assert required <= set(hooks)

    def test_precommit_in_dev_dependencies(self) -> None:
        """pre-commit is installed with the dev extra."""
        with (REPO_ROOT / "pyproject.toml").open("rb") as fh:
            dev = tomllib.load(fh)["project"]["optional-dependencies"]["dev"]
        assert any(dep.startswith("pre-commit") for dep in dev)

    @pytest.mark.parametrize(
        ("line", "flagged"),
        [
            (f"x = 1  {NOQA}: E501", True),
            (f"import os  {NOQA.upper()}", True),
            ('name = "noqa"', False),
        ],
    )
    def test_noqa_pattern(
        self, hooks: dict[str, dict[str, object]], line: str, flagged: bool
    ) -> None:
        """The pygrep pattern matches inline directives only."""
        pattern = re.compile(str(hooks["forbid-noqa"]["entry"]))
        assert bool(pattern.search(line)) is flagged


def test_no_noqa_in_sources() -> None:
    """Lint findings are fixed, not silenced."""
    offenders = [
        f"{path.relative_to(REPO_ROOT)}:{lineno}"
        for folder in ("src", "tests")
        for path in sorted((REPO_ROOT / folder).rglob("*.py"))
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1)
        if NOQA in line.lower()
    ]
    assert not offenders, offenders
