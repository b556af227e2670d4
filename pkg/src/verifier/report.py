"""Verification reports and their JSON and table renderings."""

from __future__ import annotations

import hashlib
import json
import logging
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.geometry.mesh import SimplicialSurface

logger = logging.getLogger(__name__)

Status = Literal["pass", "fail", "inconclusive"]


class VerificationReport(BaseModel):
    """Outcome of one check.

    ``residual`` is oriented so that smaller is better; for inequality
    checks it is the amount by which the measured value falls on the wrong
    side of its bound (zero when it does not).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    check_name: str
    subject: str = ""
    inputs_digest: str
    measured: dict[str, float] = Field(default_factory=dict)
    bound_or_target: dict[str, float] = Field(default_factory=dict)
    residual: float
    tolerance: float = Field(ge=0)
    passed: bool
    status: Status
    expected_fail: bool = False
    rng: str | None = None
    notes: str = ""

    @model_validator(mode="after")
    def _consistent_verdict(self) -> VerificationReport:
        if self.passed and not self.residual <= self.tolerance:
            msg = (
                f"{self.check_name}: passed report has residual {self.residual} "
                f"above tolerance {self.tolerance}"
            )
            raise ValueError(msg)
        if self.passed != (self.status == "pass"):
            msg = (
                f"{self.check_name}: status {self.status!r} "
                f"disagrees with passed={self.passed}"
            )
            raise ValueError(msg)
        return self

    @property
    def counts_as_failure(self) -> bool:
        """Whether this report should make a suite fail."""
        return self.status == "fail" and not self.expected_fail


def make_report(
    check_name: str,
    *,
    digest: str,
    residual: float,
    tolerance: float,
    passed: bool | None = None,
    measured: Mapping[str, float] | None = None,
    bound_or_target: Mapping[str, float] | None = None,
    subject: str = "",
    inconclusive: bool = False,
    rng: str | None = None,
    notes: str = "",
) -> VerificationReport:
    """Build a report, deriving the verdict from residual and tolerance.

    ``passed`` may only tighten the verdict (side conditions of a check).
    """
    ok = bool(residual <= tolerance) and (passed if passed is not None else True)
    if inconclusive:
        ok = False
    report = VerificationReport(
        check_name=check_name,
        subject=subject,
        inputs_digest=digest,
        measured={key: float(val) for key, val in (measured or {}).items()},
        bound_or_target={
            key: float(val) for key, val in (bound_or_target or {}).items()
        },
        residual=float(residual),
        tolerance=float(tolerance),
        passed=ok,
        status="inconclusive" if inconclusive else ("pass" if ok else "fail"),
        rng=rng,
        notes=notes,
    )
    log = logger.warning if report.status != "pass" else logger.info
    log(
        "%s[%s]: %s (residual %.3e, tolerance %.3e)",
        check_name,
        subject,
        report.status,
        report.residual,
        report.tolerance,
    )
    return report


def digest_inputs(surface: SimplicialSurface | None = None, **params: object) -> str:
    """SHA-256 over mesh arrays and check parameters."""
    h = hashlib.sha256()
    if surface is not None:
        h.update(f"{surface.k}:{surface.n}:".encode())
        h.update(np.ascontiguousarray(surface.vertices).tobytes())
        h.update(np.ascontiguousarray(surface.cells).tobytes())
    h.update(json.dumps(params, sort_keys=True, default=repr).encode())
    return h.hexdigest()


def sort_reports(reports: Iterable[VerificationReport]) -> list[VerificationReport]:
    """Deterministic order: by check name, then subject."""
    return sorted(reports, key=lambda r: (r.check_name, r.subject))


def reports_json(reports: Iterable[VerificationReport]) -> str:
    """Serialize reports as a JSON array with stable key order."""
    payload = [r.model_dump(mode="json") for r in sort_reports(reports)]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_reports(reports: Iterable[VerificationReport], path: Path) -> None:
    """Write reports as JSON."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(reports_json(reports), encoding="utf-8")


def render_table(reports: Iterable[VerificationReport]) -> str:
    """Human-readable summary, one line per report."""
    rows = [("check", "subject", "status", "residual", "tolerance", "notes")]
    for r in sort_reports(reports):
        status = r.status + (" (expected)" if r.expected_fail and not r.passed else "")
        rows.append(
            (
                r.check_name,
                r.subject,
                status,
                f"{r.residual:.3e}",
                f"{r.tolerance:.3e}",
                r.notes,
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(5)]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row[:5], widths, strict=True))
        + ("  " + row[5] if row[5] else "")
        for row in rows
    ]
    return "\n".join(lines) + "\n"
