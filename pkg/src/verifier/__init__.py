"""Checks of the area bound and its corollaries, with reports and the fixture suite."""

from src.verifier.checks import (
    CHECK_NAMES,
    canonical_check,
    check_boundary_term_limit,
    check_corollary1,
    check_corollary2,
    check_derivative_oracle,
    check_equality_tangency,
    check_first_variation,
    check_first_variation_refinement,
    check_isoperimetric,
    check_lemma_a,
    check_lemma_b,
    check_lemma_c,
    check_main_theorem,
    check_monotonicity,
)
from src.verifier.fixtures import (
    Fixture,
    build_fixture,
    discretization_allowance,
    fixture_catalog,
    get_fixture,
)
from src.verifier.report import (
    VerificationReport,
    render_table,
    reports_json,
    write_reports,
)
from src.verifier.suite import SuiteResult, run_suite

__all__ = [
    "CHECK_NAMES",
    "Fixture",
    "SuiteResult",
    "VerificationReport",
    "build_fixture",
    "canonical_check",
    "check_boundary_term_limit",
    "check_corollary1",
    "check_corollary2",
    "check_derivative_oracle",
    "check_equality_tangency",
    "check_first_variation",
    "check_first_variation_refinement",
    "check_isoperimetric",
    "check_lemma_a",
    "check_lemma_b",
    "check_lemma_c",
    "check_main_theorem",
    "check_monotonicity",
    "discretization_allowance",
    "fixture_catalog",
    "get_fixture",
    "render_table",
    "reports_json",
    "run_suite",
    "write_reports",
]
