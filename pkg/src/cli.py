"""Command-line front end: ``ballarea solve|verify|field-sample|report|fixtures``.

Exit status: 0 when every requested check passes, 1 when a check fails
unexpectedly, 2 on configuration, domain, format or precondition errors,
3 when the solver stalls.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from dataclasses import asdict
from pathlib import Path

import numpy as np

from src.config.run_config import RunConfig, load_config
from src.errors import BallAreaError, ConfigError, SolverStallError
from src.field.sampler import sample_field, write_samples_csv
from src.geometry.mesh import SimplicialSurface
from src.geometry.mesh_io import load_mesh, save_mesh
from src.minimizer.seeds import seed_surface
from src.minimizer.solver import SolveStats, minimize, write_iteration_log
from src.verifier import checks
from src.verifier.fixtures import fixture_catalog
from src.verifier.report import VerificationReport, render_table, write_reports
from src.verifier.suite import nearest_vertex, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_STALL = 3

DEFAULT_LIMIT_RADII = (0.4, 0.2, 0.1, 0.05)
FIELD_CHECKS = frozenset({"lemma_a", "lemma_b", "lemma_c", "derivative_oracle"})
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML or YAML settings file")
    common.add_argument("--out", dest="out_dir", type=Path, help="output directory")
    common.add_argument("--log-level", dest="log_level")
    common.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(
        prog="ballarea",
        description="Free-boundary minimal surfaces in the unit ball: solve and verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="minimize a seed surface")
    solve.add_argument("--seed", help="seed kind, e.g. disk, annulus, chord")
    solve.add_argument("--refine", type=int, help="refinement level of the seed")
    solve.add_argument(
        "--param", action="append", default=[], metavar="KEY=VALUE", help="seed parameter"
    )
    solve.add_argument("--label")
    solve.add_argument("--max-iters", dest="max_iters", type=int)
    solve.add_argument("--grad-tol", dest="grad_tol", type=float)

    verify = sub.add_parser("verify", parents=[common], help="run checks on a mesh file")
    verify.add_argument("--mesh", type=Path)
    verify.add_argument("--checks", help="comma-separated check names")
    verify.add_argument("--point", help="comma-separated pole or center y")
    verify.add_argument("--radius", type=float)
    verify.add_argument("--radii", help="comma-separated radii")
    verify.add_argument("--tol-disc", dest="tol_disc", type=float)
    verify.add_argument("--k", type=int)
    verify.add_argument("--samples", type=int)
    verify.add_argument("--rng", dest="rng_seed", type=int)

    field = sub.add_parser("field-sample", parents=[common], help="sample W to CSV")
    field.add_argument("--k", type=int)
    field.add_argument("--samples", type=int)
    field.add_argument("--rng", dest="rng_seed", type=int)

    report = sub.add_parser("report", parents=[common], help="run the fixture suite")
    report.add_argument("--samples", type=int)
    report.add_argument("--rng", dest="rng_seed", type=int)
    report.add_argument("--max-iters", dest="max_iters", type=int)
    report.add_argument("--grad-tol", dest="grad_tol", type=float)

    sub.add_parser("fixtures", parents=[common], help="list the fixture catalog")
    return parser


def _seed_params(pairs: Sequence[str]) -> dict[str, float] | None:
    if not pairs:
        return None
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        try:
            if not sep:
                raise ValueError(pair)
            params[key.strip()] = float(value)
        except ValueError as e:
            msg = f"seed parameter must look like KEY=NUMBER, got {pair!r}"
            raise ConfigError(msg, field="seed_params") from e
    return params


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse flags and merge them over the file and environment layers."""
    args = _parser().parse_args(argv)
    names = (
        "command",
        "seed",
        "refine",
        "label",
        "max_iters",
        "grad_tol",
        "mesh",
        "checks",
        "point",
        "radius",
        "radii",
        "tol_disc",
        "k",
        "samples",
        "rng_seed",
        "out_dir",
        "log_level",
        "workers",
    )
    overrides: dict[str, object] = {name: getattr(args, name, None) for name in names}
    overrides["seed_params"] = _seed_params(getattr(args, "param", []))
    return load_config(args.config, overrides)


def _default_label(config: RunConfig) -> str:
    if config.label:
        return config.label
    base = config.seed.replace("_", "-")
    return base if config.refine is None else f"{base}-L{config.refine}"


def _stats_json(stats: SolveStats) -> str:
    summary = asdict(stats)
    summary.pop("history")
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def run_solve(config: RunConfig) -> int:
    """Seed, minimize and write the mesh, iteration log and statistics."""
    label = _default_label(config)
    seed = seed_surface(config.seed, **config.seed_arguments()).with_label(label)
    out = config.out_dir
    try:
        surface, stats = minimize(seed, config.solve_options())
    except SolverStallError as e:
        write_iteration_log(e.stats, out / f"{label}-iterations.csv")
        (out / f"{label}-stats.json").write_text(_stats_json(e.stats), encoding="utf-8")
        raise
    save_mesh(surface, out / f"{label}.noff")
    write_iteration_log(stats, out / f"{label}-iterations.csv")
    (out / f"{label}-stats.json").write_text(_stats_json(stats), encoding="utf-8")
    sys.stdout.write(
        f"{label}: area {stats.final_area:.10f}, grad {stats.final_grad_norm:.3e}, "
        f"angle {stats.boundary_orthogonality_max_angle:.3e} rad, "
        f"{stats.iterations} iterations -> {out / f'{label}.noff'}\n"
    )
    return EXIT_OK if stats.converged else EXIT_CHECK_FAILED


def _boundary_pole(s: SimplicialSurface, config: RunConfig) -> np.ndarray:
    if config.point is not None:
        return np.asarray(config.point, dtype=np.float64)
    e1 = np.zeros(s.n)
    e1[0] = 1.0
    return nearest_vertex(s, e1, boundary=True)


def _center(s: SimplicialSurface, config: RunConfig) -> np.ndarray:
    if config.point is not None:
        return np.asarray(config.point, dtype=np.float64)
    return nearest_vertex(s, np.zeros(s.n))


def run_check(
    name: str, config: RunConfig, surface: SimplicialSurface | None
) -> VerificationReport:
    """Dispatch one named check with the run settings."""
    if name == "lemma_a":
        return checks.check_lemma_a(config.k, config.samples, config.rng_seed)
    if name == "lemma_b":
        return checks.check_lemma_b(config.k, config.samples, config.rng_seed)
    if name == "lemma_c":
        return checks.check_lemma_c(config.k)
    if name == "derivative_oracle":
        return checks.check_derivative_oracle(config.k, config.samples, config.rng_seed)
    if surface is None:
        msg = f"check {name} needs --mesh"
        raise ConfigError(msg, field="mesh")
    tol = config.tol_disc
    if name == "main_theorem":
        return checks.check_main_theorem(surface, tol)
    if name == "isoperimetric":
        return checks.check_isoperimetric(surface, tol)
    if name == "corollary1":
        return checks.check_corollary1(surface, tol)
    if name == "corollary2":
        return checks.check_corollary2(surface, surface.k + 1, tol)
    if name == "equality_tangency":
        return checks.check_equality_tangency(surface, _boundary_pole(surface, config), tol)
    if name == "first_variation":
        y = _boundary_pole(surface, config)
        return checks.check_first_variation(surface, y, config.radius)
    if name == "boundary_term_limit":
        radii = config.radii or DEFAULT_LIMIT_RADII
        return checks.check_boundary_term_limit(surface, _boundary_pole(surface, config), radii)
    if name == "monotonicity":
        if not config.radii:
            msg = "monotonicity needs --radii"
            raise ConfigError(msg, field="radii")
        return checks.check_monotonicity(surface, _center(surface, config), config.radii)
    msg = f"check {name} runs only inside the report suite"
    raise ConfigError(msg, field="checks")


def _emit(reports: list[VerificationReport], out: Path) -> int:
    write_reports(reports, out / "reports.json")
    table = render_table(reports)
    (out / "report.txt").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    failed = any(r.counts_as_failure for r in reports)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def run_verify(config: RunConfig) -> int:
    """Run the requested checks on one mesh file."""
    needs_mesh = any(name not in FIELD_CHECKS for name in config.checks)
    surface = None
    if needs_mesh:
        if config.mesh is None:
            msg = "verify needs --mesh for the requested checks"
            raise ConfigError(msg, field="mesh")
        surface = load_mesh(config.mesh)
    reports = [run_check(name, config, surface) for name in config.checks]
    return _emit(reports, config.out_dir)


def run_field_sample(config: RunConfig) -> int:
    """Sample W and its divergence deficit, write CSV and report the minimum."""
    rng = np.random.default_rng(config.rng_seed)
    samples = sample_field(config.k, config.samples, rng)
    path = config.out_dir / f"field-k{config.k}.csv"
    write_samples_csv(samples, path)
    sys.stdout.write(
        f"k={config.k}: {config.samples} samples, min gap {samples.min_gap:.3e} -> {path}\n"
    )
    if config.k >= 2 and samples.min_gap < checks.GAP_FLOOR:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def run_report(config: RunConfig) -> int:
    """Run the fixture suite and write JSON and table reports."""
    result = run_suite(
        samples=config.samples,
        seed=config.rng_seed,
        options=config.solve_options(),
        workers=config.workers,
    )
    return _emit(result.reports, config.out_dir)


def run_fixtures(_config: RunConfig) -> int:
    """Print the fixture catalog."""
    for fx in fixture_catalog():
        expected = ",".join(sorted(fx.expected_fail)) or "-"
        sys.stdout.write(
            f"{fx.name:<16} {fx.seed:<16} tol_disc={fx.tol_disc:<8g} "
            f"expected_fail={expected:<14} {fx.description}\n"
        )
    return EXIT_OK


COMMANDS = {
    "solve": run_solve,
    "verify": run_verify,
    "field-sample": run_field_sample,
    "report": run_report,
    "fixtures": run_fixtures,
}


def run(config: RunConfig) -> int:
    """Execute a configured command and map errors to exit codes."""
    try:
        return COMMANDS[config.command](config)
    except SolverStallError as e:
        logger.error("solver stalled: %s", e)
        return EXIT_STALL
    except (BallAreaError, FileNotFoundError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point."""
    try:
        config = config_from_args(argv)
    except ConfigError as e:
        sys.stderr.write(f"config error ({e.field}): {e}\n")
        return EXIT_USAGE
    logging.basicConfig(level=config.log_level, format=LOG_FORMAT, stream=sys.stderr)
    return run(config)


if __name__ == "__main__":
    raise SystemExit(main())
