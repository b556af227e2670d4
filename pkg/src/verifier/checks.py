"""Numerical checks of the area bound, its proof steps and its corollaries.

Every check takes immutable inputs and returns a ``VerificationReport``;
refused inputs raise ``PreconditionError`` carrying the offending value.
Checks that rely on minimality need an attestation on the surface (solver
statistics below tolerance or an analytic tag).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.errors import DomainError, PreconditionError
from src.field.field_w import (
    GUARD_RADIUS,
    FloatArray,
    directional_derivative,
    div_gap_batch,
    eval_w_batch,
    lemma_c_remainder,
    radial_component_batch,
)
from src.field.sampler import random_configurations, sample_field
from src.geometry.clipping import ClipPieces, clip_measure, clip_pieces
from src.geometry.mesh import (
    SPHERE_TOL,
    AmbientVector,
    SimplicialSurface,
    as_vector,
    boundary_measure,
    cell_frames,
    distance_to_boundary,
    simplex_volumes,
    surface_measure,
    unit_ball_volume,
    unit_sphere_area,
)
from src.minimizer.solver import orthogonality_angle
from src.verifier.fixtures import tolerance_for
from src.verifier.report import VerificationReport, digest_inputs, make_report

logger = logging.getLogger(__name__)

SNAP_TOL = 1e-6
ORIGIN_TOL = 1e-6
TANGENCY_TOL = 1e-6
GAP_FLOOR = -1e-9
SPHERE_TERM_TOL = 1e-8
IDENTITY_TOL = 0.01
LIMIT_TOL = 5e-2
REFINEMENT_RATIO = 0.7
RATIO_ROUNDING = 1e-12
LEMMA_B_TOL = 1e-8
LEMMA_B_SPHERE_TOL = 1e-10
DERIVATIVE_TOL = 1e-6
FD_STEPS = (1e-4, 1e-5, 1e-6)
DERIVATIVE_RADIUS = 0.9
LEMMA_C_INDEX = 20
LEMMA_C_LIMITS = {1: 0.05, 2: 1e-5}
LEMMA_C_DEFAULT_LIMIT = 0.05
# Two-point Gauss-Legendre nodes on [0, 1].
GAUSS2 = (0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0))

CHECK_NAMES = (
    "boundary_term_limit",
    "corollary1",
    "corollary2",
    "derivative_oracle",
    "equality_tangency",
    "first_variation",
    "first_variation_refinement",
    "isoperimetric",
    "lemma_a",
    "lemma_b",
    "lemma_c",
    "main_theorem",
    "monotonicity",
)
CHECK_ALIASES = {
    "main": "main_theorem",
    "tangency": "equality_tangency",
    "balance": "first_variation",
    "limit": "boundary_term_limit",
}


def canonical_check(name: str) -> str:
    """Resolve a check name or alias.

    Raises:
        DomainError: If the name is unknown.
    """
    resolved = CHECK_ALIASES.get(name, name)
    if resolved not in CHECK_NAMES:
        msg = f"unknown check {name!r}; expected one of {sorted(CHECK_NAMES)}"
        raise DomainError(msg)
    return resolved


def _subject(s: SimplicialSurface) -> str:
    return s.label or "unlabeled"


def _key(prefix: str, r: float) -> str:
    return f"{prefix}@{r:g}"


def _require_attested(s: SimplicialSurface, check: str) -> None:
    att = s.attestation
    if att is None:
        msg = f"{check}: {_subject(s)} carries no minimality attestation; refusing"
        raise PreconditionError(msg, offending=s.label)
    if not att.converged:
        msg = (
            f"{check}: {_subject(s)} is not converged "
            f"(grad norm {att.grad_norm} > tolerance {att.grad_tol})"
        )
        raise PreconditionError(msg, offending=att.grad_norm)


def _require_free_boundary(s: SimplicialSurface, check: str) -> None:
    if not s.has_boundary:
        msg = f"{check}: {_subject(s)} has no boundary"
        raise PreconditionError(msg, offending=s.label)
    if not s.boundary_on_sphere:
        msg = f"{check}: {_subject(s)} does not keep its boundary on the sphere"
        raise PreconditionError(msg, offending=s.label)


def snap_to_boundary(
    s: SimplicialSurface, y: npt.ArrayLike, tol: float = SNAP_TOL
) -> AmbientVector:
    """Nearest boundary vertex to ``y``.

    Raises:
        PreconditionError: If that vertex is farther than ``tol`` from ``y``.
    """
    yv = as_vector(y, s.n)
    idx = np.flatnonzero(s.boundary_vertex)
    if idx.size == 0:
        msg = f"{_subject(s)} has no boundary vertices"
        raise PreconditionError(msg, offending=yv.tolist())
    dist = np.linalg.norm(s.vertices[idx] - yv, axis=1)
    best = int(np.argmin(dist))
    if dist[best] > tol:
        msg = f"point is {dist[best]:.3e} from the nearest boundary vertex"
        raise PreconditionError(msg, offending=yv.tolist())
    return s.vertices[idx[best]].copy()


def _poles(y: AmbientVector, m: int) -> FloatArray:
    return np.broadcast_to(y, (m, y.shape[0]))


# Area bound and equality case


def check_main_theorem(
    s: SimplicialSurface, tol_disc: float | None = None
) -> VerificationReport:
    """Area of a free-boundary minimal surface is at least |B^k|."""
    _require_free_boundary(s, "main_theorem")
    _require_attested(s, "main_theorem")
    tol = tolerance_for(s) if tol_disc is None else tol_disc
    area = surface_measure(s)
    target = unit_ball_volume(s.k)
    measured = {
        "area": area,
        "area_gap": area - target,
        "max_contact_angle": orthogonality_angle(s),
    }
    if s.attestation is not None and s.attestation.grad_norm is not None:
        measured["grad_norm"] = s.attestation.grad_norm
    return make_report(
        "main_theorem",
        subject=_subject(s),
        digest=digest_inputs(s, tol_disc=tol),
        measured=measured,
        bound_or_target={"unit_ball_volume": target},
        residual=max(0.0, target - area),
        tolerance=tol,
    )


def tangency_defect(s: SimplicialSurface, y: AmbientVector) -> float:
    """Largest relative normal component of ``x - y`` over cell barycenters."""
    bary = np.mean(s.vertices[s.cells], axis=1)
    u = bary - y
    frames = cell_frames(s)
    along = np.einsum("mji,mj->mi", frames, np.einsum("mji,mi->mj", frames, u))
    return float(np.max(np.linalg.norm(u - along, axis=1) / np.linalg.norm(u, axis=1)))


def check_equality_tangency(
    s: SimplicialSurface, y: npt.ArrayLike, tol_disc: float | None = None
) -> VerificationReport:
    """Near-equality of area must co-occur with x - y tangent to the surface."""
    _require_free_boundary(s, "equality_tangency")
    yb = snap_to_boundary(s, y)
    tol = tolerance_for(s) if tol_disc is None else tol_disc
    gap = surface_measure(s) - unit_ball_volume(s.k)
    defect = tangency_defect(s, yb)
    near_equality = abs(gap) <= tol
    tangent = defect <= TANGENCY_TOL
    consistent = near_equality == tangent
    return make_report(
        "equality_tangency",
        subject=_subject(s),
        digest=digest_inputs(s, y=yb.tolist(), tol_disc=tol),
        measured={
            "area_gap": gap,
            "tangency_defect": defect,
            "near_equality": float(near_equality),
            "tangent": float(tangent),
        },
        bound_or_target={"area_tol": tol, "tangency_tol": TANGENCY_TOL},
        residual=0.0 if consistent else 1.0,
        tolerance=0.5,
        notes="rigidity: diagnostic only",
    )


# Divergence balance and the boundary term


def cut_flux(pieces: ClipPieces, y: AmbientVector, k: int) -> float:
    """Integral of <W, nu> over the cut locus, nu pointing into the ball."""
    if not len(pieces.cut):
        return 0.0
    nu = pieces.cut_normals()
    m = pieces.cut.shape[0]
    if pieces.cut.shape[1] == 1:
        w, _ = eval_w_batch(pieces.cut[:, 0, :], _poles(y, m), k)
        return float(np.sum(np.einsum("si,si->s", w, nu)))
    a, b = pieces.cut[:, 0, :], pieces.cut[:, 1, :]
    length = np.linalg.norm(b - a, axis=1)
    total = 0.0
    for t in GAUSS2:
        w, _ = eval_w_batch(a + t * (b - a), _poles(y, m), k)
        total += 0.5 * float(length @ np.einsum("si,si->s", w, nu))
    return total


def sphere_term(s: SimplicialSurface, y: AmbientVector, r: float) -> float:
    """Integral of <W, x> over the boundary outside B_r(y), trapezoid rule.

    Vanishes on the unit sphere whatever the surface.
    """
    faces = s.boundary_faces
    if s.k == 1:
        weights = np.ones(faces.shape[0])
        verts = faces[:, 0]
    else:
        lengths = simplex_volumes(s.vertices[faces])
        acc = np.zeros(s.vertices.shape[0])
        np.add.at(acc, faces[:, 0], 0.5 * lengths)
        np.add.at(acc, faces[:, 1], 0.5 * lengths)
        verts = np.flatnonzero(s.boundary_vertex)
        weights = acc[verts]
    pts = s.vertices[verts]
    keep = np.linalg.norm(pts - y, axis=1) >= r
    if not np.any(keep):
        return 0.0
    pts = pts[keep]
    w, _ = eval_w_batch(pts, _poles(y, pts.shape[0]), s.k)
    return float(weights[keep] @ np.einsum("mi,mi->m", w, pts))


@dataclass(frozen=True)
class BalanceTerms:
    """Both sides of the divergence balance on the surface outside B_r(y)."""

    deficit_integral: float
    volume_term: float
    flux: float
    sphere_term: float
    min_gap: float
    max_quad_err: float

    @property
    def rhs(self) -> float:
        """(k/2)|Sigma outside B_r| - flux - sphere term."""
        return self.volume_term - self.flux - self.sphere_term


def balance_terms(s: SimplicialSurface, y: AmbientVector, r: float) -> BalanceTerms:
    """Evaluate the deficit integral and the boundary terms by per-piece quadrature."""
    pieces = clip_pieces(s, y, r)
    min_gap = 0.0
    deficit = 0.0
    quad_err = 0.0
    if len(pieces.outside):
        bary = np.mean(pieces.outside, axis=1)
        frames = cell_frames(s)[pieces.outside_cells]
        gap, err = div_gap_batch(bary, _poles(y, bary.shape[0]), s.k, frames)
        vol = simplex_volumes(pieces.outside)
        deficit = float(vol @ gap)
        min_gap = float(np.min(gap))
        quad_err = float(np.max(err))
    return BalanceTerms(
        deficit_integral=deficit,
        volume_term=0.5 * s.k * pieces.outside_measure(),
        flux=cut_flux(pieces, y, s.k),
        sphere_term=sphere_term(s, y, r),
        min_gap=min_gap,
        max_quad_err=quad_err,
    )


def _check_radius(r: float, check: str) -> None:
    if not GUARD_RADIUS < r < 1.0:
        msg = f"{check}: radius {r} must lie in ({GUARD_RADIUS:g}, 1)"
        raise PreconditionError(msg, offending=r)


def check_first_variation(
    s: SimplicialSurface, y: npt.ArrayLike, r: float, tolerance: float | None = None
) -> VerificationReport:
    """Divergence balance of k/2 - div W on the surface outside B_r(y)."""
    _require_free_boundary(s, "first_variation")
    _require_attested(s, "first_variation")
    _check_radius(r, "first_variation")
    yb = snap_to_boundary(s, y)
    terms = balance_terms(s, yb, r)
    tol = s.mean_edge_length() if tolerance is None else tolerance
    bmeasure = boundary_measure(s)
    gap_ok = s.k < 2 or terms.min_gap >= GAP_FLOOR
    sphere_ok = abs(terms.sphere_term) <= SPHERE_TERM_TOL * bmeasure
    return make_report(
        "first_variation",
        subject=_subject(s),
        digest=digest_inputs(s, y=yb.tolist(), r=r),
        measured={
            "deficit_integral": terms.deficit_integral,
            "rhs": terms.rhs,
            "flux": terms.flux,
            "sphere_term": terms.sphere_term,
            "min_gap": terms.min_gap,
            "max_quad_err": terms.max_quad_err,
        },
        bound_or_target={
            "gap_floor": GAP_FLOOR,
            "sphere_term_bound": SPHERE_TERM_TOL * bmeasure,
        },
        residual=abs(terms.deficit_integral - terms.rhs),
        tolerance=tol,
        passed=gap_ok and sphere_ok,
    )


def check_first_variation_refinement(
    surfaces: Sequence[SimplicialSurface], y: npt.ArrayLike, r: float
) -> VerificationReport:
    """Balance residuals must shrink by at least REFINEMENT_RATIO per level."""
    if len(surfaces) < 2:
        msg = f"refinement study needs at least two surfaces, got {len(surfaces)}"
        raise PreconditionError(msg, offending=len(surfaces))
    _check_radius(r, "first_variation_refinement")
    residuals = []
    measured: dict[str, float] = {}
    for s in surfaces:
        _require_free_boundary(s, "first_variation_refinement")
        _require_attested(s, "first_variation_refinement")
        terms = balance_terms(s, snap_to_boundary(s, y), r)
        res = abs(terms.deficit_integral - terms.rhs)
        residuals.append(res)
        measured[f"residual[{_subject(s)}]"] = res
    ratios = []
    for coarse, fine in zip(residuals, residuals[1:], strict=False):
        ratios.append(fine / coarse if coarse > 0 else (0.0 if fine == 0 else 1.0))
    for i, ratio in enumerate(ratios):
        measured[f"ratio[{i}]"] = ratio
    return make_report(
        "first_variation_refinement",
        subject="+".join(_subject(s) for s in surfaces),
        digest=digest_inputs(
            None,
            meshes=[digest_inputs(s) for s in surfaces],
            y=np.asarray(y, dtype=np.float64).tolist(),
            r=r,
        ),
        measured=measured,
        bound_or_target={"max_ratio": REFINEMENT_RATIO},
        residual=max(0.0, max(ratios) - REFINEMENT_RATIO),
        tolerance=0.0,
    )


def _strictly_monotone(radii: Sequence[float], *, decreasing: bool) -> bool:
    pairs = zip(radii, radii[1:], strict=False)
    return all((b < a) if decreasing else (b > a) for a, b in pairs)


def check_boundary_term_limit(
    s: SimplicialSurface, y: npt.ArrayLike, radii: Sequence[float]
) -> VerificationReport:
    """Flux through the small half-sphere around y tends to (k/2)|B^k|.

    The limit is Richardson-extrapolated from the two smallest radii assuming
    an O(r^2) error; fewer than three radii give an inconclusive report.
    """
    _require_free_boundary(s, "boundary_term_limit")
    radii = [float(r) for r in radii]
    if not radii or not _strictly_monotone(radii, decreasing=True):
        msg = f"radii must be strictly decreasing, got {radii}"
        raise PreconditionError(msg, offending=radii)
    for r in radii:
        _check_radius(r, "boundary_term_limit")
    yb = snap_to_boundary(s, y)
    k = s.k
    target = 0.5 * k * unit_ball_volume(k)
    fluxes, errors = [], []
    measured: dict[str, float] = {}
    for r in radii:
        pieces = clip_pieces(s, yb, r)
        flux = cut_flux(pieces, yb, k)
        density = pieces.cut_measure() / (0.5 * unit_sphere_area(k) * r ** (k - 1))
        fluxes.append(flux)
        errors.append(abs(flux - target))
        measured[_key("flux", r)] = flux
        measured[_key("density", r)] = density
    digest = digest_inputs(s, y=yb.tolist(), radii=radii)
    if len(radii) < 3:
        return make_report(
            "boundary_term_limit",
            subject=_subject(s),
            digest=digest,
            measured=measured,
            bound_or_target={"limit": target},
            residual=errors[-1],
            tolerance=LIMIT_TOL,
            inconclusive=True,
            notes="too few radii to extrapolate",
        )
    r1, r2 = radii[-2], radii[-1]
    f1, f2 = fluxes[-2], fluxes[-1]
    extrapolated = (r1 * r1 * f2 - r2 * r2 * f1) / (r1 * r1 - r2 * r2)
    measured["extrapolated"] = extrapolated
    decreasing = all(b <= a for a, b in zip(errors, errors[1:], strict=False))
    return make_report(
        "boundary_term_limit",
        subject=_subject(s),
        digest=digest,
        measured=measured,
        bound_or_target={"limit": target},
        residual=abs(extrapolated - target),
        tolerance=LIMIT_TOL,
        passed=decreasing,
        notes="" if decreasing else "errors do not decrease monotonically",
    )


# Monotonicity


def density_ratios(
    s: SimplicialSurface, y: AmbientVector, radii: Sequence[float]
) -> tuple[FloatArray, FloatArray]:
    """|Sigma cap B_r(y)| / r^k and its clipping error bar at each radius."""
    values, bars = [], []
    for r in radii:
        clipped = clip_measure(s, y, r)
        values.append(clipped.value / r**s.k)
        bars.append(clipped.error / r**s.k)
    return np.array(values), np.array(bars)


def check_monotonicity(
    s: SimplicialSurface, y: npt.ArrayLike, radii: Sequence[float]
) -> VerificationReport:
    """r -> |Sigma cap B_r(y)| / r^k must not decrease while B_r(y) misses dSigma."""
    yv = as_vector(y, s.n)
    radii = [float(r) for r in radii]
    if not radii or radii[0] <= 0.0 or not _strictly_monotone(radii, decreasing=False):
        msg = f"radii must be positive and strictly increasing, got {radii}"
        raise PreconditionError(msg, offending=radii)
    reach = distance_to_boundary(s, yv)
    for r in radii:
        if r > reach:
            msg = f"radius {r} meets the boundary (distance {reach:.6f} from y)"
            raise PreconditionError(msg, offending=r)
    ratios, bars = density_ratios(s, yv, radii)
    drops = ratios[:-1] - ratios[1:]
    allowed = bars[:-1] + bars[1:] + RATIO_ROUNDING * ratios[:-1]
    excess = float(np.max(drops - allowed)) if drops.size else 0.0
    measured = {_key("ratio", r): float(v) for r, v in zip(radii, ratios, strict=True)}
    measured["ratio_min"] = float(np.min(ratios))
    measured["ratio_max"] = float(np.max(ratios))
    measured["max_error_bar"] = float(np.max(bars))
    return make_report(
        "monotonicity",
        subject=_subject(s),
        digest=digest_inputs(s, y=yv.tolist(), radii=radii),
        measured=measured,
        bound_or_target={"plane_density": unit_ball_volume(s.k)},
        residual=max(0.0, excess),
        tolerance=0.0,
        notes="" if excess <= 0.0 else "density ratio decreases",
    )


# Corollaries


def check_corollary1(
    s: SimplicialSurface, tol_disc: float | None = None
) -> VerificationReport:
    """Minimal, through the origin, boundary on the sphere: area >= |B^k|."""
    _require_free_boundary(s, "corollary1")
    _require_attested(s, "corollary1")
    nearest = float(np.min(np.linalg.norm(s.vertices, axis=1)))
    if nearest > ORIGIN_TOL:
        msg = (
            f"corollary1: no vertex within {ORIGIN_TOL:g} of the origin "
            f"(nearest {nearest:.3e})"
        )
        raise PreconditionError(msg, offending=nearest)
    tol = tolerance_for(s) if tol_disc is None else tol_disc
    area = surface_measure(s)
    target = unit_ball_volume(s.k)
    return make_report(
        "corollary1",
        subject=_subject(s),
        digest=digest_inputs(s, tol_disc=tol),
        measured={"area": area, "area_gap": area - target},
        bound_or_target={"unit_ball_volume": target},
        residual=max(0.0, target - area),
        tolerance=tol,
    )


def check_corollary2(
    closed: SimplicialSurface, k: int, tol_disc: float | None = None
) -> VerificationReport:
    """A closed minimal (k-1)-surface of the unit sphere has measure >= |dB^k|."""
    if closed.has_boundary:
        msg = f"corollary2: {_subject(closed)} has boundary"
        raise PreconditionError(msg, offending=closed.label)
    if closed.k != k - 1:
        msg = f"corollary2 with k={k} needs a {k - 1}-surface, got k={closed.k}"
        raise DomainError(msg)
    off = float(np.max(np.abs(np.linalg.norm(closed.vertices, axis=1) - 1.0)))
    if off > SPHERE_TOL:
        msg = f"corollary2: vertices leave the unit sphere by {off:.3e}"
        raise PreconditionError(msg, offending=off)
    _require_attested(closed, "corollary2")
    tol = tolerance_for(closed) if tol_disc is None else tol_disc
    measure = surface_measure(closed)
    bound = unit_sphere_area(k)
    return make_report(
        "corollary2",
        subject=_subject(closed),
        digest=digest_inputs(closed, k=k, tol_disc=tol),
        measured={"measure": measure, "measure_gap": measure - bound},
        bound_or_target={"unit_sphere_area": bound},
        residual=max(0.0, bound - measure),
        tolerance=tol,
    )


def check_isoperimetric(
    s: SimplicialSurface, tol_disc: float | None = None
) -> VerificationReport:
    """k|Sigma| = |dSigma| and |dSigma|^k / |Sigma|^(k-1) >= |dB^k|^k / |B^k|^(k-1)."""
    _require_free_boundary(s, "isoperimetric")
    _require_attested(s, "isoperimetric")
    tol = tolerance_for(s) if tol_disc is None else tol_disc
    k = s.k
    area = surface_measure(s)
    bnd = boundary_measure(s)
    identity = abs(k * area - bnd) / bnd
    ratio = bnd**k / area ** (k - 1)
    bound = unit_sphere_area(k) ** k / unit_ball_volume(k) ** (k - 1)
    ok = identity <= IDENTITY_TOL
    return make_report(
        "isoperimetric",
        subject=_subject(s),
        digest=digest_inputs(s, tol_disc=tol),
        measured={
            "area": area,
            "boundary_measure": bnd,
            "identity_defect": identity,
            "ratio": ratio,
        },
        bound_or_target={"ratio_bound": bound, "identity_tol": IDENTITY_TOL},
        residual=max(0.0, bound - ratio),
        tolerance=tol,
        passed=ok,
        notes="" if ok else "k|Sigma| = |dSigma| identity violated",
    )


# Pointwise suites for the field W


def _rng_label(seed: int) -> str:
    return f"PCG64({seed})"


def check_lemma_a(k: int, samples: int, seed: int) -> VerificationReport:
    """Divergence deficit of W along random frames is non-negative (k >= 2).

    For k = 1 the bound does not apply; the minimum is reported as inconclusive.
    """
    rng = np.random.default_rng(seed)
    batch = sample_field(k, samples, rng)
    min_gap = batch.min_gap
    return make_report(
        "lemma_a",
        subject=f"k={k}",
        digest=digest_inputs(None, k=k, samples=samples, seed=seed),
        measured={"min_gap": min_gap, "max_quad_err": float(np.max(batch.quad_err))},
        bound_or_target={"gap_floor": GAP_FLOOR},
        residual=max(0.0, -min_gap),
        tolerance=-GAP_FLOOR,
        inconclusive=k < 2,
        rng=_rng_label(seed),
        notes="bound requires k >= 2; minimum reported only" if k < 2 else "",
    )


def _scaled(values: FloatArray, d: FloatArray, k: int) -> FloatArray:
    """Divide by max(1, |x - y|^(1-k)), the size of W near the pole."""
    return values / np.maximum(1.0, d ** (1 - k))


def check_lemma_b(k: int, samples: int, seed: int) -> VerificationReport:
    """<W(x), x> matches its closed form and vanishes on the sphere.

    The mismatch is divided by max(1, |x - y|^(1-k)), the growth rate of W
    near the pole. The on-sphere value is compared unscaled.
    """
    rng = np.random.default_rng(seed)
    conf = random_configurations(rng, k, samples)
    w, _ = eval_w_batch(conf.x, conf.y, k)
    radial = np.einsum("mi,mi->m", w, conf.x)
    closed = radial_component_batch(conf.x, conf.y, k)
    d = np.linalg.norm(conf.x - conf.y, axis=1)
    mismatch = float(np.max(_scaled(np.abs(radial - closed), d, k)))
    sphere = random_configurations(rng, k, samples, on_sphere=True)
    ws, _ = eval_w_batch(sphere.x, sphere.y, k)
    on_sphere = float(np.max(np.abs(np.einsum("mi,mi->m", ws, sphere.x))))
    return make_report(
        "lemma_b",
        subject=f"k={k}",
        digest=digest_inputs(None, k=k, samples=samples, seed=seed),
        measured={"max_mismatch": mismatch, "max_on_sphere": on_sphere},
        bound_or_target={"mismatch_tol": LEMMA_B_TOL, "sphere_tol": LEMMA_B_SPHERE_TOL},
        residual=mismatch,
        tolerance=LEMMA_B_TOL,
        passed=on_sphere <= LEMMA_B_SPHERE_TOL,
        rng=_rng_label(seed),
        notes="mismatch scaled by max(1, |x - y|^(1-k)); on-sphere value unscaled",
    )


def approach_sequences(k: int, index: int) -> dict[str, FloatArray]:
    """Points approaching the pole e_1 radially and along two tangent directions."""
    n = max(k + 1, 3)
    y = np.zeros(n)
    y[0] = 1.0
    e2 = np.zeros(n)
    e2[1] = 1.0
    e3 = np.zeros(n)
    e3[2] = 1.0
    theta = 2.0**-index
    shrink = 1.0 - 4.0**-index
    return {
        "radial": (1.0 - 2.0**-index) * y,
        "tangential_1": shrink * (math.cos(theta) * y + math.sin(theta) * e2),
        "tangential_2": shrink * (math.cos(theta) * y + math.sin(theta) * e3),
    }


def check_lemma_c(k: int, index: int = LEMMA_C_INDEX) -> VerificationReport:
    """W(x) + (x - y)/|x - y|^k is o(|x - y|^(1 - k)) along approach sequences."""
    limit = LEMMA_C_LIMITS.get(k, LEMMA_C_DEFAULT_LIMIT)
    measured: dict[str, float] = {}
    worst = 0.0
    for j in (index // 2, index):
        for name, x in approach_sequences(k, j).items():
            y = np.zeros_like(x)
            y[0] = 1.0
            value = lemma_c_remainder(x, y, k)
            measured[f"{name}[{j}]"] = value
            if j == index:
                worst = max(worst, value)
    return make_report(
        "lemma_c",
        subject=f"k={k}",
        digest=digest_inputs(None, k=k, index=index),
        measured=measured,
        bound_or_target={"limit": limit},
        residual=worst,
        tolerance=limit,
    )


def check_derivative_oracle(k: int, samples: int, seed: int) -> VerificationReport:
    """Analytic D_v W against central differences of W, best step per sample."""
    rng = np.random.default_rng(seed)
    conf = random_configurations(rng, k, samples)
    x = conf.x * DERIVATIVE_RADIUS
    y = conf.y
    v = rng.standard_normal(x.shape)
    v /= np.linalg.norm(v, axis=1)[:, None]
    analytic = np.array(
        [directional_derivative(x[i], y[i], k, v[i]) for i in range(samples)]
    )
    d = np.linalg.norm(x - y, axis=1)
    scale = np.maximum(np.maximum(np.linalg.norm(analytic, axis=1), 1.0), d ** (-k))
    best = np.full(samples, np.inf)
    for h in FD_STEPS:
        plus, _ = eval_w_batch(x + h * v, y, k)
        minus, _ = eval_w_batch(x - h * v, y, k)
        fd = (plus - minus) / (2.0 * h)
        best = np.minimum(best, np.linalg.norm(fd - analytic, axis=1) / scale)
    worst = float(np.max(best))
    return make_report(
        "derivative_oracle",
        subject=f"k={k}",
        digest=digest_inputs(None, k=k, samples=samples, seed=seed),
        measured={"max_relative_error": worst},
        bound_or_target={"relative_tol": DERIVATIVE_TOL},
        residual=worst,
        tolerance=DERIVATIVE_TOL,
        rng=_rng_label(seed),
    )
