"""Random (point, pole, frame) configurations and the CSV sampler."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.errors import DomainError
from src.field.field_w import FloatArray, div_gap_batch, eval_w_batch

logger = logging.getLogger(__name__)

MIN_DISTANCE = 1e-6
NEAR_POLE_FRACTION = 0.25


@dataclass(frozen=True)
class Configurations:
    """Sampled inputs: points ``x`` (m, n), poles ``y`` (m, n), frames (m, k, n)."""

    x: FloatArray
    y: FloatArray
    frames: FloatArray


@dataclass(frozen=True)
class FieldSamples:
    """Batch evaluation of W and its divergence deficit at sampled inputs."""

    k: int
    x: FloatArray
    y: FloatArray
    w: FloatArray
    trace: FloatArray
    gap: FloatArray
    quad_err: FloatArray

    @property
    def min_gap(self) -> float:
        """Smallest divergence deficit over the batch."""
        return float(np.min(self.gap))


def _unit_rows(rng: np.random.Generator, m: int, n: int) -> FloatArray:
    z = rng.standard_normal((m, n))
    return z / np.linalg.norm(z, axis=1)[:, None]


def random_frames(rng: np.random.Generator, m: int, k: int, n: int) -> FloatArray:
    """Haar-random orthonormal k-frames in R^n via QR of Gaussian matrices."""
    q, r = np.linalg.qr(rng.standard_normal((m, n, k)))
    # Sign fix makes the distribution uniform.
    q = q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    return np.transpose(q, (0, 2, 1))


def _near_pole(rng: np.random.Generator, y: FloatArray) -> FloatArray:
    m, n = y.shape
    d = 10.0 ** rng.uniform(-6.0, 0.0, size=m)
    z = _unit_rows(rng, m, n)
    along = np.einsum("mi,mi->m", z, y)
    z = z - 2.0 * np.clip(along, 0.0, None)[:, None] * y
    x = y + d[:, None] * z
    return x / np.maximum(1.0, np.linalg.norm(x, axis=1))[:, None]


def random_configurations(
    rng: np.random.Generator,
    k: int,
    count: int,
    n: int | None = None,
    *,
    on_sphere: bool = False,
    min_distance: float = MIN_DISTANCE,
) -> Configurations:
    """Sample points in the closed ball, poles on the sphere and k-frames.

    A quarter of the points (unless ``on_sphere``) are placed within a
    log-uniform distance of the pole so the near-singular regime is covered.
    Points closer than ``min_distance`` to their pole are redrawn.

    Raises:
        DomainError: If ``n < k`` or ``count < 1``.
    """
    n = k + 1 if n is None else n
    if n < k or count < 1:
        msg = f"need count >= 1 and n >= k, got count={count}, n={n}, k={k}"
        raise DomainError(msg)
    y = _unit_rows(rng, count, n)
    if on_sphere:
        x = _unit_rows(rng, count, n)
    else:
        radius = rng.uniform(size=count) ** (1.0 / n)
        x = _unit_rows(rng, count, n) * radius[:, None]
        near = rng.uniform(size=count) < NEAR_POLE_FRACTION
        x[near] = _near_pole(rng, y[near])
    bad = np.linalg.norm(x - y, axis=1) < min_distance
    while np.any(bad):
        x[bad] = _unit_rows(rng, int(bad.sum()), n)
        if not on_sphere:
            x[bad] *= rng.uniform(size=(int(bad.sum()), 1)) ** (1.0 / n)
        bad = np.linalg.norm(x - y, axis=1) < min_distance
    return Configurations(x=x, y=y, frames=random_frames(rng, count, k, n))


def sample_field(
    k: int, count: int, rng: np.random.Generator, n: int | None = None
) -> FieldSamples:
    """Evaluate W and the divergence deficit at ``count`` random configurations."""
    conf = random_configurations(rng, k, count, n)
    w, w_err = eval_w_batch(conf.x, conf.y, k)
    gap, gap_err = div_gap_batch(conf.x, conf.y, k, conf.frames)
    logger.info("sampled %d configurations for k=%d, min gap %.3e", count, k, gap.min())
    return FieldSamples(
        k=k,
        x=conf.x,
        y=conf.y,
        w=w,
        trace=0.5 * k - gap,
        gap=gap,
        quad_err=np.maximum(w_err, gap_err),
    )


def write_samples_csv(samples: FieldSamples, path: Path) -> None:
    """Write columns x_1..x_n, y_1..y_n, k, w_1..w_n, trace, gap, quad_err."""
    n = samples.x.shape[1]
    header = [
        *(f"x_{i}" for i in range(1, n + 1)),
        *(f"y_{i}" for i in range(1, n + 1)),
        "k",
        *(f"w_{i}" for i in range(1, n + 1)),
        "trace",
        "gap",
        "quad_err",
    ]
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(samples.x.shape[0]):
            writer.writerow(
                [
                    *map(repr, samples.x[i].tolist()),
                    *map(repr, samples.y[i].tolist()),
                    samples.k,
                    *map(repr, samples.w[i].tolist()),
                    repr(float(samples.trace[i])),
                    repr(float(samples.gap[i])),
                    repr(float(samples.quad_err[i])),
                ]
            )
    logger.info("wrote %d samples to %s", samples.x.shape[0], path)
