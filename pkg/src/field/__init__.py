"""The vector field W, its derivatives and the quadrature behind them."""

from src.field.field_w import (
    GUARD_RADIUS,
    FieldSample,
    directional_derivative,
    div_gap_batch,
    div_trace,
    eval_w,
    eval_w_batch,
    lemma_a_gap,
    lemma_c_remainder,
    radial_component,
    radial_component_batch,
)
from src.field.quadrature import DEFAULT_TOL, QuadResult, graded_gauss, quad_integrate
from src.field.sampler import (
    FieldSamples,
    random_configurations,
    random_frames,
    sample_field,
    write_samples_csv,
)

__all__ = [
    "DEFAULT_TOL",
    "GUARD_RADIUS",
    "FieldSample",
    "FieldSamples",
    "QuadResult",
    "directional_derivative",
    "div_gap_batch",
    "div_trace",
    "eval_w",
    "eval_w_batch",
    "graded_gauss",
    "lemma_a_gap",
    "lemma_c_remainder",
    "quad_integrate",
    "radial_component",
    "radial_component_batch",
    "random_configurations",
    "random_frames",
    "sample_field",
    "write_samples_csv",
]
