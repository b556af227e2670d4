"""Simplicial surfaces in the unit ball: measures, frames, clipping and files."""

from src.geometry.clipping import ClipMeasure, ClipPieces, clip_measure, clip_pieces
from src.geometry.mesh import (
    AmbientVector,
    Attestation,
    OrthoFrame,
    SimplicialSurface,
    as_vector,
    boundary_measure,
    outward_conormal,
    refine,
    surface_measure,
    tangent_frame,
    unit_ball_volume,
    unit_sphere_area,
)
from src.geometry.mesh_io import load_mesh, save_mesh

__all__ = [
    "AmbientVector",
    "Attestation",
    "ClipMeasure",
    "ClipPieces",
    "OrthoFrame",
    "SimplicialSurface",
    "as_vector",
    "boundary_measure",
    "clip_measure",
    "clip_pieces",
    "load_mesh",
    "outward_conormal",
    "refine",
    "save_mesh",
    "surface_measure",
    "tangent_frame",
    "unit_ball_volume",
    "unit_sphere_area",
]
