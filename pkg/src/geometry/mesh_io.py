"""Read and write meshes as NOFF (any n), OFF and OBJ (n = 3).

NOFF layout::

    NOFF k n
    V M
    x_1 ... x_n          (V lines)
    i_0 ... i_k          (M lines)

Lines starting with ``#`` are comments. Two structured comments carry
metadata through a round trip: ``# label <name>`` and
``# attestation kind=<solver|analytic> grad_norm=<g> grad_tol=<t> note=<text>``;
the note runs to the end of the line.
Floats are written with ``repr`` so vertices reload bit-exactly.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from src.errors import MeshFormatError
from src.geometry.mesh import Attestation, FloatArray, SimplicialSurface

logger = logging.getLogger(__name__)

SUFFIXES = (".noff", ".off", ".obj")


def _fmt(value: float) -> str:
    return repr(float(value))


def _metadata_lines(s: SimplicialSurface) -> list[str]:
    lines = []
    if s.label:
        lines.append(f"# label {s.label}")
    att = s.attestation
    if att is not None:
        parts = [f"kind={att.kind}"]
        if att.grad_norm is not None:
            parts.append(f"grad_norm={_fmt(att.grad_norm)}")
        if att.grad_tol is not None:
            parts.append(f"grad_tol={_fmt(att.grad_tol)}")
        if att.note:
            parts.append("note=" + " ".join(att.note.split()))
        lines.append("# attestation " + " ".join(parts))
    return lines


def _parse_metadata(comments: list[str]) -> tuple[str | None, Attestation | None]:
    label: str | None = None
    attestation: Attestation | None = None
    for line in comments:
        body = line.lstrip("#").strip()
        if body.startswith("label "):
            label = body.split(maxsplit=1)[1].strip()
        elif body.startswith("attestation "):
            head, _, note = body.partition(" note=")
            fields = dict(
                item.split("=", 1) for item in head.split()[1:] if "=" in item
            )
            kind = fields.get("kind")
            if kind not in ("solver", "analytic"):
                msg = f"unknown attestation kind {kind!r}"
                raise MeshFormatError(msg)
            attestation = Attestation(
                kind=kind,
                grad_norm=float(fields["grad_norm"]) if "grad_norm" in fields else None,
                grad_tol=float(fields["grad_tol"]) if "grad_tol" in fields else None,
                note=note.strip(),
            )
    return label, attestation


def format_noff(s: SimplicialSurface) -> str:
    """Serialize a surface in the NOFF layout."""
    lines = [f"NOFF {s.k} {s.n}", *_metadata_lines(s)]
    lines.append(f"{s.vertices.shape[0]} {s.cells.shape[0]}")
    lines.extend(" ".join(_fmt(x) for x in row) for row in s.vertices)
    lines.extend(" ".join(str(int(i)) for i in cell) for cell in s.cells)
    return "\n".join(lines) + "\n"


def format_off(s: SimplicialSurface) -> str:
    """Serialize a surface in n = 3 in the standard OFF layout."""
    _require_r3(s, "OFF")
    lines = ["OFF", *_metadata_lines(s)]
    lines.append(f"{s.vertices.shape[0]} {s.cells.shape[0]} 0")
    lines.extend(" ".join(_fmt(x) for x in row) for row in s.vertices)
    lines.extend(
        f"{s.k + 1} " + " ".join(str(int(i)) for i in cell) for cell in s.cells
    )
    return "\n".join(lines) + "\n"


def format_obj(s: SimplicialSurface) -> str:
    """Serialize a surface in n = 3 as OBJ (``f`` triangles or ``l`` segments)."""
    _require_r3(s, "OBJ")
    tag = "f" if s.k == 2 else "l"
    lines = _metadata_lines(s)
    lines.extend("v " + " ".join(_fmt(x) for x in row) for row in s.vertices)
    lines.extend(
        f"{tag} " + " ".join(str(int(i) + 1) for i in cell) for cell in s.cells
    )
    return "\n".join(lines) + "\n"


def _require_r3(s: SimplicialSurface, name: str) -> None:
    if s.n != 3:
        msg = f"{name} files hold meshes in R^3, got n={s.n}; use NOFF"
        raise MeshFormatError(msg)


def _split(text: str) -> tuple[list[list[str]], list[str]]:
    rows, comments = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        rows.append(line.split("#", 1)[0].split())
    return rows, comments


def _surface(
    k: int,
    vertices: FloatArray,
    cells: list[list[int]],
    comments: list[str],
    *,
    boundary_on_sphere: bool,
) -> SimplicialSurface:
    label, attestation = _parse_metadata(comments)
    return SimplicialSurface(
        k=k,
        vertices=vertices,
        cells=np.array(cells, dtype=np.int64),
        boundary_on_sphere=boundary_on_sphere,
        label=label,
        attestation=attestation,
    )


def parse_noff(text: str, *, boundary_on_sphere: bool = True) -> SimplicialSurface:
    """Parse NOFF text.

    Raises:
        MeshFormatError: On a malformed header, counts or rows.
    """
    rows, comments = _split(text)
    try:
        tag, k_txt, n_txt = rows[0]
        if tag != "NOFF":
            raise ValueError(tag)
        k, n = int(k_txt), int(n_txt)
        nv, nc = (int(x) for x in rows[1])
        vertex_rows = rows[2 : 2 + nv]
        cell_rows = rows[2 + nv : 2 + nv + nc]
        vertices = np.array([[float(x) for x in row] for row in vertex_rows])
        cells = [[int(i) for i in row] for row in cell_rows]
    except (ValueError, IndexError) as e:
        msg = f"malformed NOFF data: {e}"
        raise MeshFormatError(msg) from e
    if vertices.shape != (nv, n) or len(cells) != nc:
        msg = f"NOFF counts do not match: expected {nv}x{n} vertices and {nc} cells"
        raise MeshFormatError(msg)
    if any(len(c) != k + 1 for c in cells):
        msg = f"NOFF cells must list {k + 1} indices"
        raise MeshFormatError(msg)
    return _surface(k, vertices, cells, comments, boundary_on_sphere=boundary_on_sphere)


def parse_off(text: str, *, boundary_on_sphere: bool = True) -> SimplicialSurface:
    """Parse standard OFF text; face sizes 3 give k = 2, sizes 2 give k = 1.

    Raises:
        MeshFormatError: On malformed input or mixed face sizes.
    """
    rows, comments = _split(text)
    try:
        if rows[0][0] != "OFF":
            raise ValueError(rows[0][0])
        counts = rows[0][1:] or rows.pop(1)
        nv, nf = int(counts[0]), int(counts[1])
        body = rows[1:]
        vertices = np.array([[float(x) for x in row[:3]] for row in body[:nv]])
        faces = []
        for row in body[nv : nv + nf]:
            size = int(row[0])
            faces.append([int(i) for i in row[1 : 1 + size]])
    except (ValueError, IndexError) as e:
        msg = f"malformed OFF data: {e}"
        raise MeshFormatError(msg) from e
    sizes = {len(f) for f in faces}
    if len(sizes) != 1 or sizes.pop() not in (2, 3):
        msg = "OFF faces must all be triangles or all be segments"
        raise MeshFormatError(msg)
    k = len(faces[0]) - 1
    return _surface(k, vertices, faces, comments, boundary_on_sphere=boundary_on_sphere)


def parse_obj(text: str, *, boundary_on_sphere: bool = True) -> SimplicialSurface:
    """Parse OBJ text with ``v`` and either ``f`` or ``l`` records.

    Raises:
        MeshFormatError: On malformed input or mixed element types.
    """
    rows, comments = _split(text)
    vertices, faces, lines = [], [], []
    try:
        for row in rows:
            if row[0] == "v":
                vertices.append([float(x) for x in row[1:4]])
            elif row[0] == "f":
                faces.append([int(tok.split("/")[0]) - 1 for tok in row[1:]])
            elif row[0] == "l":
                lines.append([int(tok) - 1 for tok in row[1:]])
    except ValueError as e:
        msg = f"malformed OBJ data: {e}"
        raise MeshFormatError(msg) from e
    if bool(faces) == bool(lines):
        msg = "OBJ file must hold either faces or polylines"
        raise MeshFormatError(msg)
    if faces:
        if any(len(f) != 3 for f in faces):
            msg = "OBJ faces must be triangles"
            raise MeshFormatError(msg)
        k, cells = 2, faces
    else:
        # polylines are split into segments
        k, cells = 1, [[a, b] for pl in lines for a, b in zip(pl, pl[1:], strict=False)]
    return _surface(
        k, np.array(vertices), cells, comments, boundary_on_sphere=boundary_on_sphere
    )


_PARSERS = {".noff": parse_noff, ".off": parse_off, ".obj": parse_obj}
_FORMATTERS = {".noff": format_noff, ".off": format_off, ".obj": format_obj}


def load_mesh(path: Path, *, boundary_on_sphere: bool = True) -> SimplicialSurface:
    """Load a mesh, choosing the format from the file suffix.

    Boundary flags are inferred from face incidence and re-verified against
    the unit sphere when ``boundary_on_sphere`` is set.

    Raises:
        FileNotFoundError: If the file does not exist.
        MeshFormatError: On an unknown suffix or malformed content.
    """
    if not path.exists():
        msg = f"mesh file not found at {path}"
        raise FileNotFoundError(msg)
    parser = _PARSERS.get(path.suffix.lower())
    if parser is None:
        msg = f"unknown mesh suffix {path.suffix!r}; expected one of {SUFFIXES}"
        raise MeshFormatError(msg)
    surface = parser(path.read_text(encoding="utf-8"), boundary_on_sphere=boundary_on_sphere)
    logger.info("loaded %s: k=%d n=%d cells=%d", path, surface.k, surface.n, len(surface.cells))
    return surface


def save_mesh(s: SimplicialSurface, path: Path) -> None:
    """Write a mesh, choosing the format from the file suffix."""
    formatter = _FORMATTERS.get(path.suffix.lower())
    if formatter is None:
        msg = f"unknown mesh suffix {path.suffix!r}; expected one of {SUFFIXES}"
        raise MeshFormatError(msg)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(formatter(s), encoding="utf-8")
