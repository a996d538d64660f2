"""Plain-text readers and writers.

Matrix files: a line "N" followed by N rows of N floats.  Field files: a
line "N" followed by 2N rows (component-0 rows, then component-1 rows).
Polygon files: a line "dim k" followed by k rows of dim floats.  Writers
emit 17 significant digits, enough to round-trip doubles exactly.
"""

from __future__ import annotations

import numpy as np

from .grid import as_field, as_image
from .polytopes import PolytopeNorm

__all__ = [
    "FormatError",
    "read_matrix",
    "write_matrix",
    "read_field",
    "write_field",
    "read_polygon_points",
    "write_polygon",
]


class FormatError(ValueError):
    """Malformed input file; carries the offending path and line number."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


def _read_lines(path) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read().splitlines()


def _parse_floats(path, lineno: int, line: str, count: int) -> list[float]:
    parts = line.split()
    if len(parts) != count:
        raise FormatError(path, lineno, f"expected {count} values, found {len(parts)}")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise FormatError(path, lineno, f"not a number: {exc}") from None
    if not all(np.isfinite(values)):
        raise FormatError(path, lineno, "values must be finite")
    return values


def _parse_size(path, lines: list[str], expected_fields: int = 1) -> list[int]:
    if not lines or not lines[0].strip():
        raise FormatError(path, 1, "empty file; expected a size header")
    parts = lines[0].split()
    if len(parts) != expected_fields:
        raise FormatError(path, 1, f"expected {expected_fields} header field(s), found {len(parts)}")
    try:
        sizes = [int(p) for p in parts]
    except ValueError:
        raise FormatError(path, 1, f"size header is not an integer: {lines[0]!r}") from None
    if any(s < 1 for s in sizes):
        raise FormatError(path, 1, "sizes must be positive")
    return sizes


def read_matrix(path) -> np.ndarray:
    """Read an (n, n) matrix."""
    lines = _read_lines(path)
    (n,) = _parse_size(path, lines)
    if len([ln for ln in lines[1:] if ln.strip()]) < n:
        raise FormatError(path, len(lines), f"expected {n} data rows")
    rows = [_parse_floats(path, i + 2, lines[i + 1], n) for i in range(n)]
    return as_image(np.array(rows))


def write_matrix(path, m: np.ndarray) -> None:
    m = as_image(m)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{m.shape[0]}\n")
        for row in m:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def read_field(path) -> np.ndarray:
    """Read a (2, n, n) field: n, then component-0 rows, then component-1."""
    lines = _read_lines(path)
    (n,) = _parse_size(path, lines)
    if len([ln for ln in lines[1:] if ln.strip()]) < 2 * n:
        raise FormatError(path, len(lines), f"expected {2 * n} data rows")
    rows = [_parse_floats(path, i + 2, lines[i + 1], n) for i in range(2 * n)]
    data = np.array(rows)
    return as_field(np.stack([data[:n], data[n:]]))


def write_field(path, p: np.ndarray) -> None:
    p = as_field(p)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{p.shape[1]}\n")
        for comp in (p[0], p[1]):
            for row in comp:
                fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def read_polygon_points(path) -> np.ndarray:
    """Read the raw (k, dim) vertex list of a polygon file.

    Feed the result to PolytopeNorm.from_vertices, which symmetrizes and
    canonicalizes; reading does not validate convexity.
    """
    lines = _read_lines(path)
    dim, k = _parse_size(path, lines, expected_fields=2)
    if len([ln for ln in lines[1:] if ln.strip()]) < k:
        raise FormatError(path, len(lines), f"expected {k} vertex rows")
    rows = [_parse_floats(path, i + 2, lines[i + 1], dim) for i in range(k)]
    return np.array(rows)


def write_polygon(path, P: PolytopeNorm) -> None:
    """Write the canonical vertex list (angular order in 2D)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{P.dim} {len(P.vertices)}\n")
        for v in P.vertices:
            fh.write(" ".join(f"{x:.17g}" for x in v) + "\n")
