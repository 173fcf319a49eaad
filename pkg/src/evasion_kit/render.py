"""SVG pictures of time slices, with optional witness path overlays."""

from __future__ import annotations

import os
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .analysis import Witness
from .rasterize import FiberComplex, GridSpec, grid_for_scenario, rasterize_fibers
from .scenario import Scenario

__all__ = ["slice_svg", "render_scenario"]

_COLORS = {
    "outside": "#efefef",
    "covered": "#bfbfbf",
    "collar": "#8f8f8f",
    "uncovered": "#ffffff",
    "boundary": "#d23b3b",
    "witness": "#1f6fd0",
}


def _as2d(mask: np.ndarray) -> np.ndarray:
    return mask[None, :] if mask.ndim == 1 else mask


def _runs(mask: np.ndarray) -> List[Tuple[int, int, int]]:
    """(x, y, width) runs of set cells, one rect per horizontal run."""
    out = []
    for iy in range(mask.shape[0]):
        row = mask[iy]
        edges = np.flatnonzero(np.diff(np.concatenate(([False], row, [False]))))
        for a, b in zip(edges[::2], edges[1::2]):
            out.append((int(a), iy, int(b - a)))
    return out


def _world_to_cell(grid: GridSpec, point: Sequence[float]) -> Tuple[float, float]:
    h = grid.cell_size
    ny = _as2d(np.zeros(grid.shape, dtype=bool)).shape[0]
    x = (point[0] - grid.origin[0]) / h
    if grid.dimension == 1:
        return (x, ny - 0.5)
    y = (point[1] - grid.origin[1]) / h
    return (x, ny - y)


def slice_svg(f: FiberComplex, witnesses: Sequence[Witness] = (),
              scale: int = 5) -> str:
    """One slice as a standalone SVG string.

    Covered cells are gray, the fence collar darker, boundary cells red, and
    uncovered cells white; witness paths are drawn as polylines with a dot at
    the position current for this slice's time.
    """
    grid = f.grid
    uncovered = _as2d(f.uncovered)
    covered = _as2d(f.covered)
    collar = _as2d(f.collar)
    boundary = _as2d(f.covered_boundary)
    ny, nx = uncovered.shape

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{nx * scale}" '
        f'height="{ny * scale}" viewBox="0 0 {nx} {ny}">',
        f'<rect width="100%" height="100%" fill="{_COLORS["outside"]}"/>',
    ]
    layers = (
        ("covered", covered & ~boundary),
        ("collar", collar),
        ("uncovered", uncovered),
        ("boundary", boundary),
    )
    for name, mask in layers:
        color = _COLORS[name]
        for x, y, w in _runs(mask):
            parts.append(
                f'<rect x="{x}" y="{ny - 1 - y}" width="{w}" height="1" fill="{color}"/>')

    for w in witnesses:
        pts = [_world_to_cell(grid, p) for _, p in w.samples]
        chain = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{chain}" fill="none" stroke="{_COLORS["witness"]}" '
            'stroke-width="0.4" stroke-opacity="0.8"/>')
        current = None
        for t, p in w.samples:
            if t <= f.time + 1e-12:
                current = p
        if current is not None:
            cx, cy = _world_to_cell(grid, current)
            parts.append(
                f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="0.9" '
                f'fill="{_COLORS["witness"]}"/>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_scenario(s: Scenario, times: Sequence[float],
                    grid: Optional[GridSpec] = None, out_dir: str = ".",
                    witnesses: Sequence[Witness] = (),
                    prefix: str = "slice") -> List[str]:
    """Write one SVG per requested time; returns the written paths."""
    if grid is None:
        grid = grid_for_scenario(s)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for k, f in enumerate(rasterize_fibers(s, times, grid)):
        path = os.path.join(out_dir, f"{prefix}_{k:03d}.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(slice_svg(f, witnesses=witnesses))
        written.append(path)
    return written
