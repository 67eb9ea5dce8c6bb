"""Synthetic cell layouts for property tests and coloring statistics."""

from __future__ import annotations

import warnings
from collections import Counter
from typing import Mapping

import numpy as np
from scipy import ndimage

from .codec import color_instances
from .graph import DEFAULT_DELTA
from .masks import CapacityError, InstanceMask

MAX_SIDE = 10_000
ELLIPSE_AXIS_RANGE = (4.0, 16.0)  # full axis lengths in pixels
PLACEMENT_ATTEMPTS = 1000

_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def _check_side(height: int, width: int, max_side: int) -> None:
    if height > max_side or width > max_side:
        raise CapacityError(
            f"mask dimensions {height}x{width} exceed the configured maximum {max_side}"
        )


def gen_chain(
    n: int, cell_size: int = 8, gap: int = 0, *, margin: int = 1, max_side: int = MAX_SIDE
) -> InstanceMask:
    """Row of n square cells with ids 1..n in chain order.

    With gap below the adjacency radius the cell graph is the n-node path;
    gap above it is edgeless.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if gap < 0:
        raise ValueError("gap must be >= 0")
    if cell_size < 1:
        raise ValueError("cell_size must be >= 1")
    height = cell_size + 2 * margin
    width = n * cell_size + (n - 1) * gap + 2 * margin
    _check_side(height, width, max_side)
    data = np.zeros((height, width), dtype=np.uint32)
    for i in range(n):
        x0 = margin + i * (cell_size + gap)
        data[margin:margin + cell_size, x0:x0 + cell_size] = i + 1
    return InstanceMask(data)


def gen_grid(
    rows: int,
    cols: int,
    cell_size: int = 8,
    gap: int = 0,
    *,
    margin: int = 1,
    max_side: int = MAX_SIDE,
) -> InstanceMask:
    """rows x cols lattice of square cells, ids row-major.

    Corner pixels of every cell are chamfered off so diagonally neighboring
    cells sit strictly farther apart than side neighbors; at adjacency
    radius gap + 1 the cell graph is then exactly the 4-neighbor grid graph.
    Requires cell_size >= 3 (chamfering a smaller square empties it).
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if gap < 0:
        raise ValueError("gap must be >= 0")
    if cell_size < 3:
        raise ValueError("cell_size must be >= 3 so chamfered cells stay non-empty")
    height = rows * cell_size + (rows - 1) * gap + 2 * margin
    width = cols * cell_size + (cols - 1) * gap + 2 * margin
    _check_side(height, width, max_side)
    data = np.zeros((height, width), dtype=np.uint32)
    s = cell_size
    for r in range(rows):
        for c in range(cols):
            y0 = margin + r * (s + gap)
            x0 = margin + c * (s + gap)
            data[y0:y0 + s, x0:x0 + s] = r * cols + c + 1
            for dy, dx in ((0, 0), (0, s - 1), (s - 1, 0), (s - 1, s - 1)):
                data[y0 + dy, x0 + dx] = 0
    return InstanceMask(data)


def _ellipse_footprint(rng: np.random.Generator, lo: float, hi: float) -> np.ndarray | None:
    """Random rotated filled ellipse on a local odd-sized grid, or None if split."""
    semi_a = rng.uniform(lo / 2.0, hi / 2.0)
    semi_b = rng.uniform(lo / 2.0, hi / 2.0)
    theta = rng.uniform(0.0, np.pi)
    r = int(np.ceil(max(semi_a, semi_b)))
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    u = xx * np.cos(theta) + yy * np.sin(theta)
    v = -xx * np.sin(theta) + yy * np.cos(theta)
    inside = (u / semi_a) ** 2 + (v / semi_b) ** 2 <= 1.0
    # decode round-trips need every instance 4-connected
    if ndimage.label(inside, structure=_STRUCTURE_4)[1] != 1:
        return None
    return inside


def gen_random_packing(
    n: int,
    shape: tuple[int, int] = (256, 256),
    seed: int = 0,
    min_gap: int = 0,
    *,
    axis_range: tuple[float, float] = ELLIPSE_AXIS_RANGE,
    max_attempts: int = PLACEMENT_ATTEMPTS,
) -> InstanceMask:
    """Pack n non-overlapping random ellipses onto the canvas.

    Rejection sampling with a separate random stream per cell, so earlier
    cells are identical no matter how many more are requested. Cells sit at
    least min_gap Chebyshev pixels apart (0 allows touching). If a cell
    cannot be placed within the attempt budget it is skipped with a warning;
    if nothing at all fits, that is an error.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    height, width = int(shape[0]), int(shape[1])
    _check_side(height, width, MAX_SIDE)
    data = np.zeros((height, width), dtype=np.uint32)
    if n == 0:
        return InstanceMask(data)

    occupied = np.zeros((height, width), dtype=bool)
    streams = np.random.SeedSequence(seed).spawn(n)
    lo, hi = axis_range
    gap_structure = np.ones((2 * min_gap + 1, 2 * min_gap + 1), dtype=bool) if min_gap else None
    placed = 0
    for i in range(n):
        rng = np.random.default_rng(streams[i])
        for _ in range(max_attempts):
            inside = _ellipse_footprint(rng, lo, hi)
            if inside is None:
                continue
            r = inside.shape[0] // 2
            if height - r <= r or width - r <= r:
                continue
            cy = int(rng.integers(r, height - r))
            cx = int(rng.integers(r, width - r))
            if min_gap:
                probe = ndimage.binary_dilation(np.pad(inside, min_gap), structure=gap_structure)
                box = r + min_gap
            else:
                probe = inside
                box = r
            y0, x0 = cy - box, cx - box
            y1, x1 = cy + box + 1, cx + box + 1
            py0, px0 = max(0, y0), max(0, x0)
            py1, px1 = min(height, y1), min(width, x1)
            sub = probe[py0 - y0: probe.shape[0] - (y1 - py1),
                        px0 - x0: probe.shape[1] - (x1 - px1)]
            if (occupied[py0:py1, px0:px1] & sub).any():
                continue
            window = (slice(cy - r, cy + r + 1), slice(cx - r, cx + r + 1))
            data[window][inside] = placed + 1
            occupied[window] |= inside
            placed += 1
            break
    if placed == 0:
        raise ValueError(f"canvas {height}x{width} is too small for even one cell")
    if placed < n:
        warnings.warn(f"placed {placed} of {n} cells before exhausting retries", stacklevel=2)
    return InstanceMask(data)


def color_usage_stats(masks: Mapping[str, InstanceMask], delta: int = DEFAULT_DELTA) -> dict:
    """Per-image color counts under the canonical encoding, plus corpus fractions."""
    if not masks:
        raise ValueError("corpus is empty")
    per_image = []
    total_per_color = Counter()
    using_exactly = Counter()
    for name, mask in masks.items():
        _, assignment = color_instances(mask, delta)
        counts = Counter(assignment.mapping.values())
        total_per_color.update(counts)
        using_exactly[assignment.colors_used] += 1
        per_image.append({
            "name": name,
            "cells": len(assignment.mapping),
            "colors_used": assignment.colors_used,
            "cells_per_color": {str(c): counts.get(c, 0) for c in (1, 2, 3, 4)},
        })
    n_images = len(per_image)
    summary = {
        "images": n_images,
        "images_using_exactly": {str(k): using_exactly.get(k, 0) for k in range(5)},
        "fraction_using_color_4": using_exactly.get(4, 0) / n_images,
        "fraction_using_more_than_two": sum(v for k, v in using_exactly.items() if k > 2) / n_images,
        "total_cells_per_color": {str(c): total_per_color.get(c, 0) for c in (1, 2, 3, 4)},
    }
    return {"delta": int(delta), "per_image": per_image, "summary": summary}
