"""Shared test fixtures and independent oracle implementations.

Oracles here deliberately avoid the library's fast paths: adjacency by
all-pairs pixel distances, components by BFS flood fill, panoptic matching
by exhaustive enumeration.
"""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np

from fourcolor import CellGraph, InstanceMask


def mask_from_rows(rows: list[str]) -> InstanceMask:
    """Build a mask from ASCII art: '.' is background, 1-9/a-z are ids."""
    grid = []
    for row in rows:
        line = []
        for ch in row:
            if ch == ".":
                line.append(0)
            elif ch.isdigit():
                line.append(int(ch))
            else:
                line.append(ord(ch) - ord("a") + 10)
        grid.append(line)
    return InstanceMask(np.array(grid, dtype=np.uint32))


def graph_from_edges(nodes, edges) -> CellGraph:
    return CellGraph(
        frozenset(int(v) for v in nodes),
        frozenset((min(i, j), max(i, j)) for i, j in edges),
    )


def brute_force_edges(mask: InstanceMask, delta: int) -> set[tuple[int, int]]:
    """All-pairs minimum Chebyshev distance between pixel sets."""
    ids = [int(v) for v in mask.instance_ids()]
    pixels = {v: np.argwhere(mask.data == v) for v in ids}
    edges = set()
    for a, b in itertools.combinations(ids, 2):
        dist = np.abs(pixels[a][:, None, :] - pixels[b][None, :, :]).max(axis=2).min()
        if dist <= delta:
            edges.add((a, b))
    return edges


def flood_fill_components(binary: np.ndarray, connectivity: int) -> list[set[tuple[int, int]]]:
    """BFS connected components of a boolean grid, in raster order of seed."""
    if connectivity == 4:
        steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    else:
        steps = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]
    height, width = binary.shape
    seen = np.zeros_like(binary, dtype=bool)
    components = []
    for y in range(height):
        for x in range(width):
            if not binary[y, x] or seen[y, x]:
                continue
            comp = set()
            queue = deque([(y, x)])
            seen[y, x] = True
            while queue:
                cy, cx = queue.popleft()
                comp.add((cy, cx))
                for dy, dx in steps:
                    ny, nx = cy + dy, cx + dx
                    if 0 <= ny < height and 0 <= nx < width and binary[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        queue.append((ny, nx))
            components.append(comp)
    return components


def exhaustive_panoptic(gt: InstanceMask, pred: InstanceMask):
    """Optimal IoU>0.5 matching by enumerating every injective pairing."""
    gt_ids = [int(v) for v in gt.instance_ids()]
    pred_ids = [int(v) for v in pred.instance_ids()]
    iou = {}
    for gi in gt_ids:
        g = gt.data == gi
        for pj in pred_ids:
            p = pred.data == pj
            inter = int((g & p).sum())
            if inter:
                iou[(gi, pj)] = inter / int((g | p).sum())
    best_tp, best_sum = 0, 0.0
    for k in range(min(len(gt_ids), len(pred_ids)), -1, -1):
        for gs in itertools.combinations(gt_ids, k):
            for ps in itertools.permutations(pred_ids, k):
                pairs = list(zip(gs, ps))
                if all(iou.get(pair, 0.0) > 0.5 for pair in pairs):
                    total = sum(iou[pair] for pair in pairs)
                    if (k, total) > (best_tp, best_sum):
                        best_tp, best_sum = k, total
        if best_tp == k and k > 0:
            break
    tp = best_tp
    fp = len(pred_ids) - tp
    fn = len(gt_ids) - tp
    if tp == 0:
        if fp == 0 and fn == 0:
            return 1.0, 1.0, 1.0, 0, 0, 0
        return 0.0, 0.0, 0.0, 0, fp, fn
    dq = tp / (tp + 0.5 * fp + 0.5 * fn)
    sq = best_sum / tp
    return dq, sq, dq * sq, tp, fp, fn


def random_label_mask(rng: np.random.Generator, height: int, width: int,
                      max_instances: int) -> InstanceMask:
    """Random blobby label mask (instances may be ragged but are compact)."""
    data = np.zeros((height, width), dtype=np.uint32)
    n = int(rng.integers(0, max_instances + 1))
    for ident in range(1, n + 1):
        cy = int(rng.integers(0, height))
        cx = int(rng.integers(0, width))
        ry = int(rng.integers(1, max(2, height // 3)))
        rx = int(rng.integers(1, max(2, width // 3)))
        y0, y1 = max(0, cy - ry), min(height, cy + ry)
        x0, x1 = max(0, cx - rx), min(width, cx + rx)
        patch = rng.random((y1 - y0, x1 - x0)) < 0.8
        region = data[y0:y1, x0:x1]
        region[patch & (region == 0)] = ident
    return InstanceMask(data)
