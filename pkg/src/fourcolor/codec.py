"""Conversions between instance masks and four-color semantic masks."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .coloring import ColorAssignment, OrderingStrategy, exact_k_coloring, greedy_color
from .graph import DEFAULT_DELTA, CellGraph, build_cell_graph
from .masks import FourColorMask, InstanceMask, relabel_instances

# Public palette contract: index = color code, value = RGB.
PALETTE = (
    (0, 0, 0),        # background
    (230, 35, 75),    # red
    (60, 180, 75),    # green
    (0, 105, 199),    # blue
    (255, 225, 25),   # yellow
)

_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)


def _dense_clique(graph: CellGraph) -> list[int]:
    """Greedy clique around the highest-degree node, for error reporting."""
    if not graph.nodes:
        return []
    seed = max(graph.nodes, key=lambda v: (graph.degree(v), -v))
    clique = [seed]
    candidates = set(graph.neighbors(seed))
    while candidates:
        v = min(candidates)
        clique.append(v)
        candidates &= set(graph.neighbors(v))
    return sorted(clique)


def color_instances(
    mask: InstanceMask,
    delta: int = DEFAULT_DELTA,
    order: OrderingStrategy = OrderingStrategy.ASCENDING_ID,
) -> tuple[CellGraph, ColorAssignment]:
    """Adjacency graph of the mask plus a proper coloring using <= 4 colors.

    Greedy coloring is used first; in the rare case it needs more than four
    colors, an exact backtracking 4-coloring replaces it. Raises if no
    4-coloring exists at all, naming a dense clique.
    """
    graph = build_cell_graph(mask, delta)
    assignment = greedy_color(graph, order)
    if assignment.colors_used > 4:
        exact = exact_k_coloring(graph, 4)
        if exact is None:
            clique = _dense_clique(graph)
            raise ValueError(
                f"instances are not 4-colorable at delta={delta}; "
                f"mutually adjacent cells include {clique}"
            )
        assignment = exact
    return graph, assignment


def _paint(mask: InstanceMask, assignment: ColorAssignment) -> np.ndarray:
    out = np.zeros(mask.data.size, dtype=np.uint8)
    if assignment.mapping:
        ids = np.fromiter(sorted(assignment.mapping), dtype=np.uint32)
        colors = np.fromiter((assignment.mapping[int(v)] for v in ids), dtype=np.uint8)
        flat = mask.data.ravel()
        nz = flat != 0
        out[nz] = colors[np.searchsorted(ids, flat[nz])]
    return out.reshape(mask.data.shape)


def encode_mask(
    mask: InstanceMask,
    delta: int = DEFAULT_DELTA,
    order: OrderingStrategy = OrderingStrategy.ASCENDING_ID,
) -> FourColorMask:
    """Four-color semantic mask of an instance mask.

    Background maps to 0 and every instance's pixels take the cell's color,
    so cells within Chebyshev distance delta never share a color.
    """
    _, assignment = color_instances(mask, delta, order)
    return FourColorMask(_paint(mask, assignment))


def decode_mask(fc: FourColorMask, connectivity: int = 4) -> InstanceMask:
    """Split a four-color mask back into instances.

    Connected components of each color (under 4- or 8-connectivity) become
    separate instances, numbered 1..N by first pixel in raster order.
    Per-color component splitting is this toolkit's convention for the
    inverse; 4-connectivity is the safer default for externally produced
    masks since 8 would merge same-colored cells touching only diagonally.
    """
    if connectivity == 4:
        structure = _STRUCTURE_4
    elif connectivity == 8:
        structure = _STRUCTURE_8
    else:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    out = np.zeros(fc.data.shape, dtype=np.uint32)
    next_id = 0
    for color in (1, 2, 3, 4):
        labels, count = ndimage.label(fc.data == color, structure=structure)
        if count:
            hit = labels > 0
            out[hit] = labels[hit].astype(np.uint32) + np.uint32(next_id)
            next_id += count
    return relabel_instances(InstanceMask(out))


def normalize_prediction(
    fc: FourColorMask,
    delta: int = DEFAULT_DELTA,
    *,
    connectivity: int = 4,
    order: OrderingStrategy = OrderingStrategy.ASCENDING_ID,
    drop_single_pixels: bool = False,
) -> tuple[InstanceMask, FourColorMask]:
    """Decode a predicted four-color mask and re-encode it canonically.

    Any two predictions describing the same instance partition (color
    substitutions, swaps, or extra colors) map to the identical output.
    Single-pixel fragments are kept unless drop_single_pixels is set;
    silent deletion would corrupt downstream metrics.
    """
    mask = decode_mask(fc, connectivity)
    if drop_single_pixels and mask.instance_ids().size:
        ids, counts = np.unique(mask.data[mask.data != 0], return_counts=True)
        tiny = ids[counts == 1]
        if tiny.size:
            data = np.where(np.isin(mask.data, tiny), 0, mask.data)
            mask = relabel_instances(InstanceMask(data))
    return mask, encode_mask(mask, delta, order)


def colorize(fc: FourColorMask) -> np.ndarray:
    """Render a four-color mask to an RGB uint8 image with the fixed palette."""
    if fc.data.size and int(fc.data.max()) > 4:
        raise ValueError("four-color mask contains values above 4")
    palette = np.asarray(PALETTE, dtype=np.uint8)
    return palette[fc.data]
