"""Greedy cell coloring, exact chromatic search, and encoding canonicalization."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .graph import CellGraph

DEFAULT_EXACT_NODE_LIMIT = 24


class ImproperEncodingWarning(UserWarning):
    """A predicted encoding violated the adjacency constraint and was repaired."""


class OrderingStrategy(str, Enum):
    """Deterministic node traversal orders; ties always break by ascending id."""

    ASCENDING_ID = "ascending-id"
    BFS_FROM_MIN_ID = "bfs-from-min-id"
    DEGREE_DESCENDING = "degree-descending"


def traversal_order(graph: CellGraph, strategy: OrderingStrategy) -> list[int]:
    """Permutation of the graph's nodes under the given strategy."""
    nodes = sorted(graph.nodes)
    strategy = OrderingStrategy(strategy)
    if strategy is OrderingStrategy.ASCENDING_ID:
        return nodes
    if strategy is OrderingStrategy.DEGREE_DESCENDING:
        return sorted(nodes, key=lambda v: (-graph.degree(v), v))
    # BFS restarted at the minimal unvisited id, neighbors in ascending id
    order: list[int] = []
    seen: set[int] = set()
    for start in nodes:
        if start in seen:
            continue
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            order.append(v)
            for u in graph.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return order


@dataclass(frozen=True)
class ColorAssignment:
    """Map from instance id to a positive color; colors_used is derived."""

    mapping: Mapping[int, int]
    colors_used: int = field(init=False)

    def __post_init__(self):
        mapping = dict(self.mapping)
        for v, c in mapping.items():
            if c < 1:
                raise ValueError(f"node {v} has non-positive color {c}")
        object.__setattr__(self, "mapping", MappingProxyType(mapping))
        object.__setattr__(self, "colors_used", len(set(mapping.values())))

    def __eq__(self, other):
        if not isinstance(other, ColorAssignment):
            return NotImplemented
        return dict(self.mapping) == dict(other.mapping)

    def color_of(self, node: int) -> int:
        return self.mapping[node]

    def to_matrix(self) -> "EncodingMatrix":
        """One-hot matrix with rows in ascending node id, columns = colors 1..max."""
        nodes = sorted(self.mapping)
        k = max(self.mapping.values(), default=0)
        data = np.zeros((len(nodes), k), dtype=np.uint8)
        for row, v in enumerate(nodes):
            data[row, self.mapping[v] - 1] = 1
        return EncodingMatrix(data)


@dataclass(frozen=True, eq=False)
class EncodingMatrix:
    """n x k one-hot matrix: row per cell (ascending id), column per color."""

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.uint8)
        if data.ndim != 2:
            raise ValueError(f"encoding matrix must be 2D, got shape {data.shape}")
        if data.size and not np.isin(data, (0, 1)).all():
            raise ValueError("encoding matrix entries must be 0 or 1")
        if data.shape[1] == 0 and data.shape[0] > 0:
            raise ValueError("encoding matrix with cells needs at least one column")
        if data.shape[0] and not (data.sum(axis=1) == 1).all():
            raise ValueError("every encoding matrix row must be one-hot")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def column_of_row(self, row: int) -> int:
        return int(np.argmax(self.data[row]))


def greedy_color(
    graph: CellGraph, order: OrderingStrategy = OrderingStrategy.ASCENDING_ID
) -> ColorAssignment:
    """Color nodes in traversal order, each taking the smallest unused color.

    A node's color is the minimal positive integer absent from its
    already-colored neighbors, so adjacent nodes always differ and the
    result uses at most max_degree + 1 colors. Colors are not capped at 4
    here; the cap (with exact fallback) is enforced by the mask encoder.
    """
    colors: dict[int, int] = {}
    for v in traversal_order(graph, order):
        used = {colors[u] for u in graph.neighbors(v) if u in colors}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return ColorAssignment(colors)


def verify_proper(graph: CellGraph, assignment: ColorAssignment) -> list[tuple[int, int]]:
    """Edges whose endpoints share a color, sorted; empty iff proper.

    Raises if the assignment misses any graph node.
    """
    for v in sorted(graph.nodes):
        if v not in assignment.mapping:
            raise ValueError(f"assignment does not cover node {v}")
    return sorted(e for e in graph.edges if assignment.mapping[e[0]] == assignment.mapping[e[1]])


def exact_k_coloring(graph: CellGraph, k: int) -> ColorAssignment | None:
    """Find a proper coloring with at most k colors, or None if impossible.

    Deterministic backtracking: variables in ascending id order, values
    lowest-color-first. New colors are only opened one past the maximum
    already in use, which prunes symmetric branches without changing the
    first (lexicographically smallest) solution found.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    nodes = sorted(graph.nodes)
    n = len(nodes)
    if n == 0:
        return ColorAssignment({})

    index = {v: i for i, v in enumerate(nodes)}
    earlier = [[index[u] for u in graph.neighbors(v) if index[u] < index[v]] for v in nodes]

    colors = [0] * n
    max_used = [0] * (n + 1)  # max color among positions < i
    i = 0
    while True:
        cap = min(k, max_used[i] + 1)
        c = colors[i] + 1
        while c <= cap and any(colors[j] == c for j in earlier[i]):
            c += 1
        if c > cap:
            colors[i] = 0
            i -= 1
            if i < 0:
                return None
            continue
        colors[i] = c
        if i == n - 1:
            return ColorAssignment({v: colors[index[v]] for v in nodes})
        max_used[i + 1] = max(max_used[i], c)
        i += 1


def chromatic_number_exact(graph: CellGraph, max_nodes: int = DEFAULT_EXACT_NODE_LIMIT) -> int:
    """Minimum colors of any proper coloring, by exhaustive backtracking.

    Refuses graphs above max_nodes: the search is exponential. Empty graph
    has chromatic number 0, edgeless nonempty graphs 1.
    """
    n = len(graph.nodes)
    if n > max_nodes:
        raise ValueError(f"graph has {n} nodes, above the exact-search limit {max_nodes}")
    if n == 0:
        return 0
    if not graph.edges:
        return 1
    for k in range(2, n + 1):
        if exact_k_coloring(graph, k) is not None:
            return k
    raise AssertionError("unreachable: n colors always suffice")


def relabel_canonical(assignment: ColorAssignment, order: Iterable[int]) -> ColorAssignment:
    """Rename colors by first appearance along the traversal order.

    The first color seen becomes 1, the second 2, and so on; the color-class
    partition is unchanged. Assigned nodes missing from `order` are folded in
    afterwards in ascending id, so the rename is total. Idempotent, and
    invariant under any bijective recoloring of the input.
    """
    rename: dict[int, int] = {}
    walked = [v for v in order if v in assignment.mapping]
    for v in walked + sorted(set(assignment.mapping) - set(walked)):
        c = assignment.mapping[v]
        if c not in rename:
            rename[c] = len(rename) + 1
    return ColorAssignment({v: rename[c] for v, c in assignment.mapping.items()})


def canonicalize_encoding(
    pred: EncodingMatrix | np.ndarray, graph: CellGraph
) -> EncodingMatrix:
    """Map any predicted one-hot encoding of the graph onto the greedy one.

    Rows must correspond to the graph's nodes in ascending id order. Column
    redundancy, column reordering, and extra colors all collapse to the same
    output because the greedy encoding of the graph is recomputed outright;
    for proper inputs this matches the linear-map construction, and improper
    inputs are additionally repaired (with an ImproperEncodingWarning).
    """
    if not isinstance(pred, EncodingMatrix):
        pred = EncodingMatrix(np.asarray(pred))
    nodes = sorted(graph.nodes)
    if pred.rows != len(nodes):
        raise ValueError(f"encoding has {pred.rows} rows but the graph has {len(nodes)} nodes")
    induced = {v: pred.column_of_row(i) + 1 for i, v in enumerate(nodes)}
    conflicts = [e for e in graph.edges if induced[e[0]] == induced[e[1]]]
    if conflicts:
        warnings.warn(
            f"predicted encoding is improper on {len(conflicts)} edge(s); repaired",
            ImproperEncodingWarning,
            stacklevel=2,
        )
    return greedy_color(graph).to_matrix()
