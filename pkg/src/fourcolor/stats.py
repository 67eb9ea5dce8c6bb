"""Corpus-level descriptive statistics on cell graphs and coloring optimality."""

from __future__ import annotations

from collections import Counter
from typing import Mapping

from .coloring import chromatic_number_exact, greedy_color
from .graph import DEFAULT_DELTA, build_cell_graph, max_degree
from .masks import InstanceMask

DEFAULT_STATS_NODE_LIMIT = 20


def degree_stats(masks: Mapping[str, InstanceMask], delta: int = DEFAULT_DELTA) -> dict:
    """Distribution of per-image maximum and mean node degree."""
    if not masks:
        raise ValueError("corpus is empty")
    per_image = []
    max_degree_hist = Counter()
    for name, mask in masks.items():
        graph = build_cell_graph(mask, delta)
        n = len(graph.nodes)
        dmax = max_degree(graph)
        mean = 2 * len(graph.edges) / n if n else 0.0
        max_degree_hist[dmax] += 1
        per_image.append({
            "name": name,
            "nodes": n,
            "edges": len(graph.edges),
            "max_degree": dmax,
            "mean_degree": mean,
        })
    overall_mean = sum(img["mean_degree"] for img in per_image) / len(per_image)
    return {
        "delta": int(delta),
        "per_image": per_image,
        "max_degree_histogram": {str(k): max_degree_hist[k] for k in sorted(max_degree_hist)},
        "mean_of_mean_degrees": overall_mean,
    }


def greedy_optimality_report(
    masks: Mapping[str, InstanceMask],
    delta: int = DEFAULT_DELTA,
    node_limit: int = DEFAULT_STATS_NODE_LIMIT,
) -> dict:
    """Greedy color count versus the exact chromatic number per image.

    Images whose graphs exceed node_limit are listed as skipped rather than
    silently dropped; the equality fraction covers the computed ones only.
    """
    if not masks:
        raise ValueError("corpus is empty")
    per_image = []
    skipped = []
    equal = 0
    computed = 0
    for name, mask in masks.items():
        graph = build_cell_graph(mask, delta)
        greedy = greedy_color(graph).colors_used
        entry = {"name": name, "nodes": len(graph.nodes), "chi_greedy": greedy}
        if len(graph.nodes) > node_limit:
            entry.update({"chi_exact": None, "skipped": True})
            skipped.append(name)
        else:
            exact = chromatic_number_exact(graph, max_nodes=node_limit)
            computed += 1
            equal += int(greedy == exact)
            entry.update({"chi_exact": exact, "equal": greedy == exact, "skipped": False})
        per_image.append(entry)
    return {
        "delta": int(delta),
        "node_limit": int(node_limit),
        "per_image": per_image,
        "skipped": skipped,
        "computed": computed,
        "equality_fraction": equal / computed if computed else None,
    }
