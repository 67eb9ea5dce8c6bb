"""Batch command-line surface tying the library together.

Exit codes: 0 ok, 1 semantic failure (e.g. verify violations), 2 input
error, 3 capacity error. All commands are deterministic given their inputs,
flags, and seed; re-runs produce byte-identical outputs.
"""

from __future__ import annotations

import functools
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import codec, pngio, report, stats, synth
from .coloring import (
    ColorAssignment,
    OrderingStrategy,
    chromatic_number_exact,
    greedy_color,
    verify_proper,
)
from .graph import DEFAULT_DELTA, build_cell_graph
from .masks import CapacityError
from .metrics import aggregate_reports, evaluate_pair
from .synth import color_usage_stats

EXIT_SEMANTIC = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3

_ORDER_CHOICES = [s.value for s in OrderingStrategy]


def _guard(fn):
    """Map library errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CapacityError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CAPACITY)
        except (ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def _default_jobs() -> int:
    return os.cpu_count() or 1


@click.group()
@click.version_option(package_name="fourcolor")
def main():
    """Four-color instance mask encoding, verification, and evaluation."""


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="16-bit instance label PNG.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Output 8-bit four-color PNG.")
@click.option("--delta", default=DEFAULT_DELTA, show_default=True, type=click.IntRange(min=1),
              help="Adjacency radius in pixels (Chebyshev).")
@click.option("--order", default=OrderingStrategy.ASCENDING_ID.value, show_default=True,
              type=click.Choice(_ORDER_CHOICES), help="Greedy traversal order.")
@click.option("--colorize", "colorize_path", type=click.Path(dir_okay=False), default=None,
              help="Also write an RGB palette rendering here.")
@_guard
def encode(in_path, out_path, delta, order, colorize_path):
    """Encode an instance mask into a four-color semantic mask."""
    mask = pngio.read_instance_mask(in_path)
    fc = codec.encode_mask(mask, delta, OrderingStrategy(order))
    pngio.write_fourcolor_mask(out_path, fc)
    if colorize_path:
        pngio.write_rgb_png(colorize_path, codec.colorize(fc))


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="8-bit four-color PNG.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Output 16-bit instance label PNG.")
@click.option("--connectivity", default=4, show_default=True, type=click.Choice(["4", "8"]),
              help="Pixel connectivity for component splitting.")
@_guard
def decode(in_path, out_path, connectivity):
    """Split a four-color mask into instances by per-color components."""
    fc = pngio.read_fourcolor_mask(in_path)
    mask = codec.decode_mask(fc, int(connectivity))
    pngio.write_instance_mask(out_path, mask)


@main.command()
@click.option("--mask", "mask_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--fc", "fc_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--delta", default=DEFAULT_DELTA, show_default=True, type=click.IntRange(min=1))
@_guard
def verify(mask_path, fc_path, delta):
    """Check that a four-color mask properly encodes an instance mask.

    Prints the violating adjacency edges as JSON; exits 1 if any exist.
    """
    mask = pngio.read_instance_mask(mask_path)
    fc = pngio.read_fourcolor_mask(fc_path)
    if mask.data.shape != fc.data.shape:
        raise ValueError(f"shapes differ: mask {mask.data.shape} vs fc {fc.data.shape}")
    fg = mask.data != 0
    if not np.array_equal(fg, fc.data != 0):
        raise ValueError("foregrounds disagree; the file is not an encoding of the mask")
    packed = np.unique(mask.data[fg].astype(np.uint64) << np.uint64(3)
                       | fc.data[fg].astype(np.uint64))
    ids = (packed >> np.uint64(3)).astype(np.int64)
    if np.unique(ids).size != ids.size:
        raise ValueError("some instances carry more than one color; not an encoding")
    colors = {int(i): int(c) for i, c in zip(ids, (packed & np.uint64(0b111)).astype(np.int64))}
    graph = build_cell_graph(mask, delta)
    violations = verify_proper(graph, ColorAssignment(colors))
    click.echo(report.dumps_report({
        "delta": int(delta),
        "proper": not violations,
        "violations": [list(edge) for edge in violations],
        "count": len(violations),
    }), nl=False)
    if violations:
        sys.exit(EXIT_SEMANTIC)


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Predicted four-color PNG.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Canonical four-color PNG.")
@click.option("--mask-out", "mask_out", type=click.Path(dir_okay=False), default=None,
              help="Also write the decoded 16-bit instance mask here.")
@click.option("--delta", default=DEFAULT_DELTA, show_default=True, type=click.IntRange(min=1))
@click.option("--connectivity", default=4, show_default=True, type=click.Choice(["4", "8"]))
@click.option("--drop-single-pixels", is_flag=True, default=False,
              help="Discard 1-pixel fragments before re-encoding.")
@_guard
def canonicalize(in_path, out_path, mask_out, delta, connectivity, drop_single_pixels):
    """Rewrite a predicted four-color mask as the canonical encoding."""
    fc = pngio.read_fourcolor_mask(in_path)
    mask, canonical = codec.normalize_prediction(
        fc, delta, connectivity=int(connectivity), drop_single_pixels=drop_single_pixels
    )
    pngio.write_fourcolor_mask(out_path, canonical)
    if mask_out:
        pngio.write_instance_mask(mask_out, mask)


def _png_names(directory: Path) -> list[str]:
    return sorted(p.name for p in directory.iterdir() if p.suffix.lower() == ".png")


@main.command("metrics")
@click.option("--gt", "gt_dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory of ground-truth label PNGs.")
@click.option("--pred", "pred_dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory of predicted label PNGs (same filenames).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="JSON report path.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the per-image table as CSV.")
@click.option("--plot", "plot_dir", type=click.Path(file_okay=False), default=None,
              help="Also render metric figures into this directory.")
@click.option("--jobs", default=None, type=click.IntRange(min=1),
              help="Worker pool size [default: available parallelism].")
@_guard
def metrics_command(gt_dir, pred_dir, out_path, csv_path, plot_dir, jobs):
    """Evaluate paired mask directories; aggregate is the per-image mean."""
    gt_dir, pred_dir = Path(gt_dir), Path(pred_dir)
    gt_names = _png_names(gt_dir)
    pred_names = _png_names(pred_dir)
    missing_pred = sorted(set(gt_names) - set(pred_names))
    missing_gt = sorted(set(pred_names) - set(gt_names))
    if missing_pred or missing_gt:
        raise ValueError(
            "unpaired filenames; "
            f"missing predictions: {missing_pred or 'none'}, "
            f"missing ground truth: {missing_gt or 'none'}"
        )
    if not gt_names:
        raise ValueError("no PNG pairs found")

    def evaluate(name: str):
        gt = pngio.read_instance_mask(gt_dir / name)
        pred = pngio.read_instance_mask(pred_dir / name)
        return name, evaluate_pair(gt, pred)

    with ThreadPoolExecutor(max_workers=jobs or _default_jobs()) as pool:
        results = dict(pool.map(evaluate, gt_names))
    corpus = aggregate_reports({name: results[name] for name in gt_names})
    payload = report.metrics_report_payload(corpus)
    report.write_report(out_path, payload)
    if csv_path:
        report.write_metrics_csv(csv_path, corpus)
    if plot_dir:
        from . import plots  # deferred: matplotlib is slow to import

        plot_dir = Path(plot_dir)
        plot_dir.mkdir(parents=True, exist_ok=True)
        plots.save_metrics_figure(payload, plot_dir / "metrics.png")


@main.command("stats")
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory of instance label PNGs.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="JSON report path.")
@click.option("--delta", default=DEFAULT_DELTA, show_default=True, type=click.IntRange(min=1))
@click.option("--node-limit", default=stats.DEFAULT_STATS_NODE_LIMIT, show_default=True,
              type=click.IntRange(min=1), help="Exact chromatic search ceiling per image.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the per-image color usage table as CSV.")
@click.option("--plot", "plot_dir", type=click.Path(file_okay=False), default=None,
              help="Also render usage/degree figures into this directory.")
@click.option("--jobs", default=None, type=click.IntRange(min=1),
              help="Worker pool size for loading [default: available parallelism].")
@_guard
def stats_command(in_dir, out_path, delta, node_limit, csv_path, plot_dir, jobs):
    """Color-usage, degree, and greedy-vs-exact statistics for a corpus."""
    in_dir = Path(in_dir)
    names = _png_names(in_dir)
    if not names:
        raise ValueError("no PNG masks found")
    with ThreadPoolExecutor(max_workers=jobs or _default_jobs()) as pool:
        loaded = dict(pool.map(lambda n: (n, pngio.read_instance_mask(in_dir / n)), names))
    masks = {name: loaded[name] for name in names}
    usage = color_usage_stats(masks, delta)
    degrees = stats.degree_stats(masks, delta)
    optimality = stats.greedy_optimality_report(masks, delta, node_limit)
    report.write_report(out_path, {
        "delta": int(delta),
        "color_usage": usage,
        "degrees": degrees,
        "greedy_optimality": optimality,
    })
    if csv_path:
        report.write_color_usage_csv(csv_path, usage)
    if plot_dir:
        from . import plots  # deferred: matplotlib is slow to import

        plot_dir = Path(plot_dir)
        plot_dir.mkdir(parents=True, exist_ok=True)
        plots.save_color_usage_figure(usage, plot_dir / "color_usage.png")
        plots.save_degree_figure(degrees, plot_dir / "degrees.png")


@main.command("synth")
@click.option("--kind", required=True, type=click.Choice(["chain", "grid", "packing"]))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for masks and manifest.json.")
@click.option("--count", default=1, show_default=True, type=click.IntRange(min=1),
              help="Number of masks to generate.")
@click.option("--n", default=4, show_default=True, type=click.IntRange(min=0),
              help="Cells per chain / packing.")
@click.option("--rows", default=2, show_default=True, type=click.IntRange(min=1))
@click.option("--cols", default=2, show_default=True, type=click.IntRange(min=1))
@click.option("--cell-size", default=8, show_default=True, type=click.IntRange(min=1))
@click.option("--gap", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--canvas", default="256x256", show_default=True,
              help="Packing canvas as HEIGHTxWIDTH.")
@click.option("--min-gap", default=0, show_default=True, type=click.IntRange(min=0),
              help="Minimum Chebyshev gap between packed cells.")
@click.option("--seed", default=None, type=int,
              help="Base seed [default: FC_SEED env var, else 0].")
@_guard
def synth_command(kind, out_dir, count, n, rows, cols, cell_size, gap, canvas, min_gap, seed):
    """Generate a synthetic mask corpus plus a manifest of its parameters."""
    if seed is None:
        env = os.environ.get("FC_SEED", "0")
        try:
            seed = int(env)
        except ValueError:
            raise ValueError(f"FC_SEED must be an integer, got {env!r}") from None
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        canvas_hw = tuple(int(part) for part in canvas.lower().split("x"))
        if len(canvas_hw) != 2:
            raise ValueError
    except ValueError:
        raise ValueError(f"canvas must look like 256x256, got {canvas!r}") from None

    parameters = {"n": n, "rows": rows, "cols": cols, "cell_size": cell_size, "gap": gap,
                  "canvas": list(canvas_hw), "min_gap": min_gap}
    files = []
    for index in range(count):
        if kind == "chain":
            mask = synth.gen_chain(n, cell_size, gap)
        elif kind == "grid":
            mask = synth.gen_grid(rows, cols, cell_size, gap)
        else:
            mask = synth.gen_random_packing(n, canvas_hw, seed=seed + index, min_gap=min_gap)
        name = f"{kind}_{index:05d}.png"
        pngio.write_instance_mask(out_dir / name, mask)
        files.append({"name": name, "seed": seed + index if kind == "packing" else None})
    report.write_report(out_dir / "manifest.json", {
        "kind": kind,
        "count": count,
        "seed": seed,
        "parameters": parameters,
        "files": files,
    })


@main.command("chromatic")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--delta", default=DEFAULT_DELTA, show_default=True, type=click.IntRange(min=1))
@click.option("--max-nodes", default=24, show_default=True, type=click.IntRange(min=1),
              help="Exact chromatic search ceiling.")
@_guard
def chromatic(in_path, delta, max_nodes):
    """Print greedy and exact color counts for one mask's cell graph."""
    mask = pngio.read_instance_mask(in_path)
    graph = build_cell_graph(mask, delta)
    click.echo(report.dumps_report({
        "delta": int(delta),
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "greedy": greedy_color(graph).colors_used,
        "exact": chromatic_number_exact(graph, max_nodes=max_nodes),
    }), nl=False)


if __name__ == "__main__":
    main()
