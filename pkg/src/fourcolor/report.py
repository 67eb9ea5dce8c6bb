"""Versioned JSON/CSV report serialization with exact float formatting."""

from __future__ import annotations

import csv
import json
from json import encoder as _json_encoder
from pathlib import Path
from typing import Iterable, Mapping

from .metrics import CorpusReport

SCHEMA_VERSION = "1.0.0"

METRIC_FIELDS = ("dice", "aji", "dq", "sq", "pq", "tp", "fp", "fn")


class ReportJSONEncoder(json.JSONEncoder):
    """Serializes floats with 17 significant digits so golden files are exact."""

    def iterencode(self, o, _one_shot=False):
        markers = {} if self.check_circular else None

        def floatstr(value, _inf=float("inf")):
            if value != value or value in (_inf, -_inf):
                raise ValueError("non-finite float in report")
            return format(value, ".17g")

        make = _json_encoder._make_iterencode(
            markers, self.default, _json_encoder.encode_basestring_ascii, self.indent,
            floatstr, self.key_separator, self.item_separator, self.sort_keys,
            self.skipkeys, _one_shot,
        )
        return make(o, 0)


def dumps_report(payload: Mapping) -> str:
    body = dict(payload)
    body.setdefault("schema_version", SCHEMA_VERSION)
    # schema_version leads for readability
    body = {"schema_version": body.pop("schema_version"), **body}
    return json.dumps(body, cls=ReportJSONEncoder, indent=2) + "\n"


def write_report(path, payload: Mapping) -> None:
    Path(path).write_text(dumps_report(payload), encoding="utf-8")


def metrics_report_payload(corpus: CorpusReport) -> dict:
    images = [
        {"name": name, **report.as_dict()} for name, report in corpus.per_image.items()
    ]
    return {"aggregate": corpus.aggregate.as_dict(), "images": images}


def write_metrics_csv(path, corpus: CorpusReport) -> None:
    """Per-image metric table, one row per pair plus a trailing aggregate row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("name",) + METRIC_FIELDS)
        for name, report in corpus.per_image.items():
            row = report.as_dict()
            writer.writerow([name] + [_csv_num(row[f]) for f in METRIC_FIELDS])
        agg = corpus.aggregate.as_dict()
        writer.writerow(["<aggregate>"] + [_csv_num(agg[f]) for f in METRIC_FIELDS])


def write_color_usage_csv(path, usage: Mapping) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("name", "cells", "colors_used", "cells_color_1", "cells_color_2",
                         "cells_color_3", "cells_color_4"))
        for img in usage["per_image"]:
            per = img["cells_per_color"]
            writer.writerow([img["name"], img["cells"], img["colors_used"],
                             per["1"], per["2"], per["3"], per["4"]])


def _csv_num(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def rows_to_csv(path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_csv_num(v) for v in row])
