"""Score reports: a canonical JSON shape plus a Markdown projection.

JSON is the source of truth: scores are serialized at full float precision
(shortest round-trip repr), so reading a report back and re-emitting it is
lossless. Markdown is a rendering of the same rows rounded to 2 decimals.
Merging concatenates rows from same-metric reports, sorted by label, which
turns a pile of single-row reports into one comparison table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import InvalidInputError
from .features_io import atomic_write_bytes
from .version import __version__

METRICS = ("ssim", "fid", "story")
FORMATS = ("json", "md")

# Markdown table layout per metric: label header plus (column title, score key)
# pairs in emission order. The story layout follows the similarity/plot/story
# column order used throughout.
_MD_LAYOUT = {
    "ssim": ("Batch", (("Mean SSIM", "mean_ssim"),)),
    "fid": ("Batch", (("FID", "fid"),)),
    "story": (
        "Model",
        (
            ("Similarity Score", "similarity"),
            ("Plot Score", "plot"),
            ("Story Score", "story"),
        ),
    ),
}


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class ReportRow:
    """One labeled score record; ``pairs`` holds optional per-pair detail."""

    label: str
    scores: dict
    pairs: list | None = None

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise InvalidInputError(f"row label must be a non-empty string, got {self.label!r}")
        if not self.scores:
            raise InvalidInputError(f"row {self.label!r} has no scores")


@dataclass
class ScoreReport:
    metric: str
    command: str
    parameters: dict
    rows: list[ReportRow]
    tool_version: str = __version__
    timestamp: str = field(default_factory=_utc_now)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise InvalidInputError(f"unknown metric {self.metric!r}, expected one of {METRICS}")
        if not self.rows:
            raise InvalidInputError("a report needs at least one row")

    def to_dict(self) -> dict:
        rows = []
        for row in self.rows:
            rec = {"label": row.label, "scores": dict(row.scores)}
            if row.pairs is not None:
                rec["pairs"] = [dict(p) for p in row.pairs]
            rows.append(rec)
        return {
            "tool_version": self.tool_version,
            "metric": self.metric,
            "command": self.command,
            "parameters": {k: self.parameters[k] for k in sorted(self.parameters)},
            "rows": rows,
            "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def to_markdown(self) -> str:
        label_header, columns = _MD_LAYOUT[self.metric]
        header = [label_header] + [title for title, _ in columns]
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join(" --- " for _ in header) + "|",
        ]
        for row in self.rows:
            cells = [row.label]
            for _, key in columns:
                if key not in row.scores:
                    raise InvalidInputError(f"row {row.label!r} is missing score {key!r}")
                cells.append(f"{row.scores[key]:.2f}")
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"

    def render(self, format: str) -> str:
        if format == "json":
            return self.to_json()
        if format == "md":
            return self.to_markdown()
        raise InvalidInputError(f"unknown report format {format!r}, expected one of {FORMATS}")

    def write(self, path, format: str = "json") -> None:
        atomic_write_bytes(path, self.render(format).encode("utf-8"))


def load_report(path) -> ScoreReport:
    """Read a JSON report back; schema violations raise InvalidInputError."""
    # An unreadable file propagates as OSError; malformed content is an
    # invalid input.
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(
                f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
            ) from exc
    if not isinstance(doc, dict):
        raise InvalidInputError(f"{path}: report must be a JSON object")
    for key in ("tool_version", "metric", "command", "parameters", "rows", "timestamp"):
        if key not in doc:
            raise InvalidInputError(f"{path}: report is missing field {key!r}")
    if doc["metric"] not in METRICS:
        raise InvalidInputError(f"{path}: unknown metric {doc['metric']!r}")
    if not isinstance(doc["rows"], list) or not doc["rows"]:
        raise InvalidInputError(f"{path}: rows must be a non-empty array")
    if not isinstance(doc["parameters"], dict):
        raise InvalidInputError(f"{path}: parameters must be an object")
    rows = []
    for i, rec in enumerate(doc["rows"]):
        if not isinstance(rec, dict) or "label" not in rec or "scores" not in rec:
            raise InvalidInputError(f"{path}: rows[{i}] needs label and scores fields")
        if not isinstance(rec["scores"], dict):
            raise InvalidInputError(f"{path}: rows[{i}] scores must be an object")
        for name, value in rec["scores"].items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidInputError(f"{path}: rows[{i}] score {name!r} is not a number")
        rows.append(ReportRow(label=rec["label"], scores=dict(rec["scores"]),
                              pairs=rec.get("pairs")))
    return ScoreReport(
        metric=doc["metric"], command=doc["command"], parameters=dict(doc["parameters"]),
        rows=rows, tool_version=doc["tool_version"], timestamp=doc["timestamp"],
    )


def merge_reports(reports, parameters=None) -> ScoreReport:
    """Combine same-metric reports into one table, rows sorted by label.

    Scores pass through untouched, so values survive merging bit-exactly.
    """
    reports = list(reports)
    if not reports:
        raise InvalidInputError("merge needs at least one input report")
    kinds = sorted({r.metric for r in reports})
    if len(kinds) != 1:
        raise InvalidInputError(f"cannot merge mixed metric kinds: {', '.join(kinds)}")
    rows = sorted((row for r in reports for row in r.rows), key=lambda row: row.label)
    if parameters is None:
        parameters = {"input_count": len(reports)}
    return ScoreReport(metric=kinds[0], command="report", parameters=parameters, rows=rows)
