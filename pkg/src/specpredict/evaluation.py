"""Next-slot prediction and error reporting.

A trained network emits a value in (-1, 1) for each pattern; anything at
or above zero is read as busy.  Reports break errors down by the four
outcomes (true/false busy/idle) and can be written as CSV or JSON
summaries with optional per-slot traces.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import StructuralError
from .network import NetworkWeights, network_outputs


@dataclass
class PredictionReport:
    """Per-channel prediction outcome counts over an evaluation set."""

    band: str
    channel: int
    pattern_count: int
    true_busy: int
    true_idle: int
    false_busy: int
    false_idle: int
    trace: list = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return self.false_busy + self.false_idle

    @property
    def error_rate(self) -> float:
        if self.pattern_count == 0:
            return 0.0
        return self.error_count / self.pattern_count

    def summary_row(self) -> list:
        return [
            self.band,
            self.channel,
            self.pattern_count,
            repr(self.error_rate),
            self.true_busy,
            self.true_idle,
            self.false_busy,
            self.false_idle,
        ]


SUMMARY_HEADER = [
    "band",
    "channel",
    "patterns",
    "error_rate",
    "tb",
    "ti",
    "fb",
    "fi",
]


def predict(weights: NetworkWeights, inputs) -> np.ndarray:
    """Classify each input row: 1 (busy) when the output is >= 0, else 0."""
    if weights.topology.output_size != 1:
        raise StructuralError(
            f"prediction needs a single-output network, got {weights.topology.output_size}"
        )
    x = np.asarray(inputs, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    outputs = network_outputs(weights, x)[:, 0]
    labels = (outputs >= 0.0).astype(np.uint8)
    return labels[0] if single else labels


def evaluate(
    weights: NetworkWeights,
    dataset,
    band: str = "",
    channel: int | None = None,
    keep_trace: bool = True,
) -> PredictionReport:
    """Score a windowed dataset: predict each target slot, tally outcomes.

    The trace lists (slot, predicted, actual) bits for every pattern in
    slot order.
    """
    inputs = np.asarray(dataset.inputs, dtype=np.float64)
    targets = np.asarray(dataset.targets, dtype=np.float64)
    if targets.ndim == 2:
        targets = targets[:, 0]
    predicted = predict(weights, inputs)
    actual = (targets >= 0.0).astype(np.uint8)
    slots = np.asarray(getattr(dataset, "target_slots", np.arange(len(predicted))))

    tb = int(np.sum((predicted == 1) & (actual == 1)))
    ti = int(np.sum((predicted == 0) & (actual == 0)))
    fb = int(np.sum((predicted == 1) & (actual == 0)))
    fi = int(np.sum((predicted == 0) & (actual == 1)))

    if channel is None:
        channel = int(dataset.provenance.get("channel", 0)) if hasattr(dataset, "provenance") else 0
    trace = (
        [(int(s), int(p), int(a)) for s, p, a in zip(slots, predicted, actual)]
        if keep_trace
        else []
    )
    return PredictionReport(
        band=band,
        channel=int(channel),
        pattern_count=int(predicted.shape[0]),
        true_busy=tb,
        true_idle=ti,
        false_busy=fb,
        false_idle=fi,
        trace=trace,
    )


def mean_error_rate(reports) -> float:
    """Unweighted mean of per-channel error rates."""
    reports = list(reports)
    if not reports:
        raise StructuralError("cannot average an empty report list")
    return float(np.mean([r.error_rate for r in reports]))


def write_summary_csv(path, reports):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for report in reports:
            writer.writerow(report.summary_row())


def write_summary_json(path, reports):
    payload = [
        {
            "band": r.band,
            "channel": r.channel,
            "patterns": r.pattern_count,
            "error_rate": r.error_rate,
            "tb": r.true_busy,
            "ti": r.true_idle,
            "fb": r.false_busy,
            "fi": r.false_idle,
        }
        for r in reports
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_trace_csv(path, report: PredictionReport):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slot", "predicted", "actual"])
        for slot, predicted, actual in report.trace:
            writer.writerow([slot, predicted, actual])


def emit_report(out_dir, reports, fmt: str = "csv", traces: bool = False):
    """Write a summary (and optional per-channel traces) into a directory.

    Returns the summary file path.
    """
    if fmt not in ("csv", "json"):
        raise StructuralError(f"format must be 'csv' or 'json', got {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = list(reports)
    if fmt == "csv":
        summary_path = out / "summary.csv"
        write_summary_csv(summary_path, reports)
    else:
        summary_path = out / "summary.json"
        write_summary_json(summary_path, reports)
    if traces:
        for report in reports:
            write_trace_csv(out / f"trace_ch_{report.channel}.csv", report)
    return summary_path
