"""Report rendering: delimited per-code tables and matplotlib figures.

CSV output is byte-deterministic for identical reports. Figures are written
with the Agg backend and stripped PNG metadata so repeated runs agree.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import AccuracyReport, ReportDelta
from .synthlab import BiasSweep

_PNG_METADATA = {"Software": None}  # drop the version stamp for reproducible bytes


def write_report_csv(report: AccuracyReport, destination: str | Path) -> None:
    """Per-code accuracy rows plus an overall row."""
    with open(destination, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["code", "n_correct", "n_total", "accuracy"])
        for code in sorted(report.per_code):
            correct, total = report.per_code[code]
            writer.writerow([code, correct, total, repr(correct / total)])
        writer.writerow(["overall", report.n_correct, report.n_queries, repr(report.accuracy)])


def write_delta_csv(
    delta: ReportDelta,
    destination: str | Path,
    first_name: str = "primary",
    second_name: str = "compare",
) -> None:
    """Per-code accuracy of both reports and their difference."""
    with open(destination, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["code", f"{first_name}_accuracy", f"{second_name}_accuracy", "delta"])
        for code in sorted(delta.per_code_delta):
            writer.writerow(
                [
                    code,
                    repr(delta.first.per_code_accuracy(code)),
                    repr(delta.second.per_code_accuracy(code)),
                    repr(delta.per_code_delta[code]),
                ]
            )
        writer.writerow(
            [
                "overall",
                repr(delta.first.accuracy),
                repr(delta.second.accuracy),
                repr(delta.accuracy_delta),
            ]
        )


def write_sweep_csv(sweep: BiasSweep, destination: str | Path) -> None:
    """One row per seed: biased accuracy, unbiased accuracy, delta; mean row last."""
    with open(destination, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["seed", "biased_accuracy", "unbiased_accuracy", "delta"])
        for run in sweep.runs:
            writer.writerow(
                [
                    run.seed,
                    repr(run.biased.accuracy),
                    repr(run.unbiased.accuracy),
                    repr(run.accuracy_delta),
                ]
            )
        writer.writerow(
            [
                "mean",
                repr(sweep.mean_biased_accuracy),
                repr(sweep.mean_unbiased_accuracy),
                repr(sweep.mean_delta),
            ]
        )


def render_report_figure(report: AccuracyReport, destination: str | Path) -> None:
    """Bar chart of per-code accuracy with the overall accuracy marked."""
    codes = sorted(report.per_code)
    rates = [report.per_code_accuracy(code) for code in codes]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(codes) + 2.0), 3.2))
    ax.bar([str(c) for c in codes], rates, color="#4878cf")
    ax.axhline(report.accuracy, color="#d65f5f", linestyle="--", linewidth=1.2,
               label=f"overall {report.accuracy:.3f}")
    ax.set_ylim(0.0, 1.05)
    ax.set_xlabel(f"{report.code_axis.value} code")
    ax.set_ylabel("top-1 accuracy")
    ax.set_title(f"{report.space.label} space, {report.metric.value}, n={report.n_queries}")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(destination, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)


def render_delta_figure(
    delta: ReportDelta,
    destination: str | Path,
    first_name: str = "primary",
    second_name: str = "compare",
) -> None:
    """Grouped per-code bars for two reports plus the overall delta."""
    codes = sorted(delta.per_code_delta)
    x = range(len(codes))
    width = 0.4
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(codes) + 2.0), 3.2))
    ax.bar([i - width / 2 for i in x], [delta.first.per_code_accuracy(c) for c in codes],
           width, label=first_name, color="#4878cf")
    ax.bar([i + width / 2 for i in x], [delta.second.per_code_accuracy(c) for c in codes],
           width, label=second_name, color="#ee854a")
    ax.set_xticks(list(x))
    ax.set_xticklabels([str(c) for c in codes])
    ax.set_ylim(0.0, 1.05)
    ax.set_xlabel(f"{delta.first.code_axis.value} code")
    ax.set_ylabel("top-1 accuracy")
    ax.set_title(f"accuracy delta {delta.accuracy_delta:+.4f} ({first_name} - {second_name})")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(destination, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)


def render_sweep_figure(sweep: BiasSweep, destination: str | Path) -> None:
    """Per-seed paired bars for the bias experiment."""
    seeds = [str(run.seed) for run in sweep.runs]
    x = range(len(seeds))
    width = 0.4
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(seeds) + 2.0), 3.2))
    ax.bar([i - width / 2 for i in x], [run.biased.accuracy for run in sweep.runs],
           width, label="biased", color="#4878cf")
    ax.bar([i + width / 2 for i in x], [run.unbiased.accuracy for run in sweep.runs],
           width, label="unbiased", color="#ee854a")
    ax.set_xticks(list(x))
    ax.set_xticklabels(seeds)
    ax.set_ylim(0.0, 1.05)
    ax.set_xlabel("seed")
    ax.set_ylabel("shape-code accuracy")
    ax.set_title(f"mean delta {sweep.mean_delta:+.4f} over {len(seeds)} seeds")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(destination, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
