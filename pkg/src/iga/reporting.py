"""Report rendering: canonical JSON, TSV, aligned text, and figures.

Every report path can emit three artifacts side by side: a canonical JSON
document, a tab-delimited table, and a PNG figure. Matplotlib uses the Agg
backend so rendering works headless.
"""
from __future__ import annotations

import json
from pathlib import Path

from .metrics import MetricsReport
from .mining import DatasetStats

__all__ = [
    "canonical_json",
    "metrics_tsv",
    "metrics_text",
    "stats_tsv",
    "session_tsv",
    "render_metrics_figure",
    "render_stats_figure",
    "render_session_figure",
]

_METRIC_COLUMNS = ("records", "rouge2", "bleu2", "self_bleu", "ibleu", "mean_infilled_length")


def canonical_json(data: dict) -> str:
    return json.dumps(data, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def metrics_tsv(report: MetricsReport) -> str:
    lines = ["tag\t" + "\t".join(_METRIC_COLUMNS)]
    for tag, row in report.per_tag.items():
        lines.append(tag + "\t" + "\t".join(_cell(row.get(c)) for c in _METRIC_COLUMNS))
    if report.totals:
        lines.append("TOTAL\t" + "\t".join(_cell(report.totals.get(c)) for c in _METRIC_COLUMNS))
    return "\n".join(lines) + "\n"


def metrics_text(report: MetricsReport) -> str:
    headers = ("tag",) + _METRIC_COLUMNS
    rows = [headers]
    for tag, row in report.per_tag.items():
        rows.append((tag,) + tuple(_cell(row.get(c)) for c in _METRIC_COLUMNS))
    if report.totals:
        rows.append(("TOTAL",) + tuple(_cell(report.totals.get(c)) for c in _METRIC_COLUMNS))
    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    out = []
    for row in rows:
        out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    if report.excluded:
        out.append("")
        out.append("excluded (span-count mismatch): " + json.dumps(report.excluded, sort_keys=True))
    return "\n".join(out) + "\n"


def stats_tsv(stats: DatasetStats) -> str:
    splits = sorted(stats.split_totals)
    lines = ["tag\t" + "\t".join(splits) + "\ttotal"]
    for tag, row in stats.per_tag.items():
        counts = [row.get(s, 0) for s in splits]
        lines.append(tag + "\t" + "\t".join(str(c) for c in counts) + f"\t{sum(counts)}")
    totals = [stats.split_totals[s] for s in splits]
    lines.append("TOTAL\t" + "\t".join(str(c) for c in totals) + f"\t{sum(totals)}")
    return "\n".join(lines) + "\n"


def session_tsv(report: dict) -> str:
    lines = ["tag\tprecision\trecall\tf1\tcandidates\tfully_deleted"]
    for tag, row in report.get("per_tag_unigram", {}).items():
        lines.append(
            f"{tag}\t{row['precision']:.2f}\t{row['recall']:.2f}\t{row['f1']:.2f}"
            f"\t{row['candidates']}\t{row['fully_deleted']}"
        )
    return "\n".join(lines) + "\n"


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save_atomic(fig, path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp.png")
    fig.savefig(tmp, dpi=120)
    tmp.replace(path)


def render_metrics_figure(report: MetricsReport, path: str | Path):
    plt = _plt()
    tags = list(report.per_tag)
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(tags)), 4))
    if tags:
        x = range(len(tags))
        rouge = [100 * (report.per_tag[t].get("rouge2") or 0) for t in tags]
        bleu = [report.per_tag[t].get("bleu2") or 0 for t in tags]
        width = 0.38
        ax.bar([i - width / 2 for i in x], rouge, width, label="ROUGE-2 (x100)")
        ax.bar([i + width / 2 for i in x], bleu, width, label="BLEU-2")
        ax.set_xticks(list(x))
        ax.set_xticklabels(tags, rotation=30, ha="right")
        ax.legend()
    ax.set_ylabel("score")
    ax.set_title("span metrics per tag")
    fig.tight_layout()
    _save_atomic(fig, path)
    plt.close(fig)


def render_stats_figure(stats: DatasetStats, path: str | Path):
    plt = _plt()
    tags = list(stats.per_tag)
    splits = sorted(stats.split_totals)
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(tags)), 4))
    bottoms = [0] * len(tags)
    for split in splits:
        counts = [stats.per_tag[t].get(split, 0) for t in tags]
        ax.bar(tags, counts, bottom=bottoms, label=split)
        bottoms = [b + c for b, c in zip(bottoms, counts)]
    if tags:
        ax.legend()
        plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    ax.set_ylabel("examples")
    ax.set_title("dataset size per tag")
    fig.tight_layout()
    _save_atomic(fig, path)
    plt.close(fig)


def render_session_figure(report: dict, path: str | Path):
    plt = _plt()
    histogram = report.get("tag_usage_histogram", {})
    fig, ax = plt.subplots(figsize=(6, 4))
    if histogram:
        tags = list(histogram)
        ax.bar(tags, [histogram[t] for t in tags])
        plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    ax.set_ylabel("accepted candidates")
    ax.set_title("tag usage")
    fig.tight_layout()
    _save_atomic(fig, path)
    plt.close(fig)
