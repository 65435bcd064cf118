"""Report rendering: text tables, structured JSON, delimited scores, figures.

The text report mirrors the classic evaluation-table shape — one row per
document group plus a total row, with columns for correct, wrong and the
wrong sub-categories.  The structured report is a single JSON object
(engine version, config echo, per-document results, aggregate) rendered
with sorted keys so identical runs are byte-identical.  The figures path
writes the same numbers as a tab-separated file plus a grouped bar chart.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .evaluate import OTHER_CATEGORIES, ResolutionRecord, ScoreTable

log = logging.getLogger(__name__)

_COLUMNS = (
    ("total", "total"),
    ("correct", "correct"),
    ("wrong", "wrong"),
    ("strat.", "wrong_strategic"),
    ("ambig.", "wrong_ambiguous"),
    ("intra", "wrong_intra"),
    ("chain", "wrong_chain"),
    ("other", "wrong_other"),
)

_METRICS = ("total", "correct", "wrong", "wrong_strategic", "wrong_ambiguous",
            "wrong_intra", "wrong_chain", "wrong_other",
            "wrong_split_antecedent", "wrong_segment_boundary",
            "wrong_event_anaphora")


@dataclass
class DocumentResult:
    doc_id: str
    group: str
    algorithm: str
    table: ScoreTable
    records: list[ResolutionRecord]
    categories: dict[str, str]
    trace: list[dict] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def aggregate(results: list[DocumentResult]
              ) -> tuple[dict[str, ScoreTable], ScoreTable]:
    """Group-wise and overall score sums."""
    groups: dict[str, ScoreTable] = {}
    total = ScoreTable()
    for r in results:
        groups[r.group] = groups.get(r.group, ScoreTable()) + r.table
        total = total + r.table
    return groups, total


def text_report(results: list[DocumentResult]) -> str:
    if not results:
        return "no documents processed\n"
    algorithm = results[0].algorithm
    groups, total = aggregate(results)
    width = max([len("total")] + [len(f"group {g}") for g in groups]) + 2
    lines = [f"algorithm: {algorithm}    documents: {len(results)}    "
             f"pronouns and equivalents: {total.total}", ""]
    header = " " * width + "".join(f"{label:>8}" for label, _ in _COLUMNS)
    lines.append(header)
    for g in sorted(groups):
        lines.append(_row(f"group {g}", groups[g], width))
    lines.append(_row("total", total, width))
    other = [(cat, getattr(total, f"wrong_{cat}")) for cat in OTHER_CATEGORIES]
    if any(count for _, count in other):
        detail = ", ".join(f"{cat.replace('_', ' ')} {count}"
                           for cat, count in other if count)
        lines.append(f"{'':{width}}(other: {detail})")
    lines.append("")
    lines.append("per document:")
    for r in results:
        lines.append(f"  {r.doc_id} ({r.group}): "
                     f"{r.table.correct}/{r.table.total} correct")
        for note in r.diagnostics:
            lines.append(f"    note: {note}")
    return "\n".join(lines) + "\n"


def _row(label: str, table: ScoreTable, width: int) -> str:
    cells = "".join(f"{getattr(table, attr):>8}" for _, attr in _COLUMNS)
    return f"{label:<{width}}{cells}"


def structured_report(results: list[DocumentResult], config: dict,
                      version: str) -> str:
    groups, total = aggregate(results)
    payload = {
        "tool": "slistref",
        "version": version,
        "config": config,
        "documents": [
            {
                "id": r.doc_id,
                "group": r.group,
                "scores": r.table.as_dict(),
                "anaphors": [
                    {
                        "id": rec.anaphor_id,
                        "system": rec.system,
                        "gold": rec.gold,
                        "correct": rec.correct,
                        "category": r.categories.get(rec.anaphor_id),
                        "ambiguous": rec.ambiguous,
                        "ties": list(rec.ties),
                        "fallback_depth": rec.fallback_depth,
                    }
                    for rec in r.records
                ],
                "trace": r.trace,
                "diagnostics": r.diagnostics,
            }
            for r in results
        ],
        "aggregate": {
            "groups": {g: t.as_dict() for g, t in groups.items()},
            "total": total.as_dict(),
        },
    }
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2)


def delimited_rows(results: list[DocumentResult]) -> list[tuple]:
    """Long-format (algorithm, scope, name, metric, count) rows for the
    tab-separated scores file."""
    groups, total = aggregate(results)
    algorithm = results[0].algorithm if results else "none"
    rows = []
    for r in results:
        rows.extend((algorithm, "document", r.doc_id, metric,
                     _metric(r.table, metric)) for metric in _METRICS)
    for g in sorted(groups):
        rows.extend((algorithm, "group", g, metric, _metric(groups[g], metric))
                    for metric in _METRICS)
    rows.extend((algorithm, "total", "all", metric, _metric(total, metric))
                for metric in _METRICS)
    return rows


def _metric(table: ScoreTable, metric: str) -> int:
    return getattr(table, metric)


def write_delimited(path, results: list[DocumentResult]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("algorithm\tscope\tname\tmetric\tcount\n")
        for row in delimited_rows(results):
            fh.write("\t".join(str(cell) for cell in row) + "\n")


def render_figure(path, results: list[DocumentResult]) -> None:
    """Grouped bar chart of outcome counts per document group (plus the
    overall column), written as a PNG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    groups, total = aggregate(results)
    names = sorted(groups) + ["all"]
    tables = [groups[g] for g in sorted(groups)] + [total]
    series = [("correct", "correct"), ("strat.", "wrong_strategic"),
              ("ambig.", "wrong_ambiguous"), ("intra", "wrong_intra"),
              ("chain", "wrong_chain"), ("other", "wrong_other")]
    algorithm = results[0].algorithm if results else "none"

    fig, ax = plt.subplots(figsize=(1.8 + 1.4 * len(names), 4.0))
    bar_width = 0.8 / len(series)
    for k, (label, attr) in enumerate(series):
        xs = [i + k * bar_width for i in range(len(names))]
        ax.bar(xs, [getattr(t, attr) for t in tables], bar_width, label=label)
    ax.set_xticks([i + 0.4 - bar_width / 2 for i in range(len(names))])
    ax.set_xticklabels(names)
    ax.set_ylabel("pronouns")
    ax.set_title(f"{algorithm}: resolution outcomes by group")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def format_slist_trace(steps: list[dict]) -> str:
    lines = []
    for step in steps:
        inner = ", ".join(f"{e['entity']}_{e['class']}: {e['surface']}"
                          for e in step["slist"])
        lines.append(f"  @{step['token_index']:>4} {step['action']:<7} [{inner}]")
    return "\n".join(lines)


def format_centering_trace(trace: list[dict]) -> str:
    lines = []
    for u in trace:
        assigned = ", ".join(f"{k}->{v}" for k, v in u["assignments"].items())
        flag = " AMBIGUOUS" if u["ambiguous"] else ""
        lines.append(
            f"  U{u['utt']}: cf=[{', '.join(u['cf'])}] cb={u['cb'] or '-'} "
            f"transition={u['transition'] or '-'}{flag}"
            + (f"  {assigned}" if assigned else ""))
    return "\n".join(lines)
