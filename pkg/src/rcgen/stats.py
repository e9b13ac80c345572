"""Run statistics: what was mined, what the cap rejected, and how many
tasks ship per document.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .assemble import ReadingComprehensionText
from .mining import TASK_TYPES


@dataclass
class RunStats:
    docs_in: int = 0
    docs_out: int = 0
    malformed_lines: int = 0
    empty_docs: int = 0
    docs_without_tasks: int = 0
    instances_by_type: Counter = field(default_factory=Counter)
    pre_cap_by_type: Counter = field(default_factory=Counter)
    capped_rejections: Counter = field(default_factory=Counter)

    @property
    def total_instances(self) -> int:
        return sum(self.instances_by_type.values())

    @property
    def avg_tasks_per_doc(self) -> float | None:
        if self.docs_out == 0:
            return None
        return self.total_instances / self.docs_out

    def merge(self, other: "RunStats") -> "RunStats":
        self.docs_in += other.docs_in
        self.docs_out += other.docs_out
        self.malformed_lines += other.malformed_lines
        self.empty_docs += other.empty_docs
        self.docs_without_tasks += other.docs_without_tasks
        self.instances_by_type.update(other.instances_by_type)
        self.pre_cap_by_type.update(other.pre_cap_by_type)
        self.capped_rejections.update(other.capped_rejections)
        return self


def accumulate(stats: RunStats, rc: ReadingComprehensionText) -> RunStats:
    """Fold one emitted document into the totals; order-independent."""
    stats.docs_out += 1
    stats.instances_by_type.update(rc.task_breakdown)
    if rc.n_tasks == 0:
        stats.docs_without_tasks += 1
    return stats


def _percentages(counts: Counter) -> dict[str, float]:
    total = sum(counts.values())
    if total == 0:
        return {}
    return {name: 100.0 * counts[name] / total for name in TASK_TYPES if counts[name]}


def render_report(stats: RunStats) -> tuple[str, dict]:
    """Render the run report as a console table plus a structured record."""
    percentages = _percentages(stats.instances_by_type)
    avg = stats.avg_tasks_per_doc
    record = {
        "docs_in": stats.docs_in,
        "docs_out": stats.docs_out,
        "malformed_lines": stats.malformed_lines,
        "empty_docs": stats.empty_docs,
        "docs_without_tasks": stats.docs_without_tasks,
        "total_instances": stats.total_instances,
        "avg_tasks_per_doc": avg,
        "instances_by_type": {k: stats.instances_by_type[k] for k in sorted(stats.instances_by_type)},
        "pre_cap_by_type": {k: stats.pre_cap_by_type[k] for k in sorted(stats.pre_cap_by_type)},
        "capped_rejections": {k: stats.capped_rejections[k] for k in sorted(stats.capped_rejections)},
        "percentages_by_type": {k: round(v, 2) for k, v in percentages.items()},
    }

    lines = []
    lines.append(f"documents in/out: {stats.docs_in}/{stats.docs_out}")
    lines.append(f"malformed lines:  {stats.malformed_lines}")
    lines.append(f"empty documents:  {stats.empty_docs}")
    if avg is None:
        lines.append("avg tasks/doc:    n/a (no documents emitted)")
    else:
        lines.append(f"avg tasks/doc:    {avg:.2f}")
    lines.append("")
    lines.append(f"{'task type':<18}{'shipped':>9}{'mined':>9}{'share':>9}")
    for name in TASK_TYPES:
        shipped = stats.instances_by_type.get(name, 0)
        mined = stats.pre_cap_by_type.get(name, 0)
        if not shipped and not mined:
            continue
        share = f"{percentages.get(name, 0.0):.1f}%"
        lines.append(f"{name:<18}{shipped:>9}{mined:>9}{share:>9}")
    if stats.capped_rejections:
        lines.append("")
        lines.append("cap rejections by sub-category:")
        for sub in sorted(stats.capped_rejections):
            lines.append(f"  {sub}: {stats.capped_rejections[sub]}")
    return "\n".join(lines), record


def save_stats(record: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_stats(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
