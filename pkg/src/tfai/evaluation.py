"""Coverage evaluation: measure how completely a generated report covers an
expert baseline threat list.

A baseline entry is covered iff at least one of its mapped KB threat ids
appears among the report's findings (primary or secondary). The mapping from
expert wording to KB threat ids is a human judgment recorded in the baseline
file; the measurement here is mechanical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Union

from .engine import ThreatReport, report_to_dict
from .kb import KnowledgeBase, SecurityObjective


class BaselineError(Exception):
    """Base class for baseline loading/evaluation errors."""


class MalformedBaselineError(BaselineError):
    pass


class BaselineKbMismatchError(BaselineError):
    """Baseline maps to threat ids absent from the evaluation KB."""

    def __init__(self, missing: dict[str, list[str]]):
        self.missing = missing
        detail = "; ".join(f"{bid}: {', '.join(ids)}" for bid, ids in missing.items())
        super().__init__(f"baseline references unknown KB threat ids: {detail}")


@dataclass(frozen=True)
class BaselineEntry:
    baseline_id: str
    title: str
    description: str = ""
    mapped_threat_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class BaselineModel:
    name: str
    entries: tuple[BaselineEntry, ...]


@dataclass(frozen=True)
class CoverageMetrics:
    recall: float
    covered: int
    uncovered: tuple[str, ...]
    excess_findings: int
    per_objective_breakdown: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "recall": self.recall,
            "covered": self.covered,
            "uncovered": list(self.uncovered),
            "excess_findings": self.excess_findings,
            "per_objective_breakdown": dict(self.per_objective_breakdown),
        }


def load_baseline(
    source: Union[bytes, str, IO[bytes]], kb: KnowledgeBase | None = None
) -> BaselineModel:
    """Load a baseline file; when a KB is given, mapped threat ids are checked
    against it and dangling references raise BaselineKbMismatchError."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        document = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedBaselineError(f"baseline is not valid JSON: {exc}") from exc
    if not isinstance(document, dict) or not isinstance(document.get("entries"), list):
        raise MalformedBaselineError("baseline must be an object with an 'entries' list")

    entries = []
    seen = set()
    for i, raw in enumerate(document["entries"]):
        if not isinstance(raw, dict) or not isinstance(raw.get("baseline_id"), str):
            raise MalformedBaselineError(f"entries[{i}] must be an object with a baseline_id")
        bid = raw["baseline_id"]
        if bid in seen:
            raise MalformedBaselineError(f"duplicate baseline_id {bid!r}")
        seen.add(bid)
        mapped = raw.get("mapped_threat_ids", [])
        if not isinstance(mapped, list) or not all(isinstance(t, str) for t in mapped):
            raise MalformedBaselineError(f"entries[{i}].mapped_threat_ids must be a string list")
        entries.append(
            BaselineEntry(
                baseline_id=bid,
                title=raw.get("title", ""),
                description=raw.get("description", ""),
                mapped_threat_ids=tuple(mapped),
            )
        )

    model = BaselineModel(name=document.get("name", ""), entries=tuple(entries))
    if kb is not None:
        missing = {}
        for entry in model.entries:
            dangling = [t for t in entry.mapped_threat_ids if not kb.has_threat(t)]
            if dangling:
                missing[entry.baseline_id] = dangling
        if missing:
            raise BaselineKbMismatchError(missing)
    return model


def _report_finding_objectives(report) -> dict[str, set[str]]:
    """threat id -> impacted objective tokens, from a report or its dict form."""
    if isinstance(report, ThreatReport):
        report = report_to_dict(report)
    out = {}
    for section in ("primary_findings", "secondary_findings"):
        for f in report.get(section, []):
            out[f["threat_id"]] = set(f.get("impacted_objectives", []))
    return out


def compute_coverage(report, baseline: BaselineModel) -> CoverageMetrics:
    """Coverage of the baseline by a report (ThreatReport or its serialized dict).

    recall = covered / |entries| (1.0 for an empty baseline, vacuously).
    excess_findings counts report threats mapped by no baseline entry.
    The per-objective breakdown is derived from the report's impact tags, so
    only entries whose mapped threats appear in the report contribute to it.
    """
    finding_objectives = _report_finding_objectives(report)
    report_ids = set(finding_objectives)

    covered = 0
    uncovered = []
    mapped_anywhere: set[str] = set()
    breakdown = {
        o.value: {"covered": 0, "total": 0} for o in SecurityObjective
    }
    for entry in baseline.entries:
        mapped_anywhere.update(entry.mapped_threat_ids)
        hits = [t for t in entry.mapped_threat_ids if t in report_ids]
        entry_objectives = set()
        for t in entry.mapped_threat_ids:
            entry_objectives.update(finding_objectives.get(t, ()))
        hit_objectives = set()
        for t in hits:
            hit_objectives.update(finding_objectives[t])
        for o in entry_objectives:
            breakdown[o]["total"] += 1
        for o in hit_objectives:
            breakdown[o]["covered"] += 1
        if hits:
            covered += 1
        else:
            uncovered.append(entry.baseline_id)

    total = len(baseline.entries)
    recall = 1.0 if total == 0 else covered / total
    excess = len(report_ids - mapped_anywhere)
    return CoverageMetrics(
        recall=recall,
        covered=covered,
        uncovered=tuple(uncovered),
        excess_findings=excess,
        per_objective_breakdown=breakdown,
    )
