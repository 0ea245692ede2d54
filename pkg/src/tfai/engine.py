"""The analysis pipeline: diagram + objectives + KB -> threat report.

Every stage is a pure function over immutable inputs, so analyses can run
concurrently. Ordering follows KB declaration order throughout, which keeps
reports deterministic and golden-test stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .diagram import DiagramModel, extract_asset_annotations, parse_diagram
from .kb import Asset, KnowledgeBase, SecurityObjective
from .stencils import DEFAULT_ANNOTATION_KEY

_OBJECTIVE_ORDER = {o: i for i, o in enumerate(SecurityObjective)}


def _sorted_objectives(objectives) -> tuple[SecurityObjective, ...]:
    return tuple(sorted(objectives, key=_OBJECTIVE_ORDER.__getitem__))


@dataclass(frozen=True)
class AssetOccurrence:
    page_name: str
    element_id: str


@dataclass(frozen=True)
class AssetInstance:
    asset: Asset
    occurrences: tuple[AssetOccurrence, ...]


@dataclass(frozen=True)
class UnknownAnnotation:
    page_name: str
    element_id: str
    raw_value: str


@dataclass(frozen=True)
class AssetInstanceSet:
    entries: tuple[AssetInstance, ...]
    unknown_annotations: tuple[UnknownAnnotation, ...]

    def asset_ids(self) -> list[str]:
        return [e.asset.id for e in self.entries]


@dataclass(frozen=True)
class ThreatFinding:
    threat: object  # kb.Threat
    matched_assets: tuple[str, ...]
    objective_overlap: tuple[SecurityObjective, ...] = ()


@dataclass(frozen=True)
class ThreatReport:
    selected_objectives: tuple[SecurityObjective, ...]
    primary_findings: tuple[ThreatFinding, ...]
    secondary_findings: tuple[ThreatFinding, ...]
    asset_instances: AssetInstanceSet
    warnings: tuple[str, ...]
    stats: dict = field(default_factory=dict)
    kb_provenance: str = ""
    source_digest: str = ""


def identify_assets(
    model: DiagramModel, kb: KnowledgeBase, annotation_key: str = DEFAULT_ANNOTATION_KEY
) -> AssetInstanceSet:
    """Deduplicate annotated elements into asset instances with provenance.

    Annotation values that do not resolve in the KB are kept as
    unknown_annotations, never dropped.
    """
    occurrences: dict[str, list[AssetOccurrence]] = {}
    unknown: list[UnknownAnnotation] = []
    for element_id, page_name, value in extract_asset_annotations(model, annotation_key):
        if kb.has_asset(value):
            occurrences.setdefault(value, []).append(AssetOccurrence(page_name, element_id))
        else:
            unknown.append(UnknownAnnotation(page_name, element_id, value))
    entries = tuple(
        AssetInstance(asset=asset, occurrences=tuple(occurrences[asset.id]))
        for asset in kb.assets
        if asset.id in occurrences
    )
    return AssetInstanceSet(entries=entries, unknown_annotations=tuple(unknown))


def match_threats(instances: AssetInstanceSet, kb: KnowledgeBase) -> list[ThreatFinding]:
    """Union of threats_for_asset over the instance set, merged per threat id.

    A threat matched through several assets yields a single finding with all
    matched asset ids accumulated. Ordered by KB threat declaration order.
    """
    instance_ids = instances.asset_ids()
    findings = []
    for threat in kb.threats:
        matched = tuple(a for a in instance_ids if a in threat.asset_ids)
        if matched:
            findings.append(ThreatFinding(threat=threat, matched_assets=matched))
    return findings


def partition_by_objectives(
    findings, objectives
) -> tuple[list[ThreatFinding], list[ThreatFinding]]:
    """Split findings into (primary, secondary) by objective intersection.

    Nothing is deleted: a finding whose impacted objectives miss the selection
    goes to secondary. Relative order is preserved in both lists.
    """
    selected = set(objectives)
    primary, secondary = [], []
    for finding in findings:
        overlap = _sorted_objectives(set(finding.threat.impacted_objectives) & selected)
        tagged = ThreatFinding(
            threat=finding.threat,
            matched_assets=finding.matched_assets,
            objective_overlap=overlap,
        )
        (primary if overlap else secondary).append(tagged)
    return primary, secondary


def analyze(
    diagram_bytes: bytes,
    objectives,
    kb: KnowledgeBase,
    annotation_key: str = DEFAULT_ANNOTATION_KEY,
) -> ThreatReport:
    """Full pipeline: parse, identify assets, match threats, partition.

    Deterministic: identical inputs produce canonical-JSON-identical reports.
    Parser errors propagate; the pipeline never partially succeeds.
    """
    model = parse_diagram(diagram_bytes)
    instances = identify_assets(model, kb, annotation_key)
    findings = match_threats(instances, kb)
    primary, secondary = partition_by_objectives(findings, objectives)

    warnings = []
    for u in instances.unknown_annotations:
        warnings.append(
            f"unknown asset annotation {u.raw_value!r} on element {u.element_id!r} "
            f"(page {u.page_name!r}) does not resolve in the knowledge base"
        )
    for page in model.pages:
        for edge in page.edges:
            if edge.dangling:
                warnings.append(
                    f"edge {edge.edge_id!r} (page {page.name!r}) has a dangling endpoint"
                )

    return ThreatReport(
        selected_objectives=_sorted_objectives(objectives),
        primary_findings=tuple(primary),
        secondary_findings=tuple(secondary),
        asset_instances=instances,
        warnings=tuple(warnings),
        stats={
            "asset_count": len(instances.entries),
            "threat_count_primary": len(primary),
            "threat_count_secondary": len(secondary),
        },
        kb_provenance=kb.provenance,
        source_digest=model.source_digest,
    )


def _finding_to_dict(finding: ThreatFinding) -> dict:
    threat = finding.threat
    return {
        "threat_id": threat.id,
        "title": threat.title,
        "category": threat.category,
        "description": threat.description,
        "matched_assets": list(finding.matched_assets),
        "impacted_objectives": [o.value for o in threat.impacted_objectives],
        "objective_overlap": [o.value for o in finding.objective_overlap],
    }


def report_to_dict(report: ThreatReport) -> dict:
    return {
        "selected_objectives": [o.value for o in report.selected_objectives],
        "primary_findings": [_finding_to_dict(f) for f in report.primary_findings],
        "secondary_findings": [_finding_to_dict(f) for f in report.secondary_findings],
        "asset_instances": {
            "entries": [
                {
                    "asset_id": e.asset.id,
                    "name": e.asset.name,
                    "category_id": e.asset.category_id,
                    "occurrences": [
                        {"page": o.page_name, "element_id": o.element_id}
                        for o in e.occurrences
                    ],
                }
                for e in report.asset_instances.entries
            ],
            "unknown_annotations": [
                {"page": u.page_name, "element_id": u.element_id, "value": u.raw_value}
                for u in report.asset_instances.unknown_annotations
            ],
        },
        "warnings": list(report.warnings),
        "stats": dict(report.stats),
        "kb_provenance": report.kb_provenance,
        "source_digest": report.source_digest,
    }


def canonical_json(report: ThreatReport) -> bytes:
    """The wire and golden-test format: UTF-8, sorted keys, compact separators."""
    return json.dumps(
        report_to_dict(report), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")


def report_dict_threat_ids(report_dict: dict) -> list[str]:
    """All finding threat ids (primary then secondary) from a serialized report."""
    return [
        f["threat_id"]
        for section in ("primary_findings", "secondary_findings")
        for f in report_dict.get(section, [])
    ]
