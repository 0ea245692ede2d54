"""Knowledge base: the asset/threat ontology that drives all matching.

The KB is a JSON document with four sections (categories, assets, threats,
provenance). Loading validates referential integrity and returns an immutable
structure that is safe to share across concurrent request handlers.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Union

SUPPORTED_SCHEMA_VERSIONS = ("1",)

_TOKEN_RE = re.compile(r"^[a-z0-9_]+$")

_KNOWN_TOP_KEYS = {"schema_version", "categories", "assets", "threats", "provenance"}
_KNOWN_CATEGORY_KEYS = {"id", "display_name", "description"}
_KNOWN_ASSET_KEYS = {"id", "name", "category_id", "description", "stencil_hint"}
_KNOWN_THREAT_KEYS = {"id", "title", "category", "description", "asset_ids", "impacted_objectives"}


class SecurityObjective(str, Enum):
    """The five security objectives threats are tagged against."""

    CONFIDENTIALITY = "confidentiality"
    INTEGRITY = "integrity"
    AVAILABILITY = "availability"
    AUTHORIZATION = "authorization"
    NON_REPUDIATION = "non_repudiation"


OBJECTIVE_TOKENS = tuple(o.value for o in SecurityObjective)


class KbError(Exception):
    """Base class for knowledge base loading errors."""


class MalformedDocumentError(KbError):
    """Input is not a parseable JSON object."""


class SchemaVersionError(KbError):
    """Document declares a schema version this engine does not support."""


class KbValidationError(KbError):
    """Document parsed but failed validation; carries the full report."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        lines = "; ".join(f"{f.path}: {f.message}" for f in report.errors)
        super().__init__(f"knowledge base validation failed: {lines}")


class UnknownAssetIdError(KbError):
    def __init__(self, asset_id: str):
        self.asset_id = asset_id
        super().__init__(f"unknown asset id: {asset_id!r}")


class UnknownCategoryIdError(KbError):
    def __init__(self, category_id: str):
        self.category_id = category_id
        super().__init__(f"unknown category id: {category_id!r}")


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "error")

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class AssetCategory:
    id: str
    display_name: str
    description: str = ""


@dataclass(frozen=True)
class Asset:
    id: str
    name: str
    category_id: str
    description: str = ""
    stencil_hint: str | None = None


@dataclass(frozen=True)
class Threat:
    id: str
    title: str
    category: str
    description: str
    asset_ids: tuple[str, ...]
    impacted_objectives: tuple[SecurityObjective, ...]


@dataclass(frozen=True)
class KnowledgeBase:
    schema_version: str
    categories: tuple[AssetCategory, ...]
    assets: tuple[Asset, ...]
    threats: tuple[Threat, ...]
    provenance: str = ""
    _asset_index: dict = field(default_factory=dict, repr=False, compare=False)
    _category_index: dict = field(default_factory=dict, repr=False, compare=False)
    _threat_index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._asset_index.update({a.id: a for a in self.assets})
        self._category_index.update({c.id: c for c in self.categories})
        self._threat_index.update({t.id: t for t in self.threats})

    def asset(self, asset_id: str) -> Asset:
        try:
            return self._asset_index[asset_id]
        except KeyError:
            raise UnknownAssetIdError(asset_id) from None

    def has_asset(self, asset_id: str) -> bool:
        return asset_id in self._asset_index

    def threat(self, threat_id: str) -> Threat:
        return self._threat_index[threat_id]

    def has_threat(self, threat_id: str) -> bool:
        return threat_id in self._threat_index

    def threats_for_asset(self, asset_id: str) -> list[Threat]:
        """All threats referencing the asset, in KB declaration order."""
        if asset_id not in self._asset_index:
            raise UnknownAssetIdError(asset_id)
        return [t for t in self.threats if asset_id in t.asset_ids]

    def assets_by_category(self, category_id: str) -> list[Asset]:
        """All assets in the category, in KB declaration order."""
        if category_id not in self._category_index:
            raise UnknownCategoryIdError(category_id)
        return [a for a in self.assets if a.category_id == category_id]


def _is_token(value) -> bool:
    return isinstance(value, str) and bool(_TOKEN_RE.match(value))


def validate_kb(document) -> ValidationReport:
    """Validate a parsed-but-unchecked KB document.

    Returns findings as data; an error-free report means load_kb would accept
    the same document.
    """
    findings: list[Finding] = []

    def err(path, msg):
        findings.append(Finding("error", path, msg))

    def warn(path, msg):
        findings.append(Finding("warning", path, msg))

    if not isinstance(document, dict):
        err("$", "document root must be an object")
        return ValidationReport(tuple(findings))

    for key in document:
        if key not in _KNOWN_TOP_KEYS:
            warn(f"$.{key}", "unknown field ignored")

    version = document.get("schema_version")
    if not isinstance(version, str):
        err("$.schema_version", "missing or non-string schema_version")
    elif version not in SUPPORTED_SCHEMA_VERSIONS:
        err(
            "$.schema_version",
            f"unsupported schema version {version!r}; supported: {', '.join(SUPPORTED_SCHEMA_VERSIONS)}",
        )

    provenance = document.get("provenance", "")
    if not isinstance(provenance, str):
        err("$.provenance", "provenance must be a string")

    categories = document.get("categories")
    if not isinstance(categories, list):
        err("$.categories", "missing or non-list categories")
        categories = []
    assets = document.get("assets")
    if not isinstance(assets, list):
        err("$.assets", "missing or non-list assets")
        assets = []
    threats = document.get("threats")
    if not isinstance(threats, list):
        err("$.threats", "missing or non-list threats")
        threats = []

    category_ids: dict[str, int] = {}
    for i, cat in enumerate(categories):
        path = f"$.categories[{i}]"
        if not isinstance(cat, dict):
            err(path, "category must be an object")
            continue
        for key in cat:
            if key not in _KNOWN_CATEGORY_KEYS:
                warn(f"{path}.{key}", "unknown field ignored")
        cid = cat.get("id")
        if not _is_token(cid):
            err(f"{path}.id", f"category id must match [a-z0-9_]+, got {cid!r}")
        elif cid in category_ids:
            err(
                f"{path}.id",
                f"duplicate category id {cid!r} (first declared at $.categories[{category_ids[cid]}])",
            )
        else:
            category_ids[cid] = i
        if not isinstance(cat.get("display_name"), str) or not cat.get("display_name"):
            err(f"{path}.display_name", "missing or empty display_name")

    asset_ids: dict[str, int] = {}
    for i, asset in enumerate(assets):
        path = f"$.assets[{i}]"
        if not isinstance(asset, dict):
            err(path, "asset must be an object")
            continue
        for key in asset:
            if key not in _KNOWN_ASSET_KEYS:
                warn(f"{path}.{key}", "unknown field ignored")
        aid = asset.get("id")
        if not _is_token(aid):
            err(f"{path}.id", f"asset id must match [a-z0-9_]+, got {aid!r}")
        elif aid in asset_ids:
            err(
                f"{path}.id",
                f"duplicate asset id {aid!r} (first declared at $.assets[{asset_ids[aid]}])",
            )
        else:
            asset_ids[aid] = i
        if not isinstance(asset.get("name"), str) or not asset.get("name"):
            err(f"{path}.name", "missing or empty name")
        cid = asset.get("category_id")
        if not _is_token(cid):
            err(f"{path}.category_id", f"category_id must be a token, got {cid!r}")
        elif cid not in category_ids:
            err(f"{path}.category_id", f"references undeclared category {cid!r}")

    threat_ids: dict[str, int] = {}
    for i, threat in enumerate(threats):
        path = f"$.threats[{i}]"
        if not isinstance(threat, dict):
            err(path, "threat must be an object")
            continue
        for key in threat:
            if key not in _KNOWN_THREAT_KEYS:
                warn(f"{path}.{key}", "unknown field ignored")
        tid = threat.get("id")
        if not _is_token(tid):
            err(f"{path}.id", f"threat id must match [a-z0-9_]+, got {tid!r}")
        elif tid in threat_ids:
            err(
                f"{path}.id",
                f"duplicate threat id {tid!r} (first declared at $.threats[{threat_ids[tid]}])",
            )
        else:
            threat_ids[tid] = i
        if not isinstance(threat.get("title"), str) or not threat.get("title"):
            err(f"{path}.title", "missing or empty title")
        refs = threat.get("asset_ids")
        if not isinstance(refs, list) or not refs:
            err(f"{path}.asset_ids", "asset_ids must be a nonempty list")
        else:
            for j, ref in enumerate(refs):
                if not _is_token(ref):
                    err(f"{path}.asset_ids[{j}]", f"asset ref must be a token, got {ref!r}")
                elif ref not in asset_ids:
                    err(
                        f"{path}.asset_ids[{j}]",
                        f"threat {tid!r} references unknown asset {ref!r}",
                    )
        objectives = threat.get("impacted_objectives")
        if not isinstance(objectives, list) or not objectives:
            err(f"{path}.impacted_objectives", "impacted_objectives must be a nonempty list")
        else:
            for j, obj in enumerate(objectives):
                if obj not in OBJECTIVE_TOKENS:
                    err(
                        f"{path}.impacted_objectives[{j}]",
                        f"unknown objective {obj!r}; valid: {', '.join(OBJECTIVE_TOKENS)}",
                    )

    return ValidationReport(tuple(findings))


def load_kb(source: Union[bytes, str, IO[bytes]]) -> KnowledgeBase:
    """Load and validate a KB document from bytes, text, or a binary stream.

    Never returns a partially valid KB: any validation error raises.
    """
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = source
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocumentError(f"input is not UTF-8: {exc}") from exc
    if not data.strip():
        raise MalformedDocumentError("empty document")
    try:
        document = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"input is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise MalformedDocumentError("document root must be a JSON object")

    version = document.get("schema_version")
    if isinstance(version, str) and version not in SUPPORTED_SCHEMA_VERSIONS:
        raise SchemaVersionError(
            f"unsupported schema version {version!r}; supported: {', '.join(SUPPORTED_SCHEMA_VERSIONS)}"
        )

    report = validate_kb(document)
    if not report.ok:
        raise KbValidationError(report)

    categories = tuple(
        AssetCategory(
            id=c["id"],
            display_name=c["display_name"],
            description=c.get("description", ""),
        )
        for c in document["categories"]
    )
    assets = tuple(
        Asset(
            id=a["id"],
            name=a["name"],
            category_id=a["category_id"],
            description=a.get("description", ""),
            stencil_hint=a.get("stencil_hint"),
        )
        for a in document["assets"]
    )
    threats = tuple(
        Threat(
            id=t["id"],
            title=t["title"],
            category=t.get("category", ""),
            description=t.get("description", ""),
            asset_ids=tuple(t["asset_ids"]),
            impacted_objectives=tuple(SecurityObjective(o) for o in t["impacted_objectives"]),
        )
        for t in document["threats"]
    )
    return KnowledgeBase(
        schema_version=document["schema_version"],
        categories=categories,
        assets=assets,
        threats=threats,
        provenance=document.get("provenance", ""),
    )


def parse_objectives(tokens) -> set[SecurityObjective]:
    """Turn objective token strings into the enum set; unknown tokens raise ValueError."""
    result = set()
    for token in tokens:
        token = token.strip()
        if not token:
            continue
        try:
            result.add(SecurityObjective(token))
        except ValueError:
            raise ValueError(
                f"unknown objective {token!r}; valid objectives: {', '.join(OBJECTIVE_TOKENS)}"
            ) from None
    return result
