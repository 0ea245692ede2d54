"""Stencil library generation: one palette shape per KB asset, carrying the
machine-readable annotation that the analysis pipeline extracts."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .kb import KnowledgeBase

DEFAULT_ANNOTATION_KEY = "tfai_asset"

STENCIL_WIDTH = 160
STENCIL_HEIGHT = 60

# per-category fill colors, cycled in category declaration order
_PALETTE = (
    ("#dae8fc", "#6c8ebf"),
    ("#d5e8d4", "#82b366"),
    ("#ffe6cc", "#d79b00"),
    ("#fff2cc", "#d6b656"),
    ("#f8cecc", "#b85450"),
    ("#e1d5e7", "#9673a6"),
)


@dataclass(frozen=True)
class StencilEntry:
    asset_id: str
    display_title: str
    category_id: str
    embedded_annotations: dict[str, str]
    width: int
    height: int
    style: str


def _category_style(index: int, hint: str | None) -> str:
    fill, stroke = _PALETTE[index % len(_PALETTE)]
    style = f"rounded=1;whiteSpace=wrap;html=1;fillColor={fill};strokeColor={stroke};"
    if hint:
        style += hint if hint.endswith(";") else hint + ";"
    return style


def build_stencil_entries(
    kb: KnowledgeBase, annotation_key: str = DEFAULT_ANNOTATION_KEY
) -> list[StencilEntry]:
    """One entry per asset, grouped by category then KB declaration order."""
    entries = []
    for ci, category in enumerate(kb.categories):
        for asset in kb.assets_by_category(category.id):
            entries.append(
                StencilEntry(
                    asset_id=asset.id,
                    display_title=asset.name,
                    category_id=category.id,
                    embedded_annotations={annotation_key: asset.id},
                    width=STENCIL_WIDTH,
                    height=STENCIL_HEIGHT,
                    style=_category_style(ci, asset.stencil_hint),
                )
            )
    return entries


def stencil_shape_xml(entry: StencilEntry) -> str:
    """mxGraphModel fragment for one stencil, with the annotation pre-attached
    via the editor's object-wrapper mechanism."""
    model = ET.Element("mxGraphModel")
    root = ET.SubElement(model, "root")
    ET.SubElement(root, "mxCell", id="0")
    ET.SubElement(root, "mxCell", id="1", parent="0")
    wrapper = ET.SubElement(root, "object", id="2", label=entry.display_title)
    for key, value in entry.embedded_annotations.items():
        wrapper.set(key, value)
    cell = ET.SubElement(wrapper, "mxCell", style=entry.style, vertex="1", parent="1")
    ET.SubElement(
        cell,
        "mxGeometry",
        x="0",
        y="0",
        width=str(entry.width),
        height=str(entry.height),
        **{"as": "geometry"},
    )
    return ET.tostring(model, encoding="unicode")


def generate_stencil_library(
    kb: KnowledgeBase, annotation_key: str = DEFAULT_ANNOTATION_KEY
) -> bytes:
    """Emit a diagrams.net shape library (mxlibrary root wrapping a JSON array)."""
    entries = build_stencil_entries(kb, annotation_key)
    payload = [
        {
            "xml": stencil_shape_xml(entry),
            "w": entry.width,
            "h": entry.height,
            "title": entry.display_title,
        }
        for entry in entries
    ]
    library = ET.Element("mxlibrary")
    library.text = json.dumps(payload, ensure_ascii=False, indent=1)
    return ET.tostring(library, encoding="utf-8")


def parse_stencil_library(data: bytes) -> list[dict]:
    """Read back a generated library; used by tests and the UI round trip."""
    text = data.decode("utf-8")
    root = ET.fromstring(text)
    if root.tag != "mxlibrary":
        raise ValueError(f"not a stencil library: root <{root.tag}>")
    return json.loads(root.text or "[]")
