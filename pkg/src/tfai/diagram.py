"""Parser for diagrams.net (draw.io) documents.

Accepts both uncompressed mxGraphModel payloads and the editor's default page
encoding (URL-encoded, deflate-compressed, base64-encoded text). Custom
attributes attached through the editor's object-wrapper mechanism are surfaced
as element annotations.
"""

from __future__ import annotations

import base64
import hashlib
import zlib
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from urllib.parse import unquote


class DiagramParseError(Exception):
    """Base class for diagram parsing failures; `code` names the error class."""

    code = "parse-error"


class NotXmlError(DiagramParseError):
    code = "not-xml"


class UnsupportedStructureError(DiagramParseError):
    code = "unsupported-structure"


class PayloadDecodeError(DiagramParseError):
    code = "payload-decode-failure"

    def __init__(self, stage: str, detail: str, page: str | None = None):
        self.stage = stage
        self.page = page
        where = f" (page {page!r})" if page else ""
        super().__init__(f"payload decode failed at {stage} stage{where}: {detail}")


@dataclass(frozen=True)
class Geometry:
    x: float = 0.0
    y: float = 0.0
    width: float = 0.0
    height: float = 0.0


@dataclass(frozen=True)
class DiagramElement:
    element_id: str
    label: str = ""
    annotations: dict[str, str] = field(default_factory=dict)
    geometry: Geometry | None = None


@dataclass(frozen=True)
class DiagramEdge:
    edge_id: str
    source_element_id: str | None = None
    target_element_id: str | None = None
    label: str | None = None
    dangling: bool = False


@dataclass(frozen=True)
class DiagramPage:
    name: str
    elements: tuple[DiagramElement, ...]
    edges: tuple[DiagramEdge, ...]


@dataclass(frozen=True)
class DiagramModel:
    pages: tuple[DiagramPage, ...]
    source_digest: str


def decode_page_payload(payload: str, page: str | None = None) -> str:
    """Decode the text content of a diagram page node to mxGraphModel XML.

    Payloads already containing markup pass through unchanged; otherwise the
    editor encoding is reversed: base64 decode, raw-deflate inflate, URL decode.
    """
    stripped = payload.strip()
    if stripped.startswith("<"):
        return payload
    try:
        raw = base64.b64decode(stripped, validate=True)
    except Exception as exc:
        raise PayloadDecodeError("base64", str(exc), page) from exc
    try:
        inflater = zlib.decompressobj(-15)
        inflated = inflater.decompress(raw) + inflater.flush()
    except zlib.error as exc:
        raise PayloadDecodeError("inflate", str(exc), page) from exc
    try:
        text = inflated.decode("utf-8")
        return unquote(text, errors="strict")
    except (UnicodeDecodeError, ValueError) as exc:
        raise PayloadDecodeError("url-decode", str(exc), page) from exc


def _parse_geometry(cell: ET.Element) -> Geometry | None:
    geo = cell.find("mxGeometry")
    if geo is None:
        return None

    def num(attr):
        try:
            return float(geo.get(attr, 0))
        except ValueError:
            return 0.0

    return Geometry(x=num("x"), y=num("y"), width=num("width"), height=num("height"))


_STRUCTURAL_IDS = {"0", "1"}


def _parse_graph_model(model_root: ET.Element, page_name: str) -> DiagramPage:
    root = model_root.find("root")
    if root is None:
        raise UnsupportedStructureError(
            f"page {page_name!r}: mxGraphModel has no <root> node"
        )
    elements: list[DiagramElement] = []
    edges: list[DiagramEdge] = []
    seen_ids: set[str] = set()

    for node in root:
        if node.tag in ("object", "UserObject"):
            cell = node.find("mxCell")
            node_id = node.get("id", "")
            label = node.get("label", "")
            annotations = {
                k: v for k, v in node.attrib.items() if k not in ("id", "label") and k
            }
            if cell is not None and cell.get("edge") == "1":
                edges.append(
                    DiagramEdge(
                        edge_id=node_id,
                        source_element_id=cell.get("source"),
                        target_element_id=cell.get("target"),
                        label=label or None,
                    )
                )
                continue
            if node_id in seen_ids:
                raise UnsupportedStructureError(
                    f"page {page_name!r}: duplicate element id {node_id!r}"
                )
            seen_ids.add(node_id)
            geometry = _parse_geometry(cell) if cell is not None else None
            elements.append(
                DiagramElement(
                    element_id=node_id,
                    label=label,
                    annotations=annotations,
                    geometry=geometry,
                )
            )
        elif node.tag == "mxCell":
            node_id = node.get("id", "")
            if node.get("edge") == "1":
                edges.append(
                    DiagramEdge(
                        edge_id=node_id,
                        source_element_id=node.get("source"),
                        target_element_id=node.get("target"),
                        label=node.get("value") or None,
                    )
                )
            elif node.get("vertex") == "1":
                if node_id in seen_ids:
                    raise UnsupportedStructureError(
                        f"page {page_name!r}: duplicate element id {node_id!r}"
                    )
                seen_ids.add(node_id)
                elements.append(
                    DiagramElement(
                        element_id=node_id,
                        label=node.get("value", ""),
                        annotations={},
                        geometry=_parse_geometry(node),
                    )
                )
            elif node_id not in _STRUCTURAL_IDS:
                # cells without vertex/edge markers other than the two
                # structural roots still count as plain elements
                if node_id in seen_ids:
                    raise UnsupportedStructureError(
                        f"page {page_name!r}: duplicate element id {node_id!r}"
                    )
                seen_ids.add(node_id)
                elements.append(
                    DiagramElement(element_id=node_id, label=node.get("value", ""))
                )

    element_ids = {e.element_id for e in elements}
    flagged = [
        DiagramEdge(
            edge_id=e.edge_id,
            source_element_id=e.source_element_id,
            target_element_id=e.target_element_id,
            label=e.label,
            dangling=(
                e.source_element_id not in element_ids
                or e.target_element_id not in element_ids
            ),
        )
        for e in edges
    ]
    return DiagramPage(name=page_name, elements=tuple(elements), edges=tuple(flagged))


def parse_diagram(data: bytes) -> DiagramModel:
    """Parse a diagrams.net document into a DiagramModel.

    The root may be an `mxfile` with one or more `diagram` pages (inline or
    encoded payloads) or a bare `mxGraphModel`.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    digest = "sha256:" + hashlib.sha256(data).hexdigest()
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise NotXmlError(f"input is not well-formed XML: {exc}") from exc

    if root.tag == "mxGraphModel":
        pages = (_parse_graph_model(root, "Page-1"),)
    elif root.tag == "mxfile":
        diagram_nodes = root.findall("diagram")
        if not diagram_nodes:
            raise UnsupportedStructureError("mxfile contains no diagram pages")
        page_list = []
        for i, node in enumerate(diagram_nodes):
            name = node.get("name") or f"Page-{i + 1}"
            inline = node.find("mxGraphModel")
            if inline is not None:
                page_list.append(_parse_graph_model(inline, name))
                continue
            payload = node.text or ""
            if not payload.strip():
                raise UnsupportedStructureError(f"page {name!r} has no payload")
            xml_text = decode_page_payload(payload, page=name)
            try:
                model_root = ET.fromstring(xml_text)
            except ET.ParseError as exc:
                raise PayloadDecodeError("xml-parse", str(exc), page=name) from exc
            if model_root.tag != "mxGraphModel":
                raise UnsupportedStructureError(
                    f"page {name!r}: decoded payload root is <{model_root.tag}>, expected <mxGraphModel>"
                )
            page_list.append(_parse_graph_model(model_root, name))
        pages = tuple(page_list)
    else:
        raise UnsupportedStructureError(
            f"unrecognized document root <{root.tag}>; expected <mxfile> or <mxGraphModel>"
        )

    return DiagramModel(pages=pages, source_digest=digest)


def extract_asset_annotations(
    model: DiagramModel, annotation_key: str
) -> list[tuple[str, str, str]]:
    """List (element_id, page_name, raw annotation value) for every element
    carrying the annotation key. Values are not validated here."""
    found = []
    for page in model.pages:
        for element in page.elements:
            if annotation_key in element.annotations:
                found.append((element.element_id, page.name, element.annotations[annotation_key]))
    return found
