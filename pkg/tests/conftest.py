"""Shared fixtures and independent helpers.

The encoder here intentionally mirrors the editor's save path (URL-encode,
raw deflate, base64) with the compression side of zlib, so round trips
exercise the parser's decode path against an independently written encoder.
"""

from __future__ import annotations

import base64
import json
import random
import xml.etree.ElementTree as ET
import zlib
from pathlib import Path
from urllib.parse import quote
from xml.sax.saxutils import escape, quoteattr

import pytest

from tfai import load_kb
from tfai.resources import (
    example_baseline_bytes,
    example_diagram_bytes,
    seed_kb_bytes,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def seed_kb_raw() -> bytes:
    return seed_kb_bytes()


@pytest.fixture(scope="session")
def seed_kb(seed_kb_raw):
    return load_kb(seed_kb_raw)


@pytest.fixture(scope="session")
def seed_kb_doc(seed_kb_raw) -> dict:
    return json.loads(seed_kb_raw)


@pytest.fixture(scope="session")
def healthcare_diagram() -> bytes:
    return example_diagram_bytes()


@pytest.fixture(scope="session")
def baseline_raw() -> bytes:
    return example_baseline_bytes()


@pytest.fixture(scope="session")
def golden_report_bytes() -> bytes:
    return (FIXTURES / "golden_report.json").read_bytes()


def encode_page_payload(xml_text: str) -> str:
    """Editor-style page encoding: URL-encode, raw deflate, base64."""
    url_encoded = quote(xml_text, safe="!*'()~")
    compressor = zlib.compressobj(level=9, wbits=-15)
    deflated = compressor.compress(url_encoded.encode("utf-8")) + compressor.flush()
    return base64.b64encode(deflated).decode("ascii")


def compress_mxfile(data: bytes) -> bytes:
    """Re-save an uncompressed mxfile with every page payload encoded."""
    root = ET.fromstring(data)
    assert root.tag == "mxfile"
    for diagram in root.findall("diagram"):
        inline = diagram.find("mxGraphModel")
        assert inline is not None, "fixture page is already encoded"
        diagram.remove(inline)
        diagram.text = encode_page_payload(ET.tostring(inline, encoding="unicode"))
    return ET.tostring(root, encoding="utf-8")


def build_diagram_xml(
    annotated: list[str],
    plain: int = 0,
    key: str = "tfai_asset",
    page_name: str = "Page-1",
) -> bytes:
    """Compose an mxfile with one annotated element per value plus plain boxes."""
    parts = [
        "<mxfile>",
        f"<diagram name={quoteattr(page_name)}><mxGraphModel><root>",
        '<mxCell id="0"/><mxCell id="1" parent="0"/>',
    ]
    for i, value in enumerate(annotated):
        parts.append(
            f'<object id="a{i}" label={quoteattr("Element " + str(i))} '
            f"{escape(key)}={quoteattr(value)}>"
            '<mxCell style="rounded=1" vertex="1" parent="1">'
            f'<mxGeometry x="{40 * i}" y="40" width="120" height="60" as="geometry"/>'
            "</mxCell></object>"
        )
    for i in range(plain):
        parts.append(
            f'<mxCell id="p{i}" value="plain" style="rounded=0" vertex="1" parent="1">'
            f'<mxGeometry x="{40 * i}" y="200" width="120" height="60" as="geometry"/></mxCell>'
        )
    parts.append("</root></mxGraphModel></diagram></mxfile>")
    return "".join(parts).encode("utf-8")


def random_kb_document(rng: random.Random, max_assets: int = 50, max_threats: int = 100) -> dict:
    """A structurally valid random KB document."""
    n_categories = rng.randint(1, 6)
    categories = [
        {"id": f"cat{i}", "display_name": f"Category {i}"} for i in range(n_categories)
    ]
    n_assets = rng.randint(1, max_assets)
    assets = [
        {
            "id": f"asset{i}",
            "name": f"Asset {i}",
            "category_id": f"cat{rng.randrange(n_categories)}",
        }
        for i in range(n_assets)
    ]
    objectives = [
        "confidentiality",
        "integrity",
        "availability",
        "authorization",
        "non_repudiation",
    ]
    n_threats = rng.randint(0, max_threats)
    threats = []
    for i in range(n_threats):
        refs = rng.sample(range(n_assets), k=rng.randint(1, min(4, n_assets)))
        impacted = rng.sample(objectives, k=rng.randint(1, 5))
        threats.append(
            {
                "id": f"threat{i}",
                "title": f"Threat {i}",
                "category": rng.choice(["tampering", "disclosure", "abuse"]),
                "description": "",
                "asset_ids": [f"asset{j}" for j in refs],
                "impacted_objectives": impacted,
            }
        )
    return {
        "schema_version": "1",
        "provenance": "generated",
        "categories": categories,
        "assets": assets,
        "threats": threats,
    }
