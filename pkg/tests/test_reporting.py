import json
from html.parser import HTMLParser

import pytest

from tfai import analyze
from tfai.engine import canonical_json, report_to_dict
from tfai.kb import SecurityObjective
from tfai.reporting import RenderOptions, render

from conftest import build_diagram_xml

CI = {SecurityObjective.CONFIDENTIALITY, SecurityObjective.INTEGRITY}


class TableRowCounter(HTMLParser):
    """Counts body rows per table class in the rendered report."""

    def __init__(self):
        super().__init__()
        self.rows = {}
        self._current = None
        self._in_tbody = False

    def handle_starttag(self, tag, attrs):
        attrs = dict(attrs)
        if tag == "table":
            self._current = attrs.get("class", "")
            self.rows.setdefault(self._current, 0)
        elif tag == "tbody":
            self._in_tbody = True
        elif tag == "tr" and self._in_tbody and self._current is not None:
            self.rows[self._current] += 1

    def handle_endtag(self, tag):
        if tag == "tbody":
            self._in_tbody = False
        elif tag == "table":
            self._current = None


@pytest.fixture(scope="module")
def golden_report(seed_kb, healthcare_diagram):
    return analyze(healthcare_diagram, CI, seed_kb)


@pytest.fixture(scope="module")
def empty_report(seed_kb):
    return analyze(build_diagram_xml([]), CI, seed_kb)


def test_invalid_format_rejected():
    with pytest.raises(ValueError):
        RenderOptions(format="pdf")


def test_json_rendering_is_canonical(golden_report):
    assert render(golden_report, RenderOptions(format="json")) == canonical_json(golden_report)


def test_json_round_trip(golden_report):
    rendered = render(golden_report, RenderOptions(format="json"))
    assert json.loads(rendered) == report_to_dict(golden_report)


def test_empty_report_markdown(empty_report):
    text = render(empty_report, RenderOptions(format="markdown")).decode()
    assert "Assets identified: 0; primary findings: 0; secondary findings: 0" in text
    assert "No annotated assets were found" in text
    assert "No findings match the selected objectives" in text


def test_markdown_faithfulness(golden_report):
    text = render(golden_report, RenderOptions(format="markdown")).decode()
    for finding in golden_report.primary_findings + golden_report.secondary_findings:
        assert text.count(f"| {finding.threat.id} |") == 1
    # counts in prose equal list lengths
    assert f"primary findings: {len(golden_report.primary_findings)}" in text
    assert f"secondary findings: {len(golden_report.secondary_findings)}" in text


def test_markdown_secondary_can_be_excluded(golden_report):
    text = render(
        golden_report, RenderOptions(format="markdown", include_secondary=False)
    ).decode()
    assert "## Secondary findings" not in text
    for finding in golden_report.secondary_findings:
        assert f"| {finding.threat.id} |" not in text


def test_html_primary_row_count_matches_stats(golden_report):
    html_text = render(golden_report, RenderOptions(format="html")).decode()
    counter = TableRowCounter()
    counter.feed(html_text)
    assert counter.rows["primary"] == golden_report.stats["threat_count_primary"]
    assert counter.rows["secondary"] == golden_report.stats["threat_count_secondary"]


def test_html_is_self_contained(golden_report):
    html_text = render(golden_report, RenderOptions(format="html")).decode()
    assert html_text.startswith("<!DOCTYPE html>")
    assert "<style>" in html_text
    for marker in ("http://", "https://", "src=", "link rel"):
        assert marker not in html_text


def test_html_escapes_content(seed_kb):
    report = analyze(build_diagram_xml(["<script>alert(1)</script>"]), CI, seed_kb)
    html_text = render(report, RenderOptions(format="html")).decode()
    assert "<script>" not in html_text


def test_warnings_section(seed_kb):
    report = analyze(build_diagram_xml(["mystery_asset"]), CI, seed_kb)
    md = render(report, RenderOptions(format="markdown")).decode()
    assert "mystery_asset" in md
    html_text = render(report, RenderOptions(format="html")).decode()
    assert "mystery_asset" in html_text
