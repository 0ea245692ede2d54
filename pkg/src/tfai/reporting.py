"""Render a threat report for machines (canonical JSON) and humans
(CommonMark with pipe tables, or a self-contained printable HTML page)."""

from __future__ import annotations

import html
from dataclasses import dataclass

from .engine import ThreatFinding, ThreatReport, canonical_json

FORMATS = ("json", "markdown", "html")


@dataclass(frozen=True)
class RenderOptions:
    format: str = "json"
    include_secondary: bool = True
    title: str = "Threat Report"

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}; valid: {', '.join(FORMATS)}")


def render(report: ThreatReport, options: RenderOptions) -> bytes:
    if options.format == "json":
        return canonical_json(report)
    if options.format == "markdown":
        return _render_markdown(report, options).encode("utf-8")
    return _render_html(report, options).encode("utf-8")


def _finding_row(f: ThreatFinding) -> tuple[str, str, str, str, str]:
    return (
        f.threat.id,
        f.threat.title,
        f.threat.category,
        ", ".join(f.matched_assets),
        ", ".join(o.value for o in f.threat.impacted_objectives),
    )


_MD_HEADER = ("Threat ID", "Title", "Category", "Matched Assets", "Impacted Objectives")


def _md_table(findings) -> list[str]:
    lines = [
        "| " + " | ".join(_MD_HEADER) + " |",
        "| " + " | ".join("---" for _ in _MD_HEADER) + " |",
    ]
    for f in findings:
        cells = [c.replace("|", "\\|") for c in _finding_row(f)]
        lines.append("| " + " | ".join(cells) + " |")
    return lines


def _render_markdown(report: ThreatReport, options: RenderOptions) -> str:
    stats = report.stats
    lines = [f"# {options.title}", ""]
    lines.append(f"- Selected objectives: {', '.join(o.value for o in report.selected_objectives) or 'none'}")
    lines.append(f"- Knowledge base: {report.kb_provenance or 'unspecified'}")
    lines.append(f"- Source digest: `{report.source_digest}`")
    lines.append(
        f"- Assets identified: {stats['asset_count']}; "
        f"primary findings: {stats['threat_count_primary']}; "
        f"secondary findings: {stats['threat_count_secondary']}"
    )
    lines.append("")

    lines.append("## Assets")
    lines.append("")
    if report.asset_instances.entries:
        for entry in report.asset_instances.entries:
            occ = "; ".join(f"{o.element_id} on {o.page_name}" for o in entry.occurrences)
            lines.append(f"- **{entry.asset.name}** (`{entry.asset.id}`, category `{entry.asset.category_id}`): {occ}")
    else:
        lines.append("No annotated assets were found in the diagram.")
    lines.append("")

    lines.append("## Primary findings")
    lines.append("")
    if report.primary_findings:
        lines.extend(_md_table(report.primary_findings))
    else:
        lines.append("No findings match the selected objectives.")
    lines.append("")

    if options.include_secondary:
        lines.append("## Secondary findings")
        lines.append("")
        if report.secondary_findings:
            lines.extend(_md_table(report.secondary_findings))
        else:
            lines.append("No further findings outside the selected objectives.")
        lines.append("")

    lines.append("## Warnings")
    lines.append("")
    if report.warnings:
        for warning in report.warnings:
            lines.append(f"- {warning}")
    else:
        lines.append("None.")
    lines.append("")
    return "\n".join(lines)


_HTML_STYLE = """
body { font-family: -apple-system, 'Segoe UI', Helvetica, Arial, sans-serif;
       margin: 2rem auto; max-width: 60rem; color: #1c2733; }
h1 { border-bottom: 2px solid #2c6e8f; padding-bottom: .3rem; }
table { border-collapse: collapse; width: 100%; margin: .5rem 0 1.5rem; }
th, td { border: 1px solid #c5d0d8; padding: .4rem .6rem; text-align: left;
         font-size: .9rem; vertical-align: top; }
th { background: #eef4f7; }
.meta li { margin: .15rem 0; }
.warn { color: #8a5a00; }
@media print { body { margin: 0; max-width: none; } }
"""


def _html_table(findings, css_class: str) -> list[str]:
    out = [f'<table class="{css_class}">', "<thead><tr>"]
    out.extend(f"<th>{html.escape(h)}</th>" for h in _MD_HEADER)
    out.append("</tr></thead>")
    out.append("<tbody>")
    for f in findings:
        cells = "".join(f"<td>{html.escape(c)}</td>" for c in _finding_row(f))
        out.append(f"<tr>{cells}</tr>")
    out.append("</tbody></table>")
    return out


def _render_html(report: ThreatReport, options: RenderOptions) -> str:
    stats = report.stats
    esc = html.escape
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en"><head><meta charset="utf-8">',
        f"<title>{esc(options.title)}</title>",
        f"<style>{_HTML_STYLE}</style>",
        "</head><body>",
        f"<h1>{esc(options.title)}</h1>",
        '<ul class="meta">',
        f"<li>Selected objectives: {esc(', '.join(o.value for o in report.selected_objectives) or 'none')}</li>",
        f"<li>Knowledge base: {esc(report.kb_provenance or 'unspecified')}</li>",
        f"<li>Source digest: <code>{esc(report.source_digest)}</code></li>",
        f"<li>Assets identified: {stats['asset_count']}; "
        f"primary findings: {stats['threat_count_primary']}; "
        f"secondary findings: {stats['threat_count_secondary']}</li>",
        "</ul>",
        "<h2>Assets</h2>",
    ]
    if report.asset_instances.entries:
        parts.append("<ul>")
        for entry in report.asset_instances.entries:
            occ = "; ".join(f"{o.element_id} on {o.page_name}" for o in entry.occurrences)
            parts.append(
                f"<li><strong>{esc(entry.asset.name)}</strong> "
                f"(<code>{esc(entry.asset.id)}</code>, category <code>{esc(entry.asset.category_id)}</code>): {esc(occ)}</li>"
            )
        parts.append("</ul>")
    else:
        parts.append("<p>No annotated assets were found in the diagram.</p>")

    parts.append("<h2>Primary findings</h2>")
    if report.primary_findings:
        parts.extend(_html_table(report.primary_findings, "primary"))
    else:
        parts.append("<p>No findings match the selected objectives.</p>")

    if options.include_secondary:
        parts.append("<h2>Secondary findings</h2>")
        if report.secondary_findings:
            parts.extend(_html_table(report.secondary_findings, "secondary"))
        else:
            parts.append("<p>No further findings outside the selected objectives.</p>")

    parts.append("<h2>Warnings</h2>")
    if report.warnings:
        parts.append('<ul class="warn">')
        parts.extend(f"<li>{esc(w)}</li>" for w in report.warnings)
        parts.append("</ul>")
    else:
        parts.append("<p>None.</p>")
    parts.append("</body></html>")
    return "\n".join(parts)
