// Renders the interactive report: findings grouped per asset, filtered
// client-side by the current objective selection. Pure string templating so
// the view is trivially testable.

import { Partitioned, repartitionReport } from "./partition.js";
import { Finding, ThreatReport } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function findingItem(finding: Finding, kind: "primary" | "secondary"): string {
  const objectives = finding.impacted_objectives.join(", ");
  const overlap = finding.objective_overlap.join(", ");
  return `
    <details class="finding finding-${kind}" data-threat-id="${escapeHtml(finding.threat_id)}">
      <summary>
        <span class="finding-title">${escapeHtml(finding.title)}</span>
        <span class="finding-category">${escapeHtml(finding.category)}</span>
      </summary>
      <p>${escapeHtml(finding.description)}</p>
      <p class="finding-objectives">Impacted objectives: ${escapeHtml(objectives)}</p>
      ${overlap ? `<p class="finding-overlap">Matches selection: ${escapeHtml(overlap)}</p>` : ""}
    </details>`;
}

function assetSection(report: ThreatReport, partitioned: Partitioned, assetId: string): string {
  const entry = report.asset_instances.entries.find((e) => e.asset_id === assetId);
  if (!entry) {
    return "";
  }
  const primary = partitioned.primary.filter((f) => f.matched_assets.includes(assetId));
  const secondary = partitioned.secondary.filter((f) => f.matched_assets.includes(assetId));
  const occurrences = entry.occurrences
    .map((o) => `${escapeHtml(o.element_id)} on ${escapeHtml(o.page)}`)
    .join("; ");
  return `
  <section class="asset-section" data-asset-id="${escapeHtml(assetId)}">
    <h3>${escapeHtml(entry.name)} <code>${escapeHtml(entry.asset_id)}</code></h3>
    <p class="asset-occurrences">Placed at: ${occurrences}</p>
    <h4>Primary threats (${primary.length})</h4>
    ${primary.length ? primary.map((f) => findingItem(f, "primary")).join("\n") : "<p>None for the selected objectives.</p>"}
    <h4>Other threats (${secondary.length})</h4>
    ${secondary.length ? secondary.map((f) => findingItem(f, "secondary")).join("\n") : "<p>None.</p>"}
  </section>`;
}

export interface ReportViewOptions {
  objectives: string[];
  stale: boolean;
}

export function renderReportView(report: ThreatReport, options: ReportViewOptions): string {
  const partitioned = repartitionReport(report, options.objectives);
  const sections = report.asset_instances.entries
    .map((entry) => assetSection(report, partitioned, entry.asset_id))
    .join("\n");
  const warnings = report.warnings.length
    ? `<ul class="report-warnings">${report.warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("")}</ul>`
    : "";
  const staleBanner = options.stale
    ? '<div class="stale-banner">The diagram changed after this analysis; re-run it for fresh results.</div>'
    : "";
  const unknowns = report.asset_instances.unknown_annotations.length;
  return `
  <div class="report-view">
    ${staleBanner}
    <p class="report-summary">
      ${report.asset_instances.entries.length} assets,
      ${partitioned.primary.length} primary and ${partitioned.secondary.length} secondary findings
      for objectives: ${escapeHtml(options.objectives.join(", ") || "none")}.
      ${unknowns ? `${unknowns} unrecognized annotation(s).` : ""}
    </p>
    ${warnings}
    ${sections || "<p>No annotated assets in the analyzed diagram.</p>"}
  </div>`;
}

export function countAssetSections(htmlText: string): number {
  return (htmlText.match(/class="asset-section"/g) ?? []).length;
}
