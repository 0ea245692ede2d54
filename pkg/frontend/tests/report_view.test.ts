import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { countAssetSections, renderReportView } from "../src/report_view.js";
import { ALL_OBJECTIVES, ThreatReport } from "../src/types.js";

const FIXTURES = join(__dirname, "fixtures");

function loadReport(name: string): ThreatReport {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as ThreatReport;
}

const threeAssets = loadReport("three_asset_report.json");
const golden = loadReport("golden_report.json");

describe("renderReportView", () => {
  it("renders one section per identified asset", () => {
    const html = renderReportView(threeAssets, {
      objectives: threeAssets.selected_objectives,
      stale: false,
    });
    expect(countAssetSections(html)).toBe(3);
    for (const id of ["training_data", "validation_data", "test_data"]) {
      expect(html).toContain(`data-asset-id="${id}"`);
    }
  });

  it("with all objectives selected no finding is secondary", () => {
    const html = renderReportView(golden, { objectives: [...ALL_OBJECTIVES], stale: false });
    expect(html).not.toContain("finding-secondary");
    expect(html).toContain("finding-primary");
  });

  it("with no objectives selected no finding is primary", () => {
    const html = renderReportView(golden, { objectives: [], stale: false });
    expect(html).not.toContain("finding-primary");
    expect(html).toContain("finding-secondary");
  });

  it("shows the stale banner only when the diagram changed", () => {
    const fresh = renderReportView(golden, { objectives: [], stale: false });
    const stale = renderReportView(golden, { objectives: [], stale: true });
    expect(fresh).not.toContain("stale-banner");
    expect(stale).toContain("stale-banner");
  });

  it("lists report warnings and escapes markup in them", () => {
    const withWarning: ThreatReport = {
      ...golden,
      warnings: ['unknown annotation <script>"x"</script>'],
    };
    const html = renderReportView(withWarning, { objectives: [], stale: false });
    expect(html).toContain("report-warnings");
    expect(html).toContain("&lt;script&gt;&quot;x&quot;&lt;/script&gt;");
    expect(html).not.toContain("<script>");
  });

  it("every finding of the report appears in the rendered view", () => {
    const html = renderReportView(golden, {
      objectives: golden.selected_objectives,
      stale: false,
    });
    const all = [...golden.primary_findings, ...golden.secondary_findings];
    for (const finding of all) {
      expect(html).toContain(`data-threat-id="${finding.threat_id}"`);
    }
  });
});
