// Client-side re-partitioning of a report's findings by objective selection.
// Must stay pointwise identical to the server's partitioning so toggling
// filters never requires a round trip (verified against server fixtures).

import { ALL_OBJECTIVES, Finding, ThreatReport } from "./types.js";

export interface Partitioned {
  primary: Finding[];
  secondary: Finding[];
}

const OBJECTIVE_RANK = new Map(ALL_OBJECTIVES.map((o, i) => [o as string, i]));

function sortedOverlap(impacted: string[], selected: Set<string>): string[] {
  return impacted
    .filter((o) => selected.has(o))
    .sort((a, b) => (OBJECTIVE_RANK.get(a) ?? 99) - (OBJECTIVE_RANK.get(b) ?? 99));
}

/** All findings of a report in the server's order (primary then secondary). */
export function allFindings(report: ThreatReport): Finding[] {
  return [...report.primary_findings, ...report.secondary_findings];
}

/**
 * Split findings into primary (objective overlap nonempty) and secondary.
 * Nothing is dropped; relative order is preserved within both lists and the
 * objective_overlap of each finding is recomputed for the new selection.
 */
export function partitionFindings(findings: Finding[], objectives: string[]): Partitioned {
  const selected = new Set(objectives);
  const primary: Finding[] = [];
  const secondary: Finding[] = [];
  for (const finding of findings) {
    const overlap = sortedOverlap(finding.impacted_objectives, selected);
    const tagged: Finding = { ...finding, objective_overlap: overlap };
    (overlap.length > 0 ? primary : secondary).push(tagged);
  }
  return { primary, secondary };
}

/** Re-partition a stored report for a new objective selection. */
export function repartitionReport(report: ThreatReport, objectives: string[]): Partitioned {
  return partitionFindings(allFindings(report), objectives);
}
