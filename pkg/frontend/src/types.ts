// Wire types for the /api/analyze canonical JSON report.

export const ALL_OBJECTIVES = [
  "confidentiality",
  "integrity",
  "availability",
  "authorization",
  "non_repudiation",
] as const;

export type Objective = (typeof ALL_OBJECTIVES)[number];

export interface Finding {
  threat_id: string;
  title: string;
  category: string;
  description: string;
  matched_assets: string[];
  impacted_objectives: string[];
  objective_overlap: string[];
}

export interface AssetEntry {
  asset_id: string;
  name: string;
  category_id: string;
  occurrences: { page: string; element_id: string }[];
}

export interface UnknownAnnotation {
  page: string;
  element_id: string;
  value: string;
}

export interface ThreatReport {
  selected_objectives: string[];
  primary_findings: Finding[];
  secondary_findings: Finding[];
  asset_instances: {
    entries: AssetEntry[];
    unknown_annotations: UnknownAnnotation[];
  };
  warnings: string[];
  stats: {
    asset_count: number;
    threat_count_primary: number;
    threat_count_secondary: number;
  };
  kb_provenance: string;
  source_digest: string;
}

export function isObjective(value: string): value is Objective {
  return (ALL_OBJECTIVES as readonly string[]).includes(value);
}
