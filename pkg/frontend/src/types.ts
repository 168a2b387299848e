/** Wire types of the annotation service. Field names mirror the JSON exactly. */

export interface ExampleSentence {
  text: string;
  language: string;
  source_note: string | null;
}

export interface TaxonomyType {
  id: string;
  name: string;
  group: string;
  definition: string;
  examples: ExampleSentence[];
  notes: string;
}

export interface TaxonomyGroup {
  id: string;
  name: string;
  description: string;
  color: string | null;
}

export interface TierBand {
  name: string;
  label: string;
  min_percent: number;
  stated_min: number;
  stated_max: number | null;
}

/** Client-side snapshot of the server taxonomy, pinned to one version. */
export interface TaxonomySnapshot {
  version: string;
  groups: TaxonomyGroup[];
  types: TaxonomyType[];
  tiers: TierBand[];
}

export interface UnitRecord {
  type_ids: string[];
  timestamp: string;
  note: string | null;
}

export interface UnitSummary {
  id: string;
  document_id: string;
  start: number;
  end: number;
  text: string;
  merged_from: string[] | null;
  record: UnitRecord | null;
}

export interface SavedAnnotation {
  taxonomy_version: string;
  unit_id: string;
  annotator_id: string;
  type_ids: string[];
  timestamp: string;
}

export interface StatsGroupRow {
  group: string;
  name: string;
  unit_count: number;
  percent: number;
}

export interface StatsTypeRow {
  type: string;
  name: string;
  group: string;
  count: number;
  percent: number;
  tier: string | null;
  boundary_flag: boolean;
}

export interface StatsReport {
  taxonomy_version: string;
  total_units: number;
  groups: StatsGroupRow[];
  types: StatsTypeRow[];
  boundary_flags: string[];
}

export interface AgreementReport {
  taxonomy_version: string;
  annotator_a: string;
  annotator_b: string;
  units_compared: number;
  per_type: Record<string, number | null>;
  observed_agreement: number;
  expected_agreement: number;
}

export interface MergedUnit {
  id: string;
  document_id: string;
  start: number;
  end: number;
  text: string;
  merged_from: string[];
}

export interface DocumentIn {
  id: string;
  text: string;
  title?: string;
  language?: string;
}
