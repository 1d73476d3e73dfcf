/**
 * Payload types mirroring the detection service's HTTP/JSON contract.
 * The UI never computes a prediction itself; every number rendered
 * originates from one of these responses.
 */

export interface UploadResponse {
  table_id: string;
  name: string;
  headers: string[];
  n_rows: number;
  n_columns: number;
}

export interface RankedEntry {
  type: string;
  confidence: number;
}

export interface StageTrace {
  stage: 'header' | 'lookup' | 'classifier';
  side: 'global' | 'local';
  scores: Record<string, number>;
}

export interface ColumnPrediction {
  column_index: number;
  header: string;
  ranked: RankedEntry[];
  abstained: boolean;
  stages: StageTrace[];
}

export interface PredictionDoc {
  columns: ColumnPrediction[];
  ontology_version: number;
  model_revision: string;
}

export interface PredictionsResponse {
  table_id: string;
  headers: string[];
  prediction: PredictionDoc;
  sample_rows: string[][];
}

export type FeedbackKind =
  | 'explicit_correction'
  | 'explicit_approval'
  | 'implicit_approval';

export interface FeedbackEventBody {
  event_id: string;
  table_id: string;
  column_index: number;
  predicted_type: string;
  asserted_type: string;
  kind: FeedbackKind;
  timestamp: number;
}

export interface LfSummary {
  lf_id: string;
  type_id: string;
  provenance: string;
  body: { kind: string } & Record<string, unknown>;
}

export interface AdaptationReport {
  event_id: string;
  new_lfs: LfSummary[];
  n_generated: number;
  retrained: boolean;
  weight_updates: Record<string, number>;
}

export interface WeightEntry {
  count: number;
  w_local: number;
}

export interface StateSummary {
  tenant_id: string;
  weights: Record<string, WeightEntry>;
  prior_strength: number;
  labeling_functions: LfSummary[];
  example_counts: Record<string, number>;
  user_types: string[];
  n_events: number;
  abstain_threshold: number;
  stage_gate: number;
  ontology_version: number;
  model_revision: string;
}

export interface OntologyType {
  id: string;
  canonical_name: string;
  synonyms: string[];
  parent_id: string | null;
  source: 'builtin' | 'user';
}

export interface OntologySummary {
  version: number;
  types: OntologyType[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: Record<string, unknown>;
}
