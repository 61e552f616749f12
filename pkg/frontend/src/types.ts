// Shapes shared by the draft editor, the service client, and the renderers.

export type TermType = "text" | "image_id";

export interface TermChip {
  type: TermType;
  value: string;
  weight: number;
  enabled: boolean;
}

export interface QueryDraft {
  chips: TermChip[];
  k: number;
}

export interface RequestTerm {
  type: TermType;
  value: string;
  weight: number;
}

export interface QueryRequest {
  terms: RequestTerm[];
  k: number;
}

export interface ResultItem {
  id: string;
  score: number;
  tags: string[];
  thumb: string;
}

export interface QueryResponse {
  results: ResultItem[];
}

export interface HealthInfo {
  status: string;
  method: string;
  dim: number;
  index_size: number;
}

export interface HistoryEntry {
  draft: QueryDraft;
  resultIds: string[];
  at: number;
}
