/** Payload types of the session API (the server is the source of truth). */

export type Mode = "BASE" | "ILM" | "IGA";

export interface Candidate {
  candidate_id: string;
  assembled: string;
  spans: string[];
}

export interface GenerateResponse {
  request_id: string;
  candidates: Candidate[];
}

export interface TagUnigramRow {
  precision: number;
  recall: number;
  f1: number;
  candidates: number;
  fully_deleted: number;
}

export interface SessionReport {
  session_id: string;
  mode: Mode;
  tokens: number;
  sentences: number;
  ai_assisted_sentences: number;
  generate_clicks: number;
  add_clicks: number;
  gen_per_sentence: number;
  add_per_sentence: number;
  per_tag_unigram: Record<string, TagUnigramRow>;
  novel_tokens_inserted: number;
  deleted_model_tokens: number;
  kept_model_tokens: number;
  tag_usage_histogram: Record<string, number>;
  edits: number;
  submitted: boolean;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  retry?: boolean;
}
