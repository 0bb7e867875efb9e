export interface TableData {
  columns: string[];
  rows: string[][];
}

export interface SourceRef {
  chunk_key: string;
  source_uri: string;
  score: number;
}

export interface AnswerPayload {
  answer: string;
  language: string;
  table: TableData | null;
  sources: SourceRef[];
  latency: number;
  chain_used: string;
  parse_fallback: boolean;
  template_id: string;
}

export interface AskResponse extends AnswerPayload {
  response_id: string;
}

export interface ChunkPreview {
  chunk_key: string;
  text: string;
  source_uri: string;
  span: number[];
}

export interface HealthResponse {
  status: string;
  index_count: number;
  version: string;
}

export type FeedbackState =
  | { kind: "unrated" }
  | { kind: "submitting" }
  | { kind: "rated"; rating: number; comment?: string }
  | { kind: "error"; message: string };

export interface ChatTurn {
  question: string;
  payload: AskResponse | null;
  pending: boolean;
  error: string | null;
  feedback: FeedbackState;
}
