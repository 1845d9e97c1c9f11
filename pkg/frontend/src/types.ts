// Wire types for the review API. Field names match the server payloads
// exactly; items are rendered byte-faithful, never normalized client-side.

export type ItemKind =
  | 'mcq'
  | 'masked-equation'
  | 'code-task'
  | 'tdoc-class'
  | 'preference-pair'
  | 'instruct';

export type Verdict = 'accept' | 'reject' | 'edit';

export interface QueueItem {
  item_id: string;
  kind: ItemKind;
  review_status: string;
  [field: string]: unknown;
}

export interface McqPayload {
  kind: 'mcq';
  question: string;
  options: string[];
  answer_index: number;
  explanation: string;
  category: string;
}

export interface Decision {
  item_id: string;
  verdict: Verdict;
  reviewer: string;
  edited_item?: Record<string, unknown>;
  note?: string;
}

export interface Stats {
  accept: number;
  reject: number;
  edit: number;
  pending: number;
  total: number;
}

export interface QueueResponse {
  items: QueueItem[];
  stats: Stats;
}

export interface DecisionResponse {
  decided: string;
  warnings: string[];
  stats: Stats;
}

export interface ExportResponse {
  kind: string | null;
  count: number;
  items: Array<Record<string, unknown>>;
}

export const MCQ_CATEGORIES = [
  'lexicon',
  'research-overview',
  'research-publications',
  'standards-overview',
  'standards-specifications',
] as const;

export const INSTRUCT_KINDS = ['general', 'protocol', 'open-qa'] as const;
