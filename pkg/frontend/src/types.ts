/** Payload shapes of the graph service HTTP API. */

export type ModifierKind = "noun" | "verb" | "adj";

/** [kind, lemma] pair as serialized by the server. */
export type Modifier = [string, string];

/** [kind, lemma, count] row of a modifier summary. */
export type ModifierCount = [string, string, number];

export interface NodePayload {
  entity_id: string;
  name: string;
  types: string[];
  links: [string, string][];
  out_degree: number;
  in_degree: number;
}

export interface DescriptionPayload {
  sentence_id: string;
  doc_id: string;
  text: string;
  rds_score: number;
  modifiers: Modifier[];
}

export interface EdgePayload {
  head: string;
  tail: string;
  descriptions: DescriptionPayload[];
}

export interface QueryPayload {
  nodes: NodePayload[];
  edges: EdgePayload[];
  paths: string[][];
  modifier_summary: ModifierCount[];
  diagnostics: string[];
  truncated: boolean;
}

export interface ArticlePayload {
  nodes: NodePayload[];
  edges: EdgePayload[];
  types: string[];
  truncated: boolean;
}

export interface EntitiesPayload {
  entities: NodePayload[];
}

export interface SummaryPayload {
  summary: string;
  backend: string;
  prompt: string;
  extractive: boolean;
}

export interface ApiError {
  error: { code: string; message: string };
}

export interface HopSelector {
  entities?: string[];
  types?: string[];
}

export interface HopSpec {
  selector: HopSelector;
  limit?: number;
  direction?: "out" | "in" | "both";
}

export interface QuerySpec {
  start: string[];
  hops: HopSpec[];
  modifier_filter?: Modifier[];
}
