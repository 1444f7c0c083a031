/**
 * View model for the exploration canvas: hop-stratified nodes, edge
 * inspector state, and path selection driving the summary panel.
 */

import { DescriptionPayload, EdgePayload, QueryPayload } from "./types.js";

export interface NodeView {
  id: string;
  name: string;
  types: string[];
  hop: number; // 0 = start node
  isStart: boolean;
}

export interface EdgeView {
  head: string;
  tail: string;
  descriptionCount: number;
  maxScore: number;
}

export interface GraphViewModel {
  nodes: NodeView[];
  edges: EdgeView[];
  paths: string[][];
  empty: boolean;
}

export function buildViewModel(
  payload: QueryPayload,
  startIds: string[],
): GraphViewModel {
  const start = new Set(startIds);
  const hop = new Map<string, number>();
  for (const id of startIds) hop.set(id, 0);
  // hop level = position within the recorded query paths; a node kept
  // at several levels takes the smallest
  for (const path of payload.paths) {
    path.forEach((id, i) => {
      const existing = hop.get(id);
      if (existing === undefined || i < existing) hop.set(id, i);
    });
  }
  const nodes: NodeView[] = payload.nodes.map((n) => ({
    id: n.entity_id,
    name: n.name,
    types: n.types,
    hop: hop.get(n.entity_id) ?? 1,
    isStart: start.has(n.entity_id),
  }));
  const edges: EdgeView[] = payload.edges.map((e) => ({
    head: e.head,
    tail: e.tail,
    descriptionCount: e.descriptions.length,
    maxScore: e.descriptions.reduce((m, d) => Math.max(m, d.rds_score), 0),
  }));
  return {
    nodes,
    edges,
    paths: payload.paths,
    empty: nodes.length === 0 && edges.length === 0,
  };
}

/** Edge inspector: descriptions in server order (score-descending). */
export function inspectEdge(
  payload: QueryPayload,
  head: string,
  tail: string,
): DescriptionPayload[] {
  const edge = payload.edges.find((e) => e.head === head && e.tail === tail);
  return edge ? edge.descriptions : [];
}

export interface Selection {
  nodeIds: string[];
}

/** A summary can be requested for a selected 2- or 3-node path whose
 * consecutive nodes are connected in the payload. */
export function summaryEnabled(
  payload: QueryPayload,
  selection: Selection,
): boolean {
  const ids = selection.nodeIds;
  if (ids.length < 2 || ids.length > 3) return false;
  const pairs = new Set(
    payload.edges.flatMap((e) => [`${e.head} ${e.tail}`, `${e.tail} ${e.head}`]),
  );
  return ids.slice(1).every((id, i) => pairs.has(`${ids[i]} ${id}`));
}

export function edgeKey(e: EdgePayload | EdgeView): string {
  return `${e.head}->${e.tail}`;
}
