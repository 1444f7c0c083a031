/**
 * Hop-stratified layout: the start node sits in the left column and
 * each hop level forms the next column, so a two-hop result reads left
 * to right.  Deterministic: node order within a column follows the
 * view-model order, no randomized forces.
 */

import { GraphViewModel } from "./viewmodel.js";

export interface Point {
  x: number;
  y: number;
}

export interface LayoutOptions {
  columnSpacing: number;
  rowSpacing: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  columnSpacing: 220,
  rowSpacing: 80,
};

export function layoutGraph(
  vm: GraphViewModel,
  opts: LayoutOptions = DEFAULT_LAYOUT,
): Map<string, Point> {
  const byHop = new Map<number, string[]>();
  for (const n of vm.nodes) {
    const col = byHop.get(n.hop) ?? [];
    col.push(n.id);
    byHop.set(n.hop, col);
  }
  const positions = new Map<string, Point>();
  for (const [hopLevel, column] of byHop) {
    const height = (column.length - 1) * opts.rowSpacing;
    column.forEach((id, i) => {
      positions.set(id, {
        x: hopLevel * opts.columnSpacing,
        y: i * opts.rowSpacing - height / 2,
      });
    });
  }
  return positions;
}
