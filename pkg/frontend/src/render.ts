/**
 * Scene assembly: turns a view model plus layout into a flat list of
 * drawing operations.  The renderer draws only what the last server
 * payload contained; it never invents nodes, edges, or text.  Keeping
 * the output a plain data structure (rather than touching the DOM here)
 * makes the invariant directly testable.
 */

import { layoutGraph, LayoutOptions, DEFAULT_LAYOUT, Point } from "./layout.js";
import { GraphViewModel } from "./viewmodel.js";

export type SceneOp =
  | {
      kind: "node";
      id: string;
      label: string;
      at: Point;
      isStart: boolean;
      types: string[];
    }
  | {
      kind: "edge";
      head: string;
      tail: string;
      from: Point;
      to: Point;
      width: number;
    }
  | { kind: "empty-state"; message: string };

export function renderScene(
  vm: GraphViewModel,
  opts: LayoutOptions = DEFAULT_LAYOUT,
): SceneOp[] {
  if (vm.empty) {
    return [{ kind: "empty-state", message: "No relations matched this query." }];
  }
  const positions = layoutGraph(vm, opts);
  const ops: SceneOp[] = [];
  for (const e of vm.edges) {
    const from = positions.get(e.head);
    const to = positions.get(e.tail);
    if (!from || !to) continue;
    ops.push({
      kind: "edge",
      head: e.head,
      tail: e.tail,
      from,
      to,
      // heavier strokes for better-evidenced relations
      width: 1 + Math.min(e.descriptionCount, 5),
    });
  }
  for (const n of vm.nodes) {
    const at = positions.get(n.id);
    if (!at) continue;
    ops.push({
      kind: "node",
      id: n.id,
      label: n.name,
      at,
      isStart: n.isStart,
      types: n.types,
    });
  }
  return ops;
}
