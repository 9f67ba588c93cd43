// Pure render model: everything the DOM layer draws, as plain data.
// Node percent text is always the server-provided value, never recomputed.

import type { Puzzle } from "./api.js";
import type { GameView } from "./model.js";
import type { Layout } from "./layout.js";

export type EdgeState = "idle" | "selected" | "disabled" | "rejected";

export interface SceneNode {
  qubit: number;
  x: number;
  y: number;
  radius: number;
  fill: string;
  percentText: string;
  patterned: boolean;
}

export interface SceneEdge {
  label: string;
  state: EdgeState;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  labelX: number;
  labelY: number;
}

export interface Scene {
  width: number;
  height: number;
  nodes: SceneNode[];
  edges: SceneEdge[];
}

export interface SceneOptions {
  width?: number;
  height?: number;
  patternOverlay?: boolean;
}

function fitted(layout: Layout, width: number, height: number, margin: number) {
  const xs = [...layout.values()].map((p) => p[0]);
  const ys = [...layout.values()].map((p) => p[1]);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  return (q: number): [number, number] => {
    const [x, y] = layout.get(q) ?? [0, 0];
    return [
      margin + (x - minX) * scale + (width - 2 * margin - spanX * scale) / 2,
      margin + (y - minY) * scale + (height - 2 * margin - spanY * scale) / 2,
    ];
  };
}

export function buildScene(puzzle: Puzzle, view: GameView, layout: Layout,
                           options: SceneOptions = {}): Scene {
  const width = options.width ?? 720;
  const height = options.height ?? 480;
  const place = fitted(layout, width, height, 48);
  const disabled = view.disabledLabels();

  const nodes: SceneNode[] = puzzle.nodes.map((node) => {
    const [x, y] = place(node.qubit);
    return {
      qubit: node.qubit,
      x,
      y,
      radius: 20,
      fill: node.color,
      percentText: `${node.percent}`,
      patterned: Boolean(options.patternOverlay) && node.percent >= 50,
    };
  });

  const byQubit = new Map(nodes.map((n) => [n.qubit, n]));
  const edges: SceneEdge[] = puzzle.edges.map((edge) => {
    const a = byQubit.get(edge.qubits[0])!;
    const b = byQubit.get(edge.qubits[1])!;
    let state: EdgeState = "idle";
    if (view.rejected.includes(edge.label)) state = "rejected";
    else if (view.selected.includes(edge.label)) state = "selected";
    else if (disabled.has(edge.label)) state = "disabled";
    return {
      label: edge.label,
      state,
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
      labelX: (a.x + b.x) / 2,
      labelY: (a.y + b.y) / 2 - 6,
    };
  });

  return { width, height, nodes, edges };
}
