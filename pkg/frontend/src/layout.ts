// Node coordinates: the server ships fixed layouts for known devices;
// unknown graphs fall back to a small deterministic force-directed embedding.

import type { DeviceDoc } from "./api.js";

export type Layout = Map<number, [number, number]>;

export function resolveLayout(device: DeviceDoc): Layout {
  if (device.layout) {
    const layout: Layout = new Map();
    for (const [key, xy] of Object.entries(device.layout)) {
      layout.set(Number(key), [xy[0], xy[1]]);
    }
    if (layout.size === device.num_qubits) return layout;
  }
  return forceLayout(device);
}

export function forceLayout(device: DeviceDoc, iterations = 300): Layout {
  const n = device.num_qubits;
  const pos: [number, number][] = [];
  for (let q = 0; q < n; q++) {
    const angle = (2 * Math.PI * q) / n; // deterministic circular start
    pos.push([Math.cos(angle), Math.sin(angle)]);
  }
  const springLength = 1.0;
  for (let it = 0; it < iterations; it++) {
    const step = 0.05 * (1 - it / iterations) + 0.005;
    const force: [number, number][] = pos.map(() => [0, 0]);
    for (let a = 0; a < n; a++) {
      for (let b = a + 1; b < n; b++) {
        const dx = pos[b][0] - pos[a][0];
        const dy = pos[b][1] - pos[a][1];
        const dist = Math.max(Math.hypot(dx, dy), 1e-6);
        const push = 0.3 / (dist * dist);
        force[a][0] -= (push * dx) / dist;
        force[a][1] -= (push * dy) / dist;
        force[b][0] += (push * dx) / dist;
        force[b][1] += (push * dy) / dist;
      }
    }
    for (const edge of device.edges) {
      const [a, b] = edge.qubits;
      const dx = pos[b][0] - pos[a][0];
      const dy = pos[b][1] - pos[a][1];
      const dist = Math.max(Math.hypot(dx, dy), 1e-6);
      const pull = dist - springLength;
      force[a][0] += (pull * dx) / dist;
      force[a][1] += (pull * dy) / dist;
      force[b][0] -= (pull * dx) / dist;
      force[b][1] -= (pull * dy) / dist;
    }
    for (let q = 0; q < n; q++) {
      pos[q][0] += step * force[q][0];
      pos[q][1] += step * force[q][1];
    }
  }
  return new Map(pos.map((p, q) => [q, p]));
}
