// Thin DOM layer: draws a Scene into an SVG element and forwards edge clicks.

import type { Scene, SceneEdge } from "./scene.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const EDGE_CLASS: Record<SceneEdge["state"], string> = {
  idle: "edge",
  selected: "edge edge-selected",
  disabled: "edge edge-disabled",
  rejected: "edge edge-rejected",
};

export function renderScene(scene: Scene, svg: SVGSVGElement,
                            onEdgeClick: (label: string) => void): void {
  svg.setAttribute("viewBox", `0 0 ${scene.width} ${scene.height}`);
  svg.replaceChildren();

  for (const edge of scene.edges) {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("class", EDGE_CLASS[edge.state]);
    group.dataset.label = edge.label;

    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", `${edge.x1}`);
    line.setAttribute("y1", `${edge.y1}`);
    line.setAttribute("x2", `${edge.x2}`);
    line.setAttribute("y2", `${edge.y2}`);
    group.appendChild(line);

    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", `${edge.labelX}`);
    text.setAttribute("y", `${edge.labelY}`);
    text.setAttribute("class", "edge-label");
    text.textContent = edge.label;
    group.appendChild(text);

    if (edge.state !== "disabled") {
      group.addEventListener("click", () => onEdgeClick(edge.label));
    }
    svg.appendChild(group);
  }

  for (const node of scene.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("class", "node");

    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", `${node.x}`);
    circle.setAttribute("cy", `${node.y}`);
    circle.setAttribute("r", `${node.radius}`);
    circle.setAttribute("fill", node.fill);
    if (node.patterned) circle.setAttribute("class", "node-patterned");
    group.appendChild(circle);

    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", `${node.x}`);
    text.setAttribute("y", `${node.y + 4}`);
    text.setAttribute("class", "node-percent");
    text.textContent = node.percentText;
    group.appendChild(text);

    svg.appendChild(group);
  }
}
