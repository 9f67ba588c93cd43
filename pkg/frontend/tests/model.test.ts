import { describe, expect, it } from "vitest";
import { GameView } from "../src/model.js";
import type { Puzzle } from "../src/api.js";
import fixture from "./fixtures/session.json";

const puzzle = fixture.rounds[0] as Puzzle;

function freshView(): GameView {
  const view = new GameView();
  view.loadPuzzle(puzzle);
  return view;
}

describe("selection guard", () => {
  it("selects and deselects a free edge", () => {
    const view = freshView();
    expect(view.toggleEdge("a")).toBe(true);
    expect(view.selected).toEqual(["a"]);
    expect(view.toggleEdge("a")).toBe(true);
    expect(view.selected).toEqual([]);
  });

  it("blocks edges sharing a qubit with the selection", () => {
    const view = freshView();
    view.toggleEdge("a"); // (0,1)
    expect(view.toggleEdge("b")).toBe(false); // (1,2) shares qubit 1
    expect(view.selected).toEqual(["a"]);
    expect(view.disabledLabels()).toEqual(new Set(["b"]));
  });

  it("disables every edge touching either endpoint", () => {
    const view = freshView();
    view.toggleEdge("b"); // (1,2) on the line blocks (0,1) and (2,3)
    expect(view.disabledLabels()).toEqual(new Set(["a", "c"]));
    expect(view.toggleEdge("d")).toBe(true); // (3,4) is free
  });

  it("never yields an overlapping selection", () => {
    const view = freshView();
    for (const label of ["a", "b", "c", "d", "a", "c"]) {
      view.toggleEdge(label);
    }
    const used = new Set<number>();
    for (const label of view.selected) {
      const edge = puzzle.edges.find((e) => e.label === label)!;
      expect(used.has(edge.qubits[0])).toBe(false);
      expect(used.has(edge.qubits[1])).toBe(false);
      used.add(edge.qubits[0]);
      used.add(edge.qubits[1]);
    }
  });

  it("rejects unknown labels", () => {
    const view = freshView();
    expect(view.toggleEdge("zz")).toBe(false);
  });
});

describe("game-over rule", () => {
  it("triggers only after two consecutive rounds below threshold", () => {
    const view = freshView();
    view.applyFeedback({ round: 1, success: 0.2 });
    expect(view.gameOver).toBe(false); // one dip is survivable
    view.applyFeedback({ round: 2, success: 1.0 });
    view.applyFeedback({ round: 3, success: 0.4 });
    expect(view.gameOver).toBe(false);
    view.applyFeedback({ round: 4, success: 0.3 });
    expect(view.gameOver).toBe(true);
    expect(view.roundCount()).toBe(4);
    expect(view.toggleEdge("a")).toBe(false); // board frozen
  });

  it("respects a configured threshold", () => {
    const view = new GameView(0.9);
    view.loadPuzzle(puzzle);
    view.applyFeedback({ round: 1, success: 0.85 });
    view.applyFeedback({ round: 2, success: 0.85 });
    expect(view.gameOver).toBe(true);
  });
});

describe("rejected submissions", () => {
  it("keeps the selection and flags the offending label", () => {
    const view = freshView();
    view.toggleEdge("a");
    view.toggleEdge("c");
    view.markRejected("edge 'c' overlaps an already selected pair");
    expect(view.selected).toEqual(["a", "c"]); // preserved
    expect(view.rejected).toEqual(["c"]);
  });

  it("clears the rejection flag on the next selection change", () => {
    const view = freshView();
    view.toggleEdge("a");
    view.markRejected("unknown edge label 'a'");
    view.toggleEdge("d");
    expect(view.rejected).toEqual([]);
  });
});

describe("replay end", () => {
  it("marks the view finished when the puzzle stream ends", () => {
    const view = freshView();
    view.loadPuzzle(null);
    expect(view.finished).toBe(true);
    expect(view.toggleEdge("a")).toBe(false);
  });
});
