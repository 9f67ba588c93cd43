// Game view state: edge selection with a disjointness guard, score history,
// and the game-over rule (success below threshold for two consecutive rounds).

import type { Feedback, Puzzle } from "./api.js";

export const DEFAULT_GAME_OVER_THRESHOLD = 0.5;

export class GameView {
  puzzle: Puzzle | null = null;
  selected: string[] = [];
  rejected: string[] = [];
  scores: number[] = [];
  gameOver = false;
  finished = false; // replay source exhausted

  private edgeEndpoints = new Map<string, [number, number]>();

  constructor(public threshold: number = DEFAULT_GAME_OVER_THRESHOLD) {}

  loadPuzzle(puzzle: Puzzle | null): void {
    if (puzzle === null) {
      this.finished = true;
      return;
    }
    this.puzzle = puzzle;
    this.selected = [];
    this.rejected = [];
    this.edgeEndpoints = new Map(puzzle.edges.map((e) => [e.label, e.qubits]));
  }

  /** Qubits used by the current selection. */
  private usedQubits(except?: string): Set<number> {
    const used = new Set<number>();
    for (const label of this.selected) {
      if (label === except) continue;
      const ends = this.edgeEndpoints.get(label);
      if (ends) {
        used.add(ends[0]);
        used.add(ends[1]);
      }
    }
    return used;
  }

  conflicts(label: string): boolean {
    const ends = this.edgeEndpoints.get(label);
    if (!ends) return true;
    const used = this.usedQubits(label);
    return used.has(ends[0]) || used.has(ends[1]);
  }

  /** Labels that cannot currently be selected (vertex-disjointness guard). */
  disabledLabels(): Set<string> {
    const out = new Set<string>();
    for (const [label] of this.edgeEndpoints) {
      if (!this.selected.includes(label) && this.conflicts(label)) {
        out.add(label);
      }
    }
    return out;
  }

  /**
   * Toggle an edge. Returns false (and leaves the selection untouched) when
   * the edge would overlap an already selected pair: the client-side mirror
   * of the server's validation.
   */
  toggleEdge(label: string): boolean {
    if (this.gameOver || this.finished) return false;
    const index = this.selected.indexOf(label);
    if (index >= 0) {
      this.selected.splice(index, 1);
      return true;
    }
    if (this.conflicts(label)) return false;
    this.selected.push(label);
    this.rejected = [];
    return true;
  }

  applyFeedback(feedback: Feedback): void {
    this.scores.push(feedback.success);
    const n = this.scores.length;
    if (n >= 2 && this.scores[n - 1] < this.threshold && this.scores[n - 2] < this.threshold) {
      this.gameOver = true;
    }
  }

  /** Server rejected the submission (422): keep the selection, flag the labels. */
  markRejected(message: string): void {
    const quoted = [...message.matchAll(/'([^']+)'/g)].map((m) => m[1]);
    this.rejected = quoted.filter((label) => this.edgeEndpoints.has(label));
  }

  roundCount(): number {
    return this.scores.length;
  }
}
