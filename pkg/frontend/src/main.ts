// Page wiring: device picker, game lifecycle, submission flow, error banners.
// One request in flight at a time; controls are disabled while waiting.

import { ApiError, GameClient, type CreateResponse } from "./api.js";
import { GameView } from "./model.js";
import { resolveLayout, type Layout } from "./layout.js";
import { buildScene } from "./scene.js";
import { renderScene } from "./dom.js";

const client = new GameClient();

// ?threshold=0.6 tunes the game-over rule (two consecutive rounds below it)
const thresholdParam = Number(new URLSearchParams(location.search).get("threshold"));
const gameOverThreshold = Number.isFinite(thresholdParam) && thresholdParam > 0
  ? thresholdParam
  : undefined;

let view = new GameView(gameOverThreshold);
let gameId: string | null = null;
let layout: Layout | null = null;
let busy = false;
let patternOverlay = false;

const svg = document.querySelector<SVGSVGElement>("#board")!;
const devicePicker = document.querySelector<HTMLSelectElement>("#device")!;
const newGameButton = document.querySelector<HTMLButtonElement>("#new-game")!;
const submitButton = document.querySelector<HTMLButtonElement>("#submit")!;
const patternToggle = document.querySelector<HTMLInputElement>("#patterns")!;
const banner = document.querySelector<HTMLDivElement>("#banner")!;
const scoreList = document.querySelector<HTMLDivElement>("#scores")!;
const overlay = document.querySelector<HTMLDivElement>("#game-over")!;

function setBanner(message: string, kind: "error" | "info" | "" = "") {
  banner.textContent = message;
  banner.className = kind;
}

function setBusy(value: boolean) {
  busy = value;
  submitButton.disabled = value || view.gameOver || view.finished;
  newGameButton.disabled = value;
}

function redraw() {
  if (!view.puzzle || !layout) return;
  renderScene(buildScene(view.puzzle, view, layout, { patternOverlay }), svg, (label) => {
    if (busy) return;
    if (!view.toggleEdge(label)) {
      setBanner(`edge ${label} overlaps a selected pair`, "info");
      return;
    }
    setBanner("");
    redraw();
  });
  scoreList.textContent = view.scores.length
    ? "scores: " + view.scores.map((s) => `${Math.round(s * 100)}%`).join("  ")
    : "";
  if (view.gameOver) {
    overlay.hidden = false;
    overlay.querySelector("p")!.textContent =
      `Game over after ${view.roundCount()} rounds: the pairs have dissolved into the noise.`;
  } else if (view.finished) {
    overlay.hidden = false;
    overlay.querySelector("p")!.textContent =
      `Saved data exhausted after ${view.roundCount()} rounds.`;
  } else {
    overlay.hidden = true;
  }
  submitButton.disabled = busy || view.gameOver || view.finished;
}

async function loadDevices() {
  try {
    const doc = await client.devices();
    devicePicker.replaceChildren();
    for (const device of doc.devices) {
      const option = document.createElement("option");
      option.value = device.name;
      option.textContent = `${device.name} (${device.num_qubits} qubits)`;
      devicePicker.appendChild(option);
    }
    for (const family of ["line_5", "ladder_16", "square_9", "complete_5"]) {
      const option = document.createElement("option");
      option.value = family;
      option.textContent = family;
      devicePicker.appendChild(option);
    }
  } catch (err) {
    setBanner(`could not load devices: ${(err as Error).message} - retry?`, "error");
  }
}

function adoptGame(created: CreateResponse) {
  gameId = created.id;
  view = new GameView(gameOverThreshold);
  view.loadPuzzle(created.puzzle);
  layout = resolveLayout(created.device);
  setBanner("");
  redraw();
}

async function newGame() {
  setBusy(true);
  try {
    adoptGame(await client.create({ device: devicePicker.value }));
  } catch (err) {
    setBanner(`new game failed: ${(err as Error).message} - retry?`, "error");
  } finally {
    setBusy(false);
  }
}

async function submit() {
  if (!gameId || busy) return;
  setBusy(true);
  try {
    const response = await client.submit(gameId, [...view.selected]);
    view.applyFeedback(response.feedback);
    view.loadPuzzle(response.puzzle);
    setBanner(`round ${response.feedback.round}: ` +
      `${Math.round(response.feedback.success * 100)}% of pairs found`, "info");
  } catch (err) {
    if (err instanceof ApiError && err.status === 422) {
      view.markRejected(err.message); // selection preserved, offending labels flagged
      setBanner(err.message, "error");
    } else if (err instanceof ApiError && err.status === 410) {
      setBanner("session expired - start a new game", "error");
      gameId = null;
    } else {
      setBanner(`submit failed: ${(err as Error).message} - retry?`, "error");
    }
  } finally {
    setBusy(false);
    redraw();
  }
}

newGameButton.addEventListener("click", () => void newGame());
submitButton.addEventListener("click", () => void submit());
patternToggle.addEventListener("change", () => {
  patternOverlay = patternToggle.checked;
  redraw();
});

void loadDevices().then(() => newGame());
