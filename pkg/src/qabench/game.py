"""HTTP service for the pairing-puzzle game.

Each session runs the live protocol with the player-pairs strategy: the
service measures a round, shows per-qubit percentages and colors, and the
player's submitted edge labels become the inverse slice, so mistakes propagate
into every later round. A campaign results file written with --full can be
mounted instead (replay mode): submissions are then scored against the
recorded rounds without simulation.

Wire format: JSON bodies, errors always {"error": str} with 404 (unknown),
410 (expired), 422 (bad pairing), 409 (submission already in flight).
"""
from __future__ import annotations

import contextlib
import json
import math
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .campaign import read_result
from .protocol import ProtocolRun
from .simulator import NoiseModel
from .topology import CouplingGraph, DeviceError, Matching, catalog_device, load_device_record

DEFAULT_SESSION_TTL = 3600.0


class GameError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class GameConfig:
    default_device: str = "ibmqx4"
    shots: int | None = None  # None = exact
    noise: NoiseModel = field(default_factory=NoiseModel.ideal)
    seed: int | None = None
    devices_dir: str | None = None
    replay_path: str | None = None
    snapshot_path: str | None = None
    ui_dir: str | None = None
    session_ttl: float = DEFAULT_SESSION_TTL


def percent_of(theta: float) -> int:
    """theta / (pi/2) as an integer percentage, ties rounded away from zero."""
    scaled = max(0.0, min(1.0, theta / (math.pi / 2))) * 100.0
    return int(math.floor(scaled + 0.5))


def color_of(percent: int) -> str:
    """Linear blue (0%) to red (100%)."""
    t = percent / 100.0
    red = int(math.floor(255 * t + 0.5))
    blue = int(math.floor(255 * (1 - t) + 0.5))
    return f"#{red:02x}00{blue:02x}"


def device_layout(graph: CouplingGraph, devices_dir=None) -> dict[int, list[float]] | None:
    """Drawing coordinates: stored for real devices, generated for families."""
    name, n = graph.name, graph.num_qubits
    head, _, tail = name.rpartition("_")
    if head == "line":
        return {q: [float(q), 0.0] for q in range(n)}
    if head == "ladder":
        half = n // 2
        return {q: [float(q % half), float(q // half)] for q in range(n)}
    if head == "square":
        side = math.isqrt(n)
        return {q: [float(q % side), float(q // side)] for q in range(n)}
    if head == "complete":
        return {q: [round(math.cos(2 * math.pi * q / n), 4),
                    round(math.sin(2 * math.pi * q / n), 4)] for q in range(n)}
    try:
        record = load_device_record(name, devices_dir)
    except DeviceError:
        return None
    layout = record.get("layout")
    if not isinstance(layout, dict):
        return None
    return {int(q): [float(x), float(y)] for q, (x, y) in layout.items()}


def _device_doc(graph: CouplingGraph, devices_dir=None) -> dict:
    return {
        "name": graph.name,
        "num_qubits": graph.num_qubits,
        "edges": [{"label": label, "qubits": [a, b]} for label, (a, b) in graph.labeled_edges()],
        "layout": device_layout(graph, devices_dir),
    }


def _puzzle_doc(round_index: int, theta_tilde, graph: CouplingGraph) -> dict:
    nodes = []
    for qubit, theta in enumerate(theta_tilde):
        percent = percent_of(theta)
        nodes.append({"qubit": qubit, "percent": percent, "color": color_of(percent)})
    return {
        "round": round_index,
        "nodes": nodes,
        "edges": [{"label": label, "qubits": [a, b]} for label, (a, b) in graph.labeled_edges()],
    }


def _parse_pairing(graph: CouplingGraph, labels) -> Matching:
    if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
        raise GameError(422, "pairs must be a list of edge labels")
    label_map = dict(zip(graph.labels, graph.edges))
    used: set[int] = set()
    pairs = []
    for label in labels:
        edge = label_map.get(label)
        if edge is None:
            raise GameError(422, f"unknown edge label {label!r}")
        if edge[0] in used or edge[1] in used:
            raise GameError(422, f"edge {label!r} overlaps an already selected pair")
        used.update(edge)
        pairs.append(edge)
    return Matching.of(graph, pairs)


class LiveSession:
    """One player's live protocol run."""

    def __init__(self, session_id: str, graph: CouplingGraph, shots, noise, seed):
        self.id = session_id
        self.graph = graph
        self.seed = seed
        self.engine = ProtocolRun(graph, "player-pairs", shots=shots, noise=noise, seed=seed)
        self.scores: list[float] = []
        self.submitted: list[list[str]] = []
        self.touched = time.monotonic()
        self.lock = threading.Lock()
        self.engine.begin_round()

    @property
    def round(self) -> int:
        return self.engine.pending.round_index

    def puzzle(self) -> dict:
        pending = self.engine.pending
        return _puzzle_doc(pending.round_index, pending.theta_tilde, self.graph)

    def fuzz_history(self) -> list[float]:
        return [r.metrics.fuzz for r in self.engine.records]

    def submit(self, labels: list[str]) -> dict:
        matching = _parse_pairing(self.graph, labels)
        true_pairs = set(self.engine.pending.entangling.matching.pairs)
        record = self.engine.complete_round(player_matching=matching)
        success = len(set(matching.pairs) & true_pairs) / len(true_pairs)
        self.scores.append(success)
        self.submitted.append(list(labels))
        self.engine.begin_round()
        return {
            "puzzle": self.puzzle(),
            "feedback": {"round": record.round_index, "success": success},
        }

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "mode": "live",
            "device": self.graph.name,
            "seed": self.seed,
            "round": self.round,
            "scores": self.scores,
            "submitted": self.submitted,
        }


class ReplaySession:
    """Scores submissions against recorded rounds; no simulation."""

    def __init__(self, session_id: str, graph: CouplingGraph, rounds: list[dict]):
        self.id = session_id
        self.graph = graph
        self.rounds = rounds
        self.cursor = 0
        self.seed = None
        self.scores: list[float] = []
        self.submitted: list[list[str]] = []
        self.touched = time.monotonic()
        self.lock = threading.Lock()

    @property
    def round(self) -> int:
        return min(self.cursor + 1, len(self.rounds))

    def puzzle(self) -> dict:
        record = self.rounds[min(self.cursor, len(self.rounds) - 1)]
        doc = _puzzle_doc(self.cursor + 1, record["theta_tilde"], self.graph)
        doc["replay"] = True
        if self.cursor >= len(self.rounds):
            doc["done"] = True
        return doc

    def fuzz_history(self) -> list[float]:
        return [r["metrics"]["fuzz"] for r in self.rounds[: self.cursor]]

    def submit(self, labels: list[str]) -> dict:
        if self.cursor >= len(self.rounds):
            raise GameError(409, "replay exhausted; no rounds left to score")
        matching = _parse_pairing(self.graph, labels)
        record = self.rounds[self.cursor]
        true_pairs = {tuple(sorted(p)) for p in record["pairs"]}
        success = len(set(matching.pairs) & true_pairs) / len(true_pairs) if true_pairs else 0.0
        self.scores.append(success)
        self.submitted.append(list(labels))
        self.cursor += 1
        done = self.cursor >= len(self.rounds)
        doc = {
            "puzzle": None if done else self.puzzle(),
            "feedback": {"round": self.cursor, "success": success},
        }
        if done:
            doc["done"] = True
        return doc

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "mode": "replay",
            "device": self.graph.name,
            "round": self.round,
            "scores": self.scores,
            "submitted": self.submitted,
        }


class GameService:
    def __init__(self, config: GameConfig):
        self.config = config
        self.sessions: dict[str, object] = {}
        self.expired: set[str] = set()
        self._registry_lock = threading.Lock()
        self.replay_rounds: list[dict] | None = None
        self.replay_device: str | None = None
        catalog_device(config.default_device, config.devices_dir)  # validate up front
        if config.replay_path:
            self._load_replay(config.replay_path)

    def _load_replay(self, path: str):
        result = read_result(path)
        if not result.samples:
            raise ValueError("replay needs a results file written with --full records")
        strategy = result.spec.strategies[0]
        self.replay_rounds = result.samples[strategy][0]
        self.replay_device = result.spec.device

    def _purge(self):
        now = time.monotonic()
        dead = [sid for sid, s in self.sessions.items()
                if now - s.touched > self.config.session_ttl]
        for sid in dead:
            del self.sessions[sid]
            self.expired.add(sid)

    def create(self, body: dict) -> dict:
        device = body.get("device", self.config.default_device)
        if not isinstance(device, str):
            raise GameError(422, "device must be a string")
        try:
            graph = catalog_device(device, self.config.devices_dir)
        except DeviceError as exc:
            raise GameError(404, str(exc)) from exc
        session_id = uuid.uuid4().hex[:12]
        if self.replay_rounds is not None:
            if device != self.replay_device:
                raise GameError(422, f"replay file holds {self.replay_device!r}, not {device!r}")
            session = ReplaySession(session_id, graph, self.replay_rounds)
        else:
            shots = body.get("shots", self.config.shots)
            if shots is not None and (not isinstance(shots, int) or shots < 1):
                raise GameError(422, "shots must be a positive integer")
            noise = self.config.noise
            if "noise" in body:
                try:
                    noise = NoiseModel(**body["noise"])
                except (TypeError, ValueError) as exc:
                    raise GameError(422, f"bad noise model: {exc}") from exc
            seed = body.get("seed")
            if seed is None:
                seed = int(np.random.SeedSequence().entropy % (2**63))
            session = LiveSession(session_id, graph, shots, noise, seed)
        with self._registry_lock:
            self._purge()
            self.sessions[session_id] = session
        return {
            "id": session_id,
            "device": _device_doc(graph, self.config.devices_dir),
            "puzzle": session.puzzle(),
        }

    def _get(self, session_id: str):
        with self._registry_lock:
            self._purge()
            if session_id in self.sessions:
                session = self.sessions[session_id]
                session.touched = time.monotonic()
                return session
        if session_id in self.expired:
            raise GameError(410, f"session {session_id} expired")
        raise GameError(404, f"unknown session {session_id}")

    def submit(self, session_id: str, body: dict) -> dict:
        session = self._get(session_id)
        if "pairs" not in body:
            raise GameError(422, "body must contain a 'pairs' list of edge labels")
        if not session.lock.acquire(blocking=False):
            raise GameError(409, "a submission for this session is already in flight")
        try:
            return session.submit(body["pairs"])
        finally:
            session.lock.release()

    def state(self, session_id: str) -> dict:
        session = self._get(session_id)
        return {
            "id": session.id,
            "device": session.graph.name,
            "round": session.round,
            "scores": session.scores,
            "fuzz": session.fuzz_history(),
            "puzzle": session.puzzle(),
        }

    def devices_doc(self) -> dict:
        from .topology import PARAMETRIC_FAMILIES, list_devices

        docs = []
        for name in list_devices(self.config.devices_dir):
            graph = catalog_device(name, self.config.devices_dir)
            docs.append(_device_doc(graph, self.config.devices_dir))
        return {
            "devices": docs,
            "parametric_families": [f"{f}_N" for f in PARAMETRIC_FAMILIES],
        }

    def write_snapshot(self):
        if not self.config.snapshot_path:
            return
        doc = [self.sessions[sid].snapshot() for sid in sorted(self.sessions)]
        Path(self.config.snapshot_path).write_text(json.dumps(doc, indent=1) + "\n")


def create_app(config: GameConfig | None = None) -> FastAPI:
    service = GameService(config or GameConfig())

    @contextlib.asynccontextmanager
    async def lifespan(_app):
        yield
        service.write_snapshot()

    app = FastAPI(title="quantum pairing game", lifespan=lifespan)
    app.state.service = service

    @app.exception_handler(GameError)
    async def _game_error(_request, exc: GameError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            raise GameError(422, f"body is not valid JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise GameError(422, "body must be a JSON object")
        return body

    @app.get("/devices")
    async def devices():
        return service.devices_doc()

    @app.post("/games")
    async def create_game(request: Request):
        body = await _json_body(request) if await request.body() else {}
        return service.create(body)

    @app.get("/games/{session_id}")
    async def get_state(session_id: str):
        return service.state(session_id)

    @app.post("/games/{session_id}/pairing")
    async def submit_pairing(session_id: str, request: Request):
        return service.submit(session_id, await _json_body(request))

    if config and config.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
