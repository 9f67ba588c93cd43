"""Iterative rounds: entangle random pairs, measure, deduce an inverse, conjugate.

Round k's executed circuit is the completed rounds 1..k-1 (each the operator
S_r * I_r * E_r * S_r-dagger, i.e. time order: dagger layer, entangling slice,
inverse slice, layer) followed by the bare entangling slice E_k. Measurement
always happens before the round's inverse exists, so the pre-inverse
diagnostics the figures of merit need stay valid.

The inverse slice is deduced from the measured one-probabilities by a
pluggable strategy; the player-pairs strategy takes the pairing from outside
(the game). Noiseless runs reuse a cached prefix state (bit-identical to
re-simulating); any gate noise forces full re-simulation so trajectories stay
independent across runs, one trajectory per shot.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analysis
from .matching import min_weight_matching, weights_from_angles
from .simulator import (
    NoiseModel,
    ShotRecord,
    apply_conjugation,
    apply_slice,
    measure,
    new_state,
)
from .topology import CouplingGraph, Edge, Matching, random_maximal_matching

THETA_MIN = math.pi / 40
THETA_MAX = math.pi / 4
PHI_MAX = math.pi / 2

STRATEGIES = ("true-pairs", "random-pairs", "mwpm-pairs", "player-pairs", "emulated-stat-noise")


class ProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class EntanglingSlice:
    """A disjoint pairing with one XX angle per pair, theta in [pi/40, pi/4]."""

    matching: Matching
    angles: dict[Edge, float]

    def __post_init__(self):
        if set(self.angles) != set(self.matching.pairs):
            raise ValueError("angle keys must exactly match the pairing")
        for pair, theta in self.angles.items():
            if not THETA_MIN - 1e-12 <= theta <= THETA_MAX + 1e-12:
                raise ValueError(f"angle {theta} for pair {pair} outside [pi/40, pi/4]")

    def gate_angles(self):
        return [(pair, self.angles[pair]) for pair in self.matching.pairs]


@dataclass(frozen=True)
class InverseSlice:
    """The attempted inversion: assumed pairing and angles, applied negated."""

    assumed_matching: Matching
    assumed_angles: dict[Edge, float]
    mode: str

    def __post_init__(self):
        if set(self.assumed_angles) != set(self.assumed_matching.pairs):
            raise ValueError("angle keys must exactly match the assumed pairing")
        if self.mode not in STRATEGIES:
            raise ValueError(f"unknown inverse mode {self.mode!r}")
        for pair, theta in self.assumed_angles.items():
            if not 0.0 <= theta <= PHI_MAX:
                raise ValueError(f"assumed angle {theta} for pair {pair} outside [0, pi/2]")

    def gate_angles(self):
        return [(pair, -self.assumed_angles[pair]) for pair in self.assumed_matching.pairs]


@dataclass(frozen=True)
class ConjugationLayer:
    """Per-qubit random x/y rotation, phi in [0, pi/2]."""

    rotations: tuple[tuple[str, float], ...]

    def __post_init__(self):
        for axis, phi in self.rotations:
            if axis not in ("x", "y") or not 0.0 <= phi <= PHI_MAX:
                raise ValueError(f"bad conjugation entry ({axis!r}, {phi})")


@dataclass
class RoundRecord:
    """Everything measured and deduced in one round."""

    round_index: int
    entangling: EntanglingSlice
    inverse: InverseSlice
    conjugation: ConjugationLayer
    measurement: object
    p_tilde: tuple[float, ...]
    theta_tilde: tuple[float, ...]
    metrics: analysis.RoundMetrics
    p_bar: tuple[float, ...] | None = None
    theta_bar: tuple[float, ...] | None = None


@dataclass
class PendingRound:
    """A measured round awaiting its inverse (the game's puzzle state)."""

    round_index: int
    entangling: EntanglingSlice
    measurement: object
    p_tilde: tuple[float, ...]
    theta_tilde: tuple[float, ...]
    p_bar: tuple[float, ...] | None = None
    theta_bar: tuple[float, ...] | None = None


def infer_angles(p_tilde) -> tuple[float, ...]:
    """theta_j = asin(sqrt(p_j)), with p clamped into [0, 1] first."""
    return tuple(math.asin(math.sqrt(min(1.0, max(0.0, p)))) for p in p_tilde)


def next_entangling_slice(graph: CouplingGraph, rng: np.random.Generator) -> EntanglingSlice:
    """Random maximum pairing with angles drawn uniformly from [pi/40, pi/4]."""
    matching = random_maximal_matching(graph, rng)
    angles = {pair: float(rng.uniform(THETA_MIN, THETA_MAX)) for pair in matching.pairs}
    return EntanglingSlice(matching, angles)


def draw_conjugation(num_qubits: int, rng: np.random.Generator) -> ConjugationLayer:
    rotations = []
    for _ in range(num_qubits):
        axis = "x" if rng.random() < 0.5 else "y"
        rotations.append((axis, float(rng.uniform(0.0, PHI_MAX))))
    return ConjugationLayer(tuple(rotations))


def _pair_mean_angle(pair: Edge, p_tilde) -> float:
    j, k = pair
    mean = min(1.0, max(0.0, (p_tilde[j] + p_tilde[k]) / 2.0))
    return math.asin(math.sqrt(mean))


def build_inverse(entangling: EntanglingSlice, p_tilde, strategy: str,
                  rng: np.random.Generator | None = None, shots: int | None = None,
                  graph: CouplingGraph | None = None,
                  player_matching: Matching | None = None,
                  random_sign: bool = False) -> InverseSlice:
    """Deduce the inverse slice for a measured round.

    true-pairs / random-pairs / mwpm-pairs / player-pairs take their angles from
    the pair means (p_j + p_k)/2 of the assumed pairs; emulated-stat-noise takes
    the true angles plus 0.1/sqrt(shots) (an exact run adds nothing).
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "true-pairs":
        assumed = entangling.matching
    elif strategy == "random-pairs":
        assumed = random_maximal_matching(graph, rng)
    elif strategy == "mwpm-pairs":
        weighted = weights_from_angles(graph, infer_angles(p_tilde))
        assumed = min_weight_matching(weighted)
    elif strategy == "player-pairs":
        if player_matching is None:
            raise ValueError("player-pairs needs an externally supplied matching")
        assumed = player_matching
    else:  # emulated-stat-noise
        assumed = entangling.matching
        offset = 0.1 / math.sqrt(shots) if shots else 0.0
        angles = {}
        for pair in assumed.pairs:
            sign = (1.0 if rng.random() < 0.5 else -1.0) if random_sign else 1.0
            angles[pair] = min(PHI_MAX, max(0.0, entangling.angles[pair] + sign * offset))
        return InverseSlice(assumed, angles, strategy)
    angles = {pair: _pair_mean_angle(pair, p_tilde) for pair in assumed.pairs}
    return InverseSlice(assumed, angles, strategy)


class ProtocolRun:
    """One live protocol instance: rounds begin (measure) and complete (invert).

    Splitting rounds in two lets the game show the measured puzzle before the
    player's pairing becomes the inverse slice. ``run`` drives both phases for
    the self-contained strategies.
    """

    def __init__(self, graph: CouplingGraph, strategy: str, *, shots: int | None = None,
                 noise: NoiseModel | None = None, seed=None,
                 rng: np.random.Generator | None = None, mitigation: bool = False,
                 stat_noise_random_sign: bool = False):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        if shots is not None and shots < 1:
            raise ValueError(f"shots must be >= 1 or None for exact mode, got {shots}")
        self.graph = graph
        self.strategy = strategy
        self.shots = shots
        self.noise = noise or NoiseModel.ideal()
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.mitigation = mitigation
        self.stat_noise_random_sign = stat_noise_random_sign
        self.records: list[RoundRecord] = []
        self.pending: PendingRound | None = None
        self._completed: list[tuple[EntanglingSlice, InverseSlice, ConjugationLayer]] = []
        self._prefix = None if self.noise.has_gate_noise else new_state(graph.num_qubits)

    @property
    def round_index(self) -> int:
        return len(self.records) + 1

    def begin_round(self) -> PendingRound:
        if self.pending is not None:
            raise ProtocolError("round already begun; complete it first")
        entangling = next_entangling_slice(self.graph, self.rng)
        measurement = self._measure(entangling)
        p_tilde = measurement.marginals()
        pending = PendingRound(
            round_index=self.round_index,
            entangling=entangling,
            measurement=measurement,
            p_tilde=p_tilde,
            theta_tilde=infer_angles(p_tilde),
        )
        if self.mitigation:
            table = analysis.mutual_information(measurement)
            pending.p_bar = analysis.mitigate(p_tilde, table)
            pending.theta_bar = infer_angles(pending.p_bar)
        self.pending = pending
        return pending

    def complete_round(self, player_matching: Matching | None = None) -> RoundRecord:
        if self.pending is None:
            raise ProtocolError("no round in progress; call begin_round first")
        pending = self.pending
        inverse = build_inverse(
            pending.entangling, pending.p_tilde, self.strategy,
            rng=self.rng, shots=self.shots, graph=self.graph,
            player_matching=player_matching,
            random_sign=self.stat_noise_random_sign,
        )
        conjugation = draw_conjugation(self.graph.num_qubits, self.rng)
        metrics = self._metrics(pending)
        record = RoundRecord(
            round_index=pending.round_index,
            entangling=pending.entangling,
            inverse=inverse,
            conjugation=conjugation,
            measurement=pending.measurement,
            p_tilde=pending.p_tilde,
            theta_tilde=pending.theta_tilde,
            metrics=metrics,
            p_bar=pending.p_bar,
            theta_bar=pending.theta_bar,
        )
        self._completed.append((pending.entangling, inverse, conjugation))
        if self._prefix is not None:
            self._advance_prefix(pending.entangling, inverse, conjugation)
        self.records.append(record)
        self.pending = None
        return record

    def run(self, rounds: int) -> list[RoundRecord]:
        if rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {rounds}")
        if self.strategy == "player-pairs":
            raise ValueError("player-pairs must be driven via begin_round/complete_round")
        for _ in range(rounds):
            self.begin_round()
            self.complete_round()
        return self.records

    def _metrics(self, pending: PendingRound) -> analysis.RoundMetrics:
        entangling = pending.entangling
        metrics = analysis.RoundMetrics(
            fuzz=analysis.compute_fuzz(entangling, pending.p_tilde),
            success=analysis.compute_success(self.graph, entangling.matching, pending.theta_tilde),
            diff=analysis.compute_diff(entangling, pending.theta_tilde),
        )
        if pending.p_bar is not None:
            metrics.fuzz_mitigated = analysis.compute_fuzz(entangling, pending.p_bar)
            metrics.success_mitigated = analysis.compute_success(
                self.graph, entangling.matching, pending.theta_bar)
            metrics.diff_mitigated = analysis.compute_diff(entangling, pending.theta_bar)
        return metrics

    def _measure(self, entangling: EntanglingSlice):
        if self._prefix is not None:
            state = self._prefix.copy()
            apply_slice(state, entangling)
            return measure(state, self.shots, self.noise, self.rng)
        if self.shots is None:
            state = self._trajectory(entangling)
            return measure(state, None, self.noise, self.rng)
        counts: dict[int, int] = {}
        for _ in range(self.shots):
            state = self._trajectory(entangling)
            rec = measure(state, 1, self.noise, self.rng)
            for outcome, c in rec.counts.items():
                counts[outcome] = counts.get(outcome, 0) + c
        return ShotRecord(self.graph.num_qubits, counts)

    def _trajectory(self, entangling: EntanglingSlice):
        """Full re-simulation with stochastic Pauli insertions."""
        state = new_state(self.graph.num_qubits)
        for done, inverse, layer in self._completed:
            apply_conjugation(state, layer, dagger=True, noise=self.noise, rng=self.rng)
            apply_slice(state, done, noise=self.noise, rng=self.rng)
            apply_slice(state, inverse, noise=self.noise, rng=self.rng)
            apply_conjugation(state, layer, noise=self.noise, rng=self.rng)
        apply_slice(state, entangling, noise=self.noise, rng=self.rng)
        return state

    def _advance_prefix(self, entangling, inverse, layer):
        state = self._prefix
        apply_conjugation(state, layer, dagger=True)
        apply_slice(state, entangling)
        apply_slice(state, inverse)
        apply_conjugation(state, layer)


def run_protocol(graph: CouplingGraph, rounds: int, strategy: str, *,
                 shots: int | None = None, noise: NoiseModel | None = None,
                 seed=None, rng: np.random.Generator | None = None,
                 mitigation: bool = False,
                 stat_noise_random_sign: bool = False) -> list[RoundRecord]:
    """Run the full protocol for a fixed number of rounds."""
    run = ProtocolRun(graph, strategy, shots=shots, noise=noise, seed=seed, rng=rng,
                      mitigation=mitigation, stat_noise_random_sign=stat_noise_random_sign)
    return run.run(rounds)
