"""Dense statevector simulation of the protocol's gate set.

Gates mutate the state in place and return it. Noise is stochastic: Pauli
insertions after gates (trajectory method, so memory stays at 2^n) and
independent readout bit flips. Exact measurement applies readout analytically
to marginals and pair joints.

Conventions: qubit 0 is the least-significant bit of the amplitude index.
Rotations are U = cos(phi)*I + i*sin(phi)*sigma_axis, matching the XX gate's
exp(i*theta*X X) form.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, fsum, sin

import numpy as np

from ._kernels import u1_kernel, xx_kernel

MAX_QUBITS = 24

_PAULI_MATRICES = {
    "x": (0j, 1 + 0j, 1 + 0j, 0j),
    "y": (0j, -1j, 1j, 0j),
    "z": (1 + 0j, 0j, 0j, -1 + 0j),
}


class StateVector:
    """2^n complex amplitudes, exclusively owned by one run."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def new_state(num_qubits: int) -> StateVector:
    """All qubits in |0>."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    amplitudes = np.zeros(2**num_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return StateVector(num_qubits, amplitudes)


def _check_qubit(state: StateVector, j: int):
    if not 0 <= j < state.num_qubits:
        raise ValueError(f"qubit {j} out of range for {state.num_qubits}-qubit state")


def apply_xx(state: StateVector, j: int, k: int, theta: float) -> StateVector:
    """exp(i*theta*X_j X_k): on |00> gives cos(theta)|00> + i*sin(theta)|11>."""
    _check_qubit(state, j)
    _check_qubit(state, k)
    if j == k:
        raise ValueError(f"pair gate needs distinct qubits, got ({j}, {k})")
    xx_kernel(state.amplitudes, j, k, cos(theta), sin(theta))
    return state


def apply_rot(state: StateVector, j: int, axis: str, phi: float) -> StateVector:
    """exp(i*phi*sigma_axis) on qubit j, axis 'x' or 'y'."""
    _check_qubit(state, j)
    c = cos(phi) + 0j
    s = sin(phi)
    if axis == "x":
        u01 = u10 = 1j * s
    elif axis == "y":
        u01, u10 = s + 0j, -s + 0j
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    u1_kernel(state.amplitudes, j, c, u01, u10, c)
    return state


def apply_pauli(state: StateVector, j: int, pauli: str) -> StateVector:
    _check_qubit(state, j)
    u1_kernel(state.amplitudes, j, *_PAULI_MATRICES[pauli])
    return state


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing rates per gate plus readout flip probability.

    Defaults are representative of 2018-era superconducting devices; use
    ``NoiseModel.ideal()`` for noiseless simulation.
    """

    p1: float = 0.001
    p2: float = 0.02
    readout: float = 0.03

    def __post_init__(self):
        for field in ("p1", "p2", "readout"):
            value = getattr(self, field)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{field} must be a probability, got {value}")

    @classmethod
    def ideal(cls) -> "NoiseModel":
        return cls(p1=0.0, p2=0.0, readout=0.0)

    @property
    def has_gate_noise(self) -> bool:
        return self.p1 > 0 or self.p2 > 0


@dataclass(frozen=True)
class NoiseEvent:
    """One stochastic Pauli insertion, for trajectory inspection."""

    targets: tuple[int, ...]
    paulis: tuple[str, ...]


_PAULI_NAMES = ("i", "x", "y", "z")


def _maybe_pair_pauli(state, j, k, noise, rng, trace):
    if rng.random() >= noise.p2:
        return
    idx = int(rng.integers(1, 16))  # 15 non-identity two-qubit Paulis
    pj, pk = divmod(idx, 4)
    if pj:
        apply_pauli(state, j, _PAULI_NAMES[pj])
    if pk:
        apply_pauli(state, k, _PAULI_NAMES[pk])
    if trace is not None:
        trace.append(NoiseEvent((j, k), (_PAULI_NAMES[pj], _PAULI_NAMES[pk])))


def _maybe_single_pauli(state, j, noise, rng, trace):
    if rng.random() >= noise.p1:
        return
    pauli = _PAULI_NAMES[1 + int(rng.integers(0, 3))]
    apply_pauli(state, j, pauli)
    if trace is not None:
        trace.append(NoiseEvent((j,), (pauli,)))


def apply_slice(state, slc, noise=None, rng=None, trace=None) -> StateVector:
    """One XX gate per pair of the slice (angles already signed by the slice type)."""
    noise = noise or NoiseModel.ideal()
    for (j, k), theta in slc.gate_angles():
        apply_xx(state, j, k, theta)
        if noise.p2 > 0:
            _maybe_pair_pauli(state, j, k, noise, rng, trace)
    return state


def apply_conjugation(state, layer, dagger=False, noise=None, rng=None, trace=None) -> StateVector:
    """One single-qubit rotation per qubit; dagger negates all angles."""
    noise = noise or NoiseModel.ideal()
    for q, (axis, phi) in enumerate(layer.rotations):
        apply_rot(state, q, axis, -phi if dagger else phi)
        if noise.p1 > 0:
            _maybe_single_pauli(state, q, noise, rng, trace)
    return state


class ExactDistribution:
    """Full outcome distribution of a state, with analytic readout error.

    The raw probability vector is exposed untouched; marginals and pair joints
    fold in the readout flip probability. Marginals are computed with fsum so
    qubits with identical true marginals report bit-identical values.
    """

    def __init__(self, num_qubits: int, probabilities: np.ndarray, readout: float = 0.0):
        self.num_qubits = num_qubits
        self.probabilities = probabilities
        self.readout = readout
        self.shots = None

    def marginal(self, j: int) -> float:
        n = self.num_qubits
        ones = self.probabilities.reshape([2] * n).take(1, axis=n - 1 - j).ravel()
        p = fsum(ones)
        r = self.readout
        return p * (1.0 - r) + (1.0 - p) * r

    def marginals(self) -> tuple[float, ...]:
        return tuple(self.marginal(j) for j in range(self.num_qubits))

    def pair_joint(self, j: int, k: int) -> np.ndarray:
        """2x2 array P[a, b] = P(qubit j reads a, qubit k reads b)."""
        lo, hi = min(j, k), max(j, k)
        mid = 2 ** (hi - lo - 1)
        blocks = self.probabilities.reshape(-1, 2, mid, 2, 2**lo)
        joint_hi_lo = blocks.sum(axis=(0, 2, 4))
        joint = joint_hi_lo if j == hi else joint_hi_lo.T
        r = self.readout
        if r > 0:
            flip = np.array([[1.0 - r, r], [r, 1.0 - r]])
            joint = flip @ joint @ flip.T
        return joint


class ShotRecord:
    """Sampled measurement outcomes as a counts map over basis indices."""

    def __init__(self, num_qubits: int, counts: dict[int, int]):
        self.num_qubits = num_qubits
        self.counts = counts
        self.shots = sum(counts.values())
        self._outcomes = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
        self._weights = np.fromiter(counts.values(), dtype=np.int64, count=len(counts))

    def marginal(self, j: int) -> float:
        bits = (self._outcomes >> j) & 1
        return float(self._weights[bits == 1].sum()) / self.shots

    def marginals(self) -> tuple[float, ...]:
        return tuple(self.marginal(j) for j in range(self.num_qubits))

    def pair_joint(self, j: int, k: int) -> np.ndarray:
        bj = (self._outcomes >> j) & 1
        bk = (self._outcomes >> k) & 1
        cells = np.bincount(bj * 2 + bk, weights=self._weights, minlength=4)
        return cells.reshape(2, 2) / self.shots

    def bitstring_counts(self) -> dict[str, int]:
        """Counts keyed by bitstring with qubit 0 as the rightmost character."""
        n = self.num_qubits
        return {format(o, f"0{n}b"): c for o, c in sorted(self.counts.items())}


def measure(state: StateVector, shots: int | None = None, noise: NoiseModel | None = None,
            rng: np.random.Generator | None = None):
    """Z-basis measurement: sampled counts, or the exact distribution if shots is None."""
    noise = noise or NoiseModel.ideal()
    probs = state.probabilities()
    probs = probs / probs.sum()
    if shots is None:
        return ExactDistribution(state.num_qubits, probs, readout=noise.readout)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if rng is None:
        raise ValueError("sampled measurement needs an rng")
    outcomes = rng.choice(len(probs), size=shots, p=probs)
    if noise.readout > 0:
        n = state.num_qubits
        flips = rng.random((shots, n)) < noise.readout
        masks = (flips.astype(np.int64) << np.arange(n, dtype=np.int64)).sum(axis=1)
        outcomes = outcomes ^ masks
    values, freq = np.unique(outcomes, return_counts=True)
    return ShotRecord(state.num_qubits, {int(v): int(c) for v, c in zip(values, freq)})
