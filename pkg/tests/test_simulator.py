import math

import numpy as np
import pytest

from qabench.protocol import ConjugationLayer, EntanglingSlice
from qabench.simulator import (
    ExactDistribution,
    NoiseModel,
    ShotRecord,
    apply_conjugation,
    apply_pauli,
    apply_rot,
    apply_slice,
    apply_xx,
    measure,
    new_state,
)
from qabench.topology import Matching, catalog_device


# --- dense-matrix oracle for gate checks ------------------------------------

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def embed(op: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Expand the operator onto the given qubits (qubit 0 = least-significant)."""
    if len(qubits) == 1:
        factors = [I2] * n
        factors[qubits[0]] = op
        full = np.eye(1, dtype=complex)
        for f in reversed(factors):  # qubit n-1 is the most significant bit
            full = np.kron(full, f)
        return full
    j, k = qubits
    dim = 2**n
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bj, bk = (col >> j) & 1, (col >> k) & 1
        for out_bj in (0, 1):
            for out_bk in (0, 1):
                amp = op[out_bj * 2 + out_bk, bj * 2 + bk]
                if amp != 0:
                    row = (col & ~(1 << j) & ~(1 << k)) | (out_bj << j) | (out_bk << k)
                    full[row, col] += amp
    return full


def xx_matrix(theta: float) -> np.ndarray:
    xx = np.kron(X, X)
    return math.cos(theta) * np.eye(4) + 1j * math.sin(theta) * xx


def random_state(n, rng):
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    amps /= np.linalg.norm(amps)
    state = new_state(n)
    state.amplitudes[:] = amps
    return state


# --- new_state ---------------------------------------------------------------

def test_new_state_small():
    assert np.array_equal(new_state(1).amplitudes, [1, 0])
    assert np.array_equal(new_state(2).amplitudes, [1, 0, 0, 0])


def test_new_state_large():
    s = new_state(20)
    assert s.amplitudes.size == 1_048_576
    assert s.norm() == pytest.approx(1.0)


@pytest.mark.parametrize("n", [0, 25, -1])
def test_new_state_bounds(n):
    with pytest.raises(ValueError):
        new_state(n)


# --- apply_xx ----------------------------------------------------------------

def test_xx_pair_state():
    theta = 0.37
    s = apply_xx(new_state(2), 0, 1, theta)
    assert s.amplitudes[0] == pytest.approx(math.cos(theta))
    assert s.amplitudes[3] == pytest.approx(1j * math.sin(theta))
    assert abs(s.amplitudes[1]) == 0 and abs(s.amplitudes[2]) == 0


def test_xx_identity_at_zero():
    rng = np.random.default_rng(0)
    s = random_state(3, rng)
    before = s.amplitudes.copy()
    apply_xx(s, 0, 2, 0.0)
    assert np.array_equal(s.amplitudes, before)


def test_xx_unitarity_roundtrip():
    rng = np.random.default_rng(1)
    s = random_state(4, rng)
    before = s.amplitudes.copy()
    apply_xx(s, 1, 3, 0.61)
    apply_xx(s, 1, 3, -0.61)
    assert np.abs(s.amplitudes - before).max() < 1e-12


def test_xx_against_dense_matrix():
    rng = np.random.default_rng(2)
    for j, k in [(0, 1), (2, 0), (1, 3)]:
        s = random_state(4, rng)
        expect = embed(xx_matrix(0.41), (j, k), 4) @ s.amplitudes
        apply_xx(s, j, k, 0.41)
        assert np.abs(s.amplitudes - expect).max() < 1e-12


def test_xx_index_validation():
    s = new_state(3)
    with pytest.raises(ValueError):
        apply_xx(s, 0, 0, 0.1)
    with pytest.raises(ValueError):
        apply_xx(s, 0, 3, 0.1)


# --- apply_rot ---------------------------------------------------------------

def test_rot_identity():
    rng = np.random.default_rng(3)
    s = random_state(2, rng)
    before = s.amplitudes.copy()
    apply_rot(s, 0, "x", 0.0)
    assert np.array_equal(s.amplitudes, before)


def test_rot_x_half_pi():
    s = apply_rot(new_state(1), 0, "x", math.pi / 2)
    assert s.amplitudes[0] == pytest.approx(0.0, abs=1e-15)
    assert s.amplitudes[1] == pytest.approx(1j)


def test_rot_against_dense_matrix():
    rng = np.random.default_rng(4)
    for axis, sigma in (("x", X), ("y", Y)):
        phi = 0.53
        u = math.cos(phi) * I2 + 1j * math.sin(phi) * sigma
        s = random_state(3, rng)
        expect = embed(u, (1,), 3) @ s.amplitudes
        apply_rot(s, 1, axis, phi)
        assert np.abs(s.amplitudes - expect).max() < 1e-12


def test_rot_roundtrip_and_validation():
    rng = np.random.default_rng(5)
    s = random_state(3, rng)
    before = s.amplitudes.copy()
    apply_rot(s, 2, "y", 0.8)
    apply_rot(s, 2, "y", -0.8)
    assert np.abs(s.amplitudes - before).max() < 1e-12
    with pytest.raises(ValueError):
        apply_rot(s, 0, "z", 0.1)
    with pytest.raises(ValueError):
        apply_rot(s, 5, "x", 0.1)


# --- slices and noise ---------------------------------------------------------

def _slice(graph, pairs_angles):
    matching = Matching.of(graph, [p for p, _ in pairs_angles])
    return EntanglingSlice(matching, dict(pairs_angles))


def test_empty_slice_is_identity(line_5):
    s = new_state(5)
    before = s.amplitudes.copy()
    empty = EntanglingSlice(Matching(pairs=(), unpaired=tuple(range(5))), {})
    apply_slice(s, empty)
    assert np.array_equal(s.amplitudes, before)


def test_slice_then_inverse_restores(line_5):
    from qabench.protocol import InverseSlice

    entangling = _slice(line_5, [((0, 1), 0.3), ((2, 3), 0.7)])
    inverse = InverseSlice(entangling.matching, dict(entangling.angles), "true-pairs")
    s = new_state(5)
    apply_slice(s, entangling)
    apply_slice(s, inverse)
    expect = np.zeros(32, dtype=complex)
    expect[0] = 1.0
    assert np.abs(s.amplitudes - expect).max() < 1e-12


def test_slice_gate_order_commutes(ladder_16):
    # disjoint-pair gates commute: reversed application matches within 1e-12
    rng = np.random.default_rng(6)
    pairs = [((0, 8), 0.2), ((1, 9), 0.5), ((2, 10), 0.7)]
    s1 = random_state(16, rng)
    s2 = s1.copy()
    for (j, k), theta in pairs:
        apply_xx(s1, j, k, theta)
    for (j, k), theta in reversed(pairs):
        apply_xx(s2, j, k, theta)
    assert np.abs(s1.amplitudes - s2.amplitudes).max() < 1e-12


def test_p2_one_inserts_pauli_after_every_pair_gate(line_5):
    entangling = _slice(line_5, [((0, 1), 0.3), ((2, 3), 0.4)])
    trace = []
    apply_slice(new_state(5), entangling, noise=NoiseModel(p1=0, p2=1.0, readout=0),
                rng=np.random.default_rng(8), trace=trace)
    assert len(trace) == 2
    for event, pair in zip(trace, entangling.matching.pairs):
        assert event.targets == pair
        assert any(p != "i" for p in event.paulis)


def test_zero_noise_trajectory_bit_identical(line_5):
    entangling = _slice(line_5, [((0, 1), 0.3), ((2, 3), 0.4)])
    a, b = new_state(5), new_state(5)
    apply_slice(a, entangling)
    apply_slice(b, entangling, noise=NoiseModel.ideal(), rng=np.random.default_rng(9))
    assert np.array_equal(a.amplitudes, b.amplitudes)


def test_norm_preserved_over_many_gates():
    rng = np.random.default_rng(10)
    s = new_state(6)
    for _ in range(1000):
        kind = rng.integers(0, 3)
        if kind == 0:
            j, k = rng.choice(6, size=2, replace=False)
            apply_xx(s, int(j), int(k), float(rng.uniform(0, math.pi)))
        elif kind == 1:
            apply_rot(s, int(rng.integers(0, 6)), "xy"[rng.integers(0, 2)],
                      float(rng.uniform(0, math.pi)))
        else:
            apply_pauli(s, int(rng.integers(0, 6)), "xyz"[rng.integers(0, 3)])
    assert abs(s.norm() - 1.0) < 1e-9


def test_conjugation_dagger_roundtrip():
    rng = np.random.default_rng(11)
    layer = ConjugationLayer((("x", 0.3), ("y", 1.1), ("x", 0.0)))
    s = random_state(3, rng)
    before = s.amplitudes.copy()
    apply_conjugation(s, layer)
    apply_conjugation(s, layer, dagger=True)
    assert np.abs(s.amplitudes - before).max() < 1e-12


# --- measurement --------------------------------------------------------------

def test_measure_all_zero_state(rng):
    rec = measure(new_state(4), shots=200, rng=rng)
    assert rec.counts == {0: 200}
    assert rec.marginals() == (0.0, 0.0, 0.0, 0.0)


def test_measure_pair_state_agreement(rng):
    theta = 0.42
    s = apply_xx(new_state(2), 0, 1, theta)
    rec = measure(s, shots=2000, rng=rng)
    assert set(rec.counts) <= {0b00, 0b11}  # qubits always agree
    exact = measure(s)
    assert exact.marginal(0) == pytest.approx(math.sin(theta) ** 2, abs=1e-12)
    assert exact.marginal(0) == exact.marginal(1)


def test_exact_readout_on_zero_state():
    dist = measure(new_state(3), noise=NoiseModel(p1=0, p2=0, readout=0.05))
    assert dist.marginal(0) == pytest.approx(0.05)


def test_sampled_readout_flips(rng):
    rec = measure(new_state(1), shots=20000, noise=NoiseModel(p1=0, p2=0, readout=0.25), rng=rng)
    assert rec.marginal(0) == pytest.approx(0.25, abs=0.012)  # 4 sigma


def test_sampled_matches_exact_within_binomial_bounds(rng):
    s = apply_xx(new_state(3), 0, 2, 0.5)
    apply_rot(s, 1, "y", 0.9)
    exact = measure(s)
    shots = 100_000
    rec = measure(s, shots=shots, rng=rng)
    for q in range(3):
        p = exact.marginal(q)
        sigma = math.sqrt(p * (1 - p) / shots)
        assert abs(rec.marginal(q) - p) < 4 * sigma


def test_pair_joint_exact_vs_bruteforce(rng):
    s = random_state(4, rng)
    dist = measure(s)
    probs = s.probabilities()
    for j, k in [(0, 1), (1, 3), (2, 0)]:
        expect = np.zeros((2, 2))
        for idx, p in enumerate(probs):
            expect[(idx >> j) & 1, (idx >> k) & 1] += p
        assert np.abs(dist.pair_joint(j, k) - expect).max() < 1e-12


def test_pair_joint_with_readout():
    theta = 0.6
    s = apply_xx(new_state(2), 0, 1, theta)
    r = 0.1
    joint = measure(s, noise=NoiseModel(p1=0, p2=0, readout=r)).pair_joint(0, 1)
    p = math.sin(theta) ** 2
    flip = np.array([[1 - r, r], [r, 1 - r]])
    expect = flip @ np.array([[1 - p, 0.0], [0.0, p]]) @ flip.T
    assert np.abs(joint - expect).max() < 1e-12
    assert joint.sum() == pytest.approx(1.0)


def test_shot_record_round_trip():
    rec = ShotRecord(3, {0b101: 3, 0b010: 1})
    assert rec.shots == 4
    assert rec.marginal(0) == pytest.approx(0.75)
    assert rec.bitstring_counts() == {"010": 1, "101": 3}
    joint = rec.pair_joint(0, 2)
    assert joint[1, 1] == pytest.approx(0.75)
    assert joint[0, 0] == pytest.approx(0.25)


def test_measure_validation():
    with pytest.raises(ValueError):
        measure(new_state(2), shots=0, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        measure(new_state(2), shots=5)  # rng required


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(p1=-0.1, p2=0, readout=0)
    with pytest.raises(ValueError):
        NoiseModel(p1=0, p2=1.5, readout=0)
    ideal = NoiseModel.ideal()
    assert not ideal.has_gate_noise
    assert NoiseModel(p1=0, p2=0.1, readout=0).has_gate_noise
