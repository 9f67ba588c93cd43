"""Per-round figures of merit and mutual-information error mitigation.

fuzz: mean within-pair discrepancy of measured one-probabilities.
success: fraction of true pairs recovered by min-weight matching on the
inferred angles. diff: mean deviation of inferred angles from the true slice
angles. Mitigation replaces each qubit's probability with the average of its
own and its most-correlated partner's.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matching import min_weight_matching, weights_from_angles
from .topology import CouplingGraph, Matching, random_maximal_matching


@dataclass
class RoundMetrics:
    fuzz: float
    success: float
    diff: float
    fuzz_mitigated: float | None = None
    success_mitigated: float | None = None
    diff_mitigated: float | None = None

    def as_dict(self) -> dict[str, float]:
        out = {"fuzz": self.fuzz, "success": self.success, "diff": self.diff}
        if self.fuzz_mitigated is not None:
            out["fuzz_mitigated"] = self.fuzz_mitigated
            out["success_mitigated"] = self.success_mitigated
            out["diff_mitigated"] = self.diff_mitigated
        return out


@dataclass(frozen=True)
class CorrelationTable:
    """Pairwise mutual information (bits) and each qubit's best partner."""

    mi: np.ndarray
    partner: tuple[int, ...]


def compute_fuzz(slc, p) -> float:
    """Mean |p_j - p_k| over the pairs of the slice."""
    pairs = slc.matching.pairs
    if not pairs:
        raise ValueError("fuzz is undefined for a slice with no pairs")
    return sum(abs(p[j] - p[k]) for j, k in pairs) / len(pairs)


def compute_diff(slc, theta_tilde) -> float:
    """Mean |theta_tilde - theta| over both qubits of every pair."""
    pairs = slc.matching.pairs
    if not pairs:
        raise ValueError("diff is undefined for a slice with no pairs")
    total = sum(abs(theta_tilde[j] - slc.angles[(j, k)]) + abs(theta_tilde[k] - slc.angles[(j, k)])
                for j, k in pairs)
    return total / (2 * len(pairs))


def compute_success(graph: CouplingGraph, true_matching: Matching, theta_tilde) -> float:
    """Fraction of true pairs found by min-weight matching on |theta_j - theta_k|."""
    if not true_matching.pairs:
        raise ValueError("success is undefined for an empty true matching")
    deduced = min_weight_matching(weights_from_angles(graph, theta_tilde))
    found = set(deduced.pairs) & set(true_matching.pairs)
    return len(found) / len(true_matching.pairs)


def binary_entropy(p: float) -> float:
    """Entropy of a {p, 1-p} coin, in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _mi_bits(joint: np.ndarray) -> float:
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    total = 0.0
    for a in (0, 1):
        for b in (0, 1):
            p = joint[a, b]
            if p > 0.0:
                total += p * math.log2(p / (pa[a] * pb[b]))
    return max(total, 0.0)


def mutual_information(measurement) -> CorrelationTable:
    """I(j;k) for all qubit pairs of a measurement (sampled or exact joints).

    partner[j] is the argmax over k != j, ties broken toward the lowest index.
    """
    n = measurement.num_qubits
    mi = np.zeros((n, n))
    for j in range(n):
        for k in range(j + 1, n):
            value = _mi_bits(measurement.pair_joint(j, k))
            mi[j, k] = mi[k, j] = value
    partner = []
    for j in range(n):
        row = mi[j].copy()
        row[j] = -np.inf
        partner.append(int(np.argmax(row)))
    return CorrelationTable(mi, tuple(partner))


def mitigate(p_tilde, table: CorrelationTable) -> tuple[float, ...]:
    """p_bar_j = (p_j + p_c(j))/2; mutual partners come out exactly equal."""
    return tuple((p_tilde[j] + p_tilde[table.partner[j]]) / 2.0 for j in range(len(p_tilde)))


def random_guess_baseline(graph: CouplingGraph, rng: np.random.Generator,
                          trials: int = 200) -> float:
    """Empirical success rate when inferred angles carry no pairing information."""
    total = 0.0
    for _ in range(trials):
        true = random_maximal_matching(graph, rng)
        theta = rng.uniform(0.0, math.pi / 2, graph.num_qubits)
        total += compute_success(graph, true, theta)
    return total / trials
