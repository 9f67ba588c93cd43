"""Exact minimum-weight matching on general graphs.

Used to deduce pairings from inferred angles: each edge (j,k) gets weight
|theta_j - theta_k| and the pairing is the maximum-cardinality matching of
minimum total weight. "Perfect" matching is generalized to maximum-cardinality
because odd-qubit devices admit no perfect matching.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .topology import CouplingGraph, Edge, Matching


@dataclass(frozen=True)
class WeightedGraph:
    base: CouplingGraph
    edge_weights: dict[Edge, float]

    def __post_init__(self):
        for edge in self.base.edges:
            w = self.edge_weights.get(edge)
            if w is None:
                raise ValueError(f"missing weight for edge {edge}")
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"weight of edge {edge} must be finite and nonnegative, got {w}")


def weights_from_angles(graph: CouplingGraph, theta_tilde) -> WeightedGraph:
    """Weight each edge (j,k) by |theta_j - theta_k|."""
    if len(theta_tilde) != graph.num_qubits:
        raise ValueError("need one angle per qubit")
    weights = {(j, k): abs(theta_tilde[j] - theta_tilde[k]) for j, k in graph.edges}
    return WeightedGraph(graph, weights)


def _exact_objective(edges: list[Edge], weights: dict[Edge, float]) -> dict[Edge, int]:
    """Single integer objective encoding (min weight, lex-smallest pair list).

    Floats are dyadic rationals, so scaling by the common power-of-two
    denominator is exact. Weights are shifted left by |E| bits and each edge
    gains a bonus 2^(|E|-1-rank): any genuine weight difference dominates the
    bonus sum, while among equal-weight optima the bonus prefers the matching
    whose sorted pair list is lexicographically smallest. The solver maximizes,
    so scaled weights enter negated.
    """
    m = len(edges)
    fracs = [Fraction(weights[e]) for e in edges]
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
    ranked = sorted(edges)
    rank = {e: i for i, e in enumerate(ranked)}
    return {
        e: -(int(f * denom) << m) + (1 << (m - 1 - rank[e]))
        for e, f in zip(edges, fracs)
    }


def min_weight_matching(wg: WeightedGraph) -> Matching:
    """Minimum-weight matching among all maximum-cardinality matchings.

    Exact (blossom algorithm over exact integer weights); ties broken toward
    the lexicographically smallest sorted pair list, so results are
    reproducible and invariant under positive weight rescaling.
    """
    graph = wg.base
    edges = list(graph.edges)
    if not edges:
        return Matching.of(graph, ())
    objective = _exact_objective(edges, wg.edge_weights)
    g = nx.Graph()
    g.add_nodes_from(range(graph.num_qubits))
    for edge in edges:
        g.add_edge(*edge, weight=objective[edge])
    mate = nx.max_weight_matching(g, maxcardinality=True)
    return Matching.of(graph, mate)
