"""Device coupling graphs: real-device catalog, parametric families, random pairings.

Real devices ship as JSON data files (best-effort reconstructions of public
coupling maps) so they can be corrected without a rebuild; parametric families
(line_N, ladder_N, square_N, complete_N) are generated.
"""
from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import networkx as nx
import numpy as np

REAL_DEVICES = ("ibmqx4", "ibmqx5", "8Q-Agave", "19Q-Acorn")
PARAMETRIC_FAMILIES = ("line", "ladder", "square", "complete")

Edge = tuple[int, int]


class DeviceError(ValueError):
    """Unknown device name, bad device file, or violated family constraint."""


def edge_label(index: int) -> str:
    """Letter sequence for an edge-list position: 0 -> 'a', 25 -> 'z', 26 -> 'aa'."""
    if index < 0:
        raise ValueError("edge index must be nonnegative")
    label = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        label = string.ascii_lowercase[rem] + label
    return label


@dataclass(frozen=True)
class CouplingGraph:
    """Simple undirected graph of qubits; edges mark allowed entangling pairs.

    Edge order is meaningful: labels ('a', 'b', ...) are assigned in list order.
    """

    name: str
    num_qubits: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.num_qubits < 1:
            raise DeviceError(f"{self.name}: num_qubits must be positive")
        normalized = []
        seen = set()
        for edge in self.edges:
            a, b = edge
            if a == b:
                raise DeviceError(f"{self.name}: self-loop on qubit {a}")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise DeviceError(f"{self.name}: edge {edge} out of range")
            pair = (min(a, b), max(a, b))
            if pair in seen:
                raise DeviceError(f"{self.name}: duplicate edge {pair}")
            seen.add(pair)
            normalized.append(pair)
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(edge_label(i) for i in range(len(self.edges)))

    def label_of(self, edge: Edge) -> str:
        pair = (min(edge), max(edge))
        return edge_label(self.edges.index(pair))

    def edge_of(self, label: str) -> Edge:
        try:
            return dict(zip(self.labels, self.edges))[label]
        except KeyError:
            raise KeyError(f"{self.name}: no edge labelled {label!r}") from None

    def labeled_edges(self) -> list[tuple[str, Edge]]:
        return list(zip(self.labels, self.edges))


@dataclass(frozen=True)
class Matching:
    """A vertex-disjoint set of graph edges plus the qubits it leaves unpaired."""

    pairs: tuple[Edge, ...]
    unpaired: tuple[int, ...]

    @classmethod
    def of(cls, graph: CouplingGraph, pairs) -> "Matching":
        """Validate ``pairs`` against ``graph`` and fill in the unpaired set."""
        normalized = tuple(sorted((min(p), max(p)) for p in pairs))
        edge_set = set(graph.edges)
        used: set[int] = set()
        for pair in normalized:
            if pair not in edge_set:
                raise ValueError(f"pair {pair} is not an edge of {graph.name}")
            if pair[0] in used or pair[1] in used:
                raise ValueError(f"pair {pair} overlaps another pair")
            used.update(pair)
        unpaired = tuple(q for q in range(graph.num_qubits) if q not in used)
        return cls(pairs=normalized, unpaired=unpaired)

    def partner(self, qubit: int) -> int | None:
        for a, b in self.pairs:
            if qubit == a:
                return b
            if qubit == b:
                return a
        return None


def line_graph(n: int) -> CouplingGraph:
    if n < 2:
        raise DeviceError(f"line_{n}: need at least 2 qubits")
    return CouplingGraph(f"line_{n}", n, tuple((i, i + 1) for i in range(n - 1)))


def ladder_graph(n: int) -> CouplingGraph:
    """Two coupled paths of n/2 qubits each, joined by n/2 rungs."""
    if n < 2 or n % 2:
        raise DeviceError(f"ladder_{n}: qubit count must be even and >= 2")
    half = n // 2
    edges = [(i, i + 1) for i in range(half - 1)]
    edges += [(half + i, half + i + 1) for i in range(half - 1)]
    edges += [(i, half + i) for i in range(half)]
    return CouplingGraph(f"ladder_{n}", n, tuple(edges))


def square_graph(n: int) -> CouplingGraph:
    side = math.isqrt(n)
    if side * side != n or n < 4:
        raise DeviceError(f"square_{n}: qubit count must be a perfect square >= 4")
    edges = []
    for row in range(side):
        for col in range(side):
            q = row * side + col
            if col < side - 1:
                edges.append((q, q + 1))
            if row < side - 1:
                edges.append((q, q + side))
    return CouplingGraph(f"square_{n}", n, tuple(edges))


def complete_graph(n: int) -> CouplingGraph:
    if n < 2:
        raise DeviceError(f"complete_{n}: need at least 2 qubits")
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    return CouplingGraph(f"complete_{n}", n, edges)


_FAMILY_BUILDERS = {
    "line": line_graph,
    "ladder": ladder_graph,
    "square": square_graph,
    "complete": complete_graph,
}


def _parse_family(name: str):
    head, _, tail = name.rpartition("_")
    if head in _FAMILY_BUILDERS and tail.isdigit():
        return _FAMILY_BUILDERS[head], int(tail)
    return None


def load_device_record(name: str, devices_dir: str | Path | None = None) -> dict:
    """Raw JSON record for a real device; unknown fields are preserved."""
    if devices_dir is not None:
        path = Path(devices_dir) / f"{name}.json"
        if path.is_file():
            return json.loads(path.read_text())
    packaged = resources.files("qabench").joinpath(f"devices/{name}.json")
    if packaged.is_file():
        return json.loads(packaged.read_text())
    raise DeviceError(f"unknown device {name!r}")


def _graph_from_record(record: dict) -> CouplingGraph:
    try:
        name = record["name"]
        num_qubits = int(record["num_qubits"])
        edges = tuple((int(a), int(b)) for a, b in record["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DeviceError(f"bad device record: {exc}") from exc
    return CouplingGraph(name, num_qubits, edges)


def catalog_device(name: str, devices_dir: str | Path | None = None) -> CouplingGraph:
    """Resolve a device name to its coupling graph.

    Accepts a real-device name from the catalog (data files) or a parametric
    family name like line_5, ladder_16, square_9, complete_19.
    """
    family = _parse_family(name)
    if family is not None:
        builder, n = family
        return builder(n)
    return _graph_from_record(load_device_record(name, devices_dir))


def list_devices(devices_dir: str | Path | None = None) -> list[str]:
    """Names of all real devices in the catalog (packaged plus any in devices_dir)."""
    names = set()
    for entry in resources.files("qabench").joinpath("devices").iterdir():
        if entry.name.endswith(".json"):
            names.add(entry.name[: -len(".json")])
    if devices_dir is not None and Path(devices_dir).is_dir():
        for path in Path(devices_dir).glob("*.json"):
            names.add(path.stem)
    return sorted(names)


def random_maximal_matching(graph: CouplingGraph, rng: np.random.Generator) -> Matching:
    """Random maximum-cardinality matching, deterministic given the stream.

    Blossom matching on iid uniform edge weights: always pairs as many qubits
    as the connectivity allows (so a qubit is left out only when unavoidable),
    with the argmax randomized by the weights. Not uniform over maximum
    matchings; a known, documented bias.
    """
    if not graph.edges:
        raise ValueError(f"{graph.name} has no edges to pair")
    weights = rng.random(len(graph.edges))
    g = nx.Graph()
    g.add_nodes_from(range(graph.num_qubits))
    for edge, w in zip(graph.edges, weights):
        g.add_edge(*edge, weight=float(w))
    mate = nx.max_weight_matching(g, maxcardinality=True)
    return Matching.of(graph, mate)
