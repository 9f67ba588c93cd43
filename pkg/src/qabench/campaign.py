"""Many-sample benchmark campaigns: run, aggregate, persist.

Results are a single schema-versioned JSON document. Per-sample seeds derive
from (master seed, strategy name, sample index) via splitmix64 chaining, so
runs are reproducible and adding a strategy never perturbs existing samples.
"""
from __future__ import annotations

import json
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .protocol import STRATEGIES, RoundRecord, run_protocol
from .simulator import NoiseModel, ShotRecord
from .topology import catalog_device

SCHEMA_VERSION = 1
BIT_ORDER_NOTE = "little-endian: qubit 0 is the least-significant / rightmost bit"

RAW_METRICS = ("fuzz", "success", "diff")
MITIGATED_METRICS = ("fuzz_mitigated", "success_mitigated", "diff_mitigated")
MITIGATION_MODES = ("off", "on", "both")


class ResultFormatError(ValueError):
    """Malformed results file; the message names the offending field path."""


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def _fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode():
        h = ((h ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def derive_seed(master: int, strategy: str, sample: int) -> int:
    s = _splitmix64(master & 0xFFFFFFFFFFFFFFFF)
    s = _splitmix64(s ^ _fnv1a64(strategy))
    return _splitmix64(s ^ sample)


@dataclass(frozen=True)
class CampaignSpec:
    device: str
    strategies: tuple[str, ...]
    rounds: int
    samples: int
    seed: int
    shots: int | None = None  # None = exact mode
    noise: NoiseModel = field(default_factory=NoiseModel.ideal)
    mitigation: str = "off"
    full_records: bool = False
    stat_noise_random_sign: bool = False  # +- sign variant of the emulated offset

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if not self.strategies:
            raise ValueError("need at least one strategy")
        for s in self.strategies:
            if s not in STRATEGIES or s == "player-pairs":
                raise ValueError(f"strategy {s!r} not runnable in a campaign")
        if self.mitigation not in MITIGATION_MODES:
            raise ValueError(f"mitigation must be one of {MITIGATION_MODES}")

    @property
    def metrics(self) -> tuple[str, ...]:
        if self.mitigation == "off":
            return RAW_METRICS
        if self.mitigation == "on":
            return MITIGATED_METRICS
        return RAW_METRICS + MITIGATED_METRICS

    def to_dict(self) -> dict:
        return {
            "device": self.device,
            "strategies": list(self.strategies),
            "rounds": self.rounds,
            "samples": self.samples,
            "seed": self.seed,
            "shots": self.shots,
            "noise": {"p1": self.noise.p1, "p2": self.noise.p2, "readout": self.noise.readout},
            "mitigation": self.mitigation,
            "full_records": self.full_records,
            "stat_noise_random_sign": self.stat_noise_random_sign,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignSpec":
        noise = data.get("noise", {})
        return cls(
            device=data["device"],
            strategies=tuple(data["strategies"]),
            rounds=int(data["rounds"]),
            samples=int(data["samples"]),
            seed=int(data["seed"]),
            shots=data.get("shots"),
            noise=NoiseModel(p1=noise.get("p1", 0.0), p2=noise.get("p2", 0.0),
                             readout=noise.get("readout", 0.0)),
            mitigation=data.get("mitigation", "off"),
            full_records=bool(data.get("full_records", False)),
            stat_noise_random_sign=bool(data.get("stat_noise_random_sign", False)),
        )


@dataclass
class CampaignResult:
    spec: CampaignSpec
    series: dict  # strategy -> metric -> {"mean": [...], "std": [...]}
    samples: dict | None = None  # strategy -> [per-sample list of round dicts]
    created: str = ""
    extras: dict = field(default_factory=dict)  # unknown top-level fields, preserved

    def to_dict(self) -> dict:
        doc = {
            "schema": SCHEMA_VERSION,
            "bit_order": BIT_ORDER_NOTE,
            "created": self.created,
            "spec": self.spec.to_dict(),
            "series": self.series,
        }
        if self.samples is not None:
            doc["samples"] = self.samples
        doc.update(self.extras)
        return doc


def _serialize_record(record: RoundRecord) -> dict:
    out = {
        "round": record.round_index,
        "pairs": [list(p) for p in record.entangling.matching.pairs],
        "unpaired": list(record.entangling.matching.unpaired),
        "angles": [record.entangling.angles[p] for p in record.entangling.matching.pairs],
        "assumed_pairs": [list(p) for p in record.inverse.assumed_matching.pairs],
        "assumed_angles": [record.inverse.assumed_angles[p]
                           for p in record.inverse.assumed_matching.pairs],
        "inverse_mode": record.inverse.mode,
        "conjugation": [[axis, phi] for axis, phi in record.conjugation.rotations],
        "p_tilde": list(record.p_tilde),
        "theta_tilde": list(record.theta_tilde),
        "metrics": record.metrics.as_dict(),
    }
    if record.p_bar is not None:
        out["p_bar"] = list(record.p_bar)
        out["theta_bar"] = list(record.theta_bar)
    if isinstance(record.measurement, ShotRecord):
        out["counts"] = record.measurement.bitstring_counts()
    return out


def _run_sample(args) -> tuple[str, int, dict]:
    spec_dict, strategy, sample, devices_dir = args
    spec = CampaignSpec.from_dict(spec_dict)
    graph = catalog_device(spec.device, devices_dir)
    seed = derive_seed(spec.seed, strategy, sample)
    records = run_protocol(
        graph, spec.rounds, strategy, shots=spec.shots, noise=spec.noise,
        seed=seed, mitigation=spec.mitigation != "off",
        stat_noise_random_sign=spec.stat_noise_random_sign,
    )
    metrics = {m: [r.metrics.as_dict()[m] for r in records] for m in spec.metrics}
    out = {"metrics": metrics}
    if spec.full_records:
        out["records"] = [_serialize_record(r) for r in records]
    return strategy, sample, out


def run_campaign(spec: CampaignSpec, devices_dir=None, jobs: int = 1) -> CampaignResult:
    """Execute samples x strategies protocol runs and aggregate mean/std per round."""
    catalog_device(spec.device, devices_dir)  # validate before any work
    tasks = [(spec.to_dict(), strategy, sample, devices_dir)
             for strategy in spec.strategies for sample in range(spec.samples)]
    if jobs > 1:
        # spawn, not fork: the gate kernels' OpenMP runtime is not fork-safe
        context = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=context) as pool:
            outcomes = list(pool.map(_run_sample, tasks, chunksize=4))
    else:
        outcomes = [_run_sample(t) for t in tasks]

    per_strategy: dict[str, dict[int, dict]] = {s: {} for s in spec.strategies}
    for strategy, sample, out in outcomes:
        per_strategy[strategy][sample] = out

    series: dict = {}
    samples_doc: dict | None = {} if spec.full_records else None
    for strategy in spec.strategies:
        ordered = [per_strategy[strategy][i] for i in range(spec.samples)]
        series[strategy] = {}
        for metric in spec.metrics:
            grid = np.array([o["metrics"][metric] for o in ordered])
            series[strategy][metric] = {
                "mean": [float(v) for v in grid.mean(axis=0)],
                "std": [float(v) for v in grid.std(axis=0)],
            }
        if samples_doc is not None:
            samples_doc[strategy] = [o["records"] for o in ordered]

    created = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return CampaignResult(spec=spec, series=series, samples=samples_doc, created=created)


def write_result(result: CampaignResult, path) -> None:
    doc = json.dumps(result.to_dict(), indent=1, sort_keys=True)
    Path(path).write_text(doc + "\n")


_KNOWN_TOP_LEVEL = ("schema", "bit_order", "created", "spec", "series", "samples")


def _expect(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise ResultFormatError(f"missing field {path}{key}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ResultFormatError(f"field {path}{key} has wrong type {type(value).__name__}")
    return value


def read_result(path) -> CampaignResult:
    """Parse a results file; unknown fields are preserved for re-serialization."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ResultFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ResultFormatError("top level must be an object")
    schema = _expect(doc, "schema", int, "")
    if schema != SCHEMA_VERSION:
        raise ResultFormatError(f"field schema has unsupported version {schema}")
    spec_doc = _expect(doc, "spec", dict, "")
    try:
        spec = CampaignSpec.from_dict(spec_doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ResultFormatError(f"field spec is malformed: {exc}") from exc
    series = _expect(doc, "series", dict, "")
    for strategy, metrics in series.items():
        if not isinstance(metrics, dict):
            raise ResultFormatError(f"field series.{strategy} must be an object")
        for metric, arrays in metrics.items():
            if not isinstance(arrays, dict):
                raise ResultFormatError(f"field series.{strategy}.{metric} must be an object")
            for leg in ("mean", "std"):
                values = arrays.get(leg)
                if not isinstance(values, list) or len(values) != spec.rounds:
                    raise ResultFormatError(
                        f"field series.{strategy}.{metric}.{leg} must be a list of length rounds")
    extras = {k: v for k, v in doc.items() if k not in _KNOWN_TOP_LEVEL}
    return CampaignResult(
        spec=spec,
        series=series,
        samples=doc.get("samples"),
        created=doc.get("created", ""),
        extras=extras,
    )
