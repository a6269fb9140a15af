"""Wall measurements and the sequential fly-box experiments.

A sequential experiment measures one wall on flies prepared in the hidden
context (marginals), and for transitions measures a second wall on flies
that were already separated by the first. Without disturbance the flies in
each part re-equilibrate to the original food field; with the
``sector_sine`` disturbance the first wall redistributes food so that the
density becomes |sin(theta - phi0)| in its half-disc.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import AllSamplesKilled, SchemaError
from ..kolmogorov import ContextualData
from .geometry import FlyPositions, FoodField, GeometricContext, Splitter
from .sampling import sample_flies, sample_sector_sine

OUTCOMES = (1, -1)
EXPERIMENTS = (
    "first",
    "second",
    "second|first=+1",
    "second|first=-1",
    "first|second=+1",
    "first|second=-1",
)


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome counts of one experiment.

    Keys of ``counts`` are outcomes (+1 / -1) or, for transition
    experiments, (first outcome, second outcome) pairs.
    """

    counts: dict
    metadata: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return int(sum(self.counts.values()))

    def frequencies(self) -> dict:
        total = self.total
        return {k: c / total for k, c in self.counts.items()}

    def transition(self) -> np.ndarray:
        """Row-normalized 2x2 matrix for pair-keyed records; rows are the
        first outcome (+1, -1), columns the second."""
        out = np.zeros((2, 2))
        for i, e0 in enumerate(OUTCOMES):
            row = np.array([self.counts.get((e0, e1), 0) for e1 in OUTCOMES], dtype=float)
            if row.sum() == 0:
                raise AllSamplesKilled(f"no surviving flies in branch {e0:+d}")
            out[i] = row / row.sum()
        return out

    def to_dict(self) -> dict:
        def key(k):
            return ",".join(f"{v:+d}" for v in k) if isinstance(k, tuple) else f"{k:+d}"

        return {
            "counts": {key(k): int(v) for k, v in self.counts.items()},
            "frequencies": {key(k): v for k, v in self.frequencies().items()} if self.total else {},
            "metadata": self.metadata,
        }


def classify(positions: FlyPositions, splitter: Splitter) -> np.ndarray:
    return splitter.classify(positions)


def measure_split(positions: FlyPositions, splitter: Splitter) -> MeasurementRecord:
    if len(positions) == 0:
        raise ValueError("no positions to measure")
    outcomes = splitter.classify(positions)
    plus = int(np.count_nonzero(outcomes == 1))
    return MeasurementRecord({1: plus, -1: len(outcomes) - plus}, {"splitter": splitter.name})


def analytic_transition(phi0: float, phi: float) -> np.ndarray:
    """Closed-form transition matrix of the disturbing phi0-wall followed by
    a phi-wall: [[cos^2(d/2), sin^2(d/2)], [sin^2(d/2), cos^2(d/2)]], d = phi - phi0."""
    half = 0.5 * (phi - phi0)
    c2 = math.cos(half) ** 2
    s2 = math.sin(half) ** 2
    return np.array([[c2, s2], [s2, c2]])


class ConstantSurvival:
    """Every fly survives a wall with probability ``p``."""

    def __init__(self, p: float):
        if not 0.0 <= p <= 1.0:
            raise SchemaError("survival probability must lie in [0, 1]")
        self.p = float(p)

    def __call__(self, splitter: Splitter, positions: FlyPositions) -> np.ndarray:
        return np.full(len(positions), self.p)

    def to_dict(self) -> dict:
        return {"kind": "constant", "p": self.p}


class RegionSurvival:
    """Survival probability ``inside`` within ``region`` and ``outside``
    elsewhere, applied only for walls named in ``splitters`` (all walls when
    empty)."""

    def __init__(self, region: GeometricContext, inside: float, outside: float = 1.0, splitters=()):
        for p in (inside, outside):
            if not 0.0 <= p <= 1.0:
                raise SchemaError("survival probability must lie in [0, 1]")
        self.region = region
        self.inside = float(inside)
        self.outside = float(outside)
        self.splitters = tuple(splitters)

    def __call__(self, splitter: Splitter, positions: FlyPositions) -> np.ndarray:
        if self.splitters and splitter.name not in self.splitters:
            return np.ones(len(positions))
        return np.where(self.region.contains(positions), self.inside, self.outside)

    def to_dict(self) -> dict:
        return {
            "kind": "region",
            "region": self.region.to_list(),
            "inside": self.inside,
            "outside": self.outside,
            "splitters": list(self.splitters),
        }


# (rng, n, wall, side) -> positions of flies after the wall separated them
Redistribution = Callable[[np.random.Generator, int, Splitter, int], FlyPositions]


@dataclass(frozen=True, eq=False)
class FlyBoxScenario:
    """Everything needed to run a sequential fly-box experiment.

    ``ensemble`` optionally replaces the fixed context with a list of
    (context, weight) pairs; every box then gets its own context draw.
    ``disturbance`` is ``"none"``, ``"sector_sine"`` or a callable
    :data:`Redistribution`.
    """

    field: FoodField
    context: GeometricContext
    first: Splitter
    second: Splitter
    n: int
    seed: int = 0
    disturbance: object = "none"
    survival: object = None
    ensemble: tuple | None = None
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise SchemaError("n must be at least 1")
        if self.context.geometry != self.field.geometry:
            raise SchemaError("context and field geometries differ")
        if self.workers < 1:
            raise SchemaError("workers must be at least 1")
        if isinstance(self.disturbance, str):
            if self.disturbance not in ("none", "sector_sine"):
                raise SchemaError(f"unknown disturbance {self.disturbance!r}")
            if self.disturbance == "sector_sine" and (
                self.field.geometry != "disc" or self.first.kind != "angle" or self.second.kind != "angle"
            ):
                raise SchemaError("sector_sine disturbance needs the disc and angle walls")
        if self.ensemble is not None:
            weights = np.array([w for _, w in self.ensemble], dtype=float)
            if weights.size == 0 or weights.min() < 0 or weights.sum() <= 0:
                raise SchemaError("ensemble weights must be nonnegative with positive sum")
            for ctx, _ in self.ensemble:
                if ctx.geometry != self.field.geometry:
                    raise SchemaError("ensemble context geometry differs from the field")

    def to_dict(self) -> dict:
        disturbance = self.disturbance if isinstance(self.disturbance, str) else "custom"
        survival = None
        if self.survival is not None:
            survival = self.survival.to_dict() if hasattr(self.survival, "to_dict") else "custom"
        out = {
            "geometry": self.field.geometry,
            "field": self.field.to_dict(),
            "context": self.context.to_list(),
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
            "disturbance": disturbance,
            "survival": survival,
            "n": self.n,
            "seed": self.seed,
        }
        if self.ensemble is not None:
            out["ensemble"] = {
                "contexts": [c.to_list() for c, _ in self.ensemble],
                "weights": [float(w) for _, w in self.ensemble],
            }
        if self.workers != 1:
            out["workers"] = self.workers
        return out

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Estimated contextual data plus the raw record and outcome sequence
    of each of the six experiments (see :data:`EXPERIMENTS`)."""

    data: ContextualData
    records: dict
    outcomes: dict
    metadata: dict

    def transition(self) -> np.ndarray:
        return self.data.t_b_given_a

    def to_dict(self) -> dict:
        return {
            "data": self.data.to_dict(),
            "records": {k: r.to_dict() for k, r in self.records.items()},
            "metadata": self.metadata,
        }


def _prepared(scenario: FlyBoxScenario, n: int, rng) -> FlyPositions:
    """Flies prepared in the hidden context (or a context drawn per box)."""
    if scenario.ensemble is None:
        return sample_flies(scenario.field, scenario.context, n, rng)
    weights = np.array([w for _, w in scenario.ensemble], dtype=float)
    per_context = rng.multinomial(n, weights / weights.sum())
    parts = [
        sample_flies(scenario.field, ctx, int(k), rng)
        for (ctx, _), k in zip(scenario.ensemble, per_context)
        if k > 0
    ]
    return FlyPositions.concat(scenario.field.geometry, parts)


def _separated(scenario: FlyBoxScenario, wall: Splitter, side: int, n: int, rng) -> FlyPositions:
    """Flies in the ``side`` part after ``wall`` came down and the packet broke."""
    if callable(scenario.disturbance):
        return scenario.disturbance(rng, n, wall, side)
    if scenario.disturbance == "sector_sine":
        return sample_sector_sine(wall.phi, side, n, rng)
    return sample_flies(scenario.field, wall.region(side, scenario.field.geometry), n, rng)


def _observe(scenario: FlyBoxScenario, positions: FlyPositions, wall: Splitter, rng) -> np.ndarray:
    if scenario.survival is not None:
        p = np.asarray(scenario.survival(wall, positions), dtype=float)
        if p.min(initial=1.0) < 0 or p.max(initial=0.0) > 1:
            raise SchemaError("survival function returned values outside [0, 1]")
        positions = positions.take(rng.random(len(positions)) < p)
    return wall.classify(positions)


def _run_experiment(scenario: FlyBoxScenario, name: str, n: int, rng) -> np.ndarray:
    if name == "first":
        return _observe(scenario, _prepared(scenario, n, rng), scenario.first, rng)
    if name == "second":
        return _observe(scenario, _prepared(scenario, n, rng), scenario.second, rng)
    target, given = name.split("|")
    wall_given = scenario.first if given.startswith("first") else scenario.second
    wall_target = scenario.first if target == "first" else scenario.second
    side = int(given.split("=")[1])
    return _observe(scenario, _separated(scenario, wall_given, side, n, rng), wall_target, rng)


def _split_counts(n: int, workers: int) -> list:
    base, extra = divmod(n, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _experiment_outcomes(scenario: FlyBoxScenario, name: str, seq) -> np.ndarray:
    if scenario.workers == 1:
        return _run_experiment(scenario, name, scenario.n, np.random.default_rng(seq))
    streams = seq.spawn(scenario.workers)
    sizes = _split_counts(scenario.n, scenario.workers)
    with ThreadPoolExecutor(max_workers=scenario.workers) as pool:
        parts = list(
            pool.map(
                lambda args: _run_experiment(scenario, name, args[0], np.random.default_rng(args[1])),
                zip(sizes, streams),
            )
        )
    return np.concatenate(parts)


def _frequencies(outcomes: np.ndarray, name: str) -> np.ndarray:
    if outcomes.size == 0:
        raise AllSamplesKilled(f"every fly was removed in experiment {name!r}")
    plus = int(np.count_nonzero(outcomes == 1))
    return np.array([plus / outcomes.size, (outcomes.size - plus) / outcomes.size])


def run_scenario(scenario: FlyBoxScenario) -> ScenarioResult:
    """Run the six experiments of a sequential measurement and estimate
    the contextual data (a = first wall, b = second wall)."""
    streams = np.random.SeedSequence(scenario.seed).spawn(len(EXPERIMENTS))
    outcomes = {name: _experiment_outcomes(scenario, name, seq) for name, seq in zip(EXPERIMENTS, streams)}
    digest = scenario.digest()
    records = {}
    for name, out in outcomes.items():
        plus = int(np.count_nonzero(out == 1))
        records[name] = MeasurementRecord(
            {1: plus, -1: int(out.size - plus)},
            {"experiment": name, "seed": scenario.seed, "n": scenario.n, "scenario": digest},
        )
    p_a = _frequencies(outcomes["first"], "first")
    p_b = _frequencies(outcomes["second"], "second")
    t_ba = np.vstack([_frequencies(outcomes[f"second|first={s:+d}"], f"second|first={s:+d}") for s in OUTCOMES])
    t_ab = np.vstack([_frequencies(outcomes[f"first|second={s:+d}"], f"first|second={s:+d}") for s in OUTCOMES])
    data = ContextualData(OUTCOMES, OUTCOMES, p_a, p_b, t_ba, t_ab)
    metadata = {"seed": scenario.seed, "n": scenario.n, "scenario": digest, "workers": scenario.workers}
    return ScenarioResult(data, records, outcomes, metadata)


def nondisturbing_sequential(
    field: FoodField,
    context: GeometricContext | None,
    first: Splitter,
    second: Splitter,
    n: int,
    seed: int = 0,
) -> ContextualData:
    """Estimate contextual data with walls that leave the food field intact."""
    if context is None:
        context = GeometricContext.whole(field.geometry)
    scenario = FlyBoxScenario(field, context, first, second, n=n, seed=seed)
    return run_scenario(scenario).data


def disturbing_sequential(phi0: float, phi: float, n: int, seed: int = 0, workers: int = 1) -> MeasurementRecord:
    """Transition counts for a disturbing phi0-wall followed by a phi-wall.

    Each branch (+ and -) gets ``n`` flies drawn from the sine density left
    by the phi0-wall in that half-disc, then classified by the phi-wall.
    """
    if n < 1:
        raise SchemaError("n must be at least 1")
    first = Splitter.angle(phi0)
    second = Splitter.angle(phi)
    counts = {}
    for side, seq in zip(OUTCOMES, np.random.SeedSequence(seed).spawn(2)):
        if workers == 1:
            chunks = [(n, seq)]
        else:
            chunks = list(zip(_split_counts(n, workers), seq.spawn(workers)))

        def branch(args, side=side):
            size, s = args
            return second.classify(sample_sector_sine(first.phi, side, size, np.random.default_rng(s)))

        if workers == 1:
            out = branch(chunks[0])
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                out = np.concatenate(list(pool.map(branch, chunks)))
        plus = int(np.count_nonzero(out == 1))
        counts[(side, 1)] = plus
        counts[(side, -1)] = int(out.size - plus)
    return MeasurementRecord(
        counts,
        {"phi0": float(phi0), "phi": float(phi), "n": n, "seed": seed, "workers": workers},
    )
