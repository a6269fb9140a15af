"""Finite Kolmogorov spaces, partition observables and contextual data.

This is the view of an internal observer who sees every atom: Bayes
conditioning, transition probabilities between two partitions, and the
extraction of the data an external observer would collect for a context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import SchemaError, ZeroProbabilityEvent

DEFAULT_TOLERANCE = 1e-9
_SUM_TOL = 1e-12


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class KolmogorovSpace:
    """Finite sample space with strictly positive atom weights."""

    atoms: tuple
    weights: tuple

    def __post_init__(self):
        atoms = tuple(self.atoms)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        if len(atoms) == 0:
            raise SchemaError("a Kolmogorov space needs at least one atom")
        if len(atoms) != len(weights):
            raise SchemaError("atoms and weights differ in length")
        if len(set(atoms)) != len(atoms):
            raise SchemaError("atom labels must be unique")
        if any(not (0.0 < w <= 1.0) for w in weights):
            raise SchemaError("atom weights must lie in (0, 1]")
        if abs(math.fsum(weights) - 1.0) > _SUM_TOL:
            raise SchemaError(f"weights sum to {math.fsum(weights)!r}, not 1")

    @classmethod
    def uniform(cls, atoms: Sequence[Hashable]) -> KolmogorovSpace:
        return cls(tuple(atoms), (1.0 / len(atoms),) * len(atoms))

    def weight(self, event: Iterable[Hashable]) -> float:
        event = set(event)
        unknown = event.difference(self.atoms)
        if unknown:
            raise SchemaError(f"unknown atoms in event: {sorted(map(str, unknown))}")
        return math.fsum(w for a, w in zip(self.atoms, self.weights) if a in event)

    def to_dict(self) -> dict:
        return {"atoms": list(self.atoms), "weights": list(self.weights)}

    @classmethod
    def from_dict(cls, d: dict) -> KolmogorovSpace:
        try:
            return cls(tuple(d["atoms"]), tuple(d["weights"]))
        except KeyError as exc:
            raise SchemaError(f"missing key {exc}") from None


@dataclass(frozen=True)
class PartitionObservable:
    """A random variable given by a partition of the atoms, one cell per value."""

    name: str
    values: tuple
    cells: tuple

    def __post_init__(self):
        values = tuple(self.values)
        cells = tuple(frozenset(c) for c in self.cells)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "cells", cells)
        if len(values) != len(cells):
            raise SchemaError(f"{self.name}: one cell per value required")
        if len(set(values)) != len(values):
            raise SchemaError(f"{self.name}: duplicate values")
        seen: set = set()
        for cell in cells:
            if seen & cell:
                raise SchemaError(f"{self.name}: cells are not disjoint")
            seen |= cell

    def cell(self, value) -> frozenset:
        return self.cells[self.values.index(value)]

    def check_covers(self, space: KolmogorovSpace) -> None:
        union = frozenset().union(*self.cells)
        if union != frozenset(space.atoms):
            raise SchemaError(f"{self.name}: cells do not cover the sample space")

    def __call__(self, atom):
        for value, cell in zip(self.values, self.cells):
            if atom in cell:
                return value
        raise KeyError(atom)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "values": list(self.values),
            "cells": [sorted(c, key=str) for c in self.cells],
        }

    @classmethod
    def from_dict(cls, d: dict) -> PartitionObservable:
        try:
            return cls(d["name"], tuple(d["values"]), tuple(tuple(c) for c in d["cells"]))
        except KeyError as exc:
            raise SchemaError(f"missing key {exc}") from None


@dataclass(frozen=True, eq=False)
class ContextualData:
    """Marginals of two dichotomous observables under a context plus the
    two transition matrices.

    ``t_b_given_a[i, j]`` is the probability of ``b_values[j]`` in the
    selection context of ``a_values[i]``; ``t_a_given_b`` is indexed the
    other way round.
    """

    a_values: tuple
    b_values: tuple
    p_a: np.ndarray
    p_b: np.ndarray
    t_b_given_a: np.ndarray
    t_a_given_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a_values", tuple(self.a_values))
        object.__setattr__(self, "b_values", tuple(self.b_values))
        for name in ("p_a", "p_b", "t_b_given_a", "t_a_given_b"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        na, nb = len(self.a_values), len(self.b_values)
        if self.p_a.shape != (na,) or self.p_b.shape != (nb,):
            raise SchemaError("marginal length does not match the value set")
        if self.t_b_given_a.shape != (na, nb) or self.t_a_given_b.shape != (nb, na):
            raise SchemaError("transition matrix shape does not match the value sets")
        for name in ("p_a", "p_b", "t_b_given_a", "t_a_given_b"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
                raise SchemaError(f"{name} entries must lie in [0, 1]")
        for name in ("p_a", "p_b"):
            if abs(math.fsum(getattr(self, name)) - 1.0) > _SUM_TOL:
                raise SchemaError(f"{name} does not sum to 1")
        for name in ("t_b_given_a", "t_a_given_b"):
            for row in getattr(self, name):
                if abs(math.fsum(row) - 1.0) > _SUM_TOL:
                    raise SchemaError(f"{name} is not row-stochastic")

    def __eq__(self, other):
        if not isinstance(other, ContextualData):
            return NotImplemented
        return (
            self.a_values == other.a_values
            and self.b_values == other.b_values
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("p_a", "p_b", "t_b_given_a", "t_a_given_b")
            )
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "a_values": list(self.a_values),
            "b_values": list(self.b_values),
            "p_a": self.p_a.tolist(),
            "p_b": self.p_b.tolist(),
            "t_b_given_a": self.t_b_given_a.tolist(),
            "t_a_given_b": self.t_a_given_b.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ContextualData:
        try:
            return cls(
                tuple(d["a_values"]),
                tuple(d["b_values"]),
                d["p_a"],
                d["p_b"],
                d["t_b_given_a"],
                d["t_a_given_b"],
            )
        except KeyError as exc:
            raise SchemaError(f"missing key {exc}") from None


@dataclass(frozen=True)
class ConditionReport:
    r1: bool
    r2: bool
    r2a: bool
    doubly_stochastic: bool
    column_sums: tuple = field(default=())
    r1_residual: float = 0.0

    def to_dict(self) -> dict:
        return {
            "R1": self.r1,
            "R2": self.r2,
            "R2a": self.r2a,
            "doubly_stochastic": self.doubly_stochastic,
            "column_sums": list(self.column_sums),
            "r1_residual": self.r1_residual,
        }


def conditional_distribution(space: KolmogorovSpace, event) -> KolmogorovSpace:
    """Bayes conditioning of ``space`` on ``event``.

    The result keeps the atoms of the event, in their original order, with
    weights divided by the weight of the event.
    """
    event = frozenset(event)
    if event == frozenset(space.atoms):
        return space
    total = space.weight(event)
    if total <= 0.0:
        raise ZeroProbabilityEvent(f"event {sorted(map(str, event))} has probability zero", event)
    kept = [(a, w) for a, w in zip(space.atoms, space.weights) if a in event]
    return KolmogorovSpace(tuple(a for a, _ in kept), tuple(w / total for _, w in kept))


def _cell_weight(space: KolmogorovSpace, cell) -> float:
    return math.fsum(w for a, w in zip(space.atoms, space.weights) if a in cell)


def transition_probabilities(
    space: KolmogorovSpace, a: PartitionObservable, b: PartitionObservable
) -> np.ndarray:
    """Matrix of P(b = beta | a = alpha) with rows indexed by a's values."""
    out = np.empty((len(a.values), len(b.values)))
    for i, (alpha, cell_a) in enumerate(zip(a.values, a.cells)):
        wa = _cell_weight(space, cell_a)
        if wa <= 0.0:
            raise ZeroProbabilityEvent(f"{a.name}={alpha!r} has probability zero", cell_a)
        for j, cell_b in enumerate(b.cells):
            out[i, j] = _cell_weight(space, cell_a & cell_b) / wa
    return out


def _marginal(space: KolmogorovSpace, obs: PartitionObservable) -> np.ndarray:
    return np.array([_cell_weight(space, c) for c in obs.cells])


def extract_contextual_data(
    space: KolmogorovSpace,
    context,
    a: PartitionObservable,
    b: PartitionObservable,
    *,
    conditioned_transitions: bool = False,
) -> ContextualData:
    """Data D(O, C) an external observer would collect for ``context``.

    Marginals come from the space conditioned on the context. Transition
    probabilities come from the unconditioned space: after a wall splits
    the box the flies re-equilibrate to the food field in each part.
    ``conditioned_transitions=True`` takes them from the conditioned space
    instead; that mode exists only to explore the discrepancy.
    """
    a.check_covers(space)
    b.check_covers(space)
    for obs in (a, b):
        for value, cell in zip(obs.values, obs.cells):
            if space.weight(cell) <= 0.0:
                raise ZeroProbabilityEvent(f"{obs.name}={value!r} has probability zero", cell)
    for alpha, ca in zip(a.values, a.cells):
        for beta, cb in zip(b.values, b.cells):
            if _cell_weight(space, ca & cb) <= 0.0:
                raise ZeroProbabilityEvent(
                    f"{a.name}={alpha!r} and {b.name}={beta!r} never co-occur", ca & cb
                )
    conditioned = conditional_distribution(space, context)
    if conditioned_transitions:
        a_c = _restrict(a, conditioned)
        b_c = _restrict(b, conditioned)
        t_ba = transition_probabilities(conditioned, a_c, b_c)
        t_ab = transition_probabilities(conditioned, b_c, a_c)
    else:
        t_ba = transition_probabilities(space, a, b)
        t_ab = transition_probabilities(space, b, a)
    return ContextualData(
        a.values,
        b.values,
        _marginal(conditioned, a),
        _marginal(conditioned, b),
        t_ba,
        t_ab,
    )


def _restrict(obs: PartitionObservable, space: KolmogorovSpace) -> PartitionObservable:
    atoms = frozenset(space.atoms)
    return PartitionObservable(obs.name, obs.values, tuple(c & atoms for c in obs.cells))


def check_conditions(data: ContextualData, tolerance: float = DEFAULT_TOLERANCE) -> ConditionReport:
    """Report on symmetric conditioning (R1), mutual nondegeneracy (R2),
    nondegeneracy of the context (R2a) and double stochasticity."""
    residual = float(np.max(np.abs(data.t_b_given_a - data.t_a_given_b.T)))
    column_sums = tuple(float(math.fsum(col)) for col in data.t_b_given_a.T)
    return ConditionReport(
        r1=residual <= tolerance,
        r2=bool(np.all(data.t_b_given_a > 0.0) and np.all(data.t_a_given_b > 0.0)),
        r2a=bool(np.all(data.p_a > 0.0) and np.all(data.p_b > 0.0)),
        doubly_stochastic=all(abs(s - 1.0) <= tolerance for s in column_sums),
        column_sums=column_sums,
        r1_residual=residual,
    )


def firefly_space(weights=(0.25, 0.25, 0.25, 0.25)):
    """The four-cell box with its vertical (a) and horizontal (b) walls.

    Returns ``(space, a, b)``; a = +1 on the left half {w1, w2}, b = +1 on
    the top half {w1, w4}.
    """
    atoms = ("w1", "w2", "w3", "w4")
    space = KolmogorovSpace(atoms, tuple(weights))
    a = PartitionObservable("a", (1, -1), ({"w1", "w2"}, {"w3", "w4"}))
    b = PartitionObservable("b", (1, -1), ({"w1", "w4"}, {"w2", "w3"}))
    return space, a, b
