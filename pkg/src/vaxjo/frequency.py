"""Relative frequencies of outcome sequences and statistical stabilization.

Stabilization is operationalized as bounded drift: a sequence of length L
counts as stabilized when, for every value, the relative frequency over
each of the last ``window`` prefixes stays within ``tol`` of the frequency
over the full sequence. Randomness of the sequence is never tested.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InsufficientData, OutOfRange, SchemaError

DEFAULT_TOL = 1e-2


@dataclass(frozen=True, eq=False)
class OutcomeSequence:
    """Finite prefix x_1, ..., x_N of the outcomes of one observable."""

    observable_name: str
    outcomes: np.ndarray
    values: tuple = ()

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes)
        if outcomes.ndim != 1 or outcomes.size == 0:
            raise SchemaError("an outcome sequence needs at least one outcome")
        outcomes = outcomes.copy()
        outcomes.setflags(write=False)
        object.__setattr__(self, "outcomes", outcomes)
        observed = np.unique(outcomes)
        if self.values:
            values = tuple(self.values)
            extra = set(observed.tolist()) - set(values)
            if extra:
                raise SchemaError(f"outcomes outside the value set: {sorted(map(str, extra))}")
        else:
            values = tuple(observed.tolist())
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.outcomes.size

    def codes(self) -> np.ndarray:
        """Outcomes as indices into ``values``."""
        lookup = {v: i for i, v in enumerate(self.values)}
        if self.outcomes.dtype.kind in "iuf" and all(isinstance(v, (int, float)) for v in self.values):
            order = np.argsort(np.array(self.values))
            sorted_vals = np.array(self.values)[order]
            return order[np.searchsorted(sorted_vals, self.outcomes)]
        return np.fromiter((lookup[x] for x in self.outcomes.tolist()), dtype=np.intp, count=len(self))


@dataclass(frozen=True)
class StabilizationReport:
    probabilities: dict
    stabilized: bool
    window: int
    max_drift: float
    length: int = 0
    tol: float = DEFAULT_TOL

    def to_dict(self) -> dict:
        return {
            "probabilities": {str(k): v for k, v in self.probabilities.items()},
            "stabilized": self.stabilized,
            "window": self.window,
            "max_drift": self.max_drift,
            "length": self.length,
            "tol": self.tol,
        }


def relative_frequencies(seq: OutcomeSequence, n: int | None = None, *, exact: bool = False) -> dict:
    """Frequencies of each value among the first ``n`` outcomes.

    With ``exact=True`` the result holds :class:`fractions.Fraction` values
    that sum to exactly one.
    """
    if n is None:
        n = len(seq)
    if not (1 <= n <= len(seq)):
        raise OutOfRange(f"prefix length {n} outside [1, {len(seq)}]")
    counts = np.bincount(seq.codes()[:n], minlength=len(seq.values))
    if exact:
        return {v: Fraction(int(c), n) for v, c in zip(seq.values, counts)}
    return {v: int(c) / n for v, c in zip(seq.values, counts)}


def detect_stabilization(
    seq: OutcomeSequence, window: int | None = None, tol: float = DEFAULT_TOL
) -> StabilizationReport:
    length = len(seq)
    if window is None:
        window = max(1, math.ceil(length / 10))
    if window < 1:
        raise OutOfRange("window must be positive")
    if length < 2 * window:
        raise InsufficientData(f"sequence of length {length} is shorter than 2*window={2 * window}")
    codes = seq.codes()
    prefix_lengths = np.arange(length - window + 1, length + 1)
    max_drift = 0.0
    probabilities = {}
    for k, value in enumerate(seq.values):
        cum = np.cumsum(codes == k)
        final = cum[-1] / length
        trailing = cum[prefix_lengths - 1] / prefix_lengths
        max_drift = max(max_drift, float(np.max(np.abs(trailing - final))))
        probabilities[value] = float(final)
    return StabilizationReport(
        probabilities=probabilities,
        stabilized=max_drift <= tol,
        window=window,
        max_drift=max_drift,
        length=length,
        tol=tol,
    )


def _parse_label(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def read_sequence_csv(path) -> OutcomeSequence:
    """Read a one-column CSV: header is the observable name, one outcome per row."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise SchemaError(f"{path}: empty file")
    name = rows[0][0].strip()
    labels = [_parse_label(r[0].strip()) for r in rows[1:]]
    if not labels:
        raise SchemaError(f"{path}: no outcomes")
    if all(isinstance(x, int) for x in labels):
        outcomes = np.array(labels, dtype=np.int64)
    else:
        outcomes = np.array([str(x) for x in labels], dtype=object)
    return OutcomeSequence(name, outcomes)


def write_sequence_csv(path, seq: OutcomeSequence) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(f"{seq.observable_name}\n")
        fh.write("\n".join(str(x) for x in seq.outcomes.tolist()))
        fh.write("\n")
