from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vaxjo.errors import InsufficientData, OutOfRange
from vaxjo.frequency import (
    OutcomeSequence,
    detect_stabilization,
    read_sequence_csv,
    relative_frequencies,
    write_sequence_csv,
)


def test_relative_frequencies_small_example():
    seq = OutcomeSequence("a", np.array([1, -1, 1, 1]), values=(1, -1))
    assert relative_frequencies(seq) == {1: 0.75, -1: 0.25}
    assert relative_frequencies(seq, 2) == {1: 0.5, -1: 0.5}
    with pytest.raises(OutOfRange):
        relative_frequencies(seq, 5)
    with pytest.raises(OutOfRange):
        relative_frequencies(seq, 0)


@given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=200))
def test_exact_frequencies_sum_to_one(outcomes):
    seq = OutcomeSequence("a", np.array(outcomes), values=(1, -1))
    freqs = relative_frequencies(seq, exact=True)
    assert sum(freqs.values()) == 1
    assert freqs[1] == Fraction(outcomes.count(1), len(outcomes))


def test_bernoulli_stabilizes():
    rng = np.random.default_rng(7)
    seq = OutcomeSequence("a", np.where(rng.random(10**6) < 0.3, 1, -1), values=(1, -1))
    report = detect_stabilization(seq, window=10**4, tol=5e-3)
    assert report.stabilized
    assert abs(report.probabilities[1] - 0.3) < 0.005


def test_alternating_blocks_do_not_stabilize():
    outcomes = np.concatenate([np.ones(500), -np.ones(500)]).astype(int)
    seq = OutcomeSequence("a", outcomes, values=(1, -1))
    assert not detect_stabilization(seq, window=400, tol=1e-2).stabilized


def test_too_short_sequence():
    seq = OutcomeSequence("a", np.array([1, -1, 1]), values=(1, -1))
    with pytest.raises(InsufficientData):
        detect_stabilization(seq, window=2)


@given(st.integers(0, 2**32 - 1), st.floats(1e-4, 0.05), st.floats(1.0, 10.0))
def test_stabilization_is_monotone_in_tol(seed, tol, factor):
    rng = np.random.default_rng(seed)
    seq = OutcomeSequence("a", np.where(rng.random(2000) < 0.4, 1, -1), values=(1, -1))
    tight = detect_stabilization(seq, window=200, tol=tol)
    loose = detect_stabilization(seq, window=200, tol=tol * factor)
    assert tight.max_drift == loose.max_drift
    if tight.stabilized:
        assert loose.stabilized


def test_csv_roundtrip(tmp_path):
    seq = OutcomeSequence("spin", np.array([1, -1, -1, 1]))
    path = tmp_path / "s.csv"
    write_sequence_csv(path, seq)
    back = read_sequence_csv(path)
    assert back.observable_name == "spin"
    assert back.outcomes.tolist() == [1, -1, -1, 1]


def test_csv_string_labels(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("colour\nred\nblue\nred\n")
    seq = read_sequence_csv(path)
    assert relative_frequencies(seq)["red"] == pytest.approx(2 / 3)
