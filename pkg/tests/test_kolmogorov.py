import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaxjo.errors import SchemaError, ZeroProbabilityEvent
from vaxjo.kolmogorov import (
    ContextualData,
    KolmogorovSpace,
    PartitionObservable,
    check_conditions,
    conditional_distribution,
    extract_contextual_data,
    firefly_space,
    transition_probabilities,
)


def test_space_rejects_bad_weights():
    with pytest.raises(SchemaError):
        KolmogorovSpace(("x", "y"), (0.5, 0.6))
    with pytest.raises(SchemaError):
        KolmogorovSpace(("x", "y"), (1.0, 0.0))
    with pytest.raises(SchemaError):
        KolmogorovSpace(("x", "x"), (0.5, 0.5))


def test_uniform_firefly_conditioning_on_left_half():
    space, a, b = firefly_space()
    left = conditional_distribution(space, {"w1", "w2"})
    assert left.atoms == ("w1", "w2")
    assert left.weights == pytest.approx((0.5, 0.5))
    assert transition_probabilities(space, a, b) == pytest.approx(np.full((2, 2), 0.5))


def test_conditioning_on_omega_is_identity():
    space, _, _ = firefly_space((0.1, 0.2, 0.3, 0.4))
    assert conditional_distribution(space, space.atoms) is space


def test_zero_probability_event():
    space, _, _ = firefly_space()
    with pytest.raises(ZeroProbabilityEvent):
        conditional_distribution(space, set())


def test_zero_intersection_is_rejected():
    space = KolmogorovSpace(("x", "y"), (0.5, 0.5))
    a = PartitionObservable("a", (1, -1), ({"x"}, {"y"}))
    with pytest.raises(ZeroProbabilityEvent):
        extract_contextual_data(space, space.atoms, a, a)


def test_partition_must_cover_and_be_disjoint():
    with pytest.raises(SchemaError):
        PartitionObservable("a", (1, -1), ({"x", "y"}, {"y"}))
    space = KolmogorovSpace(("x", "y", "z"), (0.2, 0.3, 0.5))
    a = PartitionObservable("a", (1, -1), ({"x"}, {"y"}))
    with pytest.raises(SchemaError):
        a.check_covers(space)


def test_firefly_example_values():
    space, a, b = firefly_space((0.2, 0.1, 0.3, 0.4))
    data = extract_contextual_data(space, {"w1", "w2", "w3"}, a, b)
    # marginals under the context: a+ = {w1, w2} -> 0.3/0.6, b+ = {w1} -> 0.2/0.6
    assert data.p_a == pytest.approx([0.5, 0.5])
    assert data.p_b == pytest.approx([1 / 3, 2 / 3])
    # transitions from the whole box: p(b+|a+) = 0.2/0.3, p(a+|b+) = 0.2/0.6
    assert data.t_b_given_a[0] == pytest.approx([2 / 3, 1 / 3])
    assert data.t_a_given_b[0] == pytest.approx([1 / 3, 2 / 3])


def test_conditioned_transitions_flag():
    space, a, b = firefly_space()
    ctx = {"w1", "w2", "w4"}
    plain = extract_contextual_data(space, ctx, a, b)
    cond = extract_contextual_data(space, ctx, a, b, conditioned_transitions=True)
    assert plain.t_b_given_a == pytest.approx(np.full((2, 2), 0.5))
    # inside {w1, w2, w4} the a=-1 cell is {w4}, which lies wholly in b=+1
    assert cond.t_b_given_a[1] == pytest.approx([1.0, 0.0])
    assert cond.p_a == pytest.approx(plain.p_a)


def test_contextual_data_roundtrip_and_readonly(worked_trig):
    again = ContextualData.from_dict(worked_trig.to_dict())
    assert again == worked_trig
    with pytest.raises(ValueError):
        worked_trig.p_a[0] = 0.1


def test_contextual_data_validation():
    t = [[0.5, 0.5], [0.5, 0.5]]
    with pytest.raises(SchemaError):
        ContextualData((1, -1), (1, -1), [0.5, 0.6], [0.5, 0.5], t, t)
    with pytest.raises(SchemaError):
        ContextualData((1, -1), (1, -1), [0.5, 0.5], [0.5, 0.5], [[0.6, 0.5], [0.5, 0.5]], t)
    with pytest.raises(SchemaError):
        ContextualData.from_dict({"a_values": [1, -1]})


def test_check_conditions_report(worked_trig):
    report = check_conditions(worked_trig)
    assert report.r1 and report.r2 and report.r2a and report.doubly_stochastic
    assert set(report.to_dict()) >= {"R1", "R2", "R2a"}


weights4 = st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4).map(lambda w: tuple(np.array(w) / sum(w)))


@given(weights4)
def test_conditioning_is_idempotent(w):
    space, _, _ = firefly_space(w)
    once = conditional_distribution(space, {"w1", "w2", "w3"})
    twice = conditional_distribution(once, {"w1", "w2", "w3"})
    assert twice.weights == pytest.approx(once.weights, abs=1e-15)


@given(weights4)
def test_conditioning_chains(w):
    space, _, _ = firefly_space(w)
    outer = {"w1", "w2", "w3"}
    inner = {"w1", "w3"}
    chained = conditional_distribution(conditional_distribution(space, outer), inner)
    direct = conditional_distribution(space, inner)
    assert chained.atoms == direct.atoms
    assert chained.weights == pytest.approx(direct.weights, rel=1e-12)


@given(weights4)
def test_transition_rows_are_stochastic(w):
    space, a, b = firefly_space(w)
    t = transition_probabilities(space, a, b)
    assert t.sum(axis=1) == pytest.approx([1.0, 1.0], abs=1e-12)


@settings(max_examples=200)
@given(weights4)
def test_symmetric_conditioning_iff_equal_halves(w):
    # p(b|a) = p(a|b) needs p(alpha) = p(beta) for every pair of cells, so R1
    # holds exactly when all four halves of the box weigh 1/2
    space, a, b = firefly_space(w)
    report = check_conditions(extract_contextual_data(space, space.atoms, a, b), tolerance=1e-9)
    off = max(abs(w[0] + w[1] - 0.5), abs(w[0] + w[3] - 0.5))
    if off > 1e-6:
        assert not report.r1
    if off < 1e-12:
        assert report.r1


@given(st.floats(0.01, 0.49))
def test_equal_halves_give_r1(w1):
    w2 = 0.5 - w1
    space, a, b = firefly_space((w1, w2, w1, w2))
    report = check_conditions(extract_contextual_data(space, space.atoms, a, b), 1e-12)
    assert report.r1 and report.doubly_stochastic


def test_unequal_halves_break_r1():
    space, a, b = firefly_space((0.4, 0.15, 0.3, 0.15))
    report = check_conditions(extract_contextual_data(space, space.atoms, a, b), 1e-12)
    assert not report.r1
    # p(b-|a+) = 0.15/0.55 against p(a+|b-) = 0.15/0.45
    assert report.r1_residual == pytest.approx(0.15 / 0.45 - 0.15 / 0.55, rel=1e-12)
