import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vaxjo.bell import (
    BellTriple,
    JointDistribution3,
    analytic_triple,
    bell_slack,
    check_inequality,
    monte_carlo_triple,
    random_symmetric_joints,
    slack_grid,
    triple_from_joint,
    verify_joints,
    verify_on_random_spaces,
    violation_scan,
    wigner_terms,
)
from vaxjo.errors import SchemaError, UniformityViolation, ZeroProbabilityEvent


def test_analytic_violation():
    triple = analytic_triple(0.0, math.pi / 2, math.pi / 6)
    # 1/2 + 1/4 - cos^2(pi/12) = (1 - sqrt 3) / 4
    assert bell_slack(triple) == pytest.approx((1 - math.sqrt(3)) / 4, abs=1e-15)
    result = check_inequality(triple)
    assert not result.satisfied


def test_uniform_joint_has_slack_one_half():
    triple = triple_from_joint(JointDistribution3.uniform())
    assert check_inequality(triple).slack == pytest.approx(0.5)


def test_nonuniform_marginals_rejected():
    triple = BellTriple((0.5, 0.7, 0.5), 0.5, 0.5, 0.5)
    with pytest.raises(UniformityViolation):
        check_inequality(triple)


def test_triple_roundtrip_and_validation():
    triple = analytic_triple(0.1, 0.2, 0.3)
    assert BellTriple.from_dict(triple.to_dict()) == triple
    with pytest.raises(SchemaError):
        BellTriple.from_dict({"marginals": [0.5, 0.5, 0.5]})
    with pytest.raises(SchemaError):
        BellTriple((0.5, 0.5, 0.5), 1.5, 0.0, 0.0)


def test_zero_probability_condition():
    w = np.zeros((2, 2, 2))
    w[0, 0, 0] = 1.0
    with pytest.raises(ZeroProbabilityEvent):
        triple_from_joint(JointDistribution3(w))


@pytest.mark.parametrize("signs", list(itertools.product((0, 1), repeat=3)))
def test_wigner_form_on_deterministic_vertices(signs):
    w = np.zeros((2, 2, 2))
    w[signs] = 1.0
    ab, cb, ac = wigner_terms(JointDistribution3(w))
    assert ab + cb >= ac


simplex = arrays(np.float64, (2, 2, 2), elements=st.floats(0.0, 1.0)).filter(lambda w: w.sum() > 1e-3)


@given(simplex)
def test_wigner_form_holds_for_every_joint(w):
    ab, cb, ac = wigner_terms(JointDistribution3(w / w.sum()))
    assert ab + cb >= ac - 1e-12


@given(simplex)
def test_conditionals_are_twice_joints_under_uniform_marginals(w):
    joint = JointDistribution3(w / w.sum()).symmetrized()
    triple = triple_from_joint(joint)
    assert triple.marginals == pytest.approx((0.5, 0.5, 0.5), abs=1e-12)
    ab, cb, ac = wigner_terms(joint)
    assert triple.p_a_plus_given_b_plus == pytest.approx(2 * ab, abs=1e-12)
    assert triple.p_c_plus_given_b_minus == pytest.approx(2 * cb, abs=1e-12)
    assert triple.p_a_plus_given_c_plus == pytest.approx(2 * ac, abs=1e-12)
    assert check_inequality(triple, tol=1e-12).satisfied


def test_same_sign_variant_is_not_a_law():
    # P(a+, b+) <= P(a+, c+) + P(c+, b+) fails for this uniform-marginal joint,
    # which is why the opposite-sign form above is the one used
    w = np.zeros((2, 2, 2))
    w[0, 0, 1] = w[1, 1, 0] = 0.5
    joint = JointDistribution3(w)
    p = joint.weights
    assert p[0, 0].sum() > p[0, :, 0].sum() + p[:, 0, 0].sum()
    assert check_inequality(triple_from_joint(joint)).satisfied


def test_random_joints_verify():
    result = verify_on_random_spaces(10_000, seed=7)
    assert result.violations == 0
    assert result.min_slack >= -1e-12
    assert result.max_marginal_deviation <= 1e-12
    assert verify_on_random_spaces(100, seed=7) == verify_on_random_spaces(100, seed=7)


def test_vectorized_slack_matches_scalar():
    w = random_symmetric_joints(50, seed=1)
    scalar = [bell_slack(triple_from_joint(JointDistribution3(x))) for x in w]
    assert verify_joints(w).min_slack == pytest.approx(min(scalar), abs=1e-14)


def test_scan_small_grid():
    points = violation_scan(4)
    assert len(points) == 8
    slacks = [p.slack for p in points]
    assert slacks == sorted(slacks)
    assert all(s < -1e-9 for s in slacks)


@given(st.integers(2, 24))
def test_scan_agrees_with_closed_form(grid):
    phis, slack = slack_grid(grid)
    for p in violation_scan(grid)[:5]:
        assert bell_slack(analytic_triple(p.phi_a, p.phi_b, p.phi_c)) == pytest.approx(p.slack, abs=1e-12)
    assert len(violation_scan(grid)) == int(np.count_nonzero(slack < -1e-9))


def test_monte_carlo_triple_tracks_closed_form():
    mc = monte_carlo_triple(0.0, math.pi / 2, math.pi / 6, 50_000, seed=3)
    assert bell_slack(mc) == pytest.approx((1 - math.sqrt(3)) / 4, abs=0.02)
    assert max(abs(m - 0.5) for m in mc.marginals) < 0.01
