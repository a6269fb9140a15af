"""Bell-type inequality for transition probabilities.

For dichotomous a, b, c uniformly distributed on one Kolmogorov space,

    P(a=+1 | b=+1) + P(c=+1 | b=-1) >= P(a=+1 | c=+1).

With uniform marginals every conditional equals twice a joint probability,
so the statement reduces to Wigner's joint-probability inequality
P(a=+1, b=+1) + P(c=+1, b=-1) >= P(a=+1, c=+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError, UniformityViolation, ZeroProbabilityEvent
from .flybox.experiments import analytic_transition, disturbing_sequential, measure_split
from .flybox.geometry import FoodField, Splitter
from .flybox.sampling import sample_flies

DEFAULT_TOL = 1e-9
_PLUS, _MINUS = 0, 1  # axis index of the +1 and -1 outcomes


@dataclass(frozen=True)
class BellTriple:
    marginals: tuple
    p_a_plus_given_b_plus: float
    p_c_plus_given_b_minus: float
    p_a_plus_given_c_plus: float
    names: tuple = ("a", "b", "c")

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(float(m) for m in self.marginals))
        if len(self.marginals) != 3:
            raise SchemaError("a Bell triple needs three marginals")
        values = self.marginals + (
            self.p_a_plus_given_b_plus,
            self.p_c_plus_given_b_minus,
            self.p_a_plus_given_c_plus,
        )
        if any(not (0.0 <= float(v) <= 1.0) for v in values):
            raise SchemaError("probabilities must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "marginals": list(self.marginals),
            "p_a_plus_given_b_plus": self.p_a_plus_given_b_plus,
            "p_c_plus_given_b_minus": self.p_c_plus_given_b_minus,
            "p_a_plus_given_c_plus": self.p_a_plus_given_c_plus,
        }

    @classmethod
    def from_dict(cls, d: dict) -> BellTriple:
        try:
            return cls(
                tuple(d["marginals"]),
                float(d["p_a_plus_given_b_plus"]),
                float(d["p_c_plus_given_b_minus"]),
                float(d["p_a_plus_given_c_plus"]),
                tuple(d.get("names", ("a", "b", "c"))),
            )
        except KeyError as exc:
            raise SchemaError(f"missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc)) from None


@dataclass(frozen=True, eq=False)
class JointDistribution3:
    """Weights over sign triples; ``weights[i, j, k]`` is P(a, b, c) with
    index 0 for +1 and 1 for -1."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(2, 2, 2)
        if w.min() < 0 or abs(w.sum() - 1.0) > 1e-12:
            raise SchemaError("joint weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls) -> JointDistribution3:
        return cls(np.full((2, 2, 2), 0.125))

    def symmetrized(self) -> JointDistribution3:
        """Average with the all-signs-flipped distribution; every marginal becomes 1/2."""
        return JointDistribution3(0.5 * (self.weights + self.weights[::-1, ::-1, ::-1]))


@dataclass(frozen=True)
class BellCheck:
    satisfied: bool
    slack: float

    def to_dict(self) -> dict:
        return {"satisfied": self.satisfied, "slack": self.slack}


@dataclass(frozen=True)
class BellVerification:
    trials: int
    violations: int
    min_slack: float
    max_marginal_deviation: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "violations": self.violations,
            "min_slack": self.min_slack,
            "max_marginal_deviation": self.max_marginal_deviation,
        }


@dataclass(frozen=True)
class ScanPoint:
    phi_a: float
    phi_b: float
    phi_c: float
    slack: float


def bell_slack(triple: BellTriple) -> float:
    return triple.p_a_plus_given_b_plus + triple.p_c_plus_given_b_minus - triple.p_a_plus_given_c_plus


def check_inequality(triple: BellTriple, tol: float = DEFAULT_TOL, uniformity_tol: float | None = None) -> BellCheck:
    """Evaluate the inequality; raises if the marginals are not uniform,
    since the inequality says nothing in that case."""
    if uniformity_tol is None:
        uniformity_tol = tol
    worst = max(abs(m - 0.5) for m in triple.marginals)
    if worst > uniformity_tol:
        raise UniformityViolation(f"marginals {triple.marginals} are not uniform (off by {worst:.3g})")
    slack = bell_slack(triple)
    return BellCheck(satisfied=slack >= -tol, slack=slack)


def triple_from_joint(joint: JointDistribution3) -> BellTriple:
    w = joint.weights
    pa, pb, pc = w[_PLUS].sum(), w[:, _PLUS].sum(), w[:, :, _PLUS].sum()
    p_b_minus = w[:, _MINUS].sum()
    for name, p in (("b=+1", pb), ("b=-1", p_b_minus), ("c=+1", pc)):
        if p <= 0.0:
            raise ZeroProbabilityEvent(f"conditioning event {name} has probability zero", name)
    return BellTriple(
        (float(pa), float(pb), float(pc)),
        float(w[_PLUS, _PLUS].sum() / pb),
        float(w[:, _MINUS, _PLUS].sum() / p_b_minus),
        float(w[_PLUS, :, _PLUS].sum() / pc),
    )


def wigner_terms(joint: JointDistribution3) -> tuple:
    """(P(a+, b+), P(c+, b-), P(a+, c+)); the first two sum to at least the third."""
    w = joint.weights
    return (
        float(w[_PLUS, _PLUS].sum()),
        float(w[:, _MINUS, _PLUS].sum()),
        float(w[_PLUS, :, _PLUS].sum()),
    )


def _slacks(weights: np.ndarray) -> np.ndarray:
    """Vectorized slack for a stack of joints of shape (k, 2, 2, 2)."""
    pb = weights[:, :, _PLUS].sum(axis=(1, 2))
    pbm = weights[:, :, _MINUS].sum(axis=(1, 2))
    pc = weights[:, :, :, _PLUS].sum(axis=(1, 2))
    a_given_b = weights[:, _PLUS, _PLUS].sum(axis=1) / pb
    c_given_bm = weights[:, :, _MINUS, _PLUS].sum(axis=1) / pbm
    a_given_c = weights[:, _PLUS, :, _PLUS].sum(axis=1) / pc
    return a_given_b + c_given_bm - a_given_c


def random_symmetric_joints(trials: int, seed=None) -> np.ndarray:
    """``trials`` random joints with exactly uniform marginals: normalized
    uniform weights averaged with their sign-flipped image."""
    rng = np.random.default_rng(seed)
    w = rng.random((trials, 2, 2, 2))
    w /= w.sum(axis=(1, 2, 3), keepdims=True)
    return 0.5 * (w + w[:, ::-1, ::-1, ::-1])


def verify_joints(weights, tol: float = 1e-12) -> BellVerification:
    w = np.asarray(weights, dtype=float).reshape(-1, 2, 2, 2)
    slacks = _slacks(w)
    marg = np.concatenate(
        [w[:, _PLUS].sum(axis=(1, 2)), w[:, :, _PLUS].sum(axis=(1, 2)), w[:, :, :, _PLUS].sum(axis=(1, 2))]
    )
    return BellVerification(
        trials=len(w),
        violations=int(np.count_nonzero(slacks < -tol)),
        min_slack=float(slacks.min()),
        max_marginal_deviation=float(np.max(np.abs(marg - 0.5))),
    )


def verify_on_random_spaces(trials: int, seed=None, tol: float = 1e-12) -> BellVerification:
    """Check the inequality on ``trials`` random single-space joints."""
    if trials < 1:
        raise SchemaError("trials must be at least 1")
    return verify_joints(random_symmetric_joints(trials, seed), tol)


def analytic_triple(phi_a: float, phi_b: float, phi_c: float) -> BellTriple:
    """Triple of wall angles under the disturbing sine model with uniform
    marginals: conditionals read off the closed-form transition matrices."""
    return BellTriple(
        (0.5, 0.5, 0.5),
        float(analytic_transition(phi_b, phi_a)[0, 0]),
        float(analytic_transition(phi_b, phi_c)[1, 0]),
        float(analytic_transition(phi_c, phi_a)[0, 0]),
    )


def slack_grid(grid_size: int):
    """Angles k*pi/grid_size and the slack at every (phi_a, phi_b, phi_c)."""
    if grid_size < 2:
        raise SchemaError("grid size must be at least 2")
    phis = np.arange(grid_size) * math.pi / grid_size
    a, b, c = np.meshgrid(phis, phis, phis, indexing="ij")
    slack = np.cos((a - b) / 2) ** 2 + np.sin((c - b) / 2) ** 2 - np.cos((a - c) / 2) ** 2
    return phis, slack


def violation_scan(grid_size: int, tol: float = DEFAULT_TOL) -> list:
    """Grid points of [0, pi)^3 where the sine model violates the
    inequality by more than ``tol``, most violated first."""
    phis, slack = slack_grid(grid_size)
    idx = np.argwhere(slack < -tol)
    order = np.lexsort((idx[:, 2], idx[:, 1], idx[:, 0], slack[tuple(idx.T)]))
    return [
        ScanPoint(float(phis[i]), float(phis[j]), float(phis[k]), float(slack[i, j, k]))
        for i, j, k in idx[order]
    ]


def monte_carlo_triple(phi_a: float, phi_b: float, phi_c: float, n: int, seed: int = 0) -> BellTriple:
    """Estimate the triple by simulation: marginals from flies in the
    uniform disc, conditionals from disturbing sequential measurements."""
    seeds = np.random.SeedSequence(seed).generate_state(6)
    field = FoodField.uniform_disc()
    marginals = []
    for phi, s in zip((phi_a, phi_b, phi_c), seeds[:3]):
        rec = measure_split(sample_flies(field, None, n, int(s)), Splitter.angle(phi))
        marginals.append(rec.frequencies()[1])
    a_given_b = disturbing_sequential(phi_b, phi_a, n, int(seeds[3])).transition()[0, 0]
    c_given_bm = disturbing_sequential(phi_b, phi_c, n, int(seeds[4])).transition()[1, 0]
    a_given_c = disturbing_sequential(phi_c, phi_a, n, int(seeds[5])).transition()[0, 0]
    return BellTriple(tuple(marginals), float(a_given_b), float(c_given_bm), float(a_given_c))
