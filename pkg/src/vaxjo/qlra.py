"""Quantum-like representation of contextual data.

Starting from the marginals of two dichotomous reference observables a, b
under a context C and their transition matrices, this module computes the
interference coefficients, classifies the context as trigonometric or
hyperbolic, builds the probability amplitude psi_C over the b-values and
realizes a and b as self-adjoint 2x2 matrices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateData,
    NonOrthonormalBasis,
    NotHyperbolic,
    NotTrigonometric,
    PhaseInconsistency,
)
from .hyperbolic import HyperbolicNumber
from .kolmogorov import ContextualData, check_conditions

BOUNDARY_EPS = 1e-12
DEFAULT_TOLERANCE = 1e-9
GRAM_TOLERANCE = 1e-9


class ContextKind(str, enum.Enum):
    TRIGONOMETRIC = "trigonometric"
    HYPERBOLIC = "hyperbolic"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class InterferenceReport:
    lambda_b: tuple
    lambda_a: tuple
    kind: ContextKind

    def to_dict(self) -> dict:
        return {
            "lambda_b": list(self.lambda_b),
            "lambda_a": list(self.lambda_a),
            "kind": self.kind.value,
        }


@dataclass(frozen=True)
class Amplitude:
    """Two-component amplitude psi_C(beta_1), psi_C(beta_2).

    ``components`` holds (re, im) pairs for complex amplitudes and (x, y)
    pairs, meaning x + j*y with j*j = +1, for hyperbolic ones. For the
    hyperbolic kind both phases equal the hyperbolic angle and ``signs``
    carries the sign of each interference coefficient.
    """

    kind: str
    components: tuple
    phases: tuple
    lambdas: tuple
    born_residual: float
    phase_residual: float
    signs: tuple | None = None
    b_values: tuple = (1, -1)

    def as_complex(self) -> np.ndarray:
        if self.kind != "complex":
            raise TypeError("only complex amplitudes convert to a complex vector")
        return np.array([complex(re, im) for re, im in self.components])

    def as_hyperbolic(self) -> tuple:
        return tuple(HyperbolicNumber(x, y) for x, y in self.components)

    def squared_moduli(self) -> np.ndarray:
        if self.kind == "complex":
            return np.array([re * re + im * im for re, im in self.components])
        return np.array([x * x - y * y for x, y in self.components])

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "components": [list(c) for c in self.components],
            "phases": list(self.phases),
            "lambda": list(self.lambdas),
            "born_residual": self.born_residual,
            "phase_residual": self.phase_residual,
            "b_values": list(self.b_values),
        }
        if self.signs is not None:
            out["signs"] = list(self.signs)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> Amplitude:
        signs = d.get("signs")
        return cls(
            kind=d["kind"],
            components=tuple(tuple(float(v) for v in c) for c in d["components"]),
            phases=tuple(float(v) for v in d["phases"]),
            lambdas=tuple(float(v) for v in d["lambda"]),
            born_residual=float(d["born_residual"]),
            phase_residual=float(d.get("phase_residual", 0.0)),
            signs=None if signs is None else tuple(int(s) for s in signs),
            b_values=tuple(d.get("b_values", (1, -1))),
        )


@dataclass(frozen=True, eq=False)
class ObservablePair:
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    a_basis: np.ndarray
    b_basis: np.ndarray
    a_eigenvalues: tuple
    b_eigenvalues: tuple
    gram_residual: float
    decomposition_residual: float

    def commutator(self) -> np.ndarray:
        return self.a_matrix @ self.b_matrix - self.b_matrix @ self.a_matrix

    def to_dict(self) -> dict:
        def cplx(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(m)]

        return {
            "a_matrix": cplx(self.a_matrix),
            "b_matrix": cplx(self.b_matrix),
            "a_basis": cplx(self.a_basis),
            "b_basis": cplx(self.b_basis),
            "a_eigenvalues": list(self.a_eigenvalues),
            "b_eigenvalues": list(self.b_eigenvalues),
            "gram_residual": self.gram_residual,
            "decomposition_residual": self.decomposition_residual,
        }


def _products(p: np.ndarray, t: np.ndarray, j: int) -> tuple:
    """(A, B) = (p(x_1) t(y_j|x_1), p(x_2) t(y_j|x_2))."""
    return float(p[0] * t[0, j]), float(p[1] * t[1, j])


def _coefficients(p_cond: np.ndarray, p_from: np.ndarray, t: np.ndarray) -> tuple:
    lambdas = []
    for j in range(2):
        a, b = _products(p_from, t, j)
        denom = 2.0 * math.sqrt(a * b)
        if denom == 0.0:
            raise DegenerateData("a transition probability or a marginal vanishes (R2/R2a)")
        lambdas.append((float(p_cond[j]) - (a + b)) / denom)
    return tuple(lambdas)


def _require_dichotomous(data: ContextualData) -> None:
    if len(data.a_values) != 2 or len(data.b_values) != 2:
        raise DegenerateData("only dichotomous observables are supported")


def interference_coefficients(data: ContextualData, boundary_eps: float = BOUNDARY_EPS) -> InterferenceReport:
    """Interference coefficients lambda(beta|a,C) and lambda(alpha|b,C).

    lambda = (p_C(y) - sum_x p_C(x) p(y|x)) / (2 sqrt(prod_x p_C(x) p(y|x)))
    """
    _require_dichotomous(data)
    if np.any(data.p_a <= 0) or np.any(data.p_b <= 0):
        raise DegenerateData("context is degenerate for a or b (R2a)")
    if np.any(data.t_b_given_a <= 0) or np.any(data.t_a_given_b <= 0):
        raise DegenerateData("observables are mutually degenerate (R2)")
    lambda_b = _coefficients(data.p_b, data.p_a, data.t_b_given_a)
    lambda_a = _coefficients(data.p_a, data.p_b, data.t_a_given_b)
    largest = max(abs(v) for v in lambda_b + lambda_a)
    if largest <= 1.0 - boundary_eps:
        kind = ContextKind.TRIGONOMETRIC
    elif largest > 1.0 + boundary_eps:
        kind = ContextKind.HYPERBOLIC
    else:
        kind = ContextKind.BOUNDARY
    return InterferenceReport(lambda_b, lambda_a, kind)


def _check_r1(data: ContextualData, tolerance: float) -> None:
    report = check_conditions(data, tolerance)
    if not report.r1:
        raise PhaseInconsistency(
            f"observables are not symmetrically conditioned (R1 residual {report.r1_residual:.3g} > {tolerance:g})"
        )


def build_complex_amplitude(
    data: ContextualData, tolerance: float = DEFAULT_TOLERANCE, *, mirror_phase: bool = False
) -> Amplitude:
    """Complex amplitude psi(beta) = sqrt(A) + exp(i theta(beta)) sqrt(B).

    theta(beta_1) is the principal arccos of lambda(beta_1) and
    theta(beta_2) = theta(beta_1) + pi. ``mirror_phase`` negates theta(beta_1),
    which gives the complex-conjugate state.
    """
    report = interference_coefficients(data)
    if report.kind is ContextKind.HYPERBOLIC:
        raise NotTrigonometric(f"interference coefficients exceed one: {report.lambda_b + report.lambda_a}")
    _check_r1(data, tolerance)
    lam1, lam2 = report.lambda_b
    theta1 = math.acos(min(1.0, max(-1.0, lam1)))
    if mirror_phase:
        theta1 = -theta1
    theta2 = theta1 + math.pi
    phase_residual = abs(math.cos(theta2) - lam2)
    if phase_residual > tolerance:
        raise PhaseInconsistency(f"cos(theta_2) differs from lambda(beta_2) by {phase_residual:.3g}")

    components = []
    for j, theta in enumerate((theta1, theta2)):
        a, b = _products(data.p_a, data.t_b_given_a, j)
        psi = math.sqrt(a) + complex(math.cos(theta), math.sin(theta)) * math.sqrt(b)
        components.append((psi.real, psi.imag))
    moduli = [re * re + im * im for re, im in components]
    born = max(abs(m - float(p)) for m, p in zip(moduli, data.p_b))
    return Amplitude(
        kind="complex",
        components=tuple(components),
        phases=(theta1, theta2),
        lambdas=report.lambda_b,
        born_residual=born,
        phase_residual=phase_residual,
        b_values=data.b_values,
    )


def build_hyperbolic_amplitude(data: ContextualData, tolerance: float = DEFAULT_TOLERANCE) -> Amplitude:
    """Hyperbolic amplitude psi(beta) = sqrt(A) + eps_beta e^{j theta} sqrt(B).

    theta = arccosh |lambda(beta_1)| and eps_beta = sign lambda(beta); the
    hyperbolic Born rule x^2 - y^2 = p_C(beta) then holds.
    """
    report = interference_coefficients(data)
    if report.kind is not ContextKind.HYPERBOLIC:
        raise NotHyperbolic(f"context is {report.kind.value}; use the complex representation")
    lam1, lam2 = report.lambda_b
    if abs(lam1) <= 1.0 + BOUNDARY_EPS:
        raise NotHyperbolic("lambda(beta|a,C) lies within [-1, 1]; the b-amplitude is not hyperbolic")
    _check_r1(data, tolerance)
    eps1 = 1 if lam1 > 0 else -1
    eps2 = 1 if lam2 > 0 else -1
    if eps2 != -eps1:
        raise PhaseInconsistency("interference coefficients of beta_1 and beta_2 share a sign")
    theta = math.acosh(abs(lam1))
    phase_residual = abs(math.cosh(theta) - abs(lam2))
    if phase_residual > tolerance:
        raise PhaseInconsistency(f"cosh(theta) differs from |lambda(beta_2)| by {phase_residual:.3g}")

    rotor = HyperbolicNumber.exp_j(theta)
    components = []
    for j, eps in enumerate((eps1, eps2)):
        a, b = _products(data.p_a, data.t_b_given_a, j)
        psi = math.sqrt(a) + eps * math.sqrt(b) * rotor
        components.append((psi.x, psi.y))
    moduli = [x * x - y * y for x, y in components]
    born = max(abs(m - float(p)) for m, p in zip(moduli, data.p_b))
    return Amplitude(
        kind="hyperbolic",
        components=tuple(components),
        phases=(theta, theta),
        lambdas=report.lambda_b,
        born_residual=born,
        phase_residual=phase_residual,
        signs=(eps1, eps2),
        b_values=data.b_values,
    )


def build_amplitude(data: ContextualData, tolerance: float = DEFAULT_TOLERANCE, *, mirror_phase: bool = False):
    """Dispatch to the complex or hyperbolic construction by context kind."""
    if interference_coefficients(data).kind is ContextKind.HYPERBOLIC:
        return build_hyperbolic_amplitude(data, tolerance)
    return build_complex_amplitude(data, tolerance, mirror_phase=mirror_phase)


def inner(phi: np.ndarray, psi: np.ndarray) -> complex:
    """<phi, psi> = sum_beta phi(beta) conj(psi(beta))."""
    return complex(np.sum(phi * np.conj(psi)))


def build_operators(
    data: ContextualData,
    amplitude: Amplitude,
    a_eigenvalues=(1.0, -1.0),
    b_eigenvalues=(1.0, -1.0),
    gram_tolerance: float = GRAM_TOLERANCE,
) -> ObservablePair:
    """Self-adjoint matrices representing a and b.

    b is the multiplication operator diag(beta_1, beta_2). The a-basis is
    e_1 = (u_11, u_12), e_2 = (e^{i theta_1} u_21, e^{i theta_2} u_22) with
    u_ij = sqrt(p(beta_j|alpha_i)), and a = sum_i alpha_i |e_i><e_i|.
    """
    if amplitude.kind != "complex":
        raise NotTrigonometric("operators are built for complex amplitudes only")
    u = np.sqrt(data.t_b_given_a)
    theta1, theta2 = amplitude.phases
    e1 = u[0].astype(complex)
    e2 = np.array([np.exp(1j * theta1) * u[1, 0], np.exp(1j * theta2) * u[1, 1]])
    basis = np.vstack([e1, e2])
    gram = np.array([[inner(basis[i], basis[k]) for k in range(2)] for i in range(2)])
    gram_residual = float(np.max(np.abs(gram - np.eye(2))))
    if gram_residual > gram_tolerance:
        raise NonOrthonormalBasis(f"a-basis Gram matrix deviates from identity by {gram_residual:.3g}")

    a_matrix = sum(alpha * np.outer(e, np.conj(e)) for alpha, e in zip(a_eigenvalues, basis))
    b_matrix = np.diag(np.asarray(b_eigenvalues, dtype=complex))
    psi = amplitude.as_complex()
    u_a = np.sqrt(data.p_a)
    decomposition = u_a[0] * e1 + u_a[1] * e2
    return ObservablePair(
        a_matrix=a_matrix,
        b_matrix=b_matrix,
        a_basis=basis,
        b_basis=np.eye(2, dtype=complex),
        a_eigenvalues=tuple(float(v) for v in a_eigenvalues),
        b_eigenvalues=tuple(float(v) for v in b_eigenvalues),
        gram_residual=gram_residual,
        decomposition_residual=float(np.max(np.abs(decomposition - psi))),
    )


def expectation(operator: np.ndarray, psi: np.ndarray) -> float:
    """Hilbert-space average <A psi, psi>."""
    return inner(operator @ psi, psi).real


def verify_interference_formula(data: ContextualData, report: InterferenceReport, amplitude: Amplitude | None = None) -> float:
    """Largest deviation between the observed marginals and their
    reconstruction sum_x p(x) p(y|x) + 2 lambda sqrt(prod_x p(x) p(y|x)).

    When an amplitude is given, lambda(beta) is replaced by cos(theta) for
    complex amplitudes and eps * cosh(theta) for hyperbolic ones.
    """
    lambda_b = report.lambda_b
    if amplitude is not None:
        if amplitude.kind == "complex":
            lambda_b = tuple(math.cos(t) for t in amplitude.phases)
        else:
            lambda_b = tuple(s * math.cosh(t) for s, t in zip(amplitude.signs, amplitude.phases))
    residuals = []
    for p_cond, p_from, t, lambdas in (
        (data.p_b, data.p_a, data.t_b_given_a, lambda_b),
        (data.p_a, data.p_b, data.t_a_given_b, report.lambda_a),
    ):
        for j in range(2):
            a, b = _products(p_from, t, j)
            rebuilt = a + b + 2.0 * lambdas[j] * math.sqrt(a * b)
            residuals.append(abs(rebuilt - float(p_cond[j])))
    return max(residuals)
