"""Hyperbolic (split-complex) numbers z = x + j*y with j*j = +1."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class HyperbolicNumber:
    x: float
    y: float = 0.0

    @classmethod
    def exp_j(cls, theta: float) -> HyperbolicNumber:
        """e^{j theta} = cosh(theta) + j sinh(theta)."""
        return cls(math.cosh(theta), math.sinh(theta))

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return HyperbolicNumber(self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return HyperbolicNumber(self.x - other.x, self.y - other.y)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return HyperbolicNumber(-self.x, -self.y)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return HyperbolicNumber(
            self.x * other.x + self.y * other.y,
            self.x * other.y + self.y * other.x,
        )

    __rmul__ = __mul__

    def conjugate(self) -> HyperbolicNumber:
        return HyperbolicNumber(self.x, -self.y)

    def modulus_squared(self) -> float:
        """z * conj(z) = x^2 - y^2; may be negative or zero for nonzero z."""
        return self.x * self.x - self.y * self.y

    def __iter__(self):
        yield self.x
        yield self.y


J = HyperbolicNumber(0.0, 1.0)


def _coerce(value):
    if isinstance(value, HyperbolicNumber):
        return value
    if isinstance(value, (int, float)):
        return HyperbolicNumber(float(value), 0.0)
    return NotImplemented
