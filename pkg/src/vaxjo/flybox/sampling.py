"""Drawing fly positions from a food field conditioned on a region."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ZeroMeasureContext
from .geometry import (
    TWO_PI,
    FlyPositions,
    FoodField,
    GeometricContext,
    _sine_cdf,
    _sine_cdf_inverse,
    angular_mass,
)


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _square_pieces(field: FoodField, context: GeometricContext):
    """Intersections of the context's rectangles with grid cells, with their masses."""
    ny, nx = field.weights.shape
    bounds, masses = [], []
    for r in context.rects:
        ix0, ix1 = int(math.floor(r.x0 * nx)), min(nx, int(math.ceil(r.x1 * nx)))
        iy0, iy1 = int(math.floor(r.y0 * ny)), min(ny, int(math.ceil(r.y1 * ny)))
        cx = np.arange(ix0, ix1)
        cy = np.arange(iy0, iy1)
        lo_x = np.maximum(cx / nx, r.x0)
        hi_x = np.minimum((cx + 1) / nx, r.x1)
        lo_y = np.maximum(cy / ny, r.y0)
        hi_y = np.minimum((cy + 1) / ny, r.y1)
        frac = np.outer((hi_y - lo_y) * ny, (hi_x - lo_x) * nx)
        mass = field.weights[iy0:iy1, ix0:ix1] * frac
        gy, gx = np.meshgrid(np.arange(len(cy)), np.arange(len(cx)), indexing="ij")
        bounds.append(
            np.column_stack([lo_x[gx.ravel()], hi_x[gx.ravel()], lo_y[gy.ravel()], hi_y[gy.ravel()]])
        )
        masses.append(mass.ravel())
    bounds = np.concatenate(bounds)
    masses = np.concatenate(masses)
    keep = masses > 0
    return bounds[keep], masses[keep]


def context_measure(field: FoodField, context: GeometricContext) -> float:
    """Field mass of the context."""
    if field.geometry != context.geometry:
        raise ValueError("field and context live in different geometries")
    if field.geometry == "square":
        _, masses = _square_pieces(field, context)
        return float(masses.sum())
    offset = field.phi0 if field.family == "sector_sine" else 0.0
    return angular_mass(field, context.angular_intervals(offset))


def _sample_angles(field: FoodField, context: GeometricContext, n: int, rng) -> np.ndarray:
    offset = field.phi0 if field.family == "sector_sine" else 0.0
    intervals = context.angular_intervals(offset)
    lo = np.array([a for a, _ in intervals])
    hi = np.array([b for _, b in intervals])
    if field.family == "uniform":
        glo, ghi = lo, hi
    else:
        glo, ghi = _sine_cdf(lo), _sine_cdf(hi)
    masses = ghi - glo
    if masses.sum() <= 0:
        raise ZeroMeasureContext("context carries no food-field mass")
    pick = rng.choice(len(intervals), size=n, p=masses / masses.sum())
    g = glo[pick] + rng.random(n) * masses[pick]
    rel = g if field.family == "uniform" else _sine_cdf_inverse(g)
    return np.mod(rel + offset, TWO_PI)


def sample_flies(field: FoodField, context: GeometricContext | None, n: int, seed=None) -> FlyPositions:
    """``n`` i.i.d. positions from the field conditioned on ``context``.

    Deterministic for a given integer seed or generator state.
    """
    if context is None:
        context = GeometricContext.whole(field.geometry)
    if field.geometry != context.geometry:
        raise ValueError("field and context live in different geometries")
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = as_generator(seed)
    if field.geometry == "square":
        bounds, masses = _square_pieces(field, context)
        total = masses.sum() if masses.size else 0.0
        if total <= 0:
            raise ZeroMeasureContext("context carries no food-field mass")
        pick = rng.choice(len(masses), size=n, p=masses / total)
        b = bounds[pick]
        u = rng.random((n, 2))
        x = b[:, 0] + u[:, 0] * (b[:, 1] - b[:, 0])
        y = b[:, 2] + u[:, 1] * (b[:, 3] - b[:, 2])
        return FlyPositions("square", np.column_stack([x, y]))
    theta = _sample_angles(field, context, n, rng)
    r = np.sqrt(rng.random(n))
    return FlyPositions("disc", np.column_stack([r, theta]))


def sector_sine_angles(u, phi0: float, side: int = 1) -> np.ndarray:
    """Inverse transform for the density sin(theta - phi0) on the "+" half
    [phi0, phi0 + pi], or -sin(theta - phi0) on the "-" half."""
    theta = phi0 + np.arccos(1.0 - 2.0 * np.asarray(u, dtype=float))
    if side == -1:
        theta = theta + math.pi
    return np.mod(theta, TWO_PI)


def sample_sector_sine(phi0: float, side: int, n: int, seed=None) -> FlyPositions:
    """Positions after a disturbing phi0-wall: radius r = sqrt(v), angle by
    inverse transform of the sine density on the chosen half-disc."""
    rng = as_generator(seed)
    u = rng.random(n)
    v = rng.random(n)
    return FlyPositions("disc", np.column_stack([np.sqrt(v), sector_sine_angles(u, phi0, side)]))
