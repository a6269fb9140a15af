"""Boxes, food fields, hidden contexts and separating walls.

Two geometries are supported. The unit square [0,1]^2 carries a food field
given on a grid of cells, ``weights[iy, ix]`` with row 0 at the bottom. The
unit disc carries one of two analytic fields: ``uniform`` or
``sector_sine``, the density |sin(theta - phi0)| (per unit r dr dtheta,
normalized over the disc). Positions on the square are (x, y); positions
on the disc are polar (r, theta) with theta in [0, 2 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError

TWO_PI = 2.0 * math.pi
GEOMETRIES = ("square", "disc")
DEFAULT_RESOLUTION = 256


@dataclass(frozen=True)
class Rect:
    """Half-open rectangle [x0, x1) x [y0, y1)."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise SchemaError(f"empty rectangle {self}")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, x, y):
        return (x >= self.x0) & (x < self.x1) & (y >= self.y0) & (y < self.y1)


@dataclass(frozen=True)
class Sector:
    """Angular sector {theta : start <= theta < end} of the disc, taken mod 2 pi."""

    start: float
    end: float

    def __post_init__(self):
        if not self.end > self.start:
            raise SchemaError(f"empty sector {self}")

    def intervals(self) -> list:
        """Disjoint pieces of the sector inside [0, 2 pi)."""
        width = self.end - self.start
        if width >= TWO_PI:
            return [(0.0, TWO_PI)]
        lo = self.start % TWO_PI
        hi = lo + width
        if hi <= TWO_PI:
            return [(lo, hi)]
        return [(lo, TWO_PI), (0.0, hi - TWO_PI)]


def _merge(intervals) -> list:
    out: list = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _disjoint_rects(rects) -> tuple:
    """Split a union of possibly overlapping rectangles into disjoint ones."""
    if not rects:
        return ()
    xs = sorted({r.x0 for r in rects} | {r.x1 for r in rects})
    ys = sorted({r.y0 for r in rects} | {r.y1 for r in rects})
    pieces = []
    for x0, x1 in zip(xs, xs[1:]):
        xm = 0.5 * (x0 + x1)
        row = []
        for y0, y1 in zip(ys, ys[1:]):
            ym = 0.5 * (y0 + y1)
            if any(r.contains(xm, ym) for r in rects):
                row.append((y0, y1))
        for y0, y1 in _merge(row):
            pieces.append(Rect(x0, x1, y0, y1))
    return tuple(pieces)


@dataclass(frozen=True)
class GeometricContext:
    """A hidden region of the box: a union of rectangles (square) or of
    full-radius angular sectors (disc)."""

    geometry: str
    rects: tuple = ()
    sectors: tuple = ()

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise SchemaError(f"unknown geometry {self.geometry!r}")
        if self.geometry == "square":
            if self.sectors or not self.rects:
                raise SchemaError("a square context is a non-empty list of rectangles")
            clipped = []
            for r in self.rects:
                x0, x1 = max(r.x0, 0.0), min(r.x1, 1.0)
                y0, y1 = max(r.y0, 0.0), min(r.y1, 1.0)
                if x0 < x1 and y0 < y1:
                    clipped.append(Rect(x0, x1, y0, y1))
            object.__setattr__(self, "rects", _disjoint_rects(clipped))
        else:
            if self.rects or not self.sectors:
                raise SchemaError("a disc context is a non-empty list of sectors")
            object.__setattr__(self, "sectors", tuple(self.sectors))

    @classmethod
    def whole(cls, geometry: str) -> GeometricContext:
        if geometry == "square":
            return cls("square", rects=(Rect(0.0, 1.0, 0.0, 1.0),))
        return cls("disc", sectors=(Sector(0.0, TWO_PI),))

    @classmethod
    def rectangles(cls, *rects) -> GeometricContext:
        return cls("square", rects=tuple(r if isinstance(r, Rect) else Rect(*r) for r in rects))

    @classmethod
    def sector_union(cls, *sectors) -> GeometricContext:
        return cls("disc", sectors=tuple(s if isinstance(s, Sector) else Sector(*s) for s in sectors))

    def angular_intervals(self, offset: float = 0.0) -> list:
        """Disjoint angular intervals in [0, 2 pi), measured from ``offset``."""
        pieces = []
        for s in self.sectors:
            pieces.extend(Sector(s.start - offset, s.end - offset).intervals())
        return _merge(pieces)

    def contains(self, positions: FlyPositions) -> np.ndarray:
        if positions.geometry != self.geometry:
            raise SchemaError("positions and context live in different geometries")
        if self.geometry == "square":
            x, y = positions.coords[:, 0], positions.coords[:, 1]
            inside = np.zeros(len(positions), dtype=bool)
            for r in self.rects:
                inside |= r.contains(x, y)
            return inside
        theta = positions.coords[:, 1]
        inside = np.zeros(len(positions), dtype=bool)
        for lo, hi in self.angular_intervals():
            inside |= (theta >= lo) & (theta < hi)
        return inside

    def to_list(self) -> list:
        if self.geometry == "square":
            return [[r.x0, r.x1, r.y0, r.y1] for r in self.rects]
        return [[s.start, s.end] for s in self.sectors]

    @classmethod
    def from_list(cls, geometry: str, items) -> GeometricContext:
        if not items:
            return cls.whole(geometry)
        if geometry == "square":
            return cls.rectangles(*[tuple(map(float, r)) for r in items])
        return cls.sector_union(*[tuple(map(float, s)) for s in items])


@dataclass(frozen=True, eq=False)
class FlyPositions:
    geometry: str
    coords: np.ndarray

    def __len__(self):
        return self.coords.shape[0]

    def cartesian(self) -> np.ndarray:
        if self.geometry == "square":
            return self.coords
        r, theta = self.coords[:, 0], self.coords[:, 1]
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    def angles(self) -> np.ndarray:
        """Polar angle in [0, 2 pi); on the square, about the centre (0.5, 0.5)."""
        if self.geometry == "disc":
            return self.coords[:, 1]
        x = self.coords[:, 0] - 0.5
        y = self.coords[:, 1] - 0.5
        return np.mod(np.arctan2(y, x), TWO_PI)

    def take(self, mask) -> FlyPositions:
        return FlyPositions(self.geometry, self.coords[mask])

    @classmethod
    def concat(cls, geometry: str, parts) -> FlyPositions:
        parts = [p.coords for p in parts]
        if not parts:
            return cls(geometry, np.empty((0, 2)))
        return cls(geometry, np.concatenate(parts))


@dataclass(frozen=True, eq=False)
class FoodField:
    """Stationary density of flies in the box.

    On the square, ``weights`` holds the probability mass of each grid cell
    (mass spread uniformly inside the cell). ``normalization`` is the factor
    the raw input was divided by.
    """

    geometry: str
    weights: np.ndarray | None = None
    family: str | None = None
    phi0: float = 0.0
    normalization: float = 1.0

    def __post_init__(self):
        if self.geometry == "square":
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 2 or w.size == 0:
                raise SchemaError("square food field needs a 2-D grid of weights")
            if not np.all(np.isfinite(w)) or w.min() < 0:
                raise SchemaError("food field must be finite and nonnegative")
            total = float(w.sum())
            if total <= 0:
                raise SchemaError("food field has zero total mass")
            w = w / total
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "normalization", self.normalization * total)
        elif self.geometry == "disc":
            if self.family not in ("uniform", "sector_sine"):
                raise SchemaError(f"unknown disc field family {self.family!r}")
        else:
            raise SchemaError(f"unknown geometry {self.geometry!r}")

    @classmethod
    def uniform_square(cls, resolution: int = DEFAULT_RESOLUTION) -> FoodField:
        return cls("square", np.ones((resolution, resolution)))

    @classmethod
    def from_grid(cls, weights) -> FoodField:
        return cls("square", np.asarray(weights, dtype=float))

    @classmethod
    def uniform_disc(cls) -> FoodField:
        return cls("disc", family="uniform", normalization=math.pi)

    @classmethod
    def sector_sine(cls, phi0: float = 0.0) -> FoodField:
        # integral of |sin(theta - phi0)| r dr dtheta over the disc
        return cls("disc", family="sector_sine", phi0=float(phi0), normalization=2.0)

    @property
    def shape(self) -> tuple:
        return self.weights.shape

    def density(self, positions: FlyPositions) -> np.ndarray:
        """Normalized density per unit area (square) or per r dr dtheta (disc)."""
        if self.geometry == "square":
            ny, nx = self.weights.shape
            x, y = positions.coords[:, 0], positions.coords[:, 1]
            ix = np.clip((x * nx).astype(int), 0, nx - 1)
            iy = np.clip((y * ny).astype(int), 0, ny - 1)
            return self.weights[iy, ix] * (nx * ny)
        theta = positions.coords[:, 1]
        if self.family == "uniform":
            return np.full(len(positions), 1.0 / math.pi)
        return np.abs(np.sin(theta - self.phi0)) / 2.0

    def total_integral(self) -> float:
        """Integral of the normalized density over the box (1 by construction)."""
        if self.geometry == "square":
            return float(self.weights.sum())
        return angular_mass(self, [(0.0, TWO_PI)], relative=False)

    def to_dict(self) -> dict:
        if self.geometry == "square":
            return {"kind": "grid", "weights": self.weights.tolist()}
        if self.family == "uniform":
            return {"kind": "uniform"}
        return {"kind": "sector_sine", "phi0": self.phi0}


def _sine_cdf(t):
    """Integral of |sin s| over [0, t] for t in [0, 2 pi]; total mass 4."""
    t = np.asarray(t, dtype=float)
    return np.where(t <= math.pi, 1.0 - np.cos(t), 3.0 + np.cos(t))


def _sine_cdf_inverse(g):
    g = np.asarray(g, dtype=float)
    lower = np.arccos(np.clip(1.0 - g, -1.0, 1.0))
    upper = TWO_PI - np.arccos(np.clip(g - 3.0, -1.0, 1.0))
    return np.where(g <= 2.0, lower, upper)


def angular_mass(field: FoodField, intervals, *, relative: bool = True) -> float:
    """Field mass of full-radius sectors; intervals are measured from phi0
    when ``relative`` is true, else absolute."""
    total = 0.0
    for lo, hi in intervals:
        if field.family == "uniform":
            total += (hi - lo) / TWO_PI
        else:
            if not relative:
                pieces = Sector(lo - field.phi0, hi - field.phi0).intervals() if hi > lo else []
            else:
                pieces = [(lo, hi)]
            for a, b in pieces:
                total += float(_sine_cdf(b) - _sine_cdf(a)) / 4.0
    return total


@dataclass(frozen=True)
class Splitter:
    """A wall dividing the box in two.

    ``vertical`` at x = ``at``: "+" is the left part (x <= at).
    ``horizontal`` at y = ``at``: "+" is the top part (y >= at).
    ``angle`` phi: "+" is the half {phi <= theta < phi + pi}.
    Points exactly on a vertical or horizontal wall go to "+".
    """

    kind: str
    at: float = 0.5
    phi: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("vertical", "horizontal", "angle"):
            raise SchemaError(f"unknown splitter kind {self.kind!r}")
        if not self.name:
            object.__setattr__(self, "name", self.label())

    def label(self) -> str:
        if self.kind == "angle":
            return f"phi={self.phi:.6g}"
        return f"{self.kind}@{self.at:.6g}"

    @classmethod
    def vertical(cls, at: float = 0.5, name: str = "") -> Splitter:
        return cls("vertical", at=at, name=name)

    @classmethod
    def horizontal(cls, at: float = 0.5, name: str = "") -> Splitter:
        return cls("horizontal", at=at, name=name)

    @classmethod
    def angle(cls, phi: float, name: str = "") -> Splitter:
        return cls("angle", phi=float(phi), name=name)

    def classify(self, positions: FlyPositions) -> np.ndarray:
        """Outcome +1 / -1 for each position."""
        if self.kind == "angle":
            plus = np.mod(positions.angles() - self.phi, TWO_PI) < math.pi
        else:
            xy = positions.cartesian()
            if self.kind == "vertical":
                plus = xy[:, 0] <= self.at
            else:
                plus = xy[:, 1] >= self.at
        return np.where(plus, 1, -1).astype(np.int8)

    def region(self, side: int, geometry: str) -> GeometricContext:
        """The part of the box on the given side of the wall."""
        if side not in (1, -1):
            raise SchemaError("side must be +1 or -1")
        if geometry == "square":
            if self.kind == "vertical":
                rect = (0.0, self.at, 0.0, 1.0) if side == 1 else (self.at, 1.0, 0.0, 1.0)
                return GeometricContext.rectangles(rect)
            if self.kind == "horizontal":
                rect = (0.0, 1.0, self.at, 1.0) if side == 1 else (0.0, 1.0, 0.0, self.at)
                return GeometricContext.rectangles(rect)
            raise SchemaError("angle walls on the square have no rectangular region")
        if self.kind != "angle":
            raise SchemaError("walls on the disc are given by an angle")
        start = self.phi if side == 1 else self.phi + math.pi
        return GeometricContext.sector_union((start, start + math.pi))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "name": self.name}
        if self.kind == "angle":
            out["phi"] = self.phi
        else:
            out["at"] = self.at
        return out

    @classmethod
    def from_dict(cls, d: dict) -> Splitter:
        kind = d.get("kind")
        if kind == "angle":
            return cls("angle", phi=float(d.get("phi", 0.0)), name=d.get("name", ""))
        return cls(kind, at=float(d.get("at", 0.5)), name=d.get("name", ""))
