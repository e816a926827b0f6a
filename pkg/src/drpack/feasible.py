"""Per-step feasible sets with exact linear maximization and support functions.

Two shapes cover every application here: scaled boxes and scaled simplices.
Both contain the origin, carry an explicit Euclidean radius bound, and admit
closed-form linear maximization. Ties at zero inner product resolve to zero so
that saturated budgets are never pushed past their boundary.
"""

import numpy as np


class Box:
    """{x : 0 <= x_j <= bounds_j}."""

    kind = "scaled_box"

    def __init__(self, bounds, radius: float | None = None):
        bounds = np.asarray(bounds, dtype=float)
        if bounds.ndim != 1 or np.any(bounds < 0):
            raise ValueError("bounds must be a non-negative vector")
        norm = float(np.linalg.norm(bounds))
        if radius is None:
            radius = norm
        elif radius < norm * (1.0 - 1e-12):
            raise ValueError("radius does not cover the box")
        self.bounds = bounds
        self.radius = float(radius)

    @property
    def n(self) -> int:
        return len(self.bounds)

    def linear_argmax(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        return np.where(d > 0.0, self.bounds, 0.0)

    def support(self, d) -> float:
        d = np.asarray(d, dtype=float)
        return float(self.bounds @ np.maximum(d, 0.0))

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol) and np.all(x <= self.bounds + tol))

    def coordinate_caps(self) -> np.ndarray:
        return self.bounds.copy()


class Simplex:
    """{x : x >= 0, sum x <= scale}."""

    kind = "scaled_simplex"

    def __init__(self, n: int, scale: float, radius: float | None = None):
        if n < 1 or scale <= 0:
            raise ValueError("need n >= 1 and scale > 0")
        if radius is None:
            radius = float(scale)
        elif radius < scale * (1.0 - 1e-12):
            raise ValueError("radius does not cover the simplex")
        self._n = int(n)
        self.scale = float(scale)
        self.radius = float(radius)

    @property
    def n(self) -> int:
        return self._n

    def linear_argmax(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        out = np.zeros(self._n)
        j = int(np.argmax(d))
        if d[j] > 0.0:
            out[j] = self.scale
        return out

    def support(self, d) -> float:
        d = np.asarray(d, dtype=float)
        return float(self.scale * max(0.0, float(np.max(d))))

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= -tol) and float(np.sum(x)) <= self.scale + tol)

    def coordinate_caps(self) -> np.ndarray:
        return np.full(self._n, self.scale)
