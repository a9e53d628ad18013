"""Shared phase-space grid containers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GridSpec:
    """Rectangular evaluation grid for quasiprobability functions."""

    x_min: float
    x_max: float
    nx: int
    y_min: float
    y_max: float
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise DomainError("grid needs at least 2 points per axis")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise DomainError("grid extents must be increasing")

    @classmethod
    def square(cls, half_width, n):
        return cls(-half_width, half_width, n, -half_width, half_width, n)

    def axes(self):
        return (
            np.linspace(self.x_min, self.x_max, self.nx),
            np.linspace(self.y_min, self.y_max, self.ny),
        )

    def cell(self):
        return (
            (self.x_max - self.x_min) / (self.nx - 1),
            (self.y_max - self.y_min) / (self.ny - 1),
        )


@dataclass
class QGrid:
    """Quasiprobability values on a grid, indexed values[ix, iy].

    ``normalization_estimate`` is the Riemann sum of values * dx * dy;
    dividing by it maps whichever convention the producer used onto a
    unit-normalised density.
    """

    x_axis: np.ndarray
    y_axis: np.ndarray
    values: np.ndarray
    normalization_estimate: float

    def normalized(self):
        return self.values / self.normalization_estimate

    def local_maxima(self, threshold_frac=0.05):
        """Grid points that strictly dominate their 8-neighbourhood.

        Maxima below ``threshold_frac`` of the global maximum are ignored.
        Returns a list of (ix, iy) pairs.
        """
        v = self.values
        cutoff = threshold_frac * v.max()
        hits = []
        for i in range(1, v.shape[0] - 1):
            for j in range(1, v.shape[1] - 1):
                c = v[i, j]
                if c < cutoff:
                    continue
                patch = v[i - 1 : i + 2, j - 1 : j + 2]
                if c >= patch.max() and (patch < c).sum() == 8:
                    hits.append((i, j))
        return hits
