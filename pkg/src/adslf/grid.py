"""Uniform grids, grid-valued fields and finite differences."""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooSmall


@dataclass(frozen=True)
class Domain:
    """Square grid [lo, hi]^2 with step h; the diagonal carries the Cauchy data."""

    lo: float = -0.9
    hi: float = 0.9
    h: float = 1e-2

    def __post_init__(self):
        if not self.h > 0 or not self.hi > self.lo:
            raise ValueError("domain needs h > 0 and hi > lo")

    @property
    def t(self):
        n = int(round((self.hi - self.lo) / self.h)) + 1
        return self.lo + self.h * np.arange(n)


def d1(v, h, axis=0):
    """First derivative: 4th-order centred, 4th-order one-sided at the ends."""
    v = np.moveaxis(np.asarray(v), axis, 0)
    if v.shape[0] < 5:
        raise GridTooSmall("need at least 5 nodes for 4th-order differences")
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    out[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    out[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    out[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    out[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    return np.moveaxis(out, 0, axis)


def d1c(v, h, axis=0):
    """Second-order centred first derivative on interior nodes (ends dropped)."""
    v = np.moveaxis(np.asarray(v), axis, 0)
    if v.shape[0] < 3:
        raise GridTooSmall("need at least 3 nodes")
    return np.moveaxis((v[2:] - v[:-2]) / (2 * h), 0, axis)


def mixed_c(v, hx, hy):
    """Second-order centred mixed derivative on interior nodes."""
    v = np.asarray(v)
    if v.shape[0] < 3 or v.shape[1] < 3:
        raise GridTooSmall("need at least 3 nodes per axis")
    return (v[2:, 2:] - v[2:, :-2] - v[:-2, 2:] + v[:-2, :-2]) / (4 * hx * hy)


@dataclass
class GridField:
    """Values on a rectangular grid; ``values[i, j]`` sits at (x[i], y[j])."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.values = np.asarray(self.values)
        if self.values.shape[:2] != (len(self.x), len(self.y)):
            raise ValueError("values do not match the grid")
        if len(self.x) > 1 and not np.all(np.diff(self.x) > 0):
            raise ValueError("x grid must be increasing")
        if len(self.y) > 1 and not np.all(np.diff(self.y) > 0):
            raise ValueError("y grid must be increasing")

    @property
    def hx(self):
        return self.x[1] - self.x[0]

    @property
    def hy(self):
        return self.y[1] - self.y[0]

    @property
    def shape(self):
        return self.values.shape[:2]

    def dx(self):
        if "dx" not in self.cache:
            self.cache["dx"] = d1(self.values, self.hx, 0)
        return self.cache["dx"]

    def dy(self):
        if "dy" not in self.cache:
            self.cache["dy"] = d1(self.values, self.hy, 1)
        return self.cache["dy"]

    def with_values(self, values):
        return GridField(self.x, self.y, values)
