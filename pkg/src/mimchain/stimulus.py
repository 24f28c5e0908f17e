"""Initial stimulus blocks built as convex combinations of three basis contours.

The goal is an iteration-0 ensemble whose values in the analysis window are
spread broadly between the lowest and highest basis contour, so that a
subsequent chain run starts from a wide, roughly flat distribution.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .contour import Contour, ContourEnsemble, DEFAULT_WINDOW, default_grid, window_indices
from .rng import substream

__all__ = ["BasisSet", "WeightScheme", "default_basis", "gen_stimuli"]

MODES = ("uniform-simplex", "span-path")


@dataclass(frozen=True)
class BasisSet:
    """Exactly three contours on a shared grid spanning the stimulus space."""

    contours: tuple

    def __post_init__(self):
        contours = tuple(self.contours)
        if len(contours) != 3:
            raise ValueError("a basis set holds exactly 3 contours")
        grid = contours[0].grid
        for c in contours[1:]:
            if not np.array_equal(c.grid, grid):
                raise ValueError("basis contours must share one grid")
        object.__setattr__(self, "contours", contours)
        vals = self.values_matrix()
        idx = window_indices(grid, DEFAULT_WINDOW)
        win = vals[:, idx]
        if np.all((win == win[0]).all(axis=0)):
            warnings.warn(
                "basis contours are identical throughout the analysis window; "
                "the stimulus span is degenerate",
                stacklevel=2,
            )

    @property
    def grid(self) -> np.ndarray:
        return self.contours[0].grid

    def values_matrix(self) -> np.ndarray:
        return np.vstack([c.values for c in self.contours])


@dataclass(frozen=True)
class WeightScheme:
    """How convex weights are drawn for each generated stimulus.

    "uniform-simplex" draws weights uniformly over the 2-simplex
    (symmetric Dirichlet with unit concentration). "span-path" draws a
    single uniform position along the low -> mid -> high basis path, which
    yields a flatter spread of window values. Each stimulus index gets its
    own substream of ``seed``, so generation order does not matter.
    """

    mode: str = "uniform-simplex"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if int(self.seed) < 0:
            raise ValueError("seed must be a non-negative integer")


def _smooth_step(u: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(np.pi * np.clip(u, 0.0, 1.0)))


def default_basis(grid=None) -> BasisSet:
    """Synthetic basis: low, mid, and high plateaus with a final fall.

    Each contour is flat through tau <= 0.7 (covering the default analysis
    window) and falls smoothly afterwards, a stylized declarative shape.
    Window levels are -8, -1, and +6 semitones: a deliberately wide span,
    so chains pulled toward attractors well inside it take several
    iterations to develop visible bimodality instead of clustering in one
    or two passes.
    """
    if grid is None:
        grid = default_grid()
    grid = np.asarray(grid, dtype=float)
    fall = _smooth_step((grid - 0.7) / 0.3)
    specs = [("basis_low", -8.0, -10.0), ("basis_mid", -1.0, -7.0), ("basis_high", 6.0, -4.0)]
    contours = [
        Contour(name, grid, plateau + (end - plateau) * fall) for name, plateau, end in specs
    ]
    return BasisSet(tuple(contours))


def _weights(scheme: WeightScheme, index: int, order: np.ndarray) -> np.ndarray:
    rng = substream(scheme.seed, index)
    if scheme.mode == "uniform-simplex":
        return rng.dirichlet(np.ones(3))
    # span-path: piecewise-linear interpolation low -> mid -> high
    u = rng.uniform()
    w = np.zeros(3)
    if u <= 0.5:
        w[order[0]] = 1.0 - 2.0 * u
        w[order[1]] = 2.0 * u
    else:
        w[order[1]] = 2.0 - 2.0 * u
        w[order[2]] = 2.0 * u - 1.0
    return w


def gen_stimuli(basis: BasisSet, n: int, scheme: WeightScheme) -> ContourEnsemble:
    """Generate an iteration-0 ensemble of ``n`` convex basis combinations.

    Every generated value lies inside the interval spanned by the three
    basis values at that tau (weights are non-negative and sum to 1).
    Identical (basis, n, scheme) inputs reproduce the ensemble bit for bit.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    vals = basis.values_matrix()
    idx = window_indices(basis.grid, DEFAULT_WINDOW)
    order = np.argsort(vals[:, idx].mean(axis=1), kind="stable")
    width = len(str(max(n - 1, 1)))
    contours = []
    for i in range(n):
        w = _weights(scheme, i, order)
        contours.append(Contour(f"s{i:0{width}d}", basis.grid, w @ vals))
    return ContourEnsemble(iteration=0, contours=tuple(contours))
