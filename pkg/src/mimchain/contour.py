"""Pitch contours on a normalized time grid.

A raw fundamental-frequency track (seconds, Hertz) is converted into a
contour of semitone values ``phi`` relative to a speaker reference
frequency, sampled on a shared normalized-time grid ``tau`` in [0, 1].
Contours are the unit every other module operates on; ensembles are blocks
of contours tagged with the chain iteration that produced them.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_GRID_POINTS",
    "DEFAULT_WINDOW",
    "RawTrack",
    "Contour",
    "ContourEnsemble",
    "default_grid",
    "hz_to_semitones",
    "speaker_reference",
    "normalize",
    "window_indices",
]

DEFAULT_GRID_POINTS = 101

# Closed tau interval used for window statistics unless the caller overrides it.
DEFAULT_WINDOW = (0.3, 0.6)

# Slack when intersecting a window with the grid, so interval endpoints that
# are also grid points are always included regardless of float representation.
_WINDOW_EDGE_TOL = 1e-12


def _as_readonly(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


def default_grid(n_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Uniform tau grid on [0, 1]."""
    if n_points < 2:
        raise ValueError("grid needs at least 2 points")
    return np.linspace(0.0, 1.0, n_points)


def hz_to_semitones(f, f_ref):
    """Convert frequency to semitones relative to a reference frequency.

    Both arguments must be finite and strictly positive; either may be an
    array. One octave is 12 semitones: ``12 * log2(f / f_ref)``.
    """
    f = np.asarray(f, dtype=float)
    f_ref = np.asarray(f_ref, dtype=float)
    for name, x in (("f", f), ("f_ref", f_ref)):
        if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
            raise ValueError(f"{name} must be finite and > 0")
    out = 12.0 * np.log2(f / f_ref)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RawTrack:
    """A raw f0 track: absolute times in seconds, frequencies in Hertz."""

    utterance_id: str
    times: np.ndarray
    f0: np.ndarray

    def __post_init__(self):
        times = _as_readonly(self.times)
        f0 = _as_readonly(self.f0)
        if times.ndim != 1 or f0.ndim != 1 or times.size != f0.size:
            raise ValueError("times and f0 must be 1-d arrays of equal length")
        if times.size < 2:
            raise ValueError(f"track {self.utterance_id!r} needs at least 2 samples")
        if not np.all(np.diff(times) > 0):
            raise ValueError(f"track {self.utterance_id!r}: times must be strictly increasing")
        if not np.all(np.isfinite(f0)) or np.any(f0 <= 0):
            raise ValueError(f"track {self.utterance_id!r}: f0 must be finite and > 0")
        if not np.all(np.isfinite(times)):
            raise ValueError(f"track {self.utterance_id!r}: times must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "f0", f0)

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class Contour:
    """One utterance's semitone values ``phi`` on a normalized tau grid."""

    utterance_id: str
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = _as_readonly(self.grid)
        values = _as_readonly(self.values)
        if grid.ndim != 1 or values.ndim != 1 or grid.size != values.size:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if grid.size < 2:
            raise ValueError("contour needs at least 2 grid points")
        if grid[0] != 0.0 or grid[-1] != 1.0:
            raise ValueError("grid must start at 0 and end at 1")
        if not np.all(np.diff(grid) > 0):
            raise ValueError(f"contour {self.utterance_id!r}: grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"contour {self.utterance_id!r}: values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def with_values(self, values) -> "Contour":
        """Same utterance and grid, new phi values."""
        return Contour(self.utterance_id, self.grid, np.asarray(values, dtype=float))


@dataclass(frozen=True)
class ContourEnsemble:
    """A block of contours sharing one grid, tagged with a chain iteration.

    Iteration 0 is the initial stimulus block; iteration k holds the
    responses produced by the k-th pass through the response map.
    """

    iteration: int
    contours: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.iteration < 0:
            raise ValueError("iteration must be >= 0")
        contours = tuple(self.contours)
        if not contours:
            raise ValueError("ensemble must contain at least one contour")
        grid = contours[0].grid
        for c in contours[1:]:
            if not np.array_equal(c.grid, grid):
                raise ValueError(f"contour {c.utterance_id!r} is not on the shared grid")
        object.__setattr__(self, "contours", contours)

    def __len__(self) -> int:
        return len(self.contours)

    @property
    def grid(self) -> np.ndarray:
        return self.contours[0].grid

    @property
    def ids(self) -> tuple:
        return tuple(c.utterance_id for c in self.contours)

    def values_matrix(self) -> np.ndarray:
        """Stack member values into an (n_contours, n_grid) array."""
        return np.vstack([c.values for c in self.contours])


def speaker_reference(track: RawTrack) -> float:
    """Geometric mean of the track's f0 samples, in Hertz.

    The geometric mean is the arithmetic mean in log frequency, so a
    contour expressed relative to it averages to phi = 0.
    """
    return float(np.exp(np.mean(np.log(track.f0))))


def normalize(track: RawTrack, f_ref: float, grid: np.ndarray) -> Contour:
    """Express a raw track as a contour on the given tau grid.

    Time is mapped linearly so the first sample lands on tau = 0 and the
    last on tau = 1; frequencies are converted to semitones relative to
    ``f_ref``; the result is resampled onto ``grid`` by linear
    interpolation in (tau, phi) space.
    """
    grid = np.asarray(grid, dtype=float)
    if len(track) < 2:
        raise ValueError("normalize needs at least 2 samples")
    span = track.times[-1] - track.times[0]
    tau = (track.times - track.times[0]) / span
    phi = hz_to_semitones(track.f0, f_ref)
    resampled = np.interp(grid, tau, phi)
    return Contour(track.utterance_id, grid, resampled)


def window_indices(grid: np.ndarray, window) -> np.ndarray:
    """Indices of grid points inside the closed tau window.

    Raises if the window is malformed or contains no grid points.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"window must satisfy 0 <= lo < hi <= 1, got ({lo}, {hi})")
    mask = (grid >= lo - _WINDOW_EDGE_TOL) & (grid <= hi + _WINDOW_EDGE_TOL)
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        raise ValueError(f"window ({lo}, {hi}) contains no grid points")
    return idx
