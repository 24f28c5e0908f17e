"""Parametrized input-to-output maps for one mimicry (or inverter) stage.

Four map families cover the competing memory models:

* ``Transpose`` -- a continuous store that may shift pitch rigidly;
* ``Quantizer`` -- a finite store that snaps every input to the nearest
  of a few attractor levels;
* ``CompressiveAttractor`` -- a continuous store gently pulled toward
  attractor levels, with pull strength between 0 (identity) and 1
  (quantizer);
* ``InverterTransfer`` -- the C-MOS inverter voltage transfer curve, a
  decreasing logistic whose two-stage composition has the same two-basin
  structure in volts.

All specs are immutable values; all operations are pure.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from .contour import Contour, DEFAULT_WINDOW, window_indices

__all__ = [
    "AttractorSpec",
    "Transpose",
    "Quantizer",
    "CompressiveAttractor",
    "InverterTransfer",
    "ResponseMap",
    "FixedPoint",
    "FixedPointScan",
    "default_attractors",
    "apply_scalar",
    "apply_contour",
    "fixed_points",
]

_SCAN_POINTS = 1000
_IDENTITY_EPS = 1e-12


@dataclass(frozen=True)
class AttractorSpec:
    """Labeled attractor levels in semitones, strictly ascending."""

    labels: tuple
    phi: np.ndarray

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        phi = np.array(self.phi, dtype=float, copy=True)
        phi.flags.writeable = False
        if phi.ndim != 1 or phi.size < 1:
            raise ValueError("need at least one attractor level")
        if len(labels) != phi.size:
            raise ValueError("labels and phi must have equal length")
        if len(set(labels)) != len(labels):
            raise ValueError("attractor labels must be unique")
        if not np.all(np.isfinite(phi)):
            raise ValueError("attractor levels must be finite")
        if phi.size > 1 and not np.all(np.diff(phi) > 0):
            raise ValueError("attractor levels must be strictly ascending")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "phi", phi)

    def __eq__(self, other):
        if not isinstance(other, AttractorSpec):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.phi, other.phi)

    def midpoints(self) -> np.ndarray:
        """Basin boundaries between consecutive levels."""
        return 0.5 * (self.phi[:-1] + self.phi[1:])


def default_attractors() -> AttractorSpec:
    """Two levels: L three semitones below reference, H one above."""
    return AttractorSpec(("L", "H"), np.array([-3.0, 1.0]))


@dataclass(frozen=True)
class Transpose:
    """Identity up to a rigid pitch shift."""

    offset: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.offset):
            raise ValueError("offset must be finite")


@dataclass(frozen=True)
class Quantizer:
    """Snap to the nearest attractor level; exact ties go to the higher one."""

    attractors: AttractorSpec
    tie_break: str = "toward-higher"

    def __post_init__(self):
        if self.tie_break != "toward-higher":
            raise ValueError("only the 'toward-higher' tie rule is defined")


@dataclass(frozen=True)
class CompressiveAttractor:
    """Linear pull toward the nearest attractor level.

    ``pull`` is the per-stage pull strength (the JSON field ``lambda``):
    within a basin the distance to the attractor shrinks by the factor
    ``1 - pull`` per application. ``assignment`` selects whether each grid
    sample is pulled toward its own nearest level ("pointwise") or the
    whole contour is rigidly shifted toward the level nearest to its
    window ("utterance").
    """

    attractors: AttractorSpec
    pull: float = 0.3
    assignment: str = "utterance"

    def __post_init__(self):
        if not (0.0 <= self.pull <= 1.0):
            raise ValueError("pull must be in [0, 1]")
        if self.assignment not in ("utterance", "pointwise"):
            raise ValueError("assignment must be 'utterance' or 'pointwise'")


@dataclass(frozen=True)
class InverterTransfer:
    """C-MOS inverter voltage transfer: a decreasing logistic.

    Anchored so inputs saturate toward ``v_hi`` volts at the low end and
    ``v_lo`` at the high end, crossing over near ``v_mid``. ``gain`` is in
    1/volts.
    """

    v_lo: float = 0.2
    v_hi: float = 3.1
    v_mid: float = 1.7
    gain: float = 4.0

    def __post_init__(self):
        if not (self.v_lo < self.v_mid < self.v_hi):
            raise ValueError("need v_lo < v_mid < v_hi")
        if self.gain <= 0:
            raise ValueError("gain must be > 0")


ResponseMap = Union[Transpose, Quantizer, CompressiveAttractor, InverterTransfer]


def _nearest_level(attractors: AttractorSpec, x: np.ndarray):
    """Nearest-level index with ties toward the higher level, plus tie mask."""
    mids = attractors.midpoints()
    hi = np.searchsorted(mids, x, side="right")
    lo = np.searchsorted(mids, x, side="left")
    return hi, lo != hi


def apply_scalar(m: ResponseMap, x):
    """Apply one stage of the map to a scalar or array of values.

    Semitone-domain maps take semitones; ``InverterTransfer`` takes volts.
    An exact tie between two attractor basins maps a ``Quantizer`` input to
    the higher level and leaves a ``CompressiveAttractor`` input in place.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("input must be finite")
    if isinstance(m, Transpose):
        out = x + m.offset
    elif isinstance(m, Quantizer):
        idx, _ = _nearest_level(m.attractors, x)
        out = m.attractors.phi[idx]
    elif isinstance(m, CompressiveAttractor):
        idx, tie = _nearest_level(m.attractors, x)
        a = m.attractors.phi[idx]
        out = np.where(tie, x, x - m.pull * (x - a))
    elif isinstance(m, InverterTransfer):
        out = m.v_lo + (m.v_hi - m.v_lo) / (1.0 + np.exp(m.gain * (x - m.v_mid)))
    else:
        raise TypeError(f"unknown response map {type(m).__name__}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def apply_contour(m: ResponseMap, c: Contour, window=DEFAULT_WINDOW) -> Contour:
    """Apply one stage of a semitone-domain map to a whole contour.

    Pointwise variants map every grid value through ``apply_scalar``. The
    utterance-level ``CompressiveAttractor`` instead picks the single
    attractor with the smallest mean absolute distance to the contour over
    the tau window and shifts the whole contour rigidly by
    ``pull * (window mean - attractor)``, preserving its shape. When two
    attractors are exactly equidistant the contour is left unchanged.
    """
    if isinstance(m, InverterTransfer):
        raise ValueError("InverterTransfer operates on volts, not semitone contours")
    if isinstance(m, CompressiveAttractor) and m.assignment == "utterance":
        idx = window_indices(c.grid, window)
        seg = c.values[idx]
        costs = np.mean(np.abs(seg[None, :] - m.attractors.phi[:, None]), axis=1)
        order = np.argsort(costs, kind="stable")
        if costs.size > 1 and costs[order[0]] == costs[order[1]]:
            return c.with_values(c.values)
        target = m.attractors.phi[order[0]]
        shift = m.pull * (float(np.mean(seg)) - target)
        return c.with_values(c.values - shift)
    return c.with_values(apply_scalar(m, c.values))


@dataclass(frozen=True)
class FixedPoint:
    """A fixed point of the analyzed map: location, stability, and kind.

    ``kind`` is "fixed" for a fixed point of the map itself and
    "two-cycle" for a point that is fixed only under the two-stage
    composition (the two such points form a period-2 orbit).
    """

    x: float
    stable: bool
    kind: str = "fixed"


@dataclass(frozen=True)
class FixedPointScan:
    """Result of a fixed-point scan; ``identity`` flags a degenerate map."""

    points: tuple
    identity: bool = False


def _bisect_root(f, lo, hi, f_lo):
    """Refine a sign-change bracket down to machine width.

    Returns (x, exact) where ``exact`` is True when f(x) == 0 was hit.
    The extra precision beyond the caller's tolerance costs a handful of
    evaluations and lets the caller distinguish a genuine root from a
    discontinuous sign jump by checking the residual.
    """
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid, True
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi), False


def fixed_points(m: ResponseMap, domain, tol: float = 1e-6) -> FixedPointScan:
    """Locate fixed points of the map on a finite interval.

    Scans ``g(x) - x`` for sign changes on a 1000-point grid and bisects
    each bracket. Stability uses a central finite difference of the
    analyzed map with step ``tol``: stable iff ``|g'(x*)| < 1``.

    ``InverterTransfer`` is decreasing, so the two-stage composition
    ``g(g(x))`` is analyzed instead; its fixed points that are not fixed
    points of the single stage are reported with kind "two-cycle".

    A map that equals the identity over the whole scan grid is reported
    via the ``identity`` flag with no individual points.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError("domain must be a finite interval with lo < hi")
    if tol <= 0:
        raise ValueError("tol must be > 0")

    composed = isinstance(m, InverterTransfer)

    def g(x):
        y = apply_scalar(m, x)
        return apply_scalar(m, y) if composed else y

    xs = np.linspace(lo, hi, _SCAN_POINTS)
    fs = np.array([g(x) for x in xs]) - xs

    if np.all(np.abs(fs) <= _IDENTITY_EPS):
        return FixedPointScan(points=(), identity=True)

    roots = []
    for i, x in enumerate(xs):
        if fs[i] == 0.0:
            roots.append(x)
    for i in range(_SCAN_POINTS - 1):
        if fs[i] * fs[i + 1] < 0:
            x, exact = _bisect_root(lambda x: g(x) - x, xs[i], xs[i + 1], fs[i])
            # A discontinuous jump across zero (e.g. a quantizer basin
            # boundary) brackets like a root but has a large residual.
            if exact or abs(g(x) - x) <= 1e-8 * max(1.0, abs(x)):
                roots.append(x)

    roots.sort()
    deduped = []
    for r in roots:
        if not deduped or r - deduped[-1] > tol:
            deduped.append(r)

    points = []
    for r in deduped:
        slope = (g(r + tol) - g(r - tol)) / (2.0 * tol)
        kind = "fixed"
        if composed:
            single = apply_scalar(m, r)
            if abs(single - r) > 1e-6 * max(1.0, abs(r)):
                kind = "two-cycle"
        points.append(FixedPoint(x=float(r), stable=bool(abs(slope) < 1.0), kind=kind))
    return FixedPointScan(points=tuple(points), identity=False)
