"""Reduce chain runs to evidence that discriminates the memory models.

The pipeline is: per-iteration window values -> kernel density -> valley
depth (how empty is the gap between the two biggest density peaks), plus
an empirical transfer map fitted between consecutive iterations, the
per-iteration contraction rate of distances to the fitted attractors, and
a three-way verdict:

* "discrete"          -- deep valley after a single pass (a quantizer store
                         digitizes in one trip);
* "continuous"        -- never bimodal and essentially no contraction;
* "attractor-gradual" -- bimodality that builds slowly while distances
                         shrink geometrically.

``count_preserved_distinctions`` measures how many equally spaced input
levels remain statistically separable after k noisy passes, the
channel-capacity view of the same question.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chain import ChainRun, VariationModel, run_chain
from .contour import Contour, ContourEnsemble, DEFAULT_WINDOW, default_grid, window_indices
from .response_maps import ResponseMap

__all__ = [
    "DensityEstimate",
    "ValleyReport",
    "BinStat",
    "FittedPull",
    "TransferEstimate",
    "HypothesisVerdict",
    "VALLEY_DEPTH_DEFINITION",
    "window_values",
    "density",
    "valley_depth",
    "valley_trajectory",
    "estimate_transfer",
    "contraction_rate",
    "diagnose",
    "count_preserved_distinctions",
]

# Version tag for the bimodality statistic written into reports, so a
# different statistic can be added later without breaking consumers.
VALLEY_DEPTH_DEFINITION = "relative-valley-deficit-v1"

_DENSITY_POINTS = 512
_BANDWIDTH_FLOOR = 0.05


@dataclass(frozen=True)
class DensityEstimate:
    """A kernel density on a uniform phi grid, normalized to integrate to 1."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        dens = np.asarray(self.density, dtype=float)
        if grid.ndim != 1 or dens.shape != grid.shape or grid.size < 2:
            raise ValueError("grid and density must be matching 1-d arrays")
        steps = np.diff(grid)
        if not np.all(steps > 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("grid must be ascending and uniform")
        if np.any(dens < 0):
            raise ValueError("density must be non-negative")
        total = float(np.trapezoid(dens, grid))
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"density must integrate to 1, got {total}")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be > 0")
        g = grid.copy()
        d = dens.copy()
        g.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "density", d)


@dataclass(frozen=True)
class ValleyReport:
    """Per-iteration bimodality: (iteration, depth, peak locations)."""

    per_iteration: tuple

    def depths(self) -> np.ndarray:
        return np.array([d for _, d, _ in self.per_iteration])


@dataclass(frozen=True)
class BinStat:
    x_center: float
    y_mean: float
    y_sd: float
    count: int


@dataclass(frozen=True)
class FittedPull:
    """Fitted two-attractor pull model: y = x - lam * (x - nearest of a_lo/a_hi)."""

    a_lo: float
    a_hi: float
    lam: float
    rmse: float

    def __post_init__(self):
        if not self.a_lo < self.a_hi:
            raise ValueError("fit requires a_lo < a_hi")
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError("lam must be in [0, 1]")

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        nearest = np.where(x > 0.5 * (self.a_lo + self.a_hi), self.a_hi, self.a_lo)
        out = x - self.lam * (x - nearest)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TransferEstimate:
    """Binned empirical iteration map plus the fitted pull model."""

    bins: tuple
    fitted: FittedPull


@dataclass(frozen=True)
class HypothesisVerdict:
    verdict: str
    valley: ValleyReport
    contraction: Optional[float]
    thresholds: dict


def window_values(ensemble: ContourEnsemble, window=DEFAULT_WINDOW):
    """Per-contour mean phi over the closed tau window, as (id, value) pairs."""
    idx = window_indices(ensemble.grid, window)
    vals = ensemble.values_matrix()[:, idx].mean(axis=1)
    return list(zip(ensemble.ids, (float(v) for v in vals)))


def _window_vector(ensemble: ContourEnsemble, window) -> np.ndarray:
    idx = window_indices(ensemble.grid, window)
    return ensemble.values_matrix()[:, idx].mean(axis=1)


def density(values, bandwidth="auto") -> DensityEstimate:
    """Gaussian kernel density of a sample of phi values.

    The automatic bandwidth is the Silverman-style rule
    ``0.9 * min(sd, IQR/1.34) * n**(-1/5)`` with a floor of 0.05 semitones
    so that noise-free (near-delta) samples still produce a finite,
    smooth density. The evaluation grid spans the data plus three
    bandwidths on each side with 512 points, and the result is normalized
    to unit trapezoid integral on that grid.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("density needs at least 2 values")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    if bandwidth == "auto":
        sd = float(np.std(values, ddof=1))
        q25, q75 = np.percentile(values, [25.0, 75.0])
        iqr = float(q75 - q25)
        candidates = [s for s in (sd, iqr / 1.34) if s > 0]
        bw = 0.9 * min(candidates) * values.size ** (-0.2) if candidates else 0.0
        bw = max(bw, _BANDWIDTH_FLOOR)
    else:
        bw = float(bandwidth)
        if bw <= 0:
            raise ValueError("bandwidth must be > 0")
    grid = np.linspace(values.min() - 3.0 * bw, values.max() + 3.0 * bw, _DENSITY_POINTS)
    dens = np.zeros_like(grid)
    norm = 1.0 / (values.size * bw * math.sqrt(2.0 * math.pi))
    for start in range(0, values.size, 4096):
        chunk = values[start : start + 4096]
        z = (grid[:, None] - chunk[None, :]) / bw
        dens += norm * np.exp(-0.5 * z * z).sum(axis=1)
    dens /= np.trapezoid(dens, grid)
    return DensityEstimate(grid=grid, density=dens, bandwidth=bw)


def _local_maxima(d: np.ndarray) -> np.ndarray:
    interior = (d[1:-1] > d[:-2]) & (d[1:-1] > d[2:])
    return np.nonzero(interior)[0] + 1


def valley_depth(d: DensityEstimate) -> float:
    """Deficit of density between the two largest peaks, relative to the valley.

    0 means unimodal. Values below 1 indicate strongly overlapping peaks;
    values above 1 indicate well-separated peaks, growing with separation.
    The valley density is floored at 1e-6 of the smaller peak so that an
    essentially empty gap yields a large, finite depth.
    """
    peaks = _local_maxima(d.density)
    if peaks.size < 2:
        return 0.0
    top2 = peaks[np.argsort(d.density[peaks], kind="stable")[-2:]]
    h2 = float(d.density[top2].min())
    lo, hi = int(top2.min()), int(top2.max())
    v = float(d.density[lo : hi + 1].min())
    return (h2 - v) / max(v, 1e-6 * h2)


def _peak_locations(d: DensityEstimate, max_peaks: int = 2) -> tuple:
    peaks = _local_maxima(d.density)
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(d.density))])
    top = peaks[np.argsort(d.density[peaks], kind="stable")[-max_peaks:]]
    return tuple(float(x) for x in np.sort(d.grid[top]))


def valley_trajectory(run: ChainRun, window=DEFAULT_WINDOW, bandwidth="auto") -> ValleyReport:
    """Valley depth and peak locations per chain iteration."""
    rows = []
    for ens in run.ensembles:
        d = density(_window_vector(ens, window), bandwidth)
        rows.append((ens.iteration, valley_depth(d), _peak_locations(d)))
    return ValleyReport(per_iteration=tuple(rows))


def _pairs(run: ChainRun, window):
    xs, ys = [], []
    for prev, nxt in zip(run.ensembles[:-1], run.ensembles[1:]):
        xs.append(_window_vector(prev, window))
        ys.append(_window_vector(nxt, window))
    return np.concatenate(xs), np.concatenate(ys)


def _exact_refit(x, y, boundary, fallback):
    """Exact least squares of the pull model for a fixed basin assignment.

    Within each basin the model is the line y = (1 - lam)*x + lam*a, i.e.
    a shared slope with one intercept per basin, which ordinary least
    squares solves exactly. Attractors follow from the intercepts; when
    the fitted pull is ~0 they are unidentifiable and ``fallback`` is kept.
    """
    hi_side = x > boundary
    sxx = sxy = 0.0
    groups = []
    for mask in (~hi_side, hi_side):
        if not mask.any():
            groups.append(None)
            continue
        xm, ym = float(x[mask].mean()), float(y[mask].mean())
        dx = x[mask] - xm
        sxx += float(dx @ dx)
        sxy += float(dx @ (y[mask] - ym))
        groups.append((mask, xm, ym))
    if sxx == 0.0:
        slope = 0.0
    else:
        slope = min(max(sxy / sxx, 0.0), 1.0)
    lam = 1.0 - slope
    a = list(fallback)
    if lam > 1e-9:
        for side, grp in enumerate(groups):
            if grp is not None:
                _, xm, ym = grp
                a[side] = ((ym - slope * xm)) / lam
    if not a[0] < a[1]:
        a = list(fallback)
    return a[0], a[1], lam


def estimate_transfer(run: ChainRun, window=DEFAULT_WINDOW, n_bins: int = 20) -> TransferEstimate:
    """Estimate the one-iteration transfer map from consecutive ensembles.

    Pools (window value at iteration i, same utterance at i+1) pairs over
    all consecutive iterations; bins them into ``n_bins`` equal-width bins
    (empty bins omitted); and fits the two-attractor pull model by a
    coarse grid search (pull in steps of 0.01, attractor levels in steps
    of 0.1 semitones over the data range) followed by coordinate-descent
    refinement to a parameter tolerance of 1e-4. The refinement
    alternates basin assignment with an exact least-squares solve, so
    noise-free runs are recovered to machine precision.
    """
    if len(run.ensembles) < 2:
        raise ValueError("need at least 2 iterations to estimate a transfer map")
    if n_bins < 4:
        raise ValueError("n_bins must be >= 4")
    x, y = _pairs(run, window)
    if x.size < 10:
        raise ValueError(f"need at least 10 pairs, got {x.size}")

    # binned empirical map
    edges = np.linspace(x.min(), x.max(), n_bins + 1)
    which = np.clip(np.digitize(x, edges[1:-1]), 0, n_bins - 1)
    bins = []
    for b in range(n_bins):
        mask = which == b
        cnt = int(mask.sum())
        if cnt == 0:
            continue
        yy = y[mask]
        sd = float(np.std(yy, ddof=1)) if cnt > 1 else 0.0
        bins.append(
            BinStat(
                x_center=float(0.5 * (edges[b] + edges[b + 1])),
                y_mean=float(yy.mean()),
                y_sd=sd,
                count=cnt,
            )
        )

    # coarse grid over attractor pairs; for each pair the SSE is an exact
    # quadratic in the pull strength, scanned on the 0.01-step lam grid
    lam_grid = np.linspace(0.0, 1.0, 101)
    a_grid = np.arange(x.min(), x.max() + 1e-9, 0.1)
    if a_grid.size < 2:
        # data narrower than one grid step: attractors are unidentifiable,
        # but the fit must still return a well-formed (a_lo < a_hi) model
        a_grid = np.array([x.min() - 0.05, x.max() + 0.05])
    r = y - x
    c0 = float(r @ r)
    best = (math.inf, a_grid[0], a_grid[-1], 0.0)
    for i, a_lo in enumerate(a_grid[:-1]):
        his = a_grid[i + 1 :]
        boundary = 0.5 * (a_lo + his)
        d = x[None, :] - np.where(x[None, :] > boundary[:, None], his[:, None], a_lo)
        c1 = 2.0 * (d @ r)
        c2 = np.einsum("ij,ij->i", d, d)
        sse = c0 + c1[:, None] * lam_grid + c2[:, None] * lam_grid**2
        flat = int(np.argmin(sse))
        bi, bj = divmod(flat, lam_grid.size)
        if sse[bi, bj] < best[0]:
            best = (float(sse[bi, bj]), float(a_lo), float(his[bi]), float(lam_grid[bj]))

    _, a_lo, a_hi, lam = best
    for _ in range(100):
        new_lo, new_hi, new_lam = _exact_refit(x, y, 0.5 * (a_lo + a_hi), (a_lo, a_hi))
        change = max(abs(new_lo - a_lo), abs(new_hi - a_hi), abs(new_lam - lam))
        a_lo, a_hi, lam = new_lo, new_hi, new_lam
        if change < 1e-4:
            break

    fitted = FittedPull(a_lo=a_lo, a_hi=a_hi, lam=lam, rmse=0.0)
    resid = y - fitted.predict(x)
    fitted = FittedPull(a_lo=a_lo, a_hi=a_hi, lam=lam, rmse=float(np.sqrt(resid @ resid / x.size)))
    return TransferEstimate(bins=tuple(bins), fitted=fitted)


def contraction_rate(run: ChainRun, window=DEFAULT_WINDOW, attractors=None) -> float:
    """Geometric per-iteration shrink factor of distances to the attractors.

    Uses the attractors fitted by ``estimate_transfer`` unless a pair is
    supplied. Only utterances whose nearest attractor never changes across
    iterations enter the fit. Each consecutive pair of signed deviations
    from the basin attractor gives one (current, next) point; the pooled
    least-squares slope with one intercept per basin is the per-iteration
    ratio rho. Signed deviations keep production noise additive (it
    averages out instead of rectifying into a distance floor), and the
    intercepts absorb attractor-fit error, so the estimate stays centered
    on the true ratio. For a noise-free pull model this equals 1 - pull
    exactly.
    """
    if len(run.ensembles) < 3:
        raise ValueError("need at least 3 iterations to fit a contraction rate")
    if attractors is None:
        fitted = estimate_transfer(run, window).fitted
        attractors = (fitted.a_lo, fitted.a_hi)
    levels = np.asarray(attractors, dtype=float)
    m = np.vstack([_window_vector(ens, window) for ens in run.ensembles])  # (k+1, n)
    dist = np.abs(m[:, :, None] - levels[None, None, :])
    nearest = np.argmin(dist, axis=2)
    stable = (nearest == nearest[0]).all(axis=0)
    if not stable.any():
        raise ValueError("no utterance stayed in one basin; contraction rate undefined")
    sxx = sxy = 0.0
    drift = 0.0
    for basin in np.unique(nearest[0, stable]):
        members = stable & (nearest[0] == basin)
        dev = m[:, members] - levels[basin]
        u = dev[:-1].ravel()
        v = dev[1:].ravel()
        du = u - u.mean()
        sxx += float(du @ du)
        sxy += float(du @ (v - v.mean()))
        drift = max(drift, float(np.abs(v - u).max()))
    if sxx == 0.0:
        return 1.0 if drift == 0.0 else 0.0
    return sxy / sxx


def diagnose(
    run: ChainRun,
    window=DEFAULT_WINDOW,
    depth_discrete: float = 1.0,
    depth_flat: float = 0.2,
    rho_continuous: float = 0.9,
) -> HypothesisVerdict:
    """Classify a run as discrete, continuous, or attractor-gradual.

    Decision rule, in order: a valley deeper than ``depth_discrete``
    already at iteration 1 means one-pass digitization ("discrete"); a
    valley that never exceeds ``depth_flat`` together with a contraction
    rate above ``rho_continuous`` means no attractors worth the name
    ("continuous"); everything else is the gradual-attractor signature.
    """
    if len(run.ensembles) < 3:
        raise ValueError("need at least 3 iterations to diagnose")
    valley = valley_trajectory(run, window)
    depths = valley.depths()
    try:
        rho = contraction_rate(run, window)
    except ValueError:
        rho = None
    if depths[1] > depth_discrete:
        verdict = "discrete"
    elif depths.max() <= depth_flat and rho is not None and rho > rho_continuous:
        verdict = "continuous"
    else:
        verdict = "attractor-gradual"
    return HypothesisVerdict(
        verdict=verdict,
        valley=valley,
        contraction=rho,
        thresholds={
            "depth_discrete": depth_discrete,
            "depth_flat": depth_flat,
            "rho_continuous": rho_continuous,
        },
    )


def count_preserved_distinctions(
    response_map: ResponseMap,
    variation: VariationModel,
    k: int,
    n_levels: int,
    span,
    m: int = 200,
    z: float = 2.0,
    window=DEFAULT_WINDOW,
) -> int:
    """How many equally spaced input levels survive k noisy passes.

    Places ``n_levels`` constant contours evenly across ``span``, runs
    ``m`` independent chain passes of ``k`` iterations for each level
    (substreams keyed by the variation seed and the level index), and
    counts the largest subset of levels whose output means are pairwise
    separated by more than ``z`` pooled standard deviations, by a greedy
    left-to-right scan over the sorted means.
    """
    if n_levels < 2:
        raise ValueError("n_levels must be >= 2")
    if m < 30:
        raise ValueError("m must be >= 30 trials per level")
    lo, hi = float(span[0]), float(span[1])
    if not lo < hi:
        raise ValueError("span must be a non-degenerate interval")
    if k < 1:
        raise ValueError("k must be >= 1")
    grid = default_grid()
    levels = np.linspace(lo, hi, n_levels)
    means = np.empty(n_levels)
    variances = np.empty(n_levels)
    for li, level in enumerate(levels):
        members = tuple(
            Contour(f"lvl{li}_t{t}", grid, np.full(grid.size, level)) for t in range(m)
        )
        stimuli = ContourEnsemble(iteration=0, contours=members)
        run = run_chain(stimuli, response_map, variation, k, (int(variation.seed), li), window)
        out = _window_vector(run.ensembles[-1], window)
        means[li] = out.mean()
        variances[li] = out.var(ddof=1)
    pooled_sd = math.sqrt(float(variances.mean()))
    kept = 0
    last = None
    for value in np.sort(means):
        if last is None or value - last > z * pooled_sd:
            kept += 1
            last = value
    return kept
