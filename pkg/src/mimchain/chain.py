"""Iterate the mimicry loop: each response block becomes the next stimulus.

Production variation is a per-utterance rigid transposition plus smoothed
per-point jitter, added after the response map (variation lives in
production, not perception). Every noise draw comes from a substream keyed
by (master seed, iteration, utterance index), so a run is reproducible
bit for bit regardless of evaluation order.

The same iteration machinery, minus noise, drives the C-MOS inverter
string: the output voltage of each stage feeds the next.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .contour import ContourEnsemble, DEFAULT_WINDOW
from .response_maps import InverterTransfer, ResponseMap, apply_contour, apply_scalar
from .rng import substream

__all__ = [
    "VariationModel",
    "ChainRun",
    "run_chain",
    "run_inverter_string",
    "sweep_inverter",
    "smooth_jitter",
]


@dataclass(frozen=True)
class VariationModel:
    """Production-noise parameters.

    ``transposition_sd`` scales a per-utterance rigid shift (the dominant
    term); ``jitter_sd`` scales white per-grid-point noise that is smoothed
    by a moving average of half-width ``smooth_halfwidth`` grid points
    before being added, so the wiggle stays continuous. ``seed`` feeds
    operations that have no run-level master seed of their own.
    """

    transposition_sd: float = 0.5
    jitter_sd: float = 0.25
    smooth_halfwidth: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.transposition_sd < 0 or self.jitter_sd < 0:
            raise ValueError("noise standard deviations must be >= 0")
        if int(self.smooth_halfwidth) < 0:
            raise ValueError("smooth_halfwidth must be >= 0")
        if int(self.seed) < 0:
            raise ValueError("seed must be a non-negative integer")


def smooth_jitter(white: np.ndarray, halfwidth: int) -> np.ndarray:
    """Moving average of half-width ``halfwidth`` points, edges reflected."""
    if halfwidth == 0:
        return white
    size = 2 * halfwidth + 1
    padded = np.pad(white, halfwidth, mode="reflect")
    return np.convolve(padded, np.full(size, 1.0 / size), mode="valid")


def _draw_noise(variation: VariationModel, rng: np.random.Generator, n: int) -> np.ndarray:
    # Draw order is part of the reproducibility contract:
    # transposition scalar first, then the jitter vector.
    shift = rng.normal(0.0, variation.transposition_sd)
    white = rng.normal(0.0, variation.jitter_sd, size=n)
    return shift + smooth_jitter(white, int(variation.smooth_halfwidth))


@dataclass(frozen=True)
class ChainRun:
    """Ensembles for iterations 0..k plus the configuration that made them.

    ``response_map``, ``variation``, and ``master_seed`` are None when a
    run is reassembled from files rather than simulated in-process.
    """

    ensembles: tuple
    response_map: Optional[ResponseMap] = None
    variation: Optional[VariationModel] = None
    master_seed: Optional[tuple] = None

    def __post_init__(self):
        ensembles = tuple(self.ensembles)
        if not ensembles:
            raise ValueError("a chain run holds at least one ensemble")
        grid = ensembles[0].grid
        size = len(ensembles[0])
        for i, ens in enumerate(ensembles):
            if ens.iteration != i:
                raise ValueError(f"ensemble {i} carries iteration {ens.iteration}")
            if len(ens) != size:
                raise ValueError("all ensembles must have the same size")
            if not np.array_equal(ens.grid, grid):
                raise ValueError("all ensembles must share one grid")
        object.__setattr__(self, "ensembles", ensembles)

    @property
    def iterations(self) -> int:
        """Number of mimicry passes (the last ensemble's iteration index)."""
        return len(self.ensembles) - 1

    @property
    def grid(self) -> np.ndarray:
        return self.ensembles[0].grid


def _seed_key(master_seed) -> tuple:
    if isinstance(master_seed, (tuple, list)):
        return tuple(int(s) for s in master_seed)
    return (int(master_seed),)


def run_chain(
    stimuli: ContourEnsemble,
    response_map: ResponseMap,
    variation: VariationModel,
    k: int,
    master_seed,
    window=DEFAULT_WINDOW,
) -> ChainRun:
    """Run ``k`` mimicry iterations starting from an iteration-0 ensemble.

    For each iteration i in 1..k, every contour of the previous ensemble is
    passed through the response map and production noise from substream
    (master_seed, i, utterance index) is added. The response block at
    iteration i is the stimulus block of iteration i+1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if stimuli.iteration != 0:
        raise ValueError("stimuli must carry iteration index 0")
    if isinstance(response_map, InverterTransfer):
        raise ValueError("InverterTransfer operates on volts; use run_inverter_string")
    key = _seed_key(master_seed)
    n_points = stimuli.grid.size
    ensembles = [stimuli]
    current = stimuli
    for i in range(1, k + 1):
        members = []
        for u, c in enumerate(current.contours):
            mapped = apply_contour(response_map, c, window)
            noise = _draw_noise(variation, substream(*key, i, u), n_points)
            members.append(mapped.with_values(mapped.values + noise))
        current = ContourEnsemble(iteration=i, contours=tuple(members))
        ensembles.append(current)
    return ChainRun(
        ensembles=tuple(ensembles),
        response_map=response_map,
        variation=variation,
        master_seed=key,
    )


def run_inverter_string(v_in: float, stages: int, transfer: InverterTransfer = None) -> np.ndarray:
    """Voltages along a noise-free string of inverters, input included."""
    if stages < 1:
        raise ValueError("stages must be >= 1")
    if transfer is None:
        transfer = InverterTransfer()
    out = np.empty(stages + 1)
    out[0] = v_in
    for j in range(stages):
        out[j + 1] = apply_scalar(transfer, out[j])
    return out


def sweep_inverter(inputs, stages: int, transfer: InverterTransfer = None) -> np.ndarray:
    """Run many inputs through the same string.

    Returns an array of shape (n_inputs, stages + 1); row i is the voltage
    trace of inputs[i] including the input itself, in input order.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    if transfer is None:
        transfer = InverterTransfer()
    inputs = np.asarray(inputs, dtype=float)
    table = np.empty((inputs.size, stages + 1))
    table[:, 0] = inputs
    for j in range(stages):
        table[:, j + 1] = apply_scalar(transfer, table[:, j])
    return table
