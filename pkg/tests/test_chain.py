import numpy as np
import pytest

from mimchain import (
    CompressiveAttractor,
    Contour,
    ContourEnsemble,
    InverterTransfer,
    Quantizer,
    Transpose,
    VariationModel,
    apply_scalar,
    default_attractors,
    default_grid,
    run_chain,
    run_inverter_string,
    smooth_jitter,
    sweep_inverter,
)
from mimchain.analysis import _window_vector

QUIET = VariationModel(0.0, 0.0, 0, 0)

# independent evaluation of the logistic transfer iterated from 0.2 V
STRING_FROM_0_2 = [0.2, 3.0928293928457595, 0.21099400587576614]
# unstable fixed point of the two-stage composition (independent root finder)
COMPOSED_MID = 1.687177397467497
# eight noise-free stages from the rail voltages
EIGHT_FROM_0 = 0.21100811974584907
EIGHT_FROM_3_3 = 3.0925074326614674


def constant_ensemble(levels, n_points=101):
    grid = default_grid(n_points)
    return ContourEnsemble(
        0, tuple(Contour(f"u{i}", grid, np.full(n_points, v)) for i, v in enumerate(levels))
    )


def test_variation_model_validation():
    with pytest.raises(ValueError):
        VariationModel(transposition_sd=-0.1)
    with pytest.raises(ValueError):
        VariationModel(smooth_halfwidth=-1)


def test_identity_chain_reproduces_stimuli():
    stim = constant_ensemble([0.0, 1.2, -2.5])
    run = run_chain(stim, Transpose(0.0), QUIET, 3, 5)
    for ens in run.ensembles:
        assert all(
            np.array_equal(c.values, s.values) for c, s in zip(ens.contours, stim.contours)
        )


def test_quantizer_chain_snaps_once():
    stim = constant_ensemble([-2.0, -0.4, 2.9, 0.6])
    run = run_chain(stim, Quantizer(default_attractors()), QUIET, 3, 5)
    first = run.ensembles[1]
    assert set(np.unique(first.values_matrix())) <= {-3.0, 1.0}
    for later in run.ensembles[2:]:
        assert np.array_equal(later.values_matrix(), first.values_matrix())


def test_compressive_chain_geometric_means():
    stim = constant_ensemble([3.0])
    m = CompressiveAttractor(default_attractors(), pull=0.3, assignment="utterance")
    run = run_chain(stim, m, QUIET, 4, 0)
    means = [float(_window_vector(e, (0.3, 0.6))[0]) for e in run.ensembles]
    assert means == pytest.approx([3.0, 2.4, 1.98, 1.686, 1.4802], abs=1e-12)


def test_run_chain_validation():
    stim = constant_ensemble([0.0])
    with pytest.raises(ValueError):
        run_chain(stim, Transpose(0.0), QUIET, 0, 1)
    with pytest.raises(ValueError):
        run_chain(stim, InverterTransfer(), QUIET, 2, 1)
    shifted = ContourEnsemble(1, stim.contours)
    with pytest.raises(ValueError):
        run_chain(shifted, Transpose(0.0), QUIET, 2, 1)


def test_chain_determinism_bit_identical():
    stim = constant_ensemble([0.5, -1.5, 2.0])
    noise = VariationModel()
    a = run_chain(stim, Transpose(0.0), noise, 3, 77)
    b = run_chain(stim, Transpose(0.0), noise, 3, 77)
    for ea, eb in zip(a.ensembles, b.ensembles):
        assert np.array_equal(ea.values_matrix(), eb.values_matrix())
    c = run_chain(stim, Transpose(0.0), noise, 3, 78)
    assert not np.array_equal(a.ensembles[1].values_matrix(), c.ensembles[1].values_matrix())


def test_chain_accepts_composite_seed():
    stim = constant_ensemble([0.5])
    a = run_chain(stim, Transpose(0.0), VariationModel(), 1, (7, 3))
    b = run_chain(stim, Transpose(0.0), VariationModel(), 1, (7, 3))
    assert np.array_equal(a.ensembles[1].values_matrix(), b.ensembles[1].values_matrix())


def test_noise_neutrality_in_expectation():
    stim = constant_ensemble([1.5] * 1000, n_points=51)
    run = run_chain(stim, Transpose(0.0), VariationModel(), 1, 42)
    out = _window_vector(run.ensembles[1], (0.3, 0.6))
    se = out.std(ddof=1) / np.sqrt(out.size)
    assert abs(out.mean() - 1.5) <= 3 * se


def test_monotone_approach_pointwise():
    grid = default_grid(51)
    values = np.linspace(-0.8, 5.5, 51)  # entirely in the upper basin
    stim = ContourEnsemble(0, (Contour("u", grid, values),))
    m = CompressiveAttractor(default_attractors(), pull=0.3, assignment="pointwise")
    run = run_chain(stim, m, QUIET, 3, 0)
    prev = np.abs(stim.contours[0].values - 1.0)
    for ens in run.ensembles[1:]:
        cur = np.abs(ens.contours[0].values - 1.0)
        assert np.allclose(cur, 0.7 * prev, rtol=1e-12, atol=1e-15)
        prev = cur


def test_binned_average_recovers_the_map():
    # one noisy pass of the pointwise pull map over 10^4 constant contours:
    # bin means of (input, output) must match the map within 3 SE per bin
    m = CompressiveAttractor(default_attractors(), pull=0.3, assignment="pointwise")
    rng = np.random.default_rng(123)
    stim = constant_ensemble(rng.uniform(-5.0, 3.0, 10000), n_points=51)
    run = run_chain(stim, m, VariationModel(), 1, 99)
    x = _window_vector(run.ensembles[0], (0.3, 0.6))
    y = _window_vector(run.ensembles[1], (0.3, 0.6))
    edges = np.linspace(x.min(), x.max(), 21)
    which = np.clip(np.digitize(x, edges[1:-1]), 0, 19)
    checked = 0
    for b in range(20):
        mask = which == b
        if mask.sum() < 10:
            continue
        se = y[mask].std(ddof=1) / np.sqrt(mask.sum())
        assert abs(y[mask].mean() - apply_scalar(m, x[mask]).mean()) <= 3 * se
        checked += 1
    assert checked >= 15


def test_smooth_jitter_basics():
    x = np.arange(10.0)
    assert smooth_jitter(x, 0) is x
    const = np.full(20, 3.3)
    assert np.allclose(smooth_jitter(const, 4), 3.3, atol=1e-12)
    rng = np.random.default_rng(0)
    white = rng.normal(0, 1, 5000)
    smoothed = smooth_jitter(white, 5)
    assert smoothed.std() < 0.5 * white.std()


def test_run_inverter_string_two_stages():
    out = run_inverter_string(0.2, 2)
    assert out == pytest.approx(STRING_FROM_0_2, abs=1e-12)
    with pytest.raises(ValueError):
        run_inverter_string(0.2, 0)


def test_inverter_unstable_point_is_held():
    out = run_inverter_string(COMPOSED_MID, 2)
    assert abs(out[2] - COMPOSED_MID) < 1e-9


def test_inverter_rails_digitize():
    assert run_inverter_string(0.0, 8)[-1] == pytest.approx(EIGHT_FROM_0, abs=1e-12)
    assert run_inverter_string(3.3, 8)[-1] == pytest.approx(EIGHT_FROM_3_3, abs=1e-12)
    for v_in in (0.0, 3.3):
        final = run_inverter_string(v_in, 8)[-1]
        assert min(abs(final - 0.2), abs(final - 3.1)) < 0.05


def test_sweep_inverter_matches_string():
    table = sweep_inverter([0.2, 1.0], 3)
    assert table.shape == (2, 4)
    assert np.array_equal(table[0], run_inverter_string(0.2, 3))
    assert np.array_equal(table[1], run_inverter_string(1.0, 3))
    empty = sweep_inverter([], 3)
    assert empty.shape == (0, 4)
