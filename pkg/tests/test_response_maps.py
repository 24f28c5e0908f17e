import numpy as np
import pytest

from mimchain import (
    AttractorSpec,
    CompressiveAttractor,
    Contour,
    InverterTransfer,
    Quantizer,
    Transpose,
    apply_contour,
    apply_scalar,
    default_attractors,
    default_grid,
    fixed_points,
)

# g(0.2) for the default transfer, evaluated from the closed form independently
INVERTER_AT_0_2 = 3.0928293928457595

# fixed points of the two-stage composition g(g(x)) on [0, 3.3], located with
# an independent bracketing root finder before this module was written
COMPOSED_LOW = 0.21100811974626726
COMPOSED_MID = 1.687177397467497
COMPOSED_HIGH = 3.0925074326610553


def comp(pull=0.3, assignment="pointwise"):
    return CompressiveAttractor(default_attractors(), pull=pull, assignment=assignment)


def test_attractor_spec_validation():
    with pytest.raises(ValueError):
        AttractorSpec(("L", "H"), [1.0, -3.0])  # must ascend
    with pytest.raises(ValueError):
        AttractorSpec(("L", "L"), [-3.0, 1.0])  # unique labels
    with pytest.raises(ValueError):
        AttractorSpec((), [])


def test_transpose_and_quantizer_scalars():
    assert apply_scalar(Transpose(-2.0), 0.5) == -1.5
    q = Quantizer(default_attractors())
    assert apply_scalar(q, 0.5) == 1.0
    assert apply_scalar(q, -2.9) == -3.0
    assert apply_scalar(q, -1.0) == 1.0  # exact tie goes to the higher level


def test_compressive_scalars():
    m = comp()
    assert apply_scalar(m, 1.0) == 1.0  # attractor is a fixed point
    assert apply_scalar(m, 3.0) == pytest.approx(2.4, abs=1e-15)  # 3 - 0.3*(3-1)
    assert apply_scalar(m, -1.0) == -1.0  # equidistant tie holds its value


def test_inverter_scalar_and_shape():
    inv = InverterTransfer()
    assert apply_scalar(inv, 0.2) == pytest.approx(INVERTER_AT_0_2, abs=1e-12)
    xs = np.linspace(-1.0, 5.0, 2001)
    ys = apply_scalar(inv, xs)
    assert np.all(np.diff(ys) < 0)  # strictly decreasing
    assert ys.max() < inv.v_hi and ys.min() > inv.v_lo


def test_order_preservation():
    xs = np.sort(np.random.default_rng(0).uniform(-8.0, 6.0, 500))
    assert np.all(np.diff(apply_scalar(Transpose(1.3), xs)) >= 0)
    for pull in (0.0, 0.3, 0.7, 1.0):
        ys = apply_scalar(comp(pull), xs)
        assert np.all(np.diff(ys) >= -1e-15)


def test_quantizer_idempotent_exactly():
    q = Quantizer(default_attractors())
    xs = np.random.default_rng(1).uniform(-8.0, 6.0, 1000)
    once = apply_scalar(q, xs)
    assert np.array_equal(apply_scalar(q, once), once)


def test_zero_pull_is_identity_bit_exact():
    xs = np.random.default_rng(2).uniform(-8.0, 6.0, 1000)
    assert np.array_equal(apply_scalar(comp(0.0), xs), xs)


def test_full_pull_matches_quantizer_off_ties():
    xs = np.random.default_rng(3).uniform(-8.0, 6.0, 1000)
    xs = xs[xs != -1.0]
    q = apply_scalar(Quantizer(default_attractors()), xs)
    assert np.allclose(apply_scalar(comp(1.0), xs), q, atol=1e-12)


def test_contraction_within_basin():
    m = comp(0.3)
    xs = np.linspace(-0.9, 6.0, 200)  # upper basin only
    d_before = np.abs(xs - 1.0)
    d_after = np.abs(apply_scalar(m, xs) - 1.0)
    assert np.allclose(d_after, 0.7 * d_before, rtol=1e-12, atol=1e-15)


def test_apply_scalar_rejects_nonfinite():
    with pytest.raises(ValueError):
        apply_scalar(Transpose(0.0), float("nan"))


def test_apply_contour_pointwise_variants():
    grid = default_grid(11)
    c = Contour("u", grid, np.zeros(11))
    out = apply_contour(Transpose(-2.0), c)
    assert np.all(out.values == -2.0)
    wavy = Contour("u", grid, np.linspace(-4.0, 2.0, 11))
    out = apply_contour(comp(0.3), wavy)
    assert np.array_equal(out.values, apply_scalar(comp(0.3), wavy.values))


def test_apply_contour_utterance_level_rigid_shift():
    grid = default_grid()
    c = Contour("u", grid, np.full(101, 3.0))
    out = apply_contour(comp(0.3, "utterance"), c)
    # window mean 3, nearest attractor +1: whole contour shifts down by 0.6
    assert np.allclose(out.values, 2.4, atol=1e-12)
    tie = Contour("u", grid, np.full(101, -1.0))
    out = apply_contour(comp(0.3, "utterance"), tie)
    assert np.array_equal(out.values, tie.values)


def test_apply_contour_utterance_level_preserves_shape():
    grid = default_grid()
    values = 2.5 + 0.5 * np.sin(6 * np.pi * grid)
    c = Contour("u", grid, values)
    out = apply_contour(comp(0.3, "utterance"), c)
    shifts = values - out.values
    assert np.allclose(shifts, shifts[0], atol=1e-12)  # rigid


def test_apply_contour_rejects_inverter():
    c = Contour("u", default_grid(11), np.zeros(11))
    with pytest.raises(ValueError):
        apply_contour(InverterTransfer(), c)


def test_fixed_points_compressive():
    scan = fixed_points(comp(0.3), (-6.0, 4.0), tol=1e-6)
    assert not scan.identity
    assert [round(p.x, 6) for p in scan.points] == [-3.0, -1.0, 1.0]
    assert [p.stable for p in scan.points] == [True, False, True]


def test_fixed_points_identity_flag():
    scan = fixed_points(Transpose(0.0), (-6.0, 4.0))
    assert scan.identity and scan.points == ()
    scan = fixed_points(Transpose(2.0), (-6.0, 4.0))
    assert not scan.identity and scan.points == ()


def test_fixed_points_quantizer_rejects_basin_jump():
    scan = fixed_points(Quantizer(default_attractors()), (-6.0, 4.0))
    # only the attractor levels themselves; the discontinuity at -1 is no root
    assert [round(p.x, 6) for p in scan.points] == [-3.0, 1.0]
    assert all(p.stable for p in scan.points)


def test_fixed_points_inverter_two_cycle():
    scan = fixed_points(InverterTransfer(), (0.0, 3.3), tol=1e-6)
    xs = [p.x for p in scan.points]
    assert xs == pytest.approx([COMPOSED_LOW, COMPOSED_MID, COMPOSED_HIGH], abs=1e-6)
    assert [p.stable for p in scan.points] == [True, False, True]
    assert [p.kind for p in scan.points] == ["two-cycle", "fixed", "two-cycle"]
    # the stable pair sits within 0.02 V of the nominal logic levels
    assert abs(xs[0] - 0.2) < 0.02 and abs(xs[2] - 3.1) < 0.02


def test_fixed_points_domain_errors():
    with pytest.raises(ValueError):
        fixed_points(comp(), (2.0, 2.0))
    with pytest.raises(ValueError):
        fixed_points(comp(), (-6.0, 4.0), tol=0.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        CompressiveAttractor(default_attractors(), pull=1.5)
    with pytest.raises(ValueError):
        CompressiveAttractor(default_attractors(), pull=0.3, assignment="sometimes")
    with pytest.raises(ValueError):
        InverterTransfer(v_lo=2.0, v_hi=1.0)
    with pytest.raises(ValueError):
        InverterTransfer(gain=0.0)
