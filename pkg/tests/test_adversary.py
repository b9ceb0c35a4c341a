"""Comparators, the mollifier bump class, and stream generators."""

import numpy as np
import pytest

from kaarbench.adversary import (
    RepresenterComparator,
    ZeroComparator,
    bump_comparator,
    iid_stream,
    mollifier_g,
    mollifier_norm,
    shattering_stream,
)
from kaarbench.kernel import KernelParams, gram


# -- mollifier ---------------------------------------------------------


def test_mollifier_center_value():
    assert mollifier_g(np.zeros(1)) == 0.5
    assert mollifier_g(np.zeros(3)) == 0.5


def test_mollifier_outside_support():
    assert mollifier_g([0.6]) == 0.0
    assert mollifier_g([0.5]) == 0.0
    assert mollifier_g([0.4, 0.4]) == 0.0  # norm ~ 0.57


def test_mollifier_inner_plateau_boundary():
    # at ||x|| = a = 1/4 the smoothstep argument is 0 and g is still 1/2
    assert mollifier_g([0.25]) == 0.5
    assert mollifier_g([0.25 / np.sqrt(2), 0.25 / np.sqrt(2)]) == pytest.approx(0.5, abs=1e-15)


def test_mollifier_range_and_monotone_profile():
    rs = np.linspace(0.0, 0.8, 500)
    vals = np.array([mollifier_g([r]) for r in rs])
    assert np.all(vals >= 0.0) and np.all(vals <= 0.5)
    assert np.all(np.diff(vals) <= 1e-12)  # nonincreasing radial profile


def test_mollifier_fd_derivatives_bounded():
    # smoothness proxy: central first and second differences stay bounded
    # across the transition radii 1/4 and 1/2
    h = 1e-5
    rs = np.linspace(0.01, 0.7, 2000)
    g = np.array([mollifier_g([r]) for r in rs])
    gp = np.array([(mollifier_g([r + h]) - mollifier_g([r - h])) / (2 * h) for r in rs])
    gpp = np.array([(mollifier_g([r + h]) - 2 * gi + mollifier_g([r - h])) / h**2 for r, gi in zip(rs, g)])
    assert np.isfinite(gp).all() and np.isfinite(gpp).all()
    assert np.abs(gp).max() < 50.0
    assert np.abs(gpp).max() < 5e3


def test_mollifier_norm_cached_and_bounded_below():
    n1 = mollifier_norm(1, 1.0)
    assert n1 >= 0.5  # at least the sup norm of g
    assert mollifier_norm(1, 1.0) == n1
    with pytest.raises(ValueError):
        mollifier_norm(1, 2.5)


# -- representer comparators --------------------------------------------


def test_representer_norm_is_quadratic_form():
    params = KernelParams(1, 1.0)
    centers = np.array([[-0.5], [0.0], [0.5]])
    coeffs = np.array([1.0, -2.0, 0.5])
    comp = RepresenterComparator(params, centers, coeffs)
    K = gram(params, centers)
    assert comp.norm_sq == pytest.approx(float(coeffs @ K @ coeffs), abs=1e-10)
    assert comp.norm_sq >= 0


def test_representer_single_center_norm_is_kappa_sq():
    # reproducing property: <k_x, k_x> = k(x, x)
    params = KernelParams(2, 2.0)
    comp = RepresenterComparator(params, np.array([[0.1, 0.2]]), np.array([1.0]))
    assert comp.norm_sq == pytest.approx(params.kappa_sq, rel=1e-14)


def test_representer_evaluation_matches_kernel_sum():
    from kaarbench.kernel import kernel_eval

    params = KernelParams(1, 2.0)
    centers = np.array([[-0.3], [0.4]])
    coeffs = np.array([0.7, -0.2])
    comp = RepresenterComparator(params, centers, coeffs)
    for x in (-0.9, 0.0, 0.55):
        expected = sum(c * kernel_eval(params, ctr, [x]) for c, ctr in zip(coeffs, centers))
        assert comp([x]) == pytest.approx(expected, rel=1e-12)


# -- bump class ----------------------------------------------------------


def test_bump_cube_count_and_signs_length():
    comp = bump_comparator(64, 1, 0.5, 1.0, np.ones(128))
    assert comp.n_cubes == 128
    comp2 = bump_comparator(16, 2, 1.0, 2.0, np.ones(64))
    assert comp2.n_cubes == 64
    with pytest.raises(ValueError):
        bump_comparator(64, 1, 0.5, 1.0, np.ones(127))
    with pytest.raises(ValueError):
        bump_comparator(64, 1, 0.5, 1.0, np.full(128, 2.0))


def test_bump_center_values_match_amplitude_formula():
    rng = np.random.default_rng(0)
    for n_grid, d, beta, m in ((64, 1, 0.5, 1.0), (16, 2, 1.0, 2.0)):
        n_cubes = int(np.floor(2 * n_grid ** (1 / d))) ** d
        signs = rng.choice([-1.0, 1.0], n_cubes)
        comp = bump_comparator(n_grid, d, beta, m, signs)
        expected = signs * m * n_grid ** (-beta / d) / (8.0 * comp.g_norm)
        got = comp.evaluate(comp.centers())
        assert np.abs(got - expected).max() <= 1e-12


def test_bump_vanishes_outside_cubes():
    rng = np.random.default_rng(1)
    comp = bump_comparator(64, 1, 0.5, 1.0, rng.choice([-1.0, 1.0], 128))
    centers = comp.centers()
    # points at least half a cell from every center: cell boundaries
    boundaries = centers[:-1] + comp.side / 2.0
    vals = comp.evaluate(boundaries)
    assert np.abs(vals).max() <= 1e-300
    # far outside the domain
    assert comp([2.0]) == 0.0


def test_bump_sup_bound():
    rng = np.random.default_rng(2)
    for n_grid, d, beta, m in ((64, 1, 0.5, 1.0), (16, 2, 1.0, 2.0)):
        n_cubes = int(np.floor(2 * n_grid ** (1 / d))) ** d
        comp = bump_comparator(n_grid, d, beta, m, rng.choice([-1.0, 1.0], n_cubes))
        pts = rng.uniform(-1, 1, (20_000, d))
        assert np.abs(comp.evaluate(pts)).max() <= m / 4.0


def test_bump_amplitude_halves_with_grid_doubling():
    # doubling n scales the amplitude by 2^{-beta/d} exactly
    signs64 = np.ones(128)
    signs128 = np.ones(256)
    a64 = bump_comparator(64, 1, 0.5, 1.0, signs64).amplitude
    a128 = bump_comparator(128, 1, 0.5, 1.0, signs128).amplitude
    assert a128 / a64 == pytest.approx(2.0 ** (-0.5), rel=1e-12)


def test_bump_disjoint_supports():
    # within its own cube each bump is unaffected by neighbors: flipping a
    # far-away sign leaves local values unchanged
    rng = np.random.default_rng(3)
    signs = rng.choice([-1.0, 1.0], 128)
    comp_a = bump_comparator(64, 1, 0.5, 1.0, signs)
    flipped = signs.copy()
    flipped[-1] *= -1
    comp_b = bump_comparator(64, 1, 0.5, 1.0, flipped)
    x = comp_a.centers()[:5] + 0.3 * comp_a.side
    assert np.array_equal(comp_a.evaluate(x), comp_b.evaluate(x))


# -- streams -------------------------------------------------------------


def test_shattering_stream_structure():
    stream = shattering_stream(64, 1, 1.0, 0.5, np.random.default_rng(0))
    assert len(stream) == 128
    assert np.all(np.abs(stream.xs) <= 1.0)
    assert set(np.unique(stream.ys)) == {-1.0, 1.0}
    # inputs are the cube centers in lexicographic order
    assert np.array_equal(stream.xs, stream.comparator.centers())


def test_shattering_comparator_beats_zero_predictor():
    for seed in range(8):
        stream = shattering_stream(32, 1, 1.0, 0.5, np.random.default_rng(seed))
        fvals = stream.comparator.evaluate(stream.xs)
        comp_loss = np.sum((stream.ys - fvals) ** 2)
        zero_loss = np.sum(stream.ys**2)
        assert comp_loss < zero_loss
        # comparator agrees in sign with every label
        assert np.all(np.sign(fvals) == np.sign(stream.ys))


def test_shattering_stream_2d():
    stream = shattering_stream(16, 2, 2.0, 1.0, np.random.default_rng(4))
    assert len(stream) == 64
    assert stream.xs.shape == (64, 2)


def test_iid_stream_noiseless_matches_comparator():
    params = KernelParams(1, 1.0)
    comp = RepresenterComparator(params, np.array([[0.0]]), np.array([0.4]))
    stream = iid_stream(comp, 0.0, 100, np.random.default_rng(0), clip_m=1.0)
    assert np.array_equal(stream.ys, np.clip(comp.evaluate(stream.xs), -1, 1))


def test_iid_stream_zero_comparator_all_zero_labels():
    stream = iid_stream(ZeroComparator(dim=2), 0.0, 50, np.random.default_rng(1), clip_m=1.0)
    assert np.all(stream.ys == 0.0)
    assert stream.xs.shape == (50, 2)


def test_iid_stream_labels_clamped():
    params = KernelParams(1, 1.0)
    comp = RepresenterComparator(params, np.array([[0.0]]), np.array([5.0]))
    stream = iid_stream(comp, 0.5, 200, np.random.default_rng(2), clip_m=1.0)
    assert np.all(np.abs(stream.ys) <= 1.0)


def test_stream_determinism():
    a = iid_stream(ZeroComparator(dim=1), 0.3, 64, np.random.default_rng(123), clip_m=1.0)
    b = iid_stream(ZeroComparator(dim=1), 0.3, 64, np.random.default_rng(123), clip_m=1.0)
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ys, b.ys)
    c = shattering_stream(32, 1, 1.0, 0.5, 77)
    d = shattering_stream(32, 1, 1.0, 0.5, 77)
    assert np.array_equal(c.ys, d.ys)


def test_iid_stream_rejects_negative_noise():
    with pytest.raises(ValueError):
        iid_stream(ZeroComparator(dim=1), -0.1, 10, np.random.default_rng(0))
