import math

import numpy as np
import pytest

from logconcave import (
    ConvexFnGrid,
    Gaussian,
    GridSpec,
    Hyperplane,
    LogConcaveFnGrid,
    asplund_product,
    homothety,
    integrate,
    prekopa_check,
    sample,
    steiner_symmetrize,
    steiner_symmetrize_convex,
)
from logconcave.exceptions import CenterTooCloseToEdge, GridMismatch, OffsetNotOnGrid
from logconcave.families import BoxIndicator, ExponentialBox
from logconcave.steiner import asplund_product_log, layer_cake_line, rearrange_line


def test_symmetric_profile_is_fixed():
    line = [0.0, 1.0, 2.0, 4.0, 2.0, 1.0, 0.0]
    assert rearrange_line(line, 3).tolist() == line


def test_rearrangement_preserves_exact_sum():
    rng = np.random.default_rng(3)
    for _ in range(50):
        v = np.zeros(101)
        v[30:70] = rng.uniform(0, 1, 40) ** 3
        out = rearrange_line(v, 50)
        assert math.fsum(out) == math.fsum(v)
        assert (np.diff(out[50:]) <= 0).all() and (np.diff(out[:51]) >= 0).all()
        assert np.array_equal(out[50:], out[50::-1])


def test_rearrangement_matches_layer_cake():
    x = np.linspace(-4, 4, 161)
    v = np.exp(-np.abs(x - 1.3)) * (x > -1)
    out = rearrange_line(v, 80)
    oracle = layer_cake_line(v, 80, thresholds=4000)
    assert np.max(np.abs(out - oracle)) <= np.max(np.abs(np.diff(out))) + v.max() / 4000


def test_rearrangement_rejects_bad_input():
    with pytest.raises(ValueError):
        rearrange_line([1.0, -1.0, 1.0], 1)
    with pytest.raises(CenterTooCloseToEdge):
        rearrange_line([1.0, 1.0, 1.0, 1.0, 1.0], 1)


def test_symmetrizing_off_grid_plane_fails():
    f = sample(Gaussian(0.0, 1.0), GridSpec.centered([6.0], [61]))
    with pytest.raises(OffsetNotOnGrid):
        steiner_symmetrize(f, Hyperplane(0, 0.05))


def test_shifted_gaussian_becomes_centered():
    spec = GridSpec.centered([8.0, 8.0], [81, 81])
    f = sample(Gaussian([1.0, -0.5], [1.0, 2.0]), spec)
    s = steiner_symmetrize(f, Hyperplane(0, 0.0))
    centered = sample(Gaussian([0.0, -0.5], [1.0, 2.0]), spec)
    assert integrate(s) == integrate(f)
    np.testing.assert_allclose(s.values, centered.values, atol=0.02)


def test_convex_route_agrees_with_log_concave_route():
    spec = GridSpec.centered([6.0, 6.0], [61, 61])
    f = sample(ExponentialBox([1.0, 0.5], [-2.0, -3.0], [2.0, 1.0]), spec)
    H = Hyperplane(1, 0.0)
    direct = steiner_symmetrize(f, H)
    via_phi = steiner_symmetrize_convex(f.potential(), H)
    with np.errstate(divide="ignore"):
        back = np.exp(-via_phi.values)
    # the direct route carries pair-sum rounding errors forward, the log route drops them
    np.testing.assert_allclose(back, direct.values, rtol=1e-12, atol=1e-15 * direct.values.max())


def test_convex_steiner_of_indicator_is_centered_indicator():
    spec = GridSpec.centered([4.0], [41])
    phi = sample(BoxIndicator(0.0, 2.0), spec, kind="convex")
    out = steiner_symmetrize_convex(phi, Hyperplane(0, 0.0))
    assert isinstance(out, ConvexFnGrid)
    assert np.isfinite(out.values).sum() == np.isfinite(phi.values).sum()
    assert np.array_equal(out.values, out.values[::-1])


@pytest.mark.parametrize("dim", [1, 2])
def test_asplund_product_two_routes(dim):
    spec = GridSpec.centered([3.0] * dim, [13] * dim)
    f = sample(Gaussian(0.5, 0.7), spec, decay_ratio=None)
    g = sample(ExponentialBox(0.8, -1.0, 2.0), spec, decay_ratio=None)
    direct = asplund_product(f, g)
    via_log = asplund_product_log(f, g)
    assert direct.spec == via_log.spec
    assert direct.spec.lo == tuple(2 * a for a in spec.lo)
    np.testing.assert_allclose(direct.values, via_log.values, rtol=1e-13, atol=0)


def test_asplund_of_gaussians_is_gaussian():
    spec = GridSpec.centered([6.0], [121])
    f = sample(Gaussian(0.0, 1.0), spec)
    h = asplund_product(f, f)
    x = h.spec.nodes(0)
    exact = np.exp(-x * x / 4)
    # even output nodes are reached by x1 = x2, odd ones only by neighbours
    np.testing.assert_allclose(h.values[::2], exact[::2], rtol=1e-12)
    assert (h.values[1::2] <= exact[1::2]).all()


def test_asplund_requires_common_spacing():
    f = sample(Gaussian(), GridSpec.centered([6.0], [61]))
    g = sample(Gaussian(), GridSpec.centered([6.0], [121]))
    with pytest.raises(GridMismatch):
        asplund_product(f, g)


def test_homothety():
    spec = GridSpec.centered([6.0], [121])
    f = sample(Gaussian(0.0, 1.0), spec)
    np.testing.assert_allclose(homothety(1.0, f).values, f.values, rtol=1e-15)
    half = homothety(0.5, f)
    x = half.spec.nodes(0)
    # (1/2 . f)(x) = f(2x)^(1/2) = exp(-x^2)
    np.testing.assert_allclose(half.values, np.exp(-x * x), rtol=1e-12)
    with pytest.raises(ValueError):
        homothety(0.0, f)


def test_prekopa_slack_for_different_gaussians():
    spec = GridSpec.centered([10.0], [1001])
    f = sample(Gaussian(-1.0, 0.5), spec)
    g = sample(Gaussian(1.0, 2.0), spec)
    r = prekopa_check(f, g, 0.4)
    assert r.ok and r.slack > 0.01
    with pytest.raises(ValueError):
        prekopa_check(f, g, 1.0)
