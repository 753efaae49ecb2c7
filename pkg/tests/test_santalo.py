import math

import numpy as np
import pytest

from logconcave import (
    AffineSubspace,
    ConjugatePlan,
    Gaussian,
    GridSpec,
    Hyperplane,
    PolarMass,
    integrate,
    lambda_split,
    polar,
    polar_mass,
    polar_mass_gradient,
    sample,
    santalo_point,
)
from logconcave.exceptions import NotConvergedWarning, PlanMismatch, SubspaceOutsideSupport
from logconcave.families import ExponentialBox

# the exponential tails reach the grid edge for large dual slopes
pytestmark = pytest.mark.filterwarnings("ignore::logconcave.exceptions.BoundaryArgmaxWarning")


@pytest.fixture(scope="module")
def skewed():
    spec = GridSpec.centered([8.0, 8.0], [65, 65])
    return sample(ExponentialBox([2.0, 1.6], [-1.0, -1.5], [np.inf, np.inf]), spec)


def test_polar_mass_functional_matches_fresh_polars(skewed):
    F = PolarMass(skewed)
    for z in ([0.0, 0.0], [0.25, 0.5], [1.0, -0.5]):
        assert F.value(z) == pytest.approx(polar_mass(skewed, z), rel=1e-12)
        np.testing.assert_allclose(F.gradient(z), polar_mass_gradient(skewed, z), rtol=1e-10, atol=1e-14)


def test_gradient_is_first_moment_of_polar(skewed):
    z = np.array([0.5, 0.25])
    g = polar(skewed, z, warn=False)
    X, Y = g.spec.mesh()
    vol = g.spec.cell_volume
    expect = [vol * math.fsum(((X - z[0]) * g.values).ravel()), vol * math.fsum(((Y - z[1]) * g.values).ravel())]
    np.testing.assert_allclose(polar_mass_gradient(skewed, z), expect, rtol=1e-12)


def test_functional_needs_relative_plan(skewed):
    plan = ConjugatePlan(skewed.spec, skewed.spec, relative=False)
    with pytest.raises(PlanMismatch):
        PolarMass(skewed, plan)


def test_symmetric_function_has_central_santalo_point():
    spec = GridSpec.centered([8.0, 8.0], [65, 65])
    f = sample(Gaussian([0.0, 0.0], [1.0, 2.0]), spec)
    res = santalo_point(f)
    assert res.converged
    assert np.max(np.abs(res.z_star)) < 1e-6
    assert res.value == pytest.approx(integrate(polar(f, [0.0, 0.0])), rel=1e-9)


def test_santalo_point_minimizes_polar_mass(skewed):
    res = santalo_point(skewed)
    F = PolarMass(skewed)
    assert np.linalg.norm(F.gradient(res.z_star)) <= 1e-6 * res.value
    for step in np.eye(2) * 0.1:
        assert F.value(res.z_star + step) > res.value
        assert F.value(res.z_star - step) > res.value


def test_restricted_santalo_point_stays_on_subspace(skewed):
    G = AffineSubspace.from_hyperplanes([Hyperplane(0, 0.5)])
    res = santalo_point(skewed, G)
    assert res.z_star[0] == 0.5
    grad = PolarMass(skewed).gradient(res.z_star)
    assert abs(grad[1]) <= 1e-6 * res.value


def test_subspace_outside_support(skewed):
    G = AffineSubspace.from_hyperplanes([Hyperplane(0, -3.0)])
    with pytest.raises(SubspaceOutsideSupport):
        santalo_point(skewed, G)


def test_iteration_cap_warns(skewed):
    with pytest.warns(NotConvergedWarning):
        res = santalo_point(skewed, max_iters=1, rel_tol=1e-15)
    assert not res.converged


@pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
def test_lambda_split(lam):
    spec = GridSpec.centered([8.0], [1025])
    f = sample(Gaussian(0.7, 1.3), spec)
    split = lambda_split(f, 0, lam)
    assert abs(split.achieved_lambda - lam) <= spec.h[0] * f.values.max() / integrate(f)
    assert split.hyperplane.offset in spec.nodes(0)
    with pytest.raises(ValueError):
        lambda_split(f, 0, 1.0)
