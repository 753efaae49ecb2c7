"""Acceptance suite: one test per acceptance criterion, at the stated tolerance."""

import math
import time
import warnings

import numpy as np
import pytest

from logconcave import (
    AffineSubspace,
    ConjugatePlan,
    Gaussian,
    GridSpec,
    HypothesisFailed,
    LogConcaveFnGrid,
    integrate,
    lambda_split,
    polar,
    polar_mass,
    polar_mass_gradient,
    prekopa_check,
    sample,
    santalo_point,
    steiner_symmetrize,
    symmetry_defect,
)
from logconcave.core import Hyperplane
from logconcave.corpus import mixed_batch
from logconcave.legendre import (
    conjugate_1d,
    conjugate_1d_brute,
    double_conjugate,
    legendre_brute,
    legendre_nd,
)
from logconcave.steiner import layer_cake_line
from logconcave.verify import (
    ball_lemma_check,
    ball_lemma_counterexample,
    slice_mass_triple,
    verify_santalo_invariance,
)

SEED = 7
TWO_PI = 2 * math.pi


# -- 1 ------------------------------------------------------------------------


@pytest.mark.parametrize("dim,count,tol", [(1, 1025, 0.01), (2, 257, 0.025)])
def test_gaussian_product_equals_two_pi_power(dim, count, tol):
    spec = GridSpec.centered([8.0] * dim, [count] * dim)
    f = sample(Gaussian(0.0, 1.0), spec)
    t0 = time.perf_counter()
    g = polar(f, np.zeros(dim), ConjugatePlan(spec, GridSpec.centered([8.0] * dim, [count] * dim)))
    product = integrate(f) * integrate(g)
    elapsed = time.perf_counter() - t0
    assert abs(product / TWO_PI**dim - 1) <= tol
    assert elapsed < 5.0


# -- 2 ------------------------------------------------------------------------


def test_exponential_polar_pair():
    spec = GridSpec.centered([400.0], [8001])
    f = LogConcaveFnGrid(spec, np.exp(-np.abs(spec.nodes(0))))
    plan = ConjugatePlan(spec, GridSpec.centered([4.0], [1601]))
    # for |y| > 1 the maximizer is the edge of the x-grid by construction
    product = integrate(f) * integrate(polar(f, [0.0], plan, warn=False))
    assert abs(product / 4 - 1) <= 0.01
    assert abs(product / TWO_PI - 0.6366) <= 0.01


# -- 3 ------------------------------------------------------------------------


def test_restricted_bound_on_seeded_corpus(pipeline_runs):
    runs, elapsed = pipeline_runs
    assert len(runs) == 30
    violations = []
    for entry, _, r in runs:
        assert r.failure is None, (entry.name, r.failure)
        lam = r.lambda_1
        assert 0.2 <= lam <= 0.8, (entry.name, lam)
        limit = TWO_PI**r.dim / (4 * lam * (1 - lam)) * 1.02
        if not r.product_0 <= limit:
            violations.append((entry.name, r.dim, r.product_0, limit))
    assert violations == []
    assert elapsed < 120.0


# -- 4 ------------------------------------------------------------------------


def test_monotone_product_chain(pipeline_runs):
    runs, _ = pipeline_runs
    for entry, _, r in runs:
        lam = r.lambda_1
        products = [s.product for s in r.steps]
        for a, b in zip(products, products[1:]):
            assert b >= a * (1 - 1e-6), (entry.name, r.dim, a, b)
        first = products[0]
        assert first >= 4 * lam * (1 - lam) * r.product_0 * (1 - 1e-6), (entry.name, r.dim)


# -- 5 ------------------------------------------------------------------------


def _random_convex_profile(rng):
    n = int(rng.integers(2, 400))
    x = np.cumsum(rng.uniform(0.01, 1.0, n)) - rng.uniform(0, 50)
    kind = rng.integers(4)
    if kind == 0:
        v = rng.uniform(0.01, 3) * (x - rng.normal()) ** 2
    elif kind == 1:
        a = rng.normal(0, 3, (5, 1))
        v = np.max(a * x[None, :] + rng.normal(0, 2, (5, 1)), axis=0)
    elif kind == 2:
        v = np.abs(x - rng.normal()) * rng.uniform(0.1, 4) + rng.uniform(0, 1) * x * x
    else:
        v = np.round(rng.uniform(0.1, 2) * x * x * 8) / 8  # many exact ties
    if rng.uniform() < 0.3:
        cut = rng.integers(0, n, 2)
        v = v.copy()
        v[: min(cut)] = np.inf
        v[max(cut) + 1 :] = np.inf
    m = int(rng.integers(1, 400))
    y = np.sort(rng.uniform(-20, 20, m))
    y = np.unique(y)
    return v, x, y


def test_fast_conjugate_equals_brute_force():
    rng = np.random.default_rng(SEED)
    for trial in range(100):
        v, x, y = _random_convex_profile(rng)
        fast, af = conjugate_1d(v, x, y, return_argmax=True)
        slow, ab = conjugate_1d_brute(v, x, y, return_argmax=True)
        assert np.array_equal(fast, slow), trial
        assert np.array_equal(af, ab), trial


@pytest.mark.parametrize("dim,count", [(2, 33), (3, 17)])
def test_factorized_transform_equals_all_pairs(dim, count):
    spec = GridSpec.centered([4.0] * dim, [count] * dim)
    for entry, _ in mixed_batch(4, SEED, dim, spec):
        phi = entry.function.potential()
        plan = ConjugatePlan.default(spec)
        for z in (np.zeros(dim), np.full(dim, 0.3)):
            fast = legendre_nd(phi, z, plan, warn=False)
            slow = legendre_brute(phi, z, plan)
            assert np.array_equal(fast.values, slow.values), (entry.name, z)


# -- 6 ------------------------------------------------------------------------


def _slope_covering_plan(phi):
    """Dual grid with the source spacing whose half-width covers every slope of ``phi``."""
    spec = phi.spec
    slope = _max_slope(phi)
    w = 2.0 ** math.ceil(math.log2(1.05 * slope))
    return ConjugatePlan(spec, GridSpec.centered([w] * spec.dim, [int(2 * w / spec.h[0]) + 1] * spec.dim)), slope


def _max_slope(phi):
    worst = 0.0
    for k in range(phi.spec.dim):
        with np.errstate(invalid="ignore"):
            d = np.abs(np.diff(phi.values, axis=k)) / phi.spec.h[k]
        worst = max(worst, float(np.max(d[np.isfinite(d)])))
    return worst


@pytest.mark.parametrize("dim,count", [(1, 8), (2, 4)])
def test_involution(dim, count):
    spec = None if dim == 1 else GridSpec.centered([8.0, 8.0], [129, 129])
    for entry, _ in mixed_batch(count, SEED, dim, spec):
        phi = entry.function.potential()
        plan, slope = _slope_covering_plan(phi)
        fin = np.isfinite(phi.values)
        once = legendre_nd(phi, None, plan, warn=False)
        twice = double_conjugate(phi, None, plan)
        thrice = legendre_nd(twice, None, plan, warn=False)
        bound = 1e-6 * np.ptp(phi.values[fin]) + 2 * max(phi.spec.h) * slope
        err = np.max(np.abs(twice.values[fin] - phi.values[fin]))
        assert err <= bound, (entry.name, err, bound)
        assert np.array_equal(thrice.values, once.values), entry.name


# -- 7 ------------------------------------------------------------------------


def test_polar_mass_gradient_matches_central_differences():
    delta = 1e-3
    batch = mixed_batch(12, SEED, 1) + mixed_batch(8, SEED, 2)
    for entry, _ in batch:
        f = entry.function
        dim = f.spec.dim
        z = santalo_point(f).z_star + 0.5
        grad = polar_mass_gradient(f, z)
        fd = np.empty(dim)
        for k in range(dim):
            e = np.zeros(dim)
            e[k] = delta
            fd[k] = (polar_mass(f, z + e) - polar_mass(f, z - e)) / (2 * delta)
        assert np.max(np.abs(grad - fd)) <= 1e-4 * np.max(np.abs(grad)), entry.name


# -- 8 ------------------------------------------------------------------------


def _lines(values, axis):
    return np.moveaxis(values, axis, -1).reshape(-1, values.shape[axis])


@pytest.mark.parametrize("dim", [1, 2])
def test_steiner_exactness(dim):
    for entry, _ in mixed_batch(8, SEED, dim):
        f = entry.function
        spec = f.spec
        for axis in range(dim):
            c = spec.count[axis] // 2
            H = Hyperplane(axis, spec.node(axis, c))
            s = steiner_symmetrize(f, H)
            assert integrate(s) == integrate(f)
            for before, after in zip(_lines(f.values, axis), _lines(s.values, axis)):
                assert math.fsum(after) == math.fsum(before)
            assert symmetry_defect(s, H) == 0.0
            assert np.array_equal(steiner_symmetrize(s, H).values, s.values)
            for before, after in zip(_lines(f.values, axis)[::16], _lines(s.values, axis)[::16]):
                oracle = layer_cake_line(before, c, thresholds=1000)
                gap = np.zeros_like(after)
                gap[1:] = np.maximum(gap[1:], np.abs(np.diff(after)))
                gap[:-1] = np.maximum(gap[:-1], np.abs(np.diff(after)))
                step = float(before.max()) / 1000
                assert (np.abs(after - oracle) <= gap + step).all(), entry.name


# -- 9 ------------------------------------------------------------------------


def test_santalo_point_invariance(corpus_2d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for entry, lam in corpus_2d:
            f = entry.function
            H = lambda_split(f, 0, lam).hyperplane
            rep = verify_santalo_invariance(f, AffineSubspace.from_hyperplanes([H]), H)
            assert rep.drift <= 1e-3 * f.spec.extent, (entry.name, rep.drift)
            assert rep.polar_symmetry_defect <= 1e-12, entry.name


# -- 10 -----------------------------------------------------------------------


def test_three_function_lemma_on_pipeline_triples(corpus_2d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for entry, lam in corpus_2d:
            f = entry.function
            H = lambda_split(f, 0, lam).hyperplane
            z = santalo_point(f, AffineSubspace.from_hyperplanes([H])).z_star
            g = polar(f, z, warn=False)
            rep = ball_lemma_check(*slice_mass_triple(g, z, Hyperplane(0, float(z[0]))))
            assert rep.hypothesis_ok, entry.name
            assert rep.ok, (entry.name, rep.lhs, rep.rhs)


def test_three_function_lemma_rejects_counterexample():
    F0, F1, F2, h = ball_lemma_counterexample()
    with pytest.raises(HypothesisFailed) as info:
        ball_lemma_check(F0, F1, F2, h)
    w = info.value.witness
    x, y = w["x"], w["y"]
    assert x > 0 and y > 0
    assert abs(x / h - round(x / h)) < 1e-12 and abs(y / h - round(y / h)) < 1e-12
    assert w["F0"] < w["rhs"]


# -- 11 -----------------------------------------------------------------------


def test_prekopa_on_random_pairs():
    spec = GridSpec.centered([8.0], [4097])
    first = mixed_batch(50, 11, 1, spec)
    second = mixed_batch(50, 12, 1, spec)
    for (f, _), (g, _) in zip(first, second):
        for lam in (0.25, 0.5, 0.75):
            r = prekopa_check(f.function, g.function, lam)
            assert r.lhs >= r.rhs, (f.name, g.name, lam, r.slack)


def test_prekopa_equality_for_identical_functions():
    spec = GridSpec.centered([8.0], [16385])
    f = sample(Gaussian(0.3, 1.2), spec)
    for lam in (0.25, 0.5, 0.75):
        r = prekopa_check(f, f, lam)
        assert abs(r.lhs / r.rhs - 1) <= 1e-6, (lam, r.slack)
