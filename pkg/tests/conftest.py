import time
import warnings

import numpy as np
import pytest

from logconcave import GridSpec, LogConcaveFnGrid
from logconcave.corpus import mixed_batch
from logconcave.legendre import conjugate_1d, legendre_nd
from logconcave.verify import run_pipeline

SEED = 7


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    """Trigger numba compilation once so timed tests measure the work, not the JIT."""
    x = np.linspace(-1.0, 1.0, 5)
    conjugate_1d(x * x, x, x)
    conjugate_1d(x * x, x, x, method="brute")
    spec = GridSpec.centered([1.0, 1.0], [5, 5])
    mesh = spec.mesh()
    legendre_nd(LogConcaveFnGrid(spec, np.exp(-(mesh[0] ** 2 + mesh[1] ** 2))).potential())


@pytest.fixture(scope="session")
def corpus_1d():
    return mixed_batch(20, SEED, 1)


@pytest.fixture(scope="session")
def corpus_2d():
    return mixed_batch(10, SEED, 2)


@pytest.fixture(scope="session")
def pipeline_runs(corpus_1d, corpus_2d):
    """Pipeline reports for the seeded 1-D and 2-D batches, plus the wall time."""
    t0 = time.perf_counter()
    runs = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for entry, lam in corpus_1d + corpus_2d:
            runs.append((entry, lam, run_pipeline(entry.function, lam=lam)))
    return runs, time.perf_counter() - t0


@pytest.fixture
def gaussian_1d():
    spec = GridSpec.centered([8.0], [257])
    x = spec.nodes(0)
    return LogConcaveFnGrid(spec, np.exp(-x * x / 2))
