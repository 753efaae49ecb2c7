"""Grid calculus of log-concave functions.

Discrete Legendre transforms and polars, functional Steiner
symmetrization, Asplund products and Santaló points, with numerical
checks of the Blaschke-Santaló bound for log-concave functions and of the
Steiner-symmetrization argument behind it.
"""

from .core import (
    AffineSubspace,
    ConvexFnGrid,
    GridSpec,
    Hyperplane,
    LogConcaveFnGrid,
    barycenter,
    half_space_masses,
    integrate,
    moment,
    symmetry_defect,
)
from .exceptions import *  # noqa: F401,F403
from .families import BoxIndicator, ExponentialBox, Gaussian, PolyhedralQuadratic, Product, sample
from .io import read_grid, write_grid
from .legendre import ConjugatePlan, conjugate_1d, double_conjugate, legendre_nd, polar
from .santalo import PolarMass, lambda_split, polar_mass, polar_mass_gradient, santalo_point
from .steiner import (
    asplund_product,
    homothety,
    prekopa_check,
    steiner_symmetrize,
    steiner_symmetrize_convex,
)
from .validation import check_convex, check_log_concave
from .verify import run_pipeline

__version__ = "0.1.0"
