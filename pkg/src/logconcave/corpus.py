"""Seeded test corpus of log-concave functions.

All randomness comes from one integer seed fed to numpy's PCG64 generator
(``numpy.random.default_rng``).  Entry ``k`` draws from its own child
stream (``SeedSequence(seed).spawn``), so an entry does not depend on how
many retries earlier entries needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GridSpec, LogConcaveFnGrid
from .exceptions import InvariantViolation, LogConcaveError
from .families import ExponentialBox, Gaussian, PolyhedralQuadratic, Product, sample

__all__ = ["FAMILIES", "CorpusEntry", "draw_descriptor", "generate", "default_grid", "mixed_batch"]

FAMILIES = ("gaussian", "exponential-box", "polyhedral-quadratic", "mixed")
MAX_RETRIES = 50


@dataclass(frozen=True)
class CorpusEntry:
    index: int
    family: str
    descriptor: object
    function: LogConcaveFnGrid

    @property
    def name(self) -> str:
        return f"{self.family}-{self.index:03d}"


def default_grid(dim: int, count: int | None = None, half_width: float = 8.0) -> GridSpec:
    count = {1: 1025, 2: 257, 3: 33}[dim] if count is None else count
    return GridSpec.centered([half_width] * dim, [count] * dim)


def _gaussian(rng, dim, L):
    mean = rng.uniform(-0.125 * L, 0.125 * L, dim)
    var = rng.uniform(0.3, 1.5, dim) * (L / 8.0) ** 2
    return Gaussian(tuple(mean), tuple(var))


def _exponential_box(rng, dim, L):
    slope = rng.uniform(0.25, 1.5, dim) * rng.choice([-1.0, 1.0], dim) * (8.0 / L)
    lo = rng.uniform(-0.6 * L, -0.15 * L, dim)
    hi = rng.uniform(0.15 * L, 0.6 * L, dim)
    return ExponentialBox(tuple(slope), tuple(lo), tuple(hi))


def _polyhedral(rng, dim, L):
    pieces = int(rng.integers(2, 6))
    scale = 8.0 / L
    slopes = rng.normal(0.0, 0.6 * scale, (pieces, dim))
    intercepts = rng.normal(0.0, 0.3, pieces)
    eps = rng.uniform(0.35, 0.7) * scale**2
    center = rng.uniform(-0.1 * L, 0.1 * L, dim)
    return PolyhedralQuadratic(slopes, intercepts, float(eps), tuple(center))


_DRAWS = {
    "gaussian": _gaussian,
    "exponential-box": _exponential_box,
    "polyhedral-quadratic": _polyhedral,
}


def draw_descriptor(family: str, rng: np.random.Generator, dim: int, half_width: float = 8.0):
    """One random descriptor of ``family`` for a grid ``[-half_width, half_width]^dim``."""
    if family == "mixed":
        picks = list(_DRAWS)
        if dim == 1:
            return _DRAWS[picks[int(rng.integers(len(picks)))]](rng, 1, half_width)
        return Product(tuple(
            _DRAWS[picks[int(rng.integers(len(picks)))]](rng, 1, half_width)
            for _ in range(dim)
        ))
    if family not in _DRAWS:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    return _DRAWS[family](rng, dim, half_width)


def generate(family: str, count: int, seed: int, spec: GridSpec | None = None,
             dim: int = 1, max_retries: int = MAX_RETRIES) -> list[CorpusEntry]:
    """``count`` functions of ``family`` sampled on ``spec``, all passing validation.

    Draws that fail the log-concavity or boundary-decay checks are redrawn
    up to ``max_retries`` times per entry.
    """
    spec = default_grid(dim) if spec is None else spec
    half = min((b - a) / 2 for a, b in zip(spec.lo, spec.hi))
    children = np.random.SeedSequence(seed).spawn(count)
    out = []
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        for _ in range(max_retries):
            desc = draw_descriptor(family, rng, spec.dim, half)
            try:
                f = sample(desc, spec)
            except LogConcaveError:
                continue
            out.append(CorpusEntry(k, family, desc, f))
            break
        else:
            raise InvariantViolation(
                f"{family} entry {k}: no valid draw after {max_retries} attempts"
            )
    return out


def mixed_batch(count: int, seed: int, dim: int = 1, spec: GridSpec | None = None,
                lam_range: tuple[float, float] = (0.2, 0.8)) -> list[tuple[CorpusEntry, float]]:
    """``count`` entries cycling through :data:`FAMILIES`, each with a target λ.

    Entry ``k`` is entry ``k // 4`` of its family's corpus, so the batch is
    a prefix-stable interleaving; the λ values come from a separate stream
    of the same seed.
    """
    per = -(-count // len(FAMILIES))
    pools = {fam: generate(fam, per, seed, spec, dim) for fam in FAMILIES}
    lam_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(count + 1)[-1])
    lams = lam_rng.uniform(*lam_range, count)
    return [(pools[FAMILIES[k % len(FAMILIES)]][k // len(FAMILIES)], float(lams[k]))
            for k in range(count)]
