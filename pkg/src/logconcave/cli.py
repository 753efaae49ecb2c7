"""Command-line front end: ``logconcave {transform,verify,corpus}``.

Exit codes: 0 every verdict passed, 1 a verification failed, 2 usage or
parse error, 3 numeric abort (any other package error).
The environment variable ``LOGCONCAVE_GRID_CAP`` caps the node count of
every grid the run builds.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import io
from .core import AffineSubspace, GridSpec, Hyperplane, LogConcaveFnGrid, integrate
from .corpus import FAMILIES, default_grid, generate, mixed_batch
from .exceptions import HypothesisFailed, LogConcaveError, ParseError
from .legendre import ConjugatePlan, legendre_nd, polar
from .santalo import lambda_split, santalo_point
from .steiner import (
    asplund_product,
    homothety,
    prekopa_check,
    steiner_symmetrize,
    steiner_symmetrize_convex,
)
from .verify import (
    EPS_TOT,
    ball_lemma_check,
    ball_lemma_counterexample,
    run_pipeline,
    slice_inequality_check,
    slice_mass_triple,
    verify_separation_lemma,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
SUITES = ("theorem1", "theorem2", "lemma21", "lemma45", "lemma46", "prekopa")
# hard support edges cost O(h) in the discrete Asplund product; see README
PREKOPA_COUNT = 4097
OPS = ("conjugate", "polar", "steiner", "asplund", "homothety")


class UsageError(Exception):
    pass


def _point(text: str | None, dim: int):
    if text is None:
        return np.zeros(dim)
    try:
        z = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--z expects comma-separated numbers, got {text!r}") from None
    if len(z) != dim:
        raise UsageError(f"--z has {len(z)} coordinates, the grid has dimension {dim}")
    return np.array(z)


def _mass(fn) -> str:
    if isinstance(fn, LogConcaveFnGrid):
        return f"{integrate(fn):.12g}"
    return f"{integrate(fn.to_logconcave()):.12g} (of exp(-phi))"


# ---------------------------------------------------------------- transform


def _transform(args) -> int:
    src = io.read_grid(args.input)
    dim = src.spec.dim
    op = args.op
    plan = None
    if op in ("conjugate", "polar"):
        plan = ConjugatePlan.default(src.spec, args.dual_scale, args.dual_count)
    if op == "conjugate":
        phi = src.potential() if isinstance(src, LogConcaveFnGrid) else src
        out = legendre_nd(phi, _point(args.z, dim), plan)
    elif op == "polar":
        f = src if isinstance(src, LogConcaveFnGrid) else src.to_logconcave()
        out = polar(f, _point(args.z, dim), plan)
    elif op == "steiner":
        if args.axis is None or args.offset is None:
            raise UsageError("steiner needs --axis and --offset")
        if not 0 <= args.axis < dim:
            raise UsageError(f"--axis must lie in [0, {dim - 1}]")
        plane = Hyperplane(args.axis, args.offset)
        out = (steiner_symmetrize(src, plane) if isinstance(src, LogConcaveFnGrid)
               else steiner_symmetrize_convex(src, plane))
    elif op == "asplund":
        if args.other is None:
            raise UsageError("asplund needs --other FILE")
        other = io.read_grid(args.other)
        if not (isinstance(src, LogConcaveFnGrid) and isinstance(other, LogConcaveFnGrid)):
            raise UsageError("asplund takes two logconcave files")
        out = asplund_product(src, other)
    else:
        if args.lam is None:
            raise UsageError("homothety needs --lambda")
        if not isinstance(src, LogConcaveFnGrid):
            raise UsageError("homothety takes a logconcave file")
        out = homothety(args.lam, src)
    io.write_grid(out, args.output)
    print(f"{op}: mass {_mass(src)} -> {_mass(out)}; wrote {args.output}")
    return EXIT_OK


# ------------------------------------------------------------------- suites


def _row(name, dim, suite, ok, **values):
    return {"function": name, "dim": dim, "suite": suite, "ok": bool(ok), **values}


def _first_step(f, lam):
    """``(g, z, H)``: the polar ``g = f^z`` at the restricted Santalo point and the plane through ``z``.

    Both lemmas are applied to ``g``, whose own polar is ``f`` again; this
    is how the first symmetrization step uses them.
    """
    H = lambda_split(f, 0, lam).hyperplane
    G = AffineSubspace.from_hyperplanes([H])
    z = santalo_point(f, G).z_star if f.spec.dim > 1 else np.array([H.offset])
    g = polar(f, z, warn=False)
    return g, z, Hyperplane(0, float(z[0]))


def _theorem1(entry, lam):
    f = entry.function
    res = santalo_point(f)
    product = integrate(f) * res.value
    ratio = product / (2 * math.pi) ** f.spec.dim
    yield _row(entry.name, f.spec.dim, "theorem1", ratio <= 1 + EPS_TOT,
               product=product, ratio_to_bound=ratio, limit=1 + EPS_TOT,
               converged=res.converged)


def _theorem2(entry, lam):
    f = entry.function
    r = run_pipeline(f, lam=lam)
    if r.failure:
        raise _Abort(f"{entry.name}: {r.failure}")
    first = next((k for k, v in r.verdicts.items() if not v.ok), "")
    yield _row(entry.name, f.spec.dim, "theorem2", r.ok, step=0, achieved_lambda=r.lambda_1,
               product=r.product_0, ratio_to_bound=r.ratio_to_bound, failed_verdict=first,
               **{f"verdict_{k}": v.value for k, v in r.verdicts.items()})
    for s in r.steps:
        yield _row(entry.name, f.spec.dim, "theorem2", r.ok, step=s.i, achieved_lambda=s.split_lambda,
                   product=s.product, mass=s.mass, polar_mass=s.polar_mass)


def _lemma21(entry, lam):
    f = entry.function
    g, z, H = _first_step(f, lam)
    F0, F1, F2, h = slice_mass_triple(g, z, H)
    rep = ball_lemma_check(F0, F1, F2, h)
    yield _row(entry.name, f.spec.dim, "lemma21", rep.ok, lhs=rep.lhs, rhs=rep.rhs,
               worst_hypothesis_ratio=rep.worst_hypothesis_ratio)


def _lemma45(entry, lam):
    f = entry.function
    g, z, H = _first_step(f, lam)
    sep = verify_separation_lemma(g, z, H)
    sl = slice_inequality_check(g, z, H, samples=8)
    yield _row(entry.name, f.spec.dim, "lemma45", sep.ok and sl.ok, lam=sep.lam, lhs=sep.lhs,
               rhs=sep.rhs, slice_worst_ratio=sl.worst_ratio)


def _lemma46(entry, lam):
    f = entry.function
    r = run_pipeline(f, lam=lam)
    if r.failure:
        raise _Abort(f"{entry.name}: {r.failure}")
    v, u = r.verdicts["final_product"], r.verdicts["unconditional"]
    yield _row(entry.name, f.spec.dim, "lemma46", v.ok and u.ok, final_product=r.steps[-1].product,
               ratio_to_bound=v.value, symmetry_defect=u.value)


def _prekopa_pairs(entries, seed):
    rng = np.random.default_rng(seed)
    by_grid = {}
    for e in entries:
        by_grid.setdefault(e.function.spec, []).append(e)
    for group in by_grid.values():
        for k, e in enumerate(group):
            other = group[int(rng.integers(len(group)))] if len(group) > 1 else e
            yield e, other


def _prekopa(entries, seed):
    rows = []
    for e, o in _prekopa_pairs(entries, seed):
        for lam in (0.25, 0.5, 0.75):
            r = prekopa_check(e.function, o.function, lam)
            rows.append(_row(f"{e.name}*{o.name}", e.function.spec.dim, "prekopa", r.ok,
                             lam=lam, lhs=r.lhs, rhs=r.rhs, slack=r.slack))
    return rows


_PER_ENTRY = {"theorem1": _theorem1, "theorem2": _theorem2, "lemma21": _lemma21,
              "lemma45": _lemma45, "lemma46": _lemma46}


class _Abort(Exception):
    pass


def _entries(args, suite):
    dims = args.dim or ([1] if suite == "prekopa" else [1, 2])
    out = []
    for dim in dims:
        if args.grid:
            spec = GridSpec.centered([8.0] * dim, [args.grid] * dim)
        elif suite == "prekopa":
            spec = default_grid(dim, PREKOPA_COUNT)
        else:
            spec = default_grid(dim)
        count = args.count if args.count is not None else {1: 20, 2: 10, 3: 2}[dim]
        if args.family == "all":
            batch = mixed_batch(count, args.seed, dim, spec)
        else:
            rng = np.random.default_rng(args.seed)
            batch = [(e, float(rng.uniform(0.2, 0.8)))
                     for e in generate(args.family, count, args.seed, spec, dim)]
        if args.lam is not None:
            batch = [(e, args.lam) for e, _ in batch]
        out.extend(batch)
    return out


def run_suite(suite: str, args) -> list[dict]:
    if suite == "lemma21" and args.counterexample:
        rep = ball_lemma_check(*ball_lemma_counterexample())
        return [_row("counterexample", 1, suite, rep.ok, lhs=rep.lhs, rhs=rep.rhs)]
    entries = _entries(args, suite)
    if suite == "prekopa":
        return _prekopa([e for e, _ in entries], args.seed)
    rows = []
    for e, lam in entries:
        rows.extend(_PER_ENTRY[suite](e, lam))
    return rows


def _verify(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    status, first_failure, summary = EXIT_OK, None, {}
    for suite in suites:
        t0 = time.perf_counter()
        try:
            rows = run_suite(suite, args)
        except HypothesisFailed as exc:
            summary[suite] = {"ok": False, "error": str(exc), "witness": exc.witness}
            first_failure = first_failure or f"{suite}: HypothesisFailed: {exc}"
            status = max(status, EXIT_FAIL)
            continue
        except (_Abort, LogConcaveError) as exc:
            summary[suite] = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
            first_failure = first_failure or f"{suite}: numeric abort: {exc}"
            status = EXIT_NUMERIC
            continue
        ok = all(r["ok"] for r in rows)
        columns = list(dict.fromkeys(k for r in rows for k in r))
        io.write_csv(rows, out / f"{suite}.csv", columns)
        summary[suite] = {"ok": ok, "rows": len(rows), "seconds": time.perf_counter() - t0,
                          "failures": [r["function"] for r in rows if not r["ok"]]}
        print(f"{suite}: {'pass' if ok else 'FAIL'} ({len(rows)} rows, "
              f"{summary[suite]['seconds']:.1f} s) -> {out / (suite + '.csv')}")
        if not ok:
            bad = next(r for r in rows if not r["ok"])
            first_failure = first_failure or f"{suite}: {bad['function']} failed {bad}"
            status = max(status, EXIT_FAIL)
    io.write_json({"seed": args.seed, "suite": args.suite, "ok": status == EXIT_OK,
                   "first_failure": first_failure, "suites": summary}, out / "report.json")
    if first_failure:
        print(f"first failure: {first_failure}", file=sys.stderr)
    return status


# ------------------------------------------------------------------- corpus


def _corpus(args) -> int:
    spec = (GridSpec.centered([args.half_width] * args.dim, [args.grid] * args.dim)
            if args.grid else default_grid(args.dim, half_width=args.half_width))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for e in generate(args.family, args.count, args.seed, spec, args.dim):
        path = out / f"{e.name}.grid"
        io.write_grid(e.function, path)
        print(f"{path}  mass {integrate(e.function):.12g}  {e.descriptor}")
    return EXIT_OK


# --------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logconcave", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="apply one transform to a grid-function file")
    t.add_argument("input")
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--op", choices=OPS, required=True)
    t.add_argument("--z", help="center, comma-separated (default: origin)")
    t.add_argument("--axis", type=int)
    t.add_argument("--offset", type=float)
    t.add_argument("--other", help="second operand for asplund")
    t.add_argument("--lambda", dest="lam", type=float)
    t.add_argument("--dual-scale", type=float, default=1.0,
                   help="dual grid half-width relative to the input grid")
    t.add_argument("--dual-count", type=int, help="dual grid node count per axis")
    t.set_defaults(run=_transform)

    v = sub.add_parser("verify", help="run verification suites on the seeded corpus")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--lambda", dest="lam", type=float,
                   help="target split for every function (default: random in [0.2, 0.8])")
    v.add_argument("--family", choices=FAMILIES + ("all",), default="all")
    v.add_argument("--dim", type=int, choices=(1, 2, 3), action="append",
                   help="repeatable; default 1 and 2")
    v.add_argument("--count", type=int, help="functions per dimension (default 20 in 1D, 10 in 2D)")
    v.add_argument("--grid", type=int, help="nodes per axis on [-8, 8] (default 1025 in 1-D, 257 in 2-D, 4097 for prekopa)")
    v.add_argument("--counterexample", action="store_true",
                   help="lemma21: check the built-in counterexample instead of the corpus")
    v.add_argument("--out", default="reports")
    v.set_defaults(run=_verify)

    c = sub.add_parser("corpus", help="write seeded corpus functions to files")
    c.add_argument("--family", choices=FAMILIES, required=True)
    c.add_argument("--count", type=int, default=5)
    c.add_argument("--seed", type=int, default=7)
    c.add_argument("--dim", type=int, choices=(1, 2, 3), default=1)
    c.add_argument("--grid", type=int, help="nodes per axis")
    c.add_argument("--half-width", type=float, default=8.0)
    c.add_argument("--out", default="corpus")
    c.set_defaults(run=_corpus)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "lam", None) is not None and not 0 < args.lam < 1 and args.command == "verify":
        print("error: --lambda must lie in (0, 1)", file=sys.stderr)
        return EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore" if args.command == "verify" else "default")
            return args.run(args)
    except (UsageError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LogConcaveError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
