"""Compiled conjugate kernels with exactly rounded results.

Every value ``a_i * b_j - v_i`` is carried as a floating-point expansion,
an unevaluated sum of non-overlapping doubles that represents it without
error (TwoSum and Dekker's TwoProduct).  Plain floats only choose a short
window of candidates around the float maximum.  Inside that window the
maximum is found by exact sign tests, and the result is rounded upward
once, at the very end.

Rounding upward makes the discrete transform a true upper bound of the
exact one, which is what gives ``L L L phi == L phi`` bit for bit.  It
also makes the factorized n-D transform and the all-pairs reference equal,
since both return the smallest float above the same exact maximum.

Expansions are stored in fixed-width slots padded with zeros, smallest
component first.
"""

from __future__ import annotations

import numba
import numpy as np

# relative slack for the float pre-selection; covers a few roundings per term
_TOL = 1e-15
_SPLITTER = 134217729.0  # 2**27 + 1


@numba.njit(cache=True, inline="always")
def _two_sum(a, b):  # pragma: no cover - compiled
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@numba.njit(cache=True, inline="always")
def _split(a):  # pragma: no cover - compiled
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@numba.njit(cache=True, inline="always")
def _two_prod(a, b):  # pragma: no cover - compiled
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@numba.njit(cache=True)
def _grow(e, n, b, out):  # pragma: no cover - compiled
    """out <- e[:n] + b exactly; returns the new length (zeros dropped)."""
    q = b
    k = 0
    for i in range(n):
        q, hh = _two_sum(q, e[i])
        if hh != 0.0:
            out[k] = hh
            k += 1
    if q != 0.0 or k == 0:
        out[k] = q
        k += 1
    return k


@numba.njit(cache=True)
def _sign(e, n):  # pragma: no cover - compiled
    for i in range(n - 1, -1, -1):
        if e[i] > 0.0:
            return 1
        if e[i] < 0.0:
            return -1
    return 0


@numba.njit(cache=True)
def _value(vrow, bj, ai, out, tmp):  # pragma: no cover - compiled
    """Expansion of ``ai * bj - v`` where ``v`` is the expansion ``vrow``."""
    n = 0
    for c in range(vrow.shape[0]):
        if vrow[c] != 0.0:
            tmp[n] = -vrow[c]
            n += 1
    if n == 0:
        tmp[0] = 0.0
        n = 1
    p, e = _two_prod(ai, bj)
    n = _grow(tmp, n, e, out)
    for c in range(n):
        tmp[c] = out[c]
    return _grow(tmp, n, p, out)


@numba.njit(cache=True)
def _compare(x, nx, y, ny, t1, t2):  # pragma: no cover - compiled
    """Sign of ``x - y`` for two expansions."""
    for c in range(nx):
        t1[c] = x[c]
    n = nx
    for c in range(ny):
        n = _grow(t1, n, -y[c], t2)
        for d in range(n):
            t1[d] = t2[d]
    return _sign(t1, n)


@numba.njit(cache=True)
def _round_up(e, n, t1, t2):  # pragma: no cover - compiled
    """Smallest double that is >= the exact value of ``e``."""
    c = 0.0
    for i in range(n):
        c += e[i]
    if not np.isfinite(c):
        return c
    c1 = np.empty(1)
    while True:
        c1[0] = c
        s = _compare(e, n, c1, 1, t1, t2)
        if s > 0:
            c = np.nextafter(c, np.inf)
            continue
        if s == 0:
            return c
        lower = np.nextafter(c, -np.inf)
        c1[0] = lower
        if _compare(e, n, c1, 1, t1, t2) <= 0:
            c = lower
            continue
        return c


@numba.njit(cache=True)
def _approx(vrow):  # pragma: no cover - compiled
    s = 0.0
    for c in range(vrow.shape[0]):
        s += vrow[c]
    return s


@numba.njit(cache=True)
def _store(dst, best, nb, final, t1, t2):  # pragma: no cover - compiled
    for c in range(dst.shape[0]):
        dst[c] = 0.0
    for c in range(nb):
        dst[c] = best[c]
    return _round_up(best, nb, t1, t2) if final else _approx(dst)


@numba.njit(cache=True)
def _pick(vexp, a, bj, i, best, nb, bi, cand, t1, t2, tmp):  # pragma: no cover
    """Fold candidate ``i`` into the running exact maximum ``best``."""
    nc = _value(vexp[i], bj, a[i], cand, tmp)
    if bi < 0:
        for c in range(nc):
            best[c] = cand[c]
        return nc, i
    s = _compare(cand, nc, best, nb, t1, t2)
    if s > 0 or (s == 0 and i < bi):
        for c in range(nc):
            best[c] = cand[c]
        return nc, i
    return nb, bi


@numba.njit(cache=True)
def lines_fast(vexp, a, b, final):  # pragma: no cover - compiled
    """Hull sweep on float values, then exact refinement around the float argmax.

    ``vexp`` has shape (lines, n, width).  Returns the rounded-up values
    when ``final``, otherwise float approximations; always also the output
    expansions (width + 2 slots) and the exact argmax indices.
    """
    n_lines, n, width = vexp.shape
    m = b.shape[0]
    wout = width + 2
    out = np.empty((n_lines, m))
    oexp = np.zeros((n_lines, m, wout))
    arg = np.empty((n_lines, m), dtype=np.int64)
    hull = np.empty(n, dtype=np.int64)
    vh = np.empty(n)
    best = np.empty(2 * wout + 2)
    cand = np.empty(2 * wout + 2)
    t1 = np.empty(4 * wout + 4)
    t2 = np.empty(4 * wout + 4)
    tmp = np.empty(2 * wout + 2)
    amax = 0.0
    for i in range(n):
        amax = max(amax, abs(a[i]))
    for line in range(n_lines):
        vmax = 0.0
        for i in range(n):
            vh[i] = _approx(vexp[line, i])
            if vh[i] != np.inf:
                vmax = max(vmax, abs(vh[i]))
        k = 0
        for i in range(n):
            vi = vh[i]
            if vi == np.inf:
                continue
            while k >= 2:
                i1 = hull[k - 2]
                i2 = hull[k - 1]
                # pop i2 when it lies strictly above the chord from i1 to i
                lhs = (vh[i2] - vh[i1]) * (a[i] - a[i1])
                rhs = (vi - vh[i1]) * (a[i2] - a[i1])
                if lhs > rhs:
                    k -= 1
                else:
                    break
            hull[k] = i
            k += 1
        if k == 0:
            for j in range(m):
                out[line, j] = -np.inf
                oexp[line, j, 0] = -np.inf
                arg[line, j] = -1
            continue
        p = 0
        for j in range(m):
            y = b[j]
            cur = a[hull[p]] * y - vh[hull[p]]
            while p + 1 < k:
                nxt = a[hull[p + 1]] * y - vh[hull[p + 1]]
                if nxt >= cur:
                    p += 1
                    cur = nxt
                else:
                    break
            lo_cut = cur - _TOL * (amax * abs(y) + vmax + abs(cur))
            i0 = hull[p]
            nb, bi = 0, -1
            i = i0
            while i >= 0 and vh[i] != np.inf and a[i] * y - vh[i] >= lo_cut:
                nb, bi = _pick(vexp[line], a, y, i, best, nb, bi, cand, t1, t2, tmp)
                i -= 1
            i = i0 + 1
            while i < n and vh[i] != np.inf and a[i] * y - vh[i] >= lo_cut:
                nb, bi = _pick(vexp[line], a, y, i, best, nb, bi, cand, t1, t2, tmp)
                i += 1
            out[line, j] = _store(oexp[line, j], best, nb, final, t1, t2)
            arg[line, j] = bi
    return out, oexp, arg


@numba.njit(cache=True)
def lines_brute(vexp, a, b, final):  # pragma: no cover - compiled
    """O(N*M) reference: every index within the float slack is tested exactly."""
    n_lines, n, width = vexp.shape
    m = b.shape[0]
    wout = width + 2
    out = np.empty((n_lines, m))
    oexp = np.zeros((n_lines, m, wout))
    arg = np.empty((n_lines, m), dtype=np.int64)
    vh = np.empty(n)
    est = np.empty(n)
    best = np.empty(2 * wout + 2)
    cand = np.empty(2 * wout + 2)
    t1 = np.empty(4 * wout + 4)
    t2 = np.empty(4 * wout + 4)
    tmp = np.empty(2 * wout + 2)
    amax = 0.0
    for i in range(n):
        amax = max(amax, abs(a[i]))
    for line in range(n_lines):
        vmax = 0.0
        for i in range(n):
            vh[i] = _approx(vexp[line, i])
            if vh[i] != np.inf:
                vmax = max(vmax, abs(vh[i]))
        for j in range(m):
            y = b[j]
            cur = -np.inf
            for i in range(n):
                est[i] = a[i] * y - vh[i]
                if est[i] > cur:
                    cur = est[i]
            if cur == -np.inf:
                out[line, j] = -np.inf
                oexp[line, j, 0] = -np.inf
                arg[line, j] = -1
                continue
            lo_cut = cur - _TOL * (amax * abs(y) + vmax + abs(cur))
            nb, bi = 0, -1
            for i in range(n):
                if vh[i] != np.inf and est[i] >= lo_cut:
                    nb, bi = _pick(vexp[line], a, y, i, best, nb, bi, cand, t1, t2, tmp)
            out[line, j] = _store(oexp[line, j], best, nb, final, t1, t2)
            arg[line, j] = bi
    return out, oexp, arg


@numba.njit(cache=True)
def all_pairs(phi, src, tgt):  # pragma: no cover - compiled
    """Rounded-up ``max_x <x, y> - phi(x)`` over all pairs, no factorization.

    ``src`` is (dim, N) and ``tgt`` is (dim, M).
    """
    dim, n = src.shape
    m = tgt.shape[1]
    width = 2 * dim + 1
    out = np.empty(m)
    est = np.empty(n)
    best = np.empty(2 * width + 2)
    cand = np.empty(2 * width + 2)
    t1 = np.empty(4 * width + 4)
    t2 = np.empty(4 * width + 4)
    tmp = np.empty(2 * width + 2)
    pmax = 0.0
    for i in range(n):
        if phi[i] != np.inf:
            pmax = max(pmax, abs(phi[i]))
    amax = np.zeros(dim)
    for k in range(dim):
        for i in range(n):
            amax[k] = max(amax[k], abs(src[k, i]))
    for j in range(m):
        cur = -np.inf
        for i in range(n):
            acc = src[dim - 1, i] * tgt[dim - 1, j] - phi[i]
            for k in range(dim - 2, -1, -1):
                acc = src[k, i] * tgt[k, j] + acc
            est[i] = acc
            if acc > cur:
                cur = acc
        if cur == -np.inf:
            out[j] = -np.inf
            continue
        scale = pmax + abs(cur)
        for k in range(dim):
            scale += amax[k] * abs(tgt[k, j])
        lo_cut = cur - dim * _TOL * scale
        nb = 0
        have = False
        for i in range(n):
            if phi[i] == np.inf or est[i] < lo_cut:
                continue
            tmp[0] = -phi[i]
            nc = 1
            for k in range(dim - 1, -1, -1):
                p, e = _two_prod(src[k, i], tgt[k, j])
                nc = _grow(tmp, nc, e, cand)
                nc = _grow(cand, nc, p, tmp)
            if not have or _compare(tmp, nc, best, nb, t1, t2) > 0:
                for c in range(nc):
                    best[c] = tmp[c]
                nb = nc
                have = True
        out[j] = _round_up(best, nb, t1, t2)
    return out
