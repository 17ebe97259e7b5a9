# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled versions of the enumeration kernels (int64 arithmetic).

Signatures and results match ``_pykernels`` exactly.  Callers are
responsible for only routing problems here whose intermediate values fit
in a signed 64-bit integer (see ``supersingular._kernels.fits_int64``).
"""
from libc.stdlib cimport malloc, free, calloc
from libc.math cimport sqrt


cdef inline long long _isqrt(long long v):
    cdef long long r
    if v <= 0:
        return 0
    r = <long long> sqrt(<double> v)
    while r > 0 and r * r > v:
        r -= 1
    while (r + 1) * (r + 1) <= v:
        r += 1
    return r


def short_vectors(int n, E, M, W, R, top_lo=None, top_hi=None):
    cdef long long *e = <long long *> malloc(n * sizeof(long long))
    cdef long long *w = <long long *> malloc(n * sizeof(long long))
    cdef long long *m = <long long *> malloc(n * n * sizeof(long long))
    cdef long long *x = <long long *> calloc(n, sizeof(long long))
    cdef long long *rem = <long long *> malloc(n * sizeof(long long))
    cdef long long *s = <long long *> malloc(n * sizeof(long long))
    cdef long long *hi = <long long *> malloc(n * sizeof(long long))
    cdef int i, j
    cdef long long U, u, r, acc, lo
    cdef bint has_lo = top_lo is not None
    cdef bint has_hi = top_hi is not None
    cdef long long tlo = top_lo if has_lo else 0
    cdef long long thi = top_hi if has_hi else 0
    out = []
    if n == 0:
        free(e); free(w); free(m); free(x); free(rem); free(s); free(hi)
        return out
    try:
        for i in range(n):
            e[i] = E[i]
            w[i] = W[i]
            for j in range(n):
                m[i * n + j] = M[i][j]
        i = n - 1
        rem[i] = R
        # enter level i
        s[i] = 0
        U = _isqrt(rem[i] // w[i])
        lo = -((U + s[i]) // e[i])
        hi[i] = (U - s[i]) // e[i]
        if has_lo and lo < tlo:
            lo = tlo
        if has_hi and hi[i] > thi:
            hi[i] = thi
        x[i] = lo - 1
        while True:
            x[i] += 1
            if x[i] > hi[i]:
                x[i] = 0
                i += 1
                if i == n:
                    break
                continue
            u = e[i] * x[i] + s[i]
            r = rem[i] - w[i] * u * u
            if r < 0:
                continue
            if i == 0:
                if r == 0:
                    out.append(tuple([x[j] for j in range(n)]))
                continue
            i -= 1
            rem[i] = r
            acc = 0
            for j in range(i + 1, n):
                acc += m[i * n + j] * x[j]
            s[i] = acc
            U = _isqrt(r // w[i])
            lo = -((U + acc) // e[i])
            hi[i] = (U - acc) // e[i]
            x[i] = lo - 1
    finally:
        free(e); free(w); free(m); free(x); free(rem); free(s); free(hi)
    return out


def isometry_backtrack(int n, cands, images, target, long long cap):
    if n == 0:
        return [()], False
    cdef int *counts = <int *> malloc(n * sizeof(int))
    cdef int *offsets = <int *> malloc(n * sizeof(int))
    cdef int *choice = <int *> malloc(n * sizeof(int))
    cdef long long *tgt = <long long *> malloc(n * n * sizeof(long long))
    cdef int total = 0
    cdef int i, j, a, k
    for i in range(n):
        counts[i] = len(cands[i])
        offsets[i] = total
        total += counts[i]
    cdef long long *cv = <long long *> malloc((total * n + 1) * sizeof(long long))
    cdef long long *iv = <long long *> malloc((total * n + 1) * sizeof(long long))
    cdef long long acc
    cdef bint ok
    cdef long long nsol = 0
    cdef bint overflow = False
    sols = []
    try:
        for i in range(n):
            for j in range(n):
                tgt[i * n + j] = target[i][j]
            for a in range(counts[i]):
                for k in range(n):
                    cv[(offsets[i] + a) * n + k] = cands[i][a][k]
                    iv[(offsets[i] + a) * n + k] = images[i][a][k]
        i = 0
        choice[0] = -1
        while i >= 0:
            choice[i] += 1
            if choice[i] >= counts[i]:
                i -= 1
                continue
            a = offsets[i] + choice[i]
            ok = True
            for j in range(i):
                acc = 0
                for k in range(n):
                    acc += iv[a * n + k] * cv[(offsets[j] + choice[j]) * n + k]
                if acc != tgt[i * n + j]:
                    ok = False
                    break
            if not ok:
                continue
            if i == n - 1:
                nsol += 1
                if nsol > cap:
                    overflow = True
                    break
                sols.append(tuple([choice[k] for k in range(n)]))
                continue
            i += 1
            choice[i] = -1
    finally:
        free(counts); free(offsets); free(choice); free(tgt); free(cv); free(iv)
    return sols, overflow


cdef struct IsoCtx:
    int q
    int n
    int k
    int *addt
    int *mult
    int *gram
    int *pivots
    int *free_pos
    int *nfree
    int *rows
    int *qrows


cdef void _iso_rec(IsoCtx *c, int r, list out):
    cdef int n = c.n
    cdef int q = c.q
    cdef int nf = c.nfree[r]
    cdef int *fp = c.free_pos + r * n
    cdef int *row = c.rows + r * n
    cdef int *qrow = c.qrows + r * n
    cdef int *vals
    cdef int t, col, d, s, acc, idx
    cdef int *other
    cdef bint ok
    if r == c.k:
        out.append(tuple([c.rows[t] for t in range(c.k * n)]))
        return
    vals = <int *> calloc(nf + 1, sizeof(int))
    try:
        while True:
            for col in range(n):
                row[col] = 0
            row[c.pivots[r]] = 1
            for t in range(nf):
                row[fp[t]] = vals[t]
            for col in range(n):
                acc = 0
                for d in range(n):
                    if row[d] != 0 and c.gram[d * n + col] != 0:
                        acc = c.addt[acc * q + c.mult[row[d] * q + c.gram[d * n + col]]]
                qrow[col] = acc
            ok = True
            for s in range(r + 1):
                other = c.rows + s * n
                acc = 0
                for col in range(n):
                    if qrow[col] != 0 and other[col] != 0:
                        acc = c.addt[acc * q + c.mult[qrow[col] * q + other[col]]]
                if acc != 0:
                    ok = False
                    break
            if ok:
                _iso_rec(c, r + 1, out)
            # odometer over free values, last position fastest
            idx = nf - 1
            while idx >= 0:
                vals[idx] += 1
                if vals[idx] < q:
                    break
                vals[idx] = 0
                idx -= 1
            if idx < 0:
                break
    finally:
        free(vals)


def isotropic_rref(int q, int n, int k, addt, mult, gram, pivot_sets):
    cdef IsoCtx c
    cdef int i, j, t
    out = []
    c.q = q
    c.n = n
    c.k = k
    c.addt = <int *> malloc(q * q * sizeof(int))
    c.mult = <int *> malloc(q * q * sizeof(int))
    c.gram = <int *> malloc((n * n + 1) * sizeof(int))
    c.pivots = <int *> malloc((k + 1) * sizeof(int))
    c.free_pos = <int *> malloc((k * n + 1) * sizeof(int))
    c.nfree = <int *> malloc((k + 1) * sizeof(int))
    c.rows = <int *> calloc(k * n + 1, sizeof(int))
    c.qrows = <int *> calloc(k * n + 1, sizeof(int))
    try:
        for i in range(q):
            for j in range(q):
                c.addt[i * q + j] = addt[i][j]
                c.mult[i * q + j] = mult[i][j]
        for i in range(n):
            for j in range(n):
                c.gram[i * n + j] = gram[i][j]
        for pivots in pivot_sets:
            piv = set(pivots)
            for i in range(k):
                c.pivots[i] = pivots[i]
                t = 0
                for j in range(pivots[i] + 1, n):
                    if j not in piv:
                        c.free_pos[i * n + t] = j
                        t += 1
                c.nfree[i] = t
            _iso_rec(&c, 0, out)
    finally:
        free(c.addt); free(c.mult); free(c.gram); free(c.pivots)
        free(c.free_pos); free(c.nfree); free(c.rows); free(c.qrows)
    return out


def gf_rank(rows, int ncols, addt, mult, negt, invt):
    cdef int nrows = len(rows)
    cdef int q = len(negt)
    cdef int *a = <int *> malloc((nrows * ncols + 1) * sizeof(int))
    cdef int *tmp = <int *> malloc((ncols + 1) * sizeof(int))
    cdef int *at = <int *> malloc(q * q * sizeof(int))
    cdef int *mt = <int *> malloc(q * q * sizeof(int))
    cdef int i, j, c, rank = 0, piv, inv, f, nf
    try:
        for i in range(q):
            for j in range(q):
                at[i * q + j] = addt[i][j]
                mt[i * q + j] = mult[i][j]
        for i in range(nrows):
            for j in range(ncols):
                a[i * ncols + j] = rows[i][j]
        for c in range(ncols):
            piv = -1
            for i in range(rank, nrows):
                if a[i * ncols + c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            for j in range(ncols):
                tmp[j] = a[rank * ncols + j]
                a[rank * ncols + j] = a[piv * ncols + j]
                a[piv * ncols + j] = tmp[j]
            inv = invt[a[rank * ncols + c]]
            for j in range(ncols):
                a[rank * ncols + j] = mt[inv * q + a[rank * ncols + j]]
            for i in range(rank + 1, nrows):
                f = a[i * ncols + c]
                if f != 0:
                    nf = negt[f]
                    for j in range(ncols):
                        a[i * ncols + j] = at[a[i * ncols + j] * q + mt[nf * q + a[rank * ncols + j]]]
            rank += 1
    finally:
        free(a); free(tmp); free(at); free(mt)
    return rank
