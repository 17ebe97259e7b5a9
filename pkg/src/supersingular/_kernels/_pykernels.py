"""Pure-Python versions of the hot loops.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Inputs are plain integer data prepared by the calling modules, so both
versions see exactly the same problem and must return identical results.
"""
from __future__ import annotations

from itertools import product
from math import isqrt


def short_vectors(n, E, M, W, R, top_lo=None, top_hi=None):
    """All integer x with sum_i W[i] * (E[i] x_i + sum_{j>i} M[i][j] x_j)^2 == R.

    The quadratic form is the scaled Cholesky form prepared by
    ``shortvec.scaled_cholesky``; every quantity is an exact integer.
    ``top_lo``/``top_hi`` restrict the last coordinate (used to split work).
    Output order is unspecified; callers sort.
    """
    out = []
    x = [0] * n

    def rec(i, rem):
        s = 0
        row = M[i]
        for j in range(i + 1, n):
            if row[j]:
                s += row[j] * x[j]
        U = isqrt(rem // W[i])
        e = E[i]
        lo = -((U + s) // e)          # ceil((-U - s) / e)
        hi = (U - s) // e             # floor((U - s) / e)
        if i == n - 1:
            if top_lo is not None:
                lo = max(lo, top_lo)
            if top_hi is not None:
                hi = min(hi, top_hi)
        for v in range(lo, hi + 1):
            u = e * v + s
            r = rem - W[i] * u * u
            if r < 0:
                continue
            x[i] = v
            if i == 0:
                if r == 0:
                    out.append(tuple(x))
            else:
                rec(i - 1, r)
        x[i] = 0

    if n:
        rec(n - 1, R)
    return out


def isometry_backtrack(n, cands, images, target, cap):
    """Backtracking search for isometries of a definite lattice.

    ``cands[i]`` lists candidate images of basis vector i (all of the right
    norm), ``images[i][a]`` is ``A @ cands[i][a]``.  A choice of one
    candidate per level is accepted when the pairings with all earlier
    choices equal ``target[i][j]``.  Returns ``(solutions, overflow)`` where
    solutions are index tuples; ``overflow`` is True if more than ``cap``
    solutions exist (the list is then truncated).
    """
    sols = []
    chosen = [0] * n
    chosen_vecs = [None] * n

    def rec(i):
        if i == n:
            sols.append(tuple(chosen))
            return len(sols) > cap
        ti = target[i]
        for a, img in enumerate(images[i]):
            ok = True
            for j in range(i):
                vj = chosen_vecs[j]
                if sum(p * q for p, q in zip(img, vj)) != ti[j]:
                    ok = False
                    break
            if ok:
                chosen[i] = a
                chosen_vecs[i] = cands[i][a]
                if rec(i + 1):
                    return True
        return False

    overflow = rec(0) if n else False
    if n == 0:
        sols = [()]
    return sols[:cap], overflow


def _free_positions(pivots, n):
    piv = set(pivots)
    return [[c for c in range(p + 1, n) if c not in piv] for p in pivots]


def isotropic_rref(q, n, k, addt, mult, gram, pivot_sets):
    """Totally isotropic k-subspaces of F_q^n in reduced row echelon form.

    ``gram`` holds field codes of the symmetric form; ``addt``/``mult`` are
    the addition and multiplication tables.  Only the pivot patterns in
    ``pivot_sets`` are scanned.  Returns flattened k*n tuples of codes.
    """
    out = []
    for pivots in pivot_sets:
        free = _free_positions(pivots, n)
        rows = [None] * k

        def rec(r):
            if r == k:
                flat = []
                for row in rows:
                    flat.extend(row)
                out.append(tuple(flat))
                return
            fr = free[r]
            for vals in product(range(q), repeat=len(fr)):
                row = [0] * n
                row[pivots[r]] = 1
                for c, v in zip(fr, vals):
                    row[c] = v
                # row . gram
                qrow = [0] * n
                for c in range(n):
                    acc = 0
                    for d in range(n):
                        if row[d] and gram[d][c]:
                            acc = addt[acc][mult[row[d]][gram[d][c]]]
                    qrow[c] = acc
                ok = True
                for s in range(r + 1):
                    other = row if s == r else rows[s]
                    acc = 0
                    for c in range(n):
                        if qrow[c] and other[c]:
                            acc = addt[acc][mult[qrow[c]][other[c]]]
                    if acc:
                        ok = False
                        break
                if ok:
                    rows[r] = row
                    rec(r + 1)

        rec(0)
    return out


def gf_rank(rows, ncols, addt, mult, negt, invt):
    """Rank of a matrix over a table-driven finite field."""
    m = [list(r) for r in rows]
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = invt[m[rank][c]]
        prow = [mult[inv][x] for x in m[rank]]
        m[rank] = prow
        for i in range(rank + 1, len(m)):
            f = m[i][c]
            if f:
                nf = negt[f]
                m[i] = [addt[x][mult[nf][y]] for x, y in zip(m[i], prow)]
        rank += 1
    return rank
