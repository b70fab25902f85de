"""Vectorised PBW product for large elements.

The q-factor of m1*m2 only depends on how the generators of m2 pass those of
m1 that sort above them, which is a bilinear form in the exponent vectors:
for the canonical pair (a, b) it is E1 @ Omega_ab @ E2.T with
Omega_ab[g, h] = B_ab(w_g, w_h) when g sorts above h.  Exponent sums and
coefficients are then plain integer array operations; equal rows are merged
by sorting on a packed byte key.

Only used when every pinned q value is 1 and all integers fit comfortably in
int64; anything else goes through the term-by-term route in ``algebra``.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .qcoeff import QPoly

_BOUND = 1 << 62
_CHUNK_ROWS = 400_000


class _Table:
    __slots__ = ("E", "Q", "num", "den", "xdeg")


def _table(el, gidx, qidx, G, Pn, xcols):
    rows = [(m, qm, v) for m, c in el.terms.items() for qm, v in c._t.items()]
    n = len(rows)
    E = np.zeros((n, G), np.int64)
    Q = np.zeros((n, Pn), np.int64)
    den = lcm(*(Fraction(v).denominator for _, _, v in rows)) if rows else 1
    nums = []
    for r, (m, qm, v) in enumerate(rows):
        for g, e in m:
            E[r, gidx[g]] = e
        for p, e in qm:
            k = qidx.get(p)
            if k is None:
                return None
            Q[r, k] = e
        nums.append(int(v * den))
    if den >= _BOUND or any(abs(x) >= _BOUND for x in nums):
        return None
    t = _Table()
    t.E, t.Q, t.den = E, Q, den
    t.num = np.array(nums, dtype=np.int64)
    t.xdeg = E[:, xcols].sum(axis=1) if len(xcols) else np.zeros(n, np.int64)
    return t


def _pack(keys: np.ndarray) -> np.ndarray:
    keys = np.ascontiguousarray(keys)
    return keys.view(np.dtype((np.void, keys.dtype.itemsize * keys.shape[1]))).ravel()


def _reduce(keys: np.ndarray, vals: np.ndarray):
    """Merge equal key rows, summing values; drops zero sums."""
    if len(keys) == 0:
        return keys, vals
    uniq, first, inv = np.unique(_pack(keys), return_index=True, return_inverse=True)
    sums = np.zeros(len(uniq), np.int64)
    np.add.at(sums, inv.ravel(), vals)
    keep = sums != 0
    return keys[first][keep], sums[keep]


def dense_product(a, b, xmax, gen_xi, x_rank, free_pairs):
    """Return (key rows, numerators, denominator, generators, G) or None.

    Each key row holds the generator exponents (first G columns) followed by
    the free q exponents.

    ``gen_xi`` maps a generator to its xi weight; ``free_pairs`` lists the
    unpinned q pairs (1-based, canonical) in sorted order.
    """
    gens = sorted({g for m in a.terms for g, _ in m} | {g for m in b.terms for g, _ in m})
    G = len(gens)
    gidx = {g: k for k, g in enumerate(gens)}
    Pn = len(free_pairs)
    qidx = {p: k for k, p in enumerate(free_pairs)}
    xcols = [k for k, g in enumerate(gens) if g.rank == x_rank]
    ta = _table(a, gidx, qidx, G, Pn, xcols)
    tb = _table(b, gidx, qidx, G, Pn, xcols)
    if ta is None or tb is None:
        return None
    ca = int(np.abs(ta.num).max()) if len(ta.num) else 0
    cb = int(np.abs(tb.num).max()) if len(tb.num) else 0
    if ca * cb * max(len(ta.num), 1) * max(len(tb.num), 1) >= _BOUND:
        return None

    W = np.array([gen_xi(g) for g in gens], dtype=np.int64).reshape(G, -1)
    # Omega[p, g, h] = B_p(w_g, w_h) for g sorting above h
    above = np.tril(np.ones((G, G), dtype=np.int64), k=-1)
    Om = np.empty((Pn, G, G), np.int64)
    for k, (i, j) in enumerate(free_pairs):
        a0, b0 = i - 1, j - 1
        Om[k] = (np.outer(W[:, b0], W[:, a0]) - np.outer(W[:, a0], W[:, b0])) * above
    EbT = tb.E.T
    left_all = np.einsum("ig,pgh->iph", ta.E, Om) if Pn else None

    rb = len(tb.num)
    step = max(1, _CHUNK_ROWS // max(rb, 1))
    key_parts, val_parts = [], []
    for lo in range(0, len(ta.num), step):
        hi = min(lo + step, len(ta.num))
        Ea, Qa, na = ta.E[lo:hi], ta.Q[lo:hi], ta.num[lo:hi]
        c = hi - lo
        gen_rows = Ea[:, None, :] + tb.E[None, :, :]
        q_rows = Qa[:, None, :] + tb.Q[None, :, :]
        if Pn:
            q_rows = q_rows + np.einsum("iph,hj->ijp", left_all[lo:hi], EbT)
        vals = na[:, None] * tb.num[None, :]
        mask = np.ones((c, rb), dtype=bool)
        if xmax is not None:
            mask &= (ta.xdeg[lo:hi, None] + tb.xdeg[None, :]) <= xmax
        keys = np.concatenate([gen_rows, q_rows], axis=2)[mask]
        k, v = _reduce(keys, vals[mask])
        key_parts.append(k)
        val_parts.append(v)
    if key_parts:
        keys, vals = _reduce(np.concatenate(key_parts), np.concatenate(val_parts))
    else:
        keys, vals = np.zeros((0, G + Pn), np.int64), np.zeros(0, np.int64)
    return keys, vals, ta.den * tb.den, gens, G


def to_terms(keys, vals, den, gens, G, free_pairs, ctx, make_mono):
    """Rows back to the ``{Monomial: QPoly}`` dictionary used by elements."""
    if len(keys) == 0:
        return {}
    mono_keys, inv = np.unique(_pack(keys[:, :G]), return_inverse=True)
    monos = []
    first = np.zeros(len(mono_keys), np.int64)
    first[inv.ravel()] = np.arange(len(keys))
    for row in keys[first, :G].tolist():
        monos.append(make_mono(tuple((gens[k], e) for k, e in enumerate(row) if e)))
    acc = [dict() for _ in monos]
    qrows = keys[:, G:]
    if qrows.shape[1]:
        nz = [tuple((free_pairs[k], e) for k, e in enumerate(r) if e) for r in qrows.tolist()]
    else:
        nz = [()] * len(keys)
    for idx, qm, v in zip(inv.ravel().tolist(), nz, vals.tolist()):
        acc[idx][qm] = Fraction(v, den)
    return {m: QPoly._raw(t, ctx) for m, t in zip(monos, acc)}


def reorder_exponents(A, B, gen_xi, free_pairs):
    """Free q exponents of the normal-form factors of m1*m2 and m2*m1.

    Returns arrays (AB, BA) of shape (pairs, |A|, |B|), indexed by the
    monomials of A and B in dictionary order, or None when some coefficient
    leaves the free pairs.
    """
    qset = set(free_pairs)
    for el in (A, B):
        if any(p not in qset for c in el.terms.values() for qm in c._t for p, _ in qm):
            return None
    gens = sorted({g for m in A.terms for g, _ in m} | {g for m in B.terms for g, _ in m})
    G = len(gens)
    gidx = {g: k for k, g in enumerate(gens)}

    def table(el):
        E = np.zeros((len(el.terms), G), np.int64)
        for r, m in enumerate(el.terms):
            for g, e in m:
                E[r, gidx[g]] = e
        return E

    EA, EB = table(A), table(B)
    W = np.array([gen_xi(g) for g in gens], dtype=np.int64).reshape(G, -1)
    above = np.tril(np.ones((G, G), dtype=np.int64), k=-1)
    AB = np.empty((len(free_pairs), len(EA), len(EB)), np.int64)
    BA = np.empty_like(AB)
    for k, (i, j) in enumerate(free_pairs):
        a0, b0 = i - 1, j - 1
        om = (np.outer(W[:, b0], W[:, a0]) - np.outer(W[:, a0], W[:, b0])) * above
        AB[k] = EA @ om @ EB.T
        BA[k] = (EB @ om @ EA.T).T
    return AB, BA
