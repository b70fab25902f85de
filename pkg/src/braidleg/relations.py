"""Catalogue of the braiding rules imposed on seeds, Hamiltonian coefficients and flows.

Every rule is stored with its factor written out independently of
``swap_factor`` (explicit products of q, or the closed form ``closed_Q``) and
is checked two ways: against ``swap_factor`` on the assigned weights, and as
a product identity in the algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from .algebra import (
    BSeed,
    BraidWeight,
    Element,
    Gen,
    H,
    P,
    PBar,
    TCoef,
    X,
    XBar,
    elem_mul,
    format_gen,
    gen_weight,
    swap_factor,
    unit,
)
from .hj import multi_indices
from .qcoeff import Context, QPoly


@dataclass(frozen=True)
class Relation:
    family: str
    left: Gen
    right: Gen
    factor: QPoly  # left * right = factor * right * left


def closed_Q(right: BraidWeight, left: BraidWeight, ctx: Context) -> QPoly:
    """Q_{right, left} as a closed product; valid when q is trivial within x and within p.

    For right = (M, N) and left = (K, L):
    prod q[i, s+a]^(N_i K_a) * prod q[s+b, j]^(L_j M_b).
    """
    s = ctx.s
    M, N = right
    K, L = left
    out = QPoly.one(ctx)
    for i in range(1, s + 1):
        for a in range(1, s + 1):
            e = N[i - 1] * K[a - 1]
            if e:
                out = out * ctx.q(i, s + a) ** e
            e = L[i - 1] * M[a - 1]
            if e:
                out = out * ctx.q(s + a, i) ** e
    return out


def _prod_q(ctx: Context, items) -> QPoly:
    out = QPoly.one(ctx)
    for i, j, e in items:
        if e:
            out = out * ctx.q(i, j) ** e
    return out


def _w(K, L) -> BraidWeight:
    return BraidWeight(tuple(K), tuple(L))


def _neg(v) -> tuple:
    return tuple(-x for x in v)


def catalogue(ctx: Context, maxdeg: int = 2) -> list:
    """All rule instances with multi-indices of total degree <= maxdeg."""
    s = ctx.s
    z = (0,) * s
    idx = range(1, s + 1)
    mis = multi_indices(s, maxdeg)
    out = []
    for N in mis:
        b = BSeed(0, N)
        for i in idx:
            f = _prod_q(ctx, ((s + a, i, -N[a - 1]) for a in idx))
            out.append(Relation("seed/p", P(i), b, f))
            out.append(Relation("seed/x", X(i), b, QPoly.one(ctx)))
            for beta in idx:
                out.append(Relation("seed/h", H(beta, i), b, f))
    for K, L in iproduct(mis, mis):
        T = TCoef(K, L)
        wT = _w(_neg(K), _neg(L))
        for i in idx:
            out.append(Relation("ham/p", P(i), T, _prod_q(ctx, ((s + m, i, -K[m - 1]) for m in idx))))
            # the coordinate rule carries q[j, s+a]^(-L_j) on these weights
            out.append(Relation("ham/x", X(i), T, _prod_q(ctx, ((j, s + i, -L[j - 1]) for j in idx))))
            out.append(Relation("ham/p-Q", P(i), T, closed_Q(wT, _w(z, unit(s, i)), ctx)))
            out.append(Relation("ham/x-Q", X(i), T, closed_Q(wT, _w(unit(s, i), z), ctx)))
            for a in idx:
                out.append(Relation("ham/h", H(a, i), T, closed_Q(wT, _w(unit(s, a), unit(s, i)), ctx)))
        for K2, L2 in iproduct(mis, mis):
            if sum(K2) + sum(L2) <= maxdeg:
                out.append(Relation("ham/ham", T, TCoef(K2, L2),
                                    closed_Q(_w(_neg(K2), _neg(L2)), wT, ctx)))
        for N in mis:
            out.append(Relation("seed/ham", BSeed(0, N), T, closed_Q(wT, _w(_neg(N), z), ctx)))
    for N, N2 in iproduct(mis, mis):
        out.append(Relation("seed/seed", BSeed(0, N), BSeed(1, N2), QPoly.one(ctx)))
    for N in mis:
        for a, i in iproduct(idx, idx):
            out.append(Relation("h/seed", H(a, i), BSeed(0, N), closed_Q(_w(_neg(N), z), _w(unit(s, a), unit(s, i)), ctx)))
    for a, i, b, j in iproduct(idx, idx, idx, idx):
        out.append(Relation("h/h", H(a, i), H(b, j), closed_Q(_w(unit(s, b), unit(s, j)), _w(unit(s, a), unit(s, i)), ctx)))
    for M in mis:
        for i in idx:
            Pb = PBar(i, M, 0)
            wP = _w(z, unit(s, i))
            for a in idx:
                Xb = XBar(a, M, 0)
                wX = _w(unit(s, a), z)
                out.append(Relation("flow/PX", Pb, Xb, closed_Q(wX, wP, ctx)))
                out.append(Relation("flow/XX", XBar(i, M, 0), Xb, closed_Q(wX, _w(unit(s, i), z), ctx)))
                out.append(Relation("flow/PP", Pb, PBar(a, M, 0), closed_Q(_w(z, unit(s, a)), wP, ctx)))
                for j in idx:
                    wh = _w(unit(s, a), unit(s, j))
                    out.append(Relation("flow/Ph", Pb, H(a, j), closed_Q(wh, wP, ctx)))
                    out.append(Relation("flow/Xh", XBar(i, M, 0), H(a, j), closed_Q(wh, _w(unit(s, i), z), ctx)))
            for K, L in iproduct(mis, mis):
                wT = _w(_neg(K), _neg(L))
                out.append(Relation("flow/PT", Pb, TCoef(K, L), closed_Q(wT, wP, ctx)))
                out.append(Relation("flow/XT", XBar(i, M, 0), TCoef(K, L), closed_Q(wT, _w(unit(s, i), z), ctx)))
    return out


def check_relations(ctx: Context, maxdeg: int = 2) -> dict:
    """Count rule instances; list those failing either check."""
    s = ctx.s
    fails = []
    rels = catalogue(ctx, maxdeg)
    for r in rels:
        via_swap = swap_factor(gen_weight(r.left, s), gen_weight(r.right, s), ctx)
        a, b = Element.gen(r.left, ctx), Element.gen(r.right, ctx)
        in_algebra = elem_mul(a, b) == elem_mul(b, a) * r.factor
        if via_swap != r.factor or not in_algebra:
            fails.append({"family": r.family, "left": format_gen(r.left), "right": format_gen(r.right)})
    families = sorted({r.family for r in rels})
    return {"instances": len(rels), "families": families, "failures": fails}
