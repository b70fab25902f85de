"""The q-Poisson bracket as a q-biderivation on PBW monomials.

For monomials f, g and a phase letter u of f, v of g, the contribution is
Q * <u,v> * (f without u)(g without v), where fg = Q * u v (f without u)(g without v).
Generators other than p and x never contribute letters, which is exactly the
pass-outward rule for h, T, kappa, theta and the rest.
"""
from __future__ import annotations

from .algebra import (
    PHASE,
    RANK,
    Element,
    H,
    Monomial,
    _mono_xi,
    _xi_weight,
    as_mono,
    elem_mul,
    monomial_element,
    swap_exponents,
)
from .errors import ValidationError
from .qcoeff import Context, QPoly

_P = RANK["P"]
_X = RANK["X"]


def letter_bracket(u, v, ctx: Context) -> Element:
    """<u, v> on single phase generators."""
    s = ctx.s
    if u.rank == _P and v.rank == _X:
        return Element.gen(H(v.args[0], u.args[0]), ctx)
    if u.rank == _X and v.rank == _P:
        i, a = v.args[0], u.args[0]
        return Element.gen(H(a, i), ctx) * (-ctx.q(i, s + a))
    return Element.zero(ctx)


def _remove_one(m: Monomial, idx: int) -> Monomial:
    g, e = m[idx]
    if e == 1:
        return m[:idx] + m[idx + 1:]
    return m[:idx] + ((g, e - 1),) + m[idx + 1:]


def _letters(m: Monomial, s: int):
    """(index, gen, multiplicity, xi weight of the generators before it)."""
    before = [0] * (2 * s)
    for idx, (g, e) in enumerate(m):
        if g.rank in PHASE:
            yield idx, g, e, tuple(before)
        w = _xi_weight(g, s)
        for k, c in enumerate(w):
            if c:
                before[k] += e * c


def monomial_bracket(f: Monomial, g: Monomial, ctx: Context) -> Element:
    f, g = as_mono(f), as_mono(g)
    key = ("bracket", f.uid, g.uid)
    hit = ctx._cache.get(key)
    if hit is None:
        hit = ctx._cache[key] = _monomial_bracket(f, g, ctx)
    return hit


def _monomial_bracket(f: Monomial, g: Monomial, ctx: Context) -> Element:
    s = ctx.s
    out = Element.zero(ctx)
    for fi, u, eu, fa in _letters(f, s):
        wu = _xi_weight(u, s)
        f_rest = _remove_one(f, fi)
        wf_rest = _mono_xi(f_rest, s)
        for gi, v, ev, gd in _letters(g, s):
            core = letter_bracket(u, v, ctx)
            if core.is_zero():
                continue
            wv = _xi_weight(v, s)
            exps: dict = {}
            for part in (swap_exponents(fa, wu), swap_exponents(gd, wv), swap_exponents(wf_rest, wv)):
                for p, e in part.items():
                    exps[p] = exps.get(p, 0) + e
            Q = ctx.reduce_mono(exps) * (eu * ev)
            g_rest = _remove_one(g, gi)
            term = elem_mul(core, monomial_element(f_rest, ctx))
            term = elem_mul(term, monomial_element(g_rest, ctx))
            out = out + term * Q
    return out


def bracket(f: Element, g: Element) -> Element:
    """Bilinear extension of the monomial bracket."""
    f._same(g)
    ctx = f.ctx
    out = Element.zero(ctx)
    for mf, cf in f.terms.items():
        for mg, cg in g.terms.items():
            b = monomial_bracket(mf, mg, ctx)
            if not b.is_zero():
                out = out + b * (cf * cg)
    return out


def braid_factor(f: Element, g: Element) -> QPoly:
    """q_{g,f}: the factor with f g = q_{g,f} g f, from the weights of f and g."""
    wf = f.weight()
    wg = g.weight()
    if wf is None or wg is None:
        return QPoly.one(f.ctx)
    return f.ctx.reduce_mono(swap_exponents(wf.xi(), wg.xi()))


def _require_monomial(*els: Element):
    for e in els:
        if not e.is_monomial():
            raise ValidationError(f"q-Jacobi check needs monomials, got {e}")


def verify_q_jacobi(F: Element, G: Element, Hm: Element) -> Element:
    """The cyclic q-Jacobi sum; zero when the identity holds."""
    _require_monomial(F, G, Hm)
    qGF = braid_factor(F, G)
    qHF = braid_factor(F, Hm)
    qHG = braid_factor(G, Hm)
    return (
        bracket(F, bracket(G, Hm))
        + bracket(G, bracket(Hm, F)) * (qGF * qHF)
        + bracket(Hm, bracket(F, G)) * (qHF * qHG)
    )
