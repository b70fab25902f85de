"""q-Hamiltonian flow of the blown-up phase point.

Each momentum and coordinate becomes a double series in time t and in
commutative bookkeeping variables eps; the coefficients live in the quantum
affine space generated by PBar, XBar, h and T.  The flow is

    dP_i/dt = <H, p_i>,    dX_a/dt = <H, x_a>

with x, p replaced by the series on the right-hand side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping

from .algebra import (
    RANK,
    BraidWeight,
    Element,
    H,
    P,
    PBar,
    TCoef,
    X,
    XBar,
    braids_as,
    elem_mul,
    format_element,
    format_gen,
    gen_weight,
    multi_factorial,
    swap_factor,
    unit,
)
from .bracket import bracket
from .errors import BraidingError, ValidationError
from .hj import HamTable, multi_indices

_X = RANK["X"]
_P = RANK["P"]

Series = dict  # (t order, eps multi-index) -> Element coefficient of t^n eps^M


@dataclass
class FlowSeries:
    """Normalised coefficients P_{i,M}^(n) and X_{a,N}^(m) of the flow."""

    ctx: object
    pcoeffs: dict = field(default_factory=dict)  # (i, n, M) -> Element
    xcoeffs: dict = field(default_factory=dict)  # (a, m, N) -> Element
    Mmax: int = 0
    D: int = 0

    def entries(self):
        """(kind, index, order, multi-index, element), P before X, sorted."""
        out = [("P", i, n, M, e) for (i, n, M), e in sorted(self.pcoeffs.items())]
        out += [("X", a, m, N, e) for (a, m, N), e in sorted(self.xcoeffs.items())]
        return out


def expected_weight(kind: str, index: int, s: int) -> BraidWeight:
    z = (0,) * s
    return BraidWeight(z, unit(s, index)) if kind == "P" else BraidWeight(unit(s, index), z)


def generic_seeds(ctx, D: int) -> dict:
    """PBar(i,M,0) and XBar(a,N,0) for every |M|, |N| <= D."""
    s = ctx.s
    idx = multi_indices(s, D)
    return {
        "P": {(i, M): Element.gen(PBar(i, M, 0), ctx) for i in range(1, s + 1) for M in idx},
        "X": {(a, N): Element.gen(XBar(a, N, 0), ctx) for a in range(1, s + 1) for N in idx},
    }


def _series_mul(A: Series, B: Series, nmax: int, D: int) -> Series:
    out: Series = {}
    for (n1, M1), a in A.items():
        for (n2, M2), b in B.items():
            n = n1 + n2
            if n > nmax:
                continue
            M = tuple(x + y for x, y in zip(M1, M2))
            if sum(M) > D:
                continue
            prod = elem_mul(a, b)
            if prod.is_zero():
                continue
            out[(n, M)] = out[(n, M)] + prod if (n, M) in out else prod
    return out


def _series_from(flow_series: dict, key, nmax: int) -> Series:
    return {(n, M): e for (k, n, M), e in flow_series.items() if k == key and n <= nmax}


def _evaluate(rhs: Element, pser: dict, xser: dict, nmax: int, D: int, s: int) -> Series:
    """rhs with x_a, p_i replaced by their series, truncated to t^nmax and |eps| <= D."""
    ctx = rhs.ctx
    zero = (0,) * s
    powers: dict = {}

    def power(g, e):
        key = (g, e)
        if key not in powers:
            if g.rank == _X:
                base = _series_from(xser, g.args[0], nmax)
            elif g.rank == _P:
                base = _series_from(pser, g.args[0], nmax)
            else:
                powers[key] = {(0, zero): Element.gen(g, ctx, e)}
                return powers[key]
            acc = {(0, zero): Element.one(ctx)}
            for _ in range(e):
                acc = _series_mul(acc, base, nmax, D)
            powers[key] = acc
        return powers[key]

    total: Series = {}
    for mono, c in sorted(rhs.terms.items()):
        term: Series = {(0, zero): Element.scalar(c, ctx)}
        for g, e in mono:
            term = _series_mul(term, power(g, e), nmax, D)
            if not term:
                break
        for k, v in term.items():
            total[k] = total[k] + v if k in total else v
    return total


def ham_evolve(seeds: Mapping | None, H_: HamTable, Mmax: int, D: int) -> FlowSeries:
    """Taylor coefficients of the flow up to time order Mmax and eps-degree D.

    ``seeds`` maps "P" -> {(i, M): Element} and "X" -> {(a, N): Element} for the
    time-zero layer; ``None`` selects generic PBar/XBar generators.
    """
    ctx = H_.ctx
    s = ctx.s
    if Mmax < 0 or D < 0:
        raise ValidationError("Mmax and D must be non-negative")
    if seeds is None:
        seeds = generic_seeds(ctx, D)
    # internal series keep the raw t^n eps^M coefficients (factorials divided out)
    pser: dict = {}
    xser: dict = {}
    for kind, store in (("P", pser), ("X", xser)):
        for (i, M), e in seeds.get(kind, {}).items():
            M = tuple(M)
            if len(M) != s or not 1 <= i <= s:
                raise ValidationError(f"bad {kind} seed index ({i}, {M})")
            if not ctx.is_classical and not e.is_homogeneous(expected_weight(kind, i, s)):
                raise ValidationError(f"{kind} seed ({i}, {M}) must have weight {expected_weight(kind, i, s)}")
            if sum(M) <= D and not e.is_zero():
                store[(i, 0, M)] = e * Fraction(1, multi_factorial(M))

    Hel = H_.element()
    rhs_p = {i: bracket(Hel, Element.gen(P(i), ctx)) for i in range(1, s + 1)}
    rhs_x = {a: bracket(Hel, Element.gen(X(a), ctx)) for a in range(1, s + 1)}
    braided = H_.is_braided()
    for n in range(Mmax):
        new = []
        for kind, rhs_all, store in (("P", rhs_p, pser), ("X", rhs_x, xser)):
            for i, rhs in rhs_all.items():
                vals = _evaluate(rhs, pser, xser, n, D, s)
                for (nn, M), v in vals.items():
                    if nn == n and not v.is_zero():
                        new.append((store, (i, n + 1, M), v * Fraction(1, n + 1)))
        for store, key, v in new:
            store[key] = v

    flow = FlowSeries(ctx, Mmax=Mmax, D=D)
    for kind, store, target in (("P", pser, flow.pcoeffs), ("X", xser, flow.xcoeffs)):
        for (i, n, M), v in store.items():
            coeff = v * (factorial(n) * multi_factorial(M))
            want = expected_weight(kind, i, s)
            if braided and not ctx.is_classical and not coeff.is_homogeneous(want):
                raise BraidingError(
                    f"{kind}_{i},{M}^({n}) has weights {sorted(coeff.weights())}, expected {want}"
                )
            target[(i, n, M)] = coeff
    return flow


def verify_flow_braiding(flow: FlowSeries, H_: HamTable | None = None) -> list:
    """Violations of the pairwise braiding among stored coefficients and against h, T."""
    ctx = flow.ctx
    s = ctx.s
    items = [
        (f"{kind}[{i};{','.join(map(str, M))};{n}]", expected_weight(kind, i, s), e)
        for kind, i, n, M, e in flow.entries()
    ]
    others = [H(b, j) for b in range(1, s + 1) for j in range(1, s + 1)]
    if H_ is not None:
        others += [TCoef(K, L) for (K, L) in sorted(H_.entries)]
    out = []

    def check(name_a, wa, a, name_b, wb, b):
        Q = swap_factor(wa, wb, ctx)
        if not braids_as(a, b, Q):
            res = elem_mul(a, b) - elem_mul(b, a) * Q
            out.append({"left": name_a, "right": name_b, "residual": format_element(res)})

    for k, (na, wa, a) in enumerate(items):
        for nb, wb, b in items[k:]:
            check(na, wa, a, nb, wb, b)
        for g in others:
            check(na, wa, a, format_gen(g), gen_weight(g, s), Element.gen(g, ctx))
    return out

