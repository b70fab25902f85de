"""q-Hamilton-Jacobi series: time layers of S^t(x) = sum t^m x^N/(m! N!) b_N^(m).

Layer m+1 comes from expanding H(x, <p, S^t(x)>) and reading off the t^m x^N
coefficients.  Each application of <p, .> lowers the x-degree by one, so layer m
is only exact up to degree ``D + Mmax - m`` when the seed is known to degree
``D + Mmax``; every layer therefore carries its own exactness bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial
from typing import Mapping

from .algebra import (
    PHASE,
    RANK,
    BSeed,
    Element,
    Gen,
    H,
    P,
    TCoef,
    X,
    braids_as,
    elem_mul,
    gen_weight,
    monomial_element,
    multi_factorial,
    swap_factor,
    x_degree,
    format_element,
    format_gen,
    x_power,
    p_power,
    BraidWeight,
)
from .bracket import bracket
from .errors import BraidingError, TruncationError, ValidationError
from .qcoeff import Context


def multi_indices(s: int, maxdeg: int, mindeg: int = 0):
    """All N in Z>=0^s with mindeg <= |N| <= maxdeg, graded then lexicographic."""
    out = []
    for d in range(mindeg, maxdeg + 1):
        for N in iproduct(range(d + 1), repeat=s):
            if sum(N) == d:
                out.append(tuple(N))
    return out


@dataclass
class HamTable:
    """H(x, p) = sum x^K p^L T_{K,L} / (K! L!), T given per (K, L)."""

    ctx: Context
    entries: dict = field(default_factory=dict)  # (K, L) -> Element

    def add(self, K, L, value="symbolic"):
        K, L = tuple(K), tuple(L)
        s = self.ctx.s
        if len(K) != s or len(L) != s or min(K + L, default=0) < 0:
            raise ValidationError(f"bad Hamiltonian multi-index K={K}, L={L}")
        if isinstance(value, Element):
            el = value
        elif value == "symbolic":
            el = Element.gen(TCoef(K, L), self.ctx)
        else:
            el = Element.scalar(Fraction(value), self.ctx)
        self.entries[(K, L)] = self.entries.get((K, L), Element.zero(self.ctx)) + el
        return self

    def is_braided(self) -> bool:
        """True when every T_{K,L} carries weight (-K,-L), so H is a braided scalar."""
        return all(
            T.is_homogeneous(BraidWeight(tuple(-k for k in K), tuple(-l for l in L)))
            for (K, L), T in self.entries.items()
        )

    @property
    def maxdeg(self) -> int:
        return max((sum(K) + sum(L) for K, L in self.entries), default=0)

    @property
    def pdeg(self) -> int:
        return max((sum(L) for _, L in self.entries), default=0)

    def element(self) -> Element:
        """The Hamiltonian as an element of the phase-space algebra."""
        out = Element.zero(self.ctx)
        for (K, L), T in sorted(self.entries.items()):
            term = elem_mul(elem_mul(x_power(K, self.ctx), p_power(L, self.ctx)), T)
            out = out + term * Fraction(1, multi_factorial(K) * multi_factorial(L))
        return out


@dataclass
class HJSeries:
    ctx: Context
    coeffs: dict = field(default_factory=dict)  # (m, N) -> Element
    valid: dict = field(default_factory=dict)   # m -> exact up to this x-degree
    Mmax: int = 0
    D: int = 0

    @property
    def top(self) -> int:
        return max(self.valid) if self.valid else -1

    def b(self, m: int, N) -> Element:
        return self.coeffs.get((m, tuple(N)), Element.zero(self.ctx))

    def layer(self, m: int) -> dict:
        return {N: e for (mm, N), e in self.coeffs.items() if mm == m}

    def series_element(self, m: int, maxdeg: int) -> Element:
        """sum_N x^N / N! b_N^(m) over |N| <= maxdeg."""
        out = Element.zero(self.ctx)
        for N, b in sorted(self.layer(m).items()):
            if sum(N) <= maxdeg and not b.is_zero():
                out = out + elem_mul(x_power(N, self.ctx), b) * Fraction(1, multi_factorial(N))
        return out


def generic_seed(ctx: Context, maxdeg: int) -> dict:
    return {N: Element.gen(BSeed(0, N), ctx) for N in multi_indices(ctx.s, maxdeg)}


def make_series(ctx: Context, seed: Mapping, Mmax: int, D: int) -> HJSeries:
    """Layer 0 from ``seed`` (N -> Element); absent N are zero, exact to D + Mmax."""
    s = ctx.s
    ser = HJSeries(ctx, Mmax=Mmax, D=D)
    top = D + Mmax
    for N, b in seed.items():
        N = tuple(N)
        if len(N) != s:
            raise ValidationError(f"seed multi-index {N} has wrong length")
        want = BraidWeight(tuple(-n for n in N), (0,) * s)
        # at q = 1 every swap factor is trivial, so numeric seeds are allowed
        if not ctx.is_classical and not b.is_homogeneous(want):
            raise ValidationError(f"seed b_{N} must have weight {want}")
        if sum(N) <= top and not b.is_zero():
            ser.coeffs[(0, N)] = b
    ser.valid[0] = top
    return ser


# -- time series: lists of Elements indexed by the power of t ------------

def _ts_mul(a: list, b: list, order: int, xmax: int, ctx: Context, lowest: int = 0) -> list:
    """Truncated product of t-series; orders below ``lowest`` are left at zero."""
    out = [Element.zero(ctx) for _ in range(order + 1)]
    for i, ai in enumerate(a):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b):
            if not lowest <= i + j <= order or bj.is_zero():
                continue
            out[i + j] = out[i + j] + elem_mul(ai, bj, xmax)
    return out


def momentum_series(series: HJSeries, order: int, xmax: int) -> dict:
    """<p_i, S^t(x)> as t-series: i -> [coefficient of t^0, t^1, ...]."""
    ctx = series.ctx
    out = {}
    for i in range(1, ctx.s + 1):
        pi = Element.gen(P(i), ctx)
        ts = []
        for m in range(order + 1):
            Sm = series.series_element(m, xmax + 1)
            ts.append(bracket(pi, Sm).filter(lambda mono: x_degree(mono) <= xmax) * Fraction(1, factorial(m)))
        out[i] = ts
    return out


def hamiltonian_on_momenta(H_: HamTable, mom: dict, order: int, xmax: int) -> Element:
    """t^order coefficient of sum x^K/(K!L!) prod_{i=s..1} <p_i,S>^{L_i} T_{K,L}."""
    ctx = H_.ctx
    s = ctx.s
    total = Element.zero(ctx)
    for (K, L), T in sorted(H_.entries.items()):
        if sum(K) > xmax:
            continue
        ts = [x_power(K, ctx) * Fraction(1, multi_factorial(K) * multi_factorial(L))]
        factors = [mom[i] for i in range(s, 0, -1) for _ in range(L[i - 1])]
        for k, f in enumerate(factors):
            ts = _ts_mul(ts, f, order, xmax, ctx, order if k == len(factors) - 1 else 0)
        if len(ts) > order:
            total = total + elem_mul(ts[order], T, xmax)
    return total


def _strip_x(E: Element, m: int, ctx: Context, check_weight: bool = True) -> dict:
    """N -> b_N^(m+1) from the t^m coefficient E of the Hamiltonian term."""
    s = ctx.s
    xr = RANK["X"]
    groups: dict = {}
    for mono, c in E.terms.items():
        N = [0] * s
        rest = []
        for g, e in mono:
            if g.rank == xr:
                N[g.args[0] - 1] = e
            else:
                rest.append((g, e))
        N = tuple(N)
        groups.setdefault(N, Element.zero(ctx))
        groups[N] = groups[N] + monomial_element(tuple(rest), ctx, c)
    out = {}
    for N, rest in groups.items():
        (_, kappa), = x_power(N, ctx).terms.items()
        b = rest * (kappa.inverse() * (-factorial(m) * multi_factorial(N)))
        for mono in b.terms:
            if any(g.rank in PHASE for g, _ in mono):
                raise BraidingError(f"phase letters survive in b_{N}^({m + 1}): {b}")
        want = BraidWeight(tuple(-n for n in N), (0,) * s)
        if check_weight and not b.is_homogeneous(want):
            raise BraidingError(f"b_{N}^({m + 1}) has weights {sorted(b.weights())}, expected {want}")
        if not b.is_zero():
            out[N] = b
    return out


def hj_step(series: HJSeries, H_: HamTable) -> HJSeries:
    """Append layer top+1 in place and return the series."""
    m = series.top
    if m < 0:
        raise ValidationError("series has no seed layer")
    if H_.ctx.s != series.ctx.s:
        raise ValidationError("Hamiltonian and series dimensions differ")
    loss = 1 if H_.pdeg > 0 else 0
    deg = min(series.valid[k] for k in range(m + 1)) - loss
    if deg < series.D:
        raise TruncationError(
            f"layer {m + 1} would be exact only to x-degree {deg} < D={series.D}; supply a deeper seed"
        )
    mom = momentum_series(series, m, deg) if loss else {}
    E = hamiltonian_on_momenta(H_, mom, m, deg)
    for N, b in _strip_x(E, m, series.ctx, H_.is_braided()).items():
        if sum(N) <= deg:
            series.coeffs[(m + 1, N)] = b
    series.valid[m + 1] = deg
    return series


def hj_evolve(seed: Mapping | None, H_: HamTable, Mmax: int, D: int) -> HJSeries:
    """Iterate hj_step to order Mmax; ``seed=None`` means generic BSeed generators."""
    ctx = H_.ctx
    if Mmax < 0 or D < 0:
        raise ValidationError("Mmax and D must be non-negative")
    if seed is None:
        seed = generic_seed(ctx, D + Mmax)
    series = make_series(ctx, seed, Mmax, D)
    for _ in range(Mmax):
        hj_step(series, H_)
    return series


def truncated_table(series: HJSeries) -> dict:
    """(m, N) -> b with |N| <= D, the part of the series exact at every layer."""
    return {(m, N): b for (m, N), b in sorted(series.coeffs.items()) if sum(N) <= series.D}


def commutation_residual(g: Gen, b: Element, wb: BraidWeight) -> Element:
    """g b - swap(g, b) b g, computed with full normal-form products."""
    ctx = b.ctx
    ge = Element.gen(g, ctx)
    return elem_mul(ge, b) - elem_mul(b, ge) * swap_factor(gen_weight(g, ctx.s), wb, ctx)


def verify_hj_braiding(series: HJSeries) -> list:
    """Violations of g b = swap(g, b) b g for g in {p_i, x_a, h_{a,i}}."""
    ctx = series.ctx
    s = ctx.s
    gens = [P(i) for i in range(1, s + 1)] + [X(a) for a in range(1, s + 1)]
    gens += [H(a, i) for a in range(1, s + 1) for i in range(1, s + 1)]
    out = []
    for (m, N), b in sorted(series.coeffs.items()):
        wb = BraidWeight(tuple(-n for n in N), (0,) * s)
        for g in gens:
            if not braids_as(Element.gen(g, ctx), b, swap_factor(gen_weight(g, s), wb, ctx)):
                out.append({"m": m, "N": list(N), "generator": format_gen(g),
                            "residual": format_element(commutation_residual(g, b, wb))})
    return out
