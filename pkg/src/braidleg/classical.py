"""Exact classical Legendre transforms of Taylor jets at the origin.

Conventions: S(x) = sum_N b_N x^N / N! with |N| >= 2, and the transform is
S~(p) = -x~ p + S(x~) where x~(p) solves p = grad S(x).  Its Taylor
coefficients are a_M = M! [p^M] S~.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct
from math import factorial
from typing import Mapping, Sequence

from .errors import DegenerateHessianError, ValidationError

Poly = dict  # exponent tuple -> Fraction, truncated at some total degree


def _add(a: Poly, b: Poly, scale=1) -> Poly:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + scale * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def _mul(a: Poly, b: Poly, deg: int) -> Poly:
    out: Poly = {}
    for ka, va in a.items():
        da = sum(ka)
        for kb, vb in b.items():
            if da + sum(kb) > deg:
                continue
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v}


def _compose(f: Poly, subs: Sequence[Poly], deg: int) -> Poly:
    """f(subs_1, ..., subs_s) truncated; subs must have no constant term."""
    s = len(subs)
    one = {(0,) * s: Fraction(1)}
    powers = [[one] for _ in range(s)]
    out: Poly = {}
    for k, v in sorted(f.items()):
        term = {(0,) * s: Fraction(v)}
        for a, e in enumerate(k):
            while len(powers[a]) <= e:
                powers[a].append(_mul(powers[a][-1], subs[a], deg))
            term = _mul(term, powers[a][e], deg)
        out = _add(out, term)
    return out


def solve_linear(M: Sequence[Sequence], rhs: Sequence[Sequence]) -> list:
    """Exact Gauss-Jordan: returns X with M X = rhs; raises on a singular M."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(x) for x in r] for row, r in zip(M, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise DegenerateHessianError("singular quadratic form")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def mat_inverse(M: Sequence[Sequence]) -> list:
    n = len(M)
    return solve_linear(M, [[Fraction(int(i == j)) for j in range(n)] for i in range(n)])


def _unit(s: int, i: int) -> tuple:
    return tuple(int(k == i) for k in range(s))


def _check_jet(b: Mapping, s: int) -> dict:
    out = {}
    for N, v in b.items():
        N = tuple(N)
        if len(N) != s or min(N) < 0:
            raise ValidationError(f"bad multi-index {N} for s={s}")
        if sum(N) < 2 and v:
            raise ValidationError("the jet must start at quadratic order")
        if v:
            out[N] = Fraction(v)
    return out


def hessian(b: Mapping, s: int) -> list:
    return [[Fraction(b.get(tuple(x + y for x, y in zip(_unit(s, a), _unit(s, c))), 0))
             for c in range(s)] for a in range(s)]


def oracle_legendre_multidim(b: Mapping, s: int, R: int) -> dict:
    """a_M for 2 <= |M| <= R by fixed-point inversion of p = grad S(x)."""
    b = _check_jet(b, s)
    Hb = hessian(b, s)
    Hinv = mat_inverse(Hb)
    # S as a polynomial in x (Taylor coefficients divided by N!)
    S = {N: v / _mfact(N) for N, v in b.items() if sum(N) <= R}
    grad = []
    for a in range(s):
        g = {}
        for N, v in S.items():
            if N[a]:
                M = tuple(n - (k == a) for k, n in enumerate(N))
                g[M] = g.get(M, 0) + v * N[a]
        grad.append(g)
    # p = Hb x + g(x): split off the linear part
    nonlin = [{M: v for M, v in g.items() if sum(M) >= 2} for g in grad]
    p = [{_unit(s, a): Fraction(1)} for a in range(s)]
    xt = [{} for _ in range(s)]
    for _ in range(R + 1):
        gx = [_compose(g, xt, R) for g in nonlin]
        resid = [_add(p[a], gx[a], -1) for a in range(s)]
        xt = [{} for _ in range(s)]
        for a in range(s):
            for c in range(s):
                if Hinv[a][c]:
                    xt[a] = _add(xt[a], {k: v * Hinv[a][c] for k, v in resid[c].items()})
    St = _compose(S, xt, R)
    for a in range(s):
        St = _add(St, _mul(p[a], xt[a], R), -1)
    return {M: v * _mfact(M) for M, v in sorted(St.items()) if sum(M) >= 2}


def _mfact(N) -> int:
    out = 1
    for n in N:
        out *= factorial(n)
    return out


def _b_list(b: Sequence, R: int | None) -> tuple[list, int]:
    b = [Fraction(v) for v in b]
    if not b:
        raise ValidationError("need at least b_2")
    if b[0] == 0:
        raise DegenerateHessianError("b_2 = 0")
    R = R if R is not None else len(b) + 1
    if R < 2:
        raise ValidationError("R must be at least 2")
    return b, R


def legendre_1d_recursion(b: Sequence, R: int | None = None) -> list:
    """a_2..a_R from a_{m+2} = -((u d/dx)^m u)(0) with u = 1/S''."""
    b, R = _b_list(b, R)
    deg = R - 2
    # S''(x) = sum_{n>=2} b_n x^{n-2} / (n-2)!
    Spp = [b[k] / factorial(k) if k < len(b) else Fraction(0) for k in range(deg + 1)]
    u = [Fraction(0)] * (deg + 1)
    u[0] = 1 / Spp[0]
    for n in range(1, deg + 1):
        u[n] = -sum(Spp[k] * u[n - k] for k in range(1, n + 1)) / Spp[0]
    out = []
    f = list(u)
    for m in range(deg + 1):
        out.append(-f[0])
        df = [f[k + 1] * (k + 1) for k in range(len(f) - 1)]
        f = [sum(u[k] * df[n - k] for k in range(n + 1)) for n in range(len(df))]
    return out


def legendre_1d_inversion(b: Sequence, R: int | None = None) -> list:
    """a_2..a_R through the multi-dimensional inversion route at s = 1."""
    b, R = _b_list(b, R)
    jet = {(n + 2,): v for n, v in enumerate(b)}
    a = oracle_legendre_multidim(jet, 1, R)
    return [a.get((n,), Fraction(0)) for n in range(2, R + 1)]


def oracle_legendre_1d(b: Sequence, R: int | None = None) -> list:
    """a_2..a_R; both routes are run and must agree."""
    first = legendre_1d_recursion(b, R)
    second = legendre_1d_inversion(b, R)
    if first != second:
        raise AssertionError(f"1-D Legendre oracles disagree: {first} vs {second}")
    return first


def multi_indices_exact(s: int, d: int) -> list:
    return [N for N in iproduct(range(d + 1), repeat=s) if sum(N) == d]
