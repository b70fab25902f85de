"""Generators, braiding weights, PBW monomials and elements of the braided algebra.

Every generator "behaves like" a monomial x^M p^N in the quantum affine space
with relations xi_a xi_b = q[b,a] xi_b xi_a, where xi_i = p_i (i <= s) and
xi_{s+a} = x_a.  The pair (M, N) is its weight; commutation factors between
any two generators depend on the weights only.
"""
from __future__ import annotations

import os
import re
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    DimensionError,
    NegativeExponentError,
    ParseError,
    SubstitutionWeightError,
    TermLimitError,
    ValidationError,
)
from .qcoeff import ONE_MONO, Context, QPoly, format_qmono, format_rational, mono_mul

TAGS = (
    "X", "P", "H", "BSeed", "TCoef", "USym", "ABar", "BBar",
    "BCap", "ACap", "PBar", "XBar", "Kappa", "Theta",
)
RANK = {t: r for r, t in enumerate(TAGS)}
INVERTIBLE = {RANK["Kappa"], RANK["Theta"]}
PHASE = {RANK["X"], RANK["P"]}


class Gen(NamedTuple):
    """A generator: PBW rank of its tag plus index payload."""

    rank: int
    args: tuple

    @property
    def tag(self) -> str:
        return TAGS[self.rank]

    def __repr__(self):
        return format_gen(self)


def _mi(v) -> tuple:
    return tuple(int(x) for x in v)


def X(a: int) -> Gen: return Gen(RANK["X"], (a,))
def P(i: int) -> Gen: return Gen(RANK["P"], (i,))
def H(a: int, i: int) -> Gen: return Gen(RANK["H"], (a, i))
def BSeed(m: int, N) -> Gen: return Gen(RANK["BSeed"], (m, _mi(N)))
def TCoef(K, L) -> Gen: return Gen(RANK["TCoef"], (_mi(K), _mi(L)))
def USym(N, a: int, b: int) -> Gen: return Gen(RANK["USym"], (_mi(N), a, b))
def ABar(i: int, j: int) -> Gen: return Gen(RANK["ABar"], (i, j))
def BBar(a: int, b: int) -> Gen: return Gen(RANK["BBar"], (a, b))
def BCap(ks) -> Gen: return Gen(RANK["BCap"], (_mi(ks),))
def ACap(ls) -> Gen: return Gen(RANK["ACap"], (_mi(ls),))
def PBar(i: int, M, n: int) -> Gen: return Gen(RANK["PBar"], (i, _mi(M), n))
def XBar(a: int, N, m: int) -> Gen: return Gen(RANK["XBar"], (a, _mi(N), m))
def Kappa(i: int) -> Gen: return Gen(RANK["Kappa"], (i,))
def Theta(a: int) -> Gen: return Gen(RANK["Theta"], (a,))


# ---------------------------------------------------------------- weights

class BraidWeight(NamedTuple):
    """Behaves like x^xpart p^ppart."""

    xpart: tuple
    ppart: tuple

    @classmethod
    def zero(cls, s: int) -> "BraidWeight":
        return cls((0,) * s, (0,) * s)

    @classmethod
    def from_xi(cls, v: Sequence[int]) -> "BraidWeight":
        s = len(v) // 2
        return cls(tuple(v[s:]), tuple(v[:s]))

    def xi(self) -> tuple:
        """Exponents over xi_1..xi_2s (momenta first)."""
        return tuple(self.ppart) + tuple(self.xpart)

    def __add__(self, other):
        return BraidWeight(
            tuple(a + b for a, b in zip(self.xpart, other.xpart)),
            tuple(a + b for a, b in zip(self.ppart, other.ppart)),
        )

    def __neg__(self):
        return BraidWeight(tuple(-a for a in self.xpart), tuple(-a for a in self.ppart))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "BraidWeight":
        return BraidWeight(tuple(k * a for a in self.xpart), tuple(k * a for a in self.ppart))


def unit(s: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(1, s + 1))


def _vec(s, *parts):
    out = [0] * s
    for sign, idx in parts:
        out[idx - 1] += sign
    return tuple(out)


def _check_index(s: int, *idx):
    for i in idx:
        if not (1 <= i <= s):
            raise DimensionError(f"index {i} outside 1..{s}")


def _check_multi(s: int, *mis):
    for m in mis:
        if len(m) != s or any(v < 0 for v in m):
            raise DimensionError(f"multi-index {m} invalid for s={s}")


_WEIGHT_CACHE: dict = {}


def gen_weight(g: Gen, s: int) -> BraidWeight:
    key = (g, s)
    w = _WEIGHT_CACHE.get(key)
    if w is None:
        w = _gen_weight(g, s)
        _WEIGHT_CACHE[key] = w
    return w


def _gen_weight(g: Gen, s: int) -> BraidWeight:
    z = (0,) * s
    t, a = g.tag, g.args
    if t == "P":
        _check_index(s, a[0])
        return BraidWeight(z, unit(s, a[0]))
    if t == "X":
        _check_index(s, a[0])
        return BraidWeight(unit(s, a[0]), z)
    if t == "H":
        _check_index(s, *a)
        return BraidWeight(unit(s, a[0]), unit(s, a[1]))
    if t == "ABar":
        _check_index(s, *a)
        return BraidWeight(z, _vec(s, (-1, a[0]), (-1, a[1])))
    if t == "BBar":
        _check_index(s, *a)
        return BraidWeight(_vec(s, (-1, a[0]), (-1, a[1])), z)
    if t in ("BCap", "ACap"):
        ks = a[0]
        if len(ks) < 3:
            raise DimensionError(f"{t} needs at least 3 indices, got {ks}")
        _check_index(s, *ks)
        v = _vec(s, *((1, k) for k in ks))
        return BraidWeight(z, v) if t == "BCap" else BraidWeight(v, z)
    if t == "BSeed":
        _check_multi(s, a[1])
        return BraidWeight(tuple(-n for n in a[1]), z)
    if t == "TCoef":
        _check_multi(s, a[0], a[1])
        return BraidWeight(tuple(-n for n in a[0]), tuple(-n for n in a[1]))
    if t == "USym":
        _check_multi(s, a[0])
        _check_index(s, a[1], a[2])
        v = [-n for n in a[0]]
        v[a[1] - 1] += 1
        v[a[2] - 1] += 1
        return BraidWeight(tuple(v), z)
    if t == "PBar":
        _check_index(s, a[0])
        _check_multi(s, a[1])
        return BraidWeight(z, unit(s, a[0]))
    if t == "XBar":
        _check_index(s, a[0])
        _check_multi(s, a[1])
        return BraidWeight(unit(s, a[0]), z)
    if t == "Kappa":
        _check_index(s, a[0])
        return BraidWeight(z, _vec(s, (-1, a[0])))
    if t == "Theta":
        _check_index(s, a[0])
        return BraidWeight(_vec(s, (-1, a[0])), z)
    raise ValidationError(f"unknown generator {g}")


def _xi_weight(g: Gen, s: int) -> tuple:
    key = ("xi", g, s)
    v = _WEIGHT_CACHE.get(key)
    if v is None:
        v = gen_weight(g, s).xi()
        _WEIGHT_CACHE[key] = v
    return v


def swap_exponents(left: Sequence[int], right: Sequence[int]) -> dict:
    """Exponents of C in (left)(right) = C (right)(left), xi-indexed weight vectors.

    Bimultiplicative extension of xi_a xi_b = q[b,a] xi_b xi_a; on the canonical
    pair (a<b) the exponent is left[b]*right[a] - left[a]*right[b].
    """
    n = len(left)
    out = {}
    la = [k for k in range(n) if left[k]]
    ra = [k for k in range(n) if right[k]]
    if not la or not ra:
        return out
    for a in range(n):
        for b in range(a + 1, n):
            e = left[b] * right[a] - left[a] * right[b]
            if e:
                out[(a + 1, b + 1)] = e
    return out


def swap_factor(w_left: BraidWeight, w_right: BraidWeight, ctx: Context) -> QPoly:
    if len(w_left.xpart) != ctx.s or len(w_right.xpart) != ctx.s:
        raise DimensionError("weight length does not match context")
    return ctx.reduce_mono(swap_exponents(w_left.xi(), w_right.xi()))


# ------------------------------------------------------------- monomials

class Monomial(tuple):
    """Interned PBW monomial: a sorted tuple of (Gen, exponent) with a cached hash."""

    _table: dict = {}

    def __new__(cls, items=()):
        items = tuple(items)
        hit = cls._table.get(items)
        if hit is not None:
            return hit
        obj = super().__new__(cls, items)
        obj._hash = tuple.__hash__(obj)
        obj.uid = len(cls._table)
        obj.xdeg = sum(e for g, e in items if g.rank == 0)
        cls._table[items] = obj
        return obj

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or tuple.__eq__(self, other)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __reduce__(self):
        return (Monomial, (tuple(self),))


def as_mono(items) -> Monomial:
    return items if isinstance(items, Monomial) else Monomial(items)


ONE: Monomial = Monomial(())


def mono_weight(m: Monomial, s: int) -> BraidWeight:
    v = [0] * (2 * s)
    for g, e in m:
        for k, c in enumerate(_xi_weight(g, s)):
            if c:
                v[k] += e * c
    return BraidWeight.from_xi(v)


def _mono_xi(m: Monomial, s: int) -> list:
    v = [0] * (2 * s)
    for g, e in m:
        for k, c in enumerate(_xi_weight(g, s)):
            if c:
                v[k] += e * c
    return v


def x_degree(m) -> int:
    if isinstance(m, Monomial):
        return m.xdeg
    r = RANK["X"]
    return sum(e for g, e in m if g.rank == r)


def _check_exponent(g: Gen, e: int):
    if e < 0 and g.rank not in INVERTIBLE:
        raise NegativeExponentError(f"negative exponent on {format_gen(g)}")


def _mono_data(m: Monomial, s: int):
    """Per-dimension cache: (generators, exponent-scaled xi-weights, suffix weight sums)."""
    d = m.__dict__.get("_data")
    if d is None:
        d = m._data = {}
    hit = d.get(s)
    if hit is None:
        gens = [g for g, _ in m]
        xis = [tuple(e * w for w in _xi_weight(g, s)) for g, e in m]
        cur = (0,) * (2 * s)
        tails = [cur] * (len(m) + 1)
        for k in range(len(m) - 1, -1, -1):
            cur = tuple(c + w for c, w in zip(cur, xis[k]))
            tails[k] = cur
        hit = d[s] = (gens, xis, tails)
    return hit


def _merge(m1: Monomial, m2: Monomial) -> Monomial:
    out = []
    i = j = 0
    L1, L2 = len(m1), len(m2)
    while i < L1 and j < L2:
        g1, e1 = m1[i]
        g2, e2 = m2[j]
        if g1 < g2:
            out.append(m1[i])
            i += 1
        elif g2 < g1:
            out.append(m2[j])
            j += 1
        else:
            e = e1 + e2
            if e:
                out.append((g1, e))
            i += 1
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return Monomial(out)


def _pair_plan(ctx: Context):
    """Per context: list of (a, b, pinned value or None) over xi index pairs a<b."""
    plan = ctx._cache.get("pair_plan")
    if plan is None:
        n = 2 * ctx.s
        plan = [(a, b, ctx.fixed.get((a + 1, b + 1))) for a in range(n) for b in range(a + 1, n)]
        ctx._cache["pair_plan"] = plan
    return plan


def _mono_product(m1: Monomial, m2: Monomial, ctx: Context):
    """PBW product of two monomials: (monomial, q-monomial, rational factor)."""
    cache = ctx._cache
    key = (m1.uid, m2.uid)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if not m1 or not m2:
        out = cache[key] = (m2 if not m1 else m1, ONE_MONO, 1)
        return out
    qm, qc = ONE_MONO, 1
    if m1[-1][0] > m2[0][0]:
        s = ctx.s
        gens1, _, tails = _mono_data(m1, s)
        gens2, xis2, _ = _mono_data(m2, s)
        L = len(gens1)
        # group m2's letters by the suffix of m1 they must pass
        segs = {}
        k = 0
        for g2, w2 in zip(gens2, xis2):
            while k < L and gens1[k] <= g2:
                k += 1
            if k == L:
                break
            seg = segs.get(k)
            segs[k] = w2 if seg is None else tuple(x + y for x, y in zip(seg, w2))
        free = []
        for a, b, pinned in _pair_plan(ctx):
            e = 0
            for k, w in segs.items():
                t = tails[k]
                e += t[b] * w[a] - t[a] * w[b]
            if e:
                if pinned is None:
                    free.append(((a + 1, b + 1), e))
                elif pinned != 1:
                    qc = qc * pinned ** e
        qm = tuple(free)
    out = cache[key] = (_merge(m1, m2), qm, qc)
    return out


def max_terms() -> int:
    return int(os.environ.get("BRAIDLEG_MAX_TERMS", 10 ** 6))


# --------------------------------------------------------------- elements

class Element:
    """Finite sum of PBW monomials with QPoly coefficients."""

    __slots__ = ("terms", "ctx")

    def __init__(self, terms: Mapping[Monomial, QPoly] | None, ctx: Context):
        self.ctx = ctx
        t = {}
        if terms:
            for m, c in terms.items():
                c = QPoly.coerce(c, ctx)
                if not c.is_zero():
                    t[as_mono(m)] = c
        self.terms = t

    @classmethod
    def _raw(cls, t: dict, ctx: Context) -> "Element":
        obj = cls.__new__(cls)
        obj.terms = t
        obj.ctx = ctx
        return obj

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, ctx: Context) -> "Element":
        return cls._raw({}, ctx)

    @classmethod
    def scalar(cls, c, ctx: Context) -> "Element":
        c = QPoly.coerce(c, ctx)
        return cls._raw({ONE: c} if not c.is_zero() else {}, ctx)

    @classmethod
    def one(cls, ctx: Context) -> "Element":
        return cls.scalar(1, ctx)

    @classmethod
    def gen(cls, g: Gen, ctx: Context, e: int = 1) -> "Element":
        gen_weight(g, ctx.s)
        _check_exponent(g, e)
        if e == 0:
            return cls.one(ctx)
        return cls._raw({Monomial(((g, e),)): QPoly.one(ctx)}, ctx)

    # -- inspection ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def weights(self) -> set:
        return {mono_weight(m, self.ctx.s) for m in self.terms}

    def weight(self) -> BraidWeight | None:
        """The common weight, or None for zero; raises if inhomogeneous."""
        ws = self.weights()
        if not ws:
            return None
        if len(ws) > 1:
            raise SubstitutionWeightError(f"element is not weight-homogeneous: {sorted(ws)}")
        return next(iter(ws))

    def is_homogeneous(self, w: BraidWeight | None = None) -> bool:
        ws = self.weights()
        if not ws:
            return True
        if len(ws) > 1:
            return False
        return w is None or next(iter(ws)) == w

    def generators(self) -> set:
        return {g for m in self.terms for g, _ in m}

    def is_monomial(self) -> bool:
        return len(self.terms) == 1 and next(iter(self.terms.values())).is_monomial()

    def scalar_value(self) -> QPoly:
        if not self.terms:
            return QPoly.zero(self.ctx)
        if set(self.terms) != {ONE}:
            raise ValueError("element is not a scalar")
        return self.terms[ONE]

    # -- arithmetic ---------------------------------------------------
    def _same(self, other: "Element"):
        if other.ctx.s != self.ctx.s:
            raise DimensionError(f"elements over s={self.ctx.s} and s={other.ctx.s}")

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            self._same(other)
            return other
        return Element.scalar(other, self.ctx)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m)
            v = c if v is None else v + c
            if v.is_zero():
                t.pop(m, None)
            else:
                t[m] = v
        return Element._raw(t, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return Element._raw({m: -c for m, c in self.terms.items()}, self.ctx)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Element):
            return elem_mul(self, other)
        c = QPoly.coerce(other, self.ctx)
        if c.is_zero():
            return Element.zero(self.ctx)
        return Element._raw({m: v * c for m, v in self.terms.items() if not (v * c).is_zero()}, self.ctx)

    def __rmul__(self, other):
        # scalars are central
        return self.__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise NegativeExponentError("only monomials may be inverted")
            (m, c), = self.terms.items()
            for g, _ in m:
                _check_exponent(g, -1)
            inv = Element._raw({ONE: c.inverse()}, self.ctx)
            for g, e in reversed(m):
                inv = inv * Element.gen(g, self.ctx, -e)
            return inv ** (-k)
        out = Element.one(self.ctx)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.ctx.s == other.ctx.s and self.terms == other.terms
        if isinstance(other, (int, Fraction, QPoly)):
            return self == Element.scalar(other, self.ctx)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Element({format_element(self)})"

    def __str__(self):
        return format_element(self)

    # -- transformations ----------------------------------------------
    def map_coeffs(self, fn) -> "Element":
        t = {}
        for m, c in self.terms.items():
            v = fn(c)
            if not v.is_zero():
                t[m] = v
        return Element._raw(t, self.ctx)

    def filter(self, pred) -> "Element":
        return Element._raw({m: c for m, c in self.terms.items() if pred(m)}, self.ctx)

    def with_ctx(self, ctx: Context) -> "Element":
        """Reinterpret over another context of the same s (coefficients untouched)."""
        if ctx.s != self.ctx.s:
            raise DimensionError("context dimension mismatch")
        return Element._raw(dict(self.terms), ctx)


def elem_mul(a: Element, b: Element, xmax: int | None = None) -> Element:
    """Product with normal form; ``xmax`` drops terms of x-degree above it."""
    a._same(b)
    ctx = a.ctx
    if not a.terms or not b.terms:
        return Element.zero(ctx)
    if len(a.terms) * len(b.terms) >= DENSE_THRESHOLD:
        out = _dense_mul(a, b, xmax)
        if out is not None:
            return out
    return _sparse_mul(a, b, xmax)


DENSE_THRESHOLD = 4096


def _free_pairs(ctx: Context):
    """Unpinned canonical pairs, or None when some pair is pinned to a value other than 1."""
    fp = ctx._cache.get("free_pairs")
    if fp is None:
        if any(v != 1 for v in ctx.fixed.values()):
            fp = ()
        else:
            n = 2 * ctx.s
            fp = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if (i, j) not in ctx.fixed]
        ctx._cache["free_pairs"] = fp
    return None if fp == () else fp


def _dense_mul(a: Element, b: Element, xmax: int | None):
    from . import dense

    ctx = a.ctx
    fp = _free_pairs(ctx)
    if fp is None:
        return None
    res = dense.dense_product(a, b, xmax, lambda g: _xi_weight(g, ctx.s), RANK["X"], fp)
    if res is None:
        return None
    keys, vals, den, gens, G = res
    t = dense.to_terms(keys, vals, den, gens, G, fp, ctx, Monomial)
    limit = max_terms()
    if len(t) > limit:
        raise TermLimitError(f"element exceeds {limit} terms (BRAIDLEG_MAX_TERMS)")
    return Element._raw(t, ctx)


def _sparse_mul(a: Element, b: Element, xmax: int | None) -> Element:
    ctx = a.ctx
    acc: dict = {}
    bterms = [(m, list(c.items())) for m, c in b.terms.items()]
    if xmax is not None:
        bdeg = [x_degree(m) for m, _ in bterms]
    limit = max_terms()
    for m1, c1 in a.terms.items():
        c1 = list(c1.items())
        d1 = x_degree(m1) if xmax is not None else 0
        for idx, (m2, c2) in enumerate(bterms):
            if xmax is not None and d1 + bdeg[idx] > xmax:
                continue
            mono, qm, qc = _mono_product(m1, m2, ctx)
            slot = acc.get(mono)
            if slot is None:
                slot = acc[mono] = {}
                if len(acc) > limit:
                    raise TermLimitError(f"element exceeds {limit} terms (BRAIDLEG_MAX_TERMS)")
            for qa, ca in c1:
                if qm:
                    qa = mono_mul(qa, qm)
                    ca = ca * qc
                elif qc != 1:
                    ca = ca * qc
                for qb, cb in c2:
                    k = mono_mul(qa, qb)
                    v = slot.get(k)
                    slot[k] = ca * cb if v is None else v + ca * cb
    t = {}
    for mono, slot in acc.items():
        c = QPoly._raw({k: v for k, v in slot.items() if v}, ctx)
        if not c.is_zero():
            t[mono] = c
    return Element._raw(t, ctx)


def braids_as(a: Element, b: Element, Q: QPoly) -> bool:
    """Exact test of a*b == Q*b*a.

    First tries the sufficient monomial-wise condition (every m1*m2 and m2*m1
    normal-form to the same monomial with factors in ratio Q); if that does
    not settle it, the full residual is computed.
    """
    a._same(b)
    ctx = a.ctx
    if Q.is_monomial():
        (qm, qc), = Q.items()
        fp = _free_pairs(ctx)
        res = None
        if fp is not None and qc == 1 and len(a.terms) * len(b.terms) > 64:
            from . import dense

            res = dense.reorder_exponents(a, b, lambda g: _xi_weight(g, ctx.s), fp)
        if res is not None:
            AB, BA = res
            want = dict(qm)
            if all((AB[k] - BA[k] == want.get(p, 0)).all() for k, p in enumerate(fp)):
                return True
        elif _monomialwise(a, b, qm, qc):
            return True
    return (elem_mul(a, b) - elem_mul(b, a) * Q).is_zero()


def _monomialwise(a: Element, b: Element, qm, qc) -> bool:
    ctx = a.ctx
    for m1 in a.terms:
        for m2 in b.terms:
            left, q1, c1 = _mono_product(m1, m2, ctx)
            right, q2, c2 = _mono_product(m2, m1, ctx)
            if left != right or q1 != mono_mul(qm, q2) or c1 != qc * c2:
                return False
    return True


def product(elements: Iterable[Element], ctx: Context, xmax: int | None = None) -> Element:
    out = Element.one(ctx)
    for e in elements:
        out = elem_mul(out, e, xmax)
    return out


def normal_form(word: Sequence[tuple[Gen, int]], ctx: Context, coeff=1) -> Element:
    """PBW normal form of ``coeff * g1^e1 g2^e2 ...``."""
    out = Element.scalar(coeff, ctx)
    for g, e in word:
        out = elem_mul(out, Element.gen(g, ctx, e))
    return out


def monomial_element(m: Monomial, ctx: Context, coeff=1) -> Element:
    return Element._raw({as_mono(m): QPoly.coerce(coeff, ctx)}, ctx) if coeff else Element.zero(ctx)


def substitute(a: Element, mapping: Mapping[Gen, Element], check_weights: bool = True) -> Element:
    """Homomorphic substitution of generators, in PBW order of each monomial."""
    ctx = a.ctx
    s = ctx.s
    for g, img in mapping.items():
        if check_weights and not img.is_homogeneous(gen_weight(g, s)):
            raise SubstitutionWeightError(
                f"image of {format_gen(g)} has weights {sorted(img.weights())}, expected {gen_weight(g, s)}"
            )
    out = Element.zero(ctx)
    for m, c in a.terms.items():
        term = Element.scalar(c, ctx)
        for g, e in m:
            img = mapping.get(g)
            if img is None:
                term = elem_mul(term, Element.gen(g, ctx, e))
            else:
                term = elem_mul(term, img ** e)
        out = out + term
    return out


def specialize_q(a: Element, assignment: Mapping[tuple[int, int], Fraction], ctx: Context | None = None) -> Element:
    """Evaluate the listed q pairs in every coefficient."""
    ctx = ctx or a.ctx
    t = {}
    for m, c in a.terms.items():
        v = QPoly(c.partial_specialize(assignment).terms, ctx)
        if not v.is_zero():
            t[m] = v
    return Element._raw(t, ctx)


def specialize_all_q(a: Element) -> Element:
    """q -> 1 for every pair; the result lives in the classical context."""
    ctx = Context.classical(a.ctx.s)
    ones = {p: Fraction(1) for m in a.terms.values() for p in m.pairs()}
    return specialize_q(a, ones, ctx)


def specialize_gens(a: Element, values: Mapping[Gen, Fraction]) -> Element:
    """Replace generators by rational numbers (meaningful when q is trivial)."""
    ctx = a.ctx
    out: dict = {}
    for m, c in a.terms.items():
        scale = Fraction(1)
        keep = []
        for g, e in m:
            if g in values:
                scale *= Fraction(values[g]) ** e
            else:
                keep.append((g, e))
        if not scale:
            continue
        key = Monomial(keep)
        v = c * scale
        prev = out.get(key)
        v = v if prev is None else prev + v
        if v.is_zero():
            out.pop(key, None)
        else:
            out[key] = v
    return Element._raw(out, ctx)


def rational_value(a: Element) -> Fraction:
    """The rational value of an element with no generators and constant coefficient."""
    if a.is_zero():
        return Fraction(0)
    q = a.scalar_value()
    return q.constant_value()


# ----------------------------------------------------- convenience builders

def ordered_power(make, N: Sequence[int], ctx: Context) -> Element:
    """make(s)^N_s ... make(1)^N_1 (descending index), normal-formed."""
    word = [(make(k), N[k - 1]) for k in range(len(N), 0, -1) if N[k - 1]]
    return normal_form(word, ctx)


def x_power(N, ctx: Context) -> Element:
    return ordered_power(X, N, ctx)


def p_power(L, ctx: Context) -> Element:
    return ordered_power(P, L, ctx)


def kappa_power(N, ctx: Context) -> Element:
    return ordered_power(Kappa, N, ctx)


def theta_power(N, ctx: Context) -> Element:
    return ordered_power(Theta, N, ctx)


def multi_factorial(N: Sequence[int]) -> int:
    out = 1
    for n in N:
        out *= factorial(n)
    return out


def reorder_factor(word: Sequence[tuple[int, ...]], target: Sequence[tuple[int, ...]], ctx: Context) -> QPoly:
    """C with word = C * target, both sequences of xi-weight vectors (same multiset).

    Computed by adjacent transpositions: a b = swap(a, b) b a.
    """
    cur = list(word)
    target = list(target)
    if sorted(cur) != sorted(target):
        raise ValueError("reorder_factor needs the same letters")
    exps: dict = {}
    for pos, want in enumerate(target):
        k = cur.index(want, pos)
        while k > pos:
            a, b = cur[k - 1], cur[k]
            for p, e in swap_exponents(a, b).items():
                exps[p] = exps.get(p, 0) + e
            cur[k - 1], cur[k] = b, a
            k -= 1
    return ctx.reduce_mono(exps)


def _letter(s: int, xi_index: int, sign: int = 1) -> tuple:
    v = [0] * (2 * s)
    v[xi_index - 1] = sign
    return tuple(v)


def abar(i: int, j: int, ctx: Context) -> Element:
    """a-bar_{i,j}; behaves like p_i^{-1} p_j^{-1}, stored with i <= j."""
    if i <= j:
        return Element.gen(ABar(i, j), ctx)
    s = ctx.s
    c = reorder_factor([_letter(s, i, -1), _letter(s, j, -1)], [_letter(s, j, -1), _letter(s, i, -1)], ctx)
    return Element.gen(ABar(j, i), ctx) * c


def bbar(a: int, b: int, ctx: Context) -> Element:
    """b-bar_{a,b}; behaves like x_a^{-1} x_b^{-1}, stored with a <= b."""
    if a <= b:
        return Element.gen(BBar(a, b), ctx)
    s = ctx.s
    c = reorder_factor([_letter(s, s + a, -1), _letter(s, s + b, -1)],
                       [_letter(s, s + b, -1), _letter(s, s + a, -1)], ctx)
    return Element.gen(BBar(b, a), ctx) * c


def _cap(ks, ctx: Context, offset: int, make) -> Element:
    ks = tuple(ks)
    s = ctx.s
    # B-cap_{k1..kn} behaves like p_{kn} ... p_{k1}
    word = [_letter(s, offset + k) for k in reversed(ks)]
    srt = tuple(sorted(ks))
    target = [_letter(s, offset + k) for k in reversed(srt)]
    c = reorder_factor(word, target, ctx)
    return Element.gen(make(srt), ctx) * c


def bcap(ks, ctx: Context) -> Element:
    return _cap(ks, ctx, 0, BCap)


def acap(ls, ctx: Context) -> Element:
    return _cap(ls, ctx, ctx.s, ACap)


# ------------------------------------------------------------------ text

def _mi_text(m) -> str:
    return ",".join(str(v) for v in m)


def format_gen(g: Gen) -> str:
    t, a = g.tag, g.args
    if t == "X":
        return f"x{a[0]}"
    if t == "P":
        return f"p{a[0]}"
    if t == "H":
        return f"h[{a[0]},{a[1]}]"
    if t == "ABar":
        return f"a[{a[0]},{a[1]}]"
    if t == "BBar":
        return f"b[{a[0]},{a[1]}]"
    if t == "BCap":
        return f"B[{_mi_text(a[0])}]"
    if t == "ACap":
        return f"A[{_mi_text(a[0])}]"
    if t == "BSeed":
        return f"bseed[{a[0]};{_mi_text(a[1])}]"
    if t == "TCoef":
        return f"T[{_mi_text(a[0])};{_mi_text(a[1])}]"
    if t == "USym":
        return f"u[{_mi_text(a[0])};{a[1]},{a[2]}]"
    if t == "PBar":
        return f"Pb[{a[0]};{_mi_text(a[1])};{a[2]}]"
    if t == "XBar":
        return f"Xb[{a[0]};{_mi_text(a[1])};{a[2]}]"
    if t == "Kappa":
        return f"kappa{a[0]}"
    if t == "Theta":
        return f"theta{a[0]}"
    raise ValueError(t)


def format_monomial(m: Monomial) -> list[str]:
    return [format_gen(g) if e == 1 else f"{format_gen(g)}^{e}" for g, e in m]


def format_element(a: Element) -> str:
    if not a.terms:
        return "0"
    parts = []
    for m in sorted(a.terms):
        c = a.terms[m]
        gens = format_monomial(m)
        for qm in sorted(c.terms):
            r = c.terms[qm]
            factors = format_qmono(qm) + gens
            if not factors:
                parts.append(format_rational(r))
            elif r == 1:
                parts.append("*".join(factors))
            elif r == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(format_rational(r) + "*" + "*".join(factors))
    text = parts[0]
    for p in parts[1:]:
        text += " - " + p[1:] if p.startswith("-") else " + " + p
    return text


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<q>q\[(?P<qi>\d+),(?P<qj>\d+)\])
  | (?P<br>(?P<bname>h|a|b|B|A|T|bseed|u|Pb|Xb)\[(?P<body>[0-9,;\s]*)\])
  | (?P<simple>(?P<sname>kappa|theta|p|x)(?P<sidx>\d+))
  | (?P<op>[*+\-^])
    """,
    re.VERBOSE,
)


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if not m.group("ws"):
            out.append((m, pos))
        pos = m.end()
    return out


def _ints(body: str, pos: int) -> tuple:
    body = body.strip()
    if not body:
        return ()
    try:
        return tuple(int(v) for v in body.split(","))
    except ValueError:
        raise ParseError(f"bad index list {body!r}", pos) from None


def _factor_element(m, pos, ctx: Context) -> Element:
    if m.group("q"):
        i, j = int(m.group("qi")), int(m.group("qj"))
        return Element.scalar(ctx.q(i, j), ctx)
    if m.group("simple"):
        name, idx = m.group("sname"), int(m.group("sidx"))
        g = {"p": P, "x": X, "kappa": Kappa, "theta": Theta}[name](idx)
        return Element.gen(g, ctx)
    name, body = m.group("bname"), m.group("body")
    segs = [_ints(part, pos) for part in body.split(";")]
    try:
        if name in ("h", "a", "b"):
            if len(segs) != 1 or len(segs[0]) != 2:
                raise ParseError(f"{name}[...] takes two indices", pos)
            i, j = segs[0]
            if name == "h":
                return Element.gen(H(i, j), ctx)
            return abar(i, j, ctx) if name == "a" else bbar(i, j, ctx)
        if name in ("B", "A"):
            if len(segs) != 1 or len(segs[0]) < 3:
                raise ParseError(f"{name}[...] takes at least three indices", pos)
            for k in segs[0]:
                _check_index(ctx.s, k)
            return bcap(segs[0], ctx) if name == "B" else acap(segs[0], ctx)
        if name == "T":
            K, L = segs
            return Element.gen(TCoef(K, L), ctx)
        if name == "bseed":
            (mm,), N = segs
            return Element.gen(BSeed(mm, N), ctx)
        if name == "u":
            N, (a, b) = segs
            return Element.gen(USym(N, a, b), ctx)
        if name == "Pb":
            (i,), M, (n,) = segs
            return Element.gen(PBar(i, M, n), ctx)
        if name == "Xb":
            (a,), N, (n,) = segs
            return Element.gen(XBar(a, N, n), ctx)
    except ValueError:
        raise ParseError(f"malformed {name}[...]", pos) from None
    raise ParseError(f"unknown generator {name}", pos)


def parse_element(text: str, ctx: Context) -> Element:
    toks = _tokens(text)
    if not toks:
        raise ParseError("empty expression", 0)
    i = 0
    total = Element.zero(ctx)

    def peek_op():
        if i < len(toks) and toks[i][0].group("op"):
            return toks[i][0].group("op")
        return None

    sign = 1
    if peek_op() in ("+", "-"):
        sign = -1 if peek_op() == "-" else 1
        i += 1
    while True:
        term = Element.scalar(sign, ctx)
        while True:
            if i >= len(toks):
                raise ParseError("expression ends where a factor was expected", len(text))
            m, pos = toks[i]
            if m.group("op"):
                raise ParseError(f"unexpected {m.group('op')!r}", pos)
            i += 1
            if m.group("num"):
                fac = Element.scalar(Fraction(m.group("num")), ctx)
            else:
                fac = _factor_element(m, pos, ctx)
            if peek_op() == "^":
                i += 1
                neg = False
                if peek_op() == "-":
                    neg = True
                    i += 1
                if i >= len(toks) or not toks[i][0].group("num") or "/" in toks[i][0].group("num"):
                    raise ParseError("exponent must be an integer", toks[i][1] if i < len(toks) else len(text))
                k = int(toks[i][0].group("num"))
                i += 1
                fac = fac ** (-k if neg else k)
            term = term * fac
            if peek_op() == "*":
                i += 1
                continue
            break
        total = total + term
        if i >= len(toks):
            break
        op = peek_op()
        if op not in ("+", "-"):
            raise ParseError("expected '+', '-' or '*'", toks[i][1])
        sign = -1 if op == "-" else 1
        i += 1
    return total
