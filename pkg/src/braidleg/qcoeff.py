"""Laurent polynomials over Q in the braiding variables q[i,j].

A q-monomial is a sorted tuple of ``((i, j), e)`` with ``i < j`` and ``e != 0``.
``q[j,i]`` is never stored; it is ``q[i,j]^-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DimensionError, DivisionDomainError, IncompleteAssignmentError

QMono = tuple  # tuple[tuple[tuple[int, int], int], ...]

ONE_MONO: QMono = ()


def canonical_pair(i: int, j: int) -> tuple[tuple[int, int], int]:
    """Return ((lo, hi), sign) so that q[i,j] = q[lo,hi]^sign. Requires i != j."""
    if i < j:
        return (i, j), 1
    return (j, i), -1


def mono_mul(a: QMono, b: QMono) -> QMono:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for p, e in b:
        v = acc.get(p, 0) + e
        if v:
            acc[p] = v
        else:
            del acc[p]
    return tuple(sorted(acc.items()))


def mono_pow(a: QMono, k: int) -> QMono:
    if k == 0:
        return ONE_MONO
    return tuple((p, e * k) for p, e in a)


def mono_from_exponents(exps: Mapping[tuple[int, int], int]) -> QMono:
    return tuple(sorted((p, e) for p, e in exps.items() if e))


@dataclass(frozen=True)
class Context:
    """Shared setting: dimension ``s`` and pairs pinned to rational values.

    Pinned pairs are substituted whenever a q-factor is generated, which is how
    q=1 (all pairs pinned) and the side conditions of the HJ construction are
    realised without a separate specialisation pass.
    """

    s: int
    fixed: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.s < 1:
            raise DimensionError("s must be >= 1")
        fixed = {}
        for (i, j), v in dict(self.fixed).items():
            if not (1 <= i < j <= 2 * self.s):
                raise DimensionError(f"pair ({i},{j}) out of range for s={self.s}")
            v = Fraction(v)
            if v == 0:
                raise DivisionDomainError(f"q[{i},{j}] pinned to zero")
            fixed[(i, j)] = v
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "_cache", {})

    # -- constructors -------------------------------------------------
    @classmethod
    def symbolic(cls, s: int) -> "Context":
        return cls(s)

    @classmethod
    def classical(cls, s: int) -> "Context":
        return cls(s, {p: Fraction(1) for p in all_pairs(s)})

    @classmethod
    def side_conditions(cls, s: int) -> "Context":
        """q trivial among momenta and among coordinates; mixed pairs stay free."""
        fixed = {}
        for i, j in all_pairs(s):
            if (i <= s) == (j <= s):
                fixed[(i, j)] = Fraction(1)
        return cls(s, fixed)

    @property
    def is_classical(self) -> bool:
        return len(self.fixed) == s_pairs(self.s) and all(v == 1 for v in self.fixed.values())

    def __hash__(self):
        return hash((self.s, tuple(sorted(self.fixed.items()))))

    def __eq__(self, other):
        return isinstance(other, Context) and self.s == other.s and self.fixed == other.fixed

    def reduce_mono(self, exps: Mapping[tuple[int, int], int]) -> "QPoly":
        """q-monomial from an exponent map, with pinned pairs evaluated."""
        coeff = Fraction(1)
        free = {}
        for p, e in exps.items():
            if not e:
                continue
            v = self.fixed.get(p)
            if v is None:
                free[p] = e
            elif v != 1:
                coeff *= v ** e
        return QPoly({mono_from_exponents(free): coeff}, self)

    def q(self, i: int, j: int) -> "QPoly":
        """The braiding variable q_{i,j} (indices in 1..2s)."""
        n = 2 * self.s
        if not (1 <= i <= n and 1 <= j <= n):
            raise DimensionError(f"q[{i},{j}] out of range for s={self.s}")
        if i == j:
            return QPoly.one(self)
        p, e = canonical_pair(i, j)
        return self.reduce_mono({p: e})


def all_pairs(s: int) -> list[tuple[int, int]]:
    n = 2 * s
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def s_pairs(s: int) -> int:
    n = 2 * s
    return n * (n - 1) // 2


class QPoly:
    """Immutable Laurent polynomial ``sum c * q^e`` with rational ``c``."""

    __slots__ = ("_t", "ctx", "_h")

    def __init__(self, terms: Mapping[QMono, Fraction] | None = None, ctx: Context | None = None):
        t = {}
        if terms:
            for m, c in terms.items():
                if c:
                    t[m] = c if isinstance(c, Fraction) else Fraction(c)
        self._t = t
        self.ctx = ctx
        self._h = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c, ctx: Context | None = None) -> "QPoly":
        return cls({ONE_MONO: Fraction(c)}, ctx)

    @classmethod
    def one(cls, ctx: Context | None = None) -> "QPoly":
        return cls({ONE_MONO: Fraction(1)}, ctx)

    @classmethod
    def zero(cls, ctx: Context | None = None) -> "QPoly":
        return cls({}, ctx)

    @classmethod
    def _raw(cls, t: dict, ctx) -> "QPoly":
        obj = cls.__new__(cls)
        obj._t = t
        obj.ctx = ctx
        obj._h = None
        return obj

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def is_zero(self) -> bool:
        return not self._t

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and ONE_MONO in self._t)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self._t.get(ONE_MONO, Fraction(0))

    def pairs(self) -> set:
        return {p for m in self._t for p, _ in m}

    def __len__(self):
        return len(self._t)

    # -- arithmetic ---------------------------------------------------
    def _ctx_with(self, other: "QPoly"):
        a, b = self.ctx, other.ctx
        if a is not None and b is not None and a.s != b.s:
            raise DimensionError(f"QPoly over s={a.s} combined with s={b.s}")
        return a if a is not None else b

    @staticmethod
    def coerce(x, ctx=None) -> "QPoly":
        if isinstance(x, QPoly):
            return x
        return QPoly.const(x, ctx)

    def __add__(self, other):
        other = QPoly.coerce(other)
        ctx = self._ctx_with(other)
        t = dict(self._t)
        for m, c in other._t.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return QPoly._raw(t, ctx)

    __radd__ = __add__

    def __neg__(self):
        return QPoly._raw({m: -c for m, c in self._t.items()}, self.ctx)

    def __sub__(self, other):
        return self + (-QPoly.coerce(other))

    def __rsub__(self, other):
        return QPoly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, QPoly):
            c = Fraction(other)
            if not c:
                return QPoly._raw({}, self.ctx)
            return QPoly._raw({m: v * c for m, v in self._t.items()}, self.ctx)
        ctx = self._ctx_with(other)
        if len(other._t) == 1:
            (m2, c2), = other._t.items()
            return QPoly._raw({mono_mul(m, m2): c * c2 for m, c in self._t.items()}, ctx)
        t: dict = {}
        for m1, c1 in self._t.items():
            for m2, c2 in other._t.items():
                m = mono_mul(m1, m2)
                v = t.get(m, 0) + c1 * c2
                if v:
                    t[m] = v
                else:
                    t.pop(m, None)
        return QPoly._raw(t, ctx)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self._t) != 1:
                raise DivisionDomainError("only q-monomials are invertible")
            (m, c), = self._t.items()
            return QPoly._raw({mono_pow(m, k): c ** k}, self.ctx)
        out = QPoly.one(self.ctx)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "QPoly":
        return self ** -1

    def __eq__(self, other):
        if isinstance(other, QPoly):
            return self._t == other._t
        try:
            return self._t == QPoly.const(other)._t
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def specialize(self, assignment: Mapping[tuple[int, int], Fraction]) -> Fraction:
        return qp_specialize(self, assignment)

    def partial_specialize(self, assignment: Mapping[tuple[int, int], Fraction]) -> "QPoly":
        """Evaluate the pairs present in ``assignment``; keep the rest symbolic."""
        t: dict = {}
        for m, c in self._t.items():
            keep = []
            for p, e in m:
                if p in assignment:
                    v = Fraction(assignment[p])
                    if v == 0:
                        raise DivisionDomainError(f"q[{p[0]},{p[1]}] assigned zero")
                    c = c * v ** e
                else:
                    keep.append((p, e))
            key = tuple(keep)
            v = t.get(key, 0) + c
            if v:
                t[key] = v
            else:
                t.pop(key, None)
        return QPoly._raw(t, self.ctx)

    # -- text ---------------------------------------------------------
    def __repr__(self):
        return f"QPoly({format_qpoly(self)})"

    def __str__(self):
        return format_qpoly(self)


def qp_mul(a: QPoly, b: QPoly) -> QPoly:
    return a * b


def qp_specialize(a: QPoly, assignment: Mapping[tuple[int, int], Fraction]) -> Fraction:
    missing = a.pairs() - set(assignment)
    if missing:
        names = ", ".join(f"q[{i},{j}]" for i, j in sorted(missing))
        raise IncompleteAssignmentError(f"no value for {names}")
    total = Fraction(0)
    for m, c in a.items():
        v = c
        for p, e in m:
            x = Fraction(assignment[p])
            if x == 0:
                raise DivisionDomainError(f"q[{p[0]},{p[1]}] assigned zero")
            v *= x ** e
        total += v
    return total


def format_qmono(m: QMono) -> list[str]:
    out = []
    for (i, j), e in m:
        out.append(f"q[{i},{j}]" if e == 1 else f"q[{i},{j}]^{e}")
    return out


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_qpoly(a: QPoly) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for m in sorted(a._t):
        c = a._t[m]
        factors = format_qmono(m)
        if not factors:
            parts.append(format_rational(c))
        elif c == 1:
            parts.append("*".join(factors))
        elif c == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append(format_rational(c) + "*" + "*".join(factors))
    return " + ".join(parts).replace("+ -", "- ")


def random_qpoly(rng, s: int, nterms: int = 3, maxexp: int = 2, ctx: Context | None = None) -> QPoly:
    """Random QPoly for property tests."""
    pairs = all_pairs(s)
    t = {}
    for _ in range(nterms):
        exps = {}
        for p in rng.sample(pairs, min(2, len(pairs))):
            exps[p] = rng.randint(-maxexp, maxexp)
        m = mono_from_exponents(exps)
        t[m] = t.get(m, 0) + Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return QPoly(t, ctx)


def sum_qpolys(items: Iterable[QPoly], ctx=None) -> QPoly:
    out = QPoly.zero(ctx)
    for x in items:
        out = out + x
    return out
