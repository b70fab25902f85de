"""Bracketing algebra on leaf-labelled planar binary trees.

Generators hbar_T are indexed by trees whose leaves carry phase-space labels;
eta is central.  Out-of-order neighbours are rewritten by

    hbar_A hbar_B -> q_{B,A} hbar_B hbar_A + eta hbar_{(B,A)}      (A > B)

with q_{B,A} the product of q over all pairs (leaf of B, leaf of A).
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import DimensionError, ParseError, ValidationError
from .qcoeff import Context, QPoly, format_qpoly

THERMO = {"Tb": ("pb", 1), "pb": ("pb", 2), "Sb": ("xb", 1), "Vb": ("xb", 2)}
_THERMO_NAME = {v: k for k, v in THERMO.items()}
_KIND_RANK = {"xb": 0, "pb": 1}


@dataclass(frozen=True)
class Leaf:
    kind: str  # "xb" or "pb"
    index: int

    def __post_init__(self):
        if self.kind not in _KIND_RANK or self.index < 1:
            raise ValidationError(f"bad leaf label {self.kind}{self.index}")

    @property
    def leaves(self) -> int:
        return 1

    @cached_property
    def key(self) -> tuple:
        return (1, (0, _KIND_RANK[self.kind], self.index))

    def labels(self) -> list:
        return [self]


@dataclass(frozen=True)
class Node:
    left: "Tree"
    right: "Tree"

    @cached_property
    def leaves(self) -> int:
        return self.left.leaves + self.right.leaves

    @cached_property
    def key(self) -> tuple:
        return (self.leaves, (1, self.left.key, self.right.key))

    def labels(self) -> list:
        return self.left.labels() + self.right.labels()


Tree = Union[Leaf, Node]


def tree_concat(left: Tree, right: Tree) -> Tree:
    return Node(left, right)


def xi_index(leaf: Leaf, s: int) -> int:
    if leaf.index > s:
        raise DimensionError(f"leaf {leaf.kind}{leaf.index} needs s >= {leaf.index}")
    return leaf.index if leaf.kind == "pb" else s + leaf.index


def tree_q(left: Tree, right: Tree, ctx: Context) -> QPoly:
    """q_{left,right}: product of q over (leaf of left, leaf of right)."""
    exps: dict = {}
    s = ctx.s
    for a in left.labels():
        for b in right.labels():
            i, j = xi_index(a, s), xi_index(b, s)
            if i == j:
                continue
            key = (min(i, j), max(i, j))
            exps[key] = exps.get(key, 0) + (1 if i < j else -1)
    return ctx.reduce_mono(exps)


def format_tree(t: Tree, thermo: bool = False) -> str:
    if isinstance(t, Leaf):
        if thermo:
            return _THERMO_NAME[(t.kind, t.index)]
        return f"{t.kind}{t.index}"
    return f"({format_tree(t.left, thermo)},{format_tree(t.right, thermo)})"


_LEAF = re.compile(r"(xb|pb)(\d+)|(Tb|Sb|Vb|pb)")


def parse_tree(text: str, thermo: bool = False) -> Tree:
    text = text.replace(" ", "")
    pos = 0

    def parse() -> Tree:
        nonlocal pos
        if pos < len(text) and text[pos] == "(":
            pos += 1
            left = parse()
            if pos >= len(text) or text[pos] != ",":
                raise ParseError(f"expected ',' at {pos} in tree {text!r}")
            pos += 1
            right = parse()
            if pos >= len(text) or text[pos] != ")":
                raise ParseError(f"expected ')' at {pos} in tree {text!r}")
            pos += 1
            return Node(left, right)
        if thermo:
            m = re.compile(r"Tb|Sb|Vb|pb").match(text, pos)
            if not m:
                raise ParseError(f"bad thermodynamic leaf at {pos} in {text!r}")
            pos = m.end()
            return Leaf(*THERMO[m.group(0)])
        m = re.compile(r"(xb|pb)(\d+)").match(text, pos)
        if not m:
            raise ParseError(f"bad leaf at {pos} in {text!r}")
        pos = m.end()
        return Leaf(m.group(1), int(m.group(2)))

    t = parse()
    if pos != len(text):
        raise ParseError(f"trailing text in tree {text!r}")
    return t


# -- elements -------------------------------------------------------------

Word = tuple  # (eta degree, tuple of trees)


class EpochElement:
    """Sum of words in the hbar generators, each with an eta power."""

    __slots__ = ("terms", "ctx")

    def __init__(self, terms: Mapping[Word, QPoly] | None, ctx: Context):
        self.ctx = ctx
        self.terms = {}
        for w, c in (terms or {}).items():
            c = QPoly.coerce(c, ctx)
            if not c.is_zero():
                self.terms[w] = c

    @classmethod
    def word(cls, trees: Iterable[Tree], ctx: Context, eta: int = 0, coeff=1) -> "EpochElement":
        return cls({(eta, tuple(trees)): coeff}, ctx)

    @classmethod
    def gen(cls, t: Tree, ctx: Context) -> "EpochElement":
        return cls.word((t,), ctx)

    def __add__(self, other: "EpochElement") -> "EpochElement":
        t = dict(self.terms)
        for w, c in other.terms.items():
            v = t.get(w, QPoly.zero(self.ctx)) + c
            if v.is_zero():
                t.pop(w, None)
            else:
                t[w] = v
        return EpochElement(t, self.ctx)

    def __neg__(self):
        return EpochElement({w: -c for w, c in self.terms.items()}, self.ctx)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, EpochElement):
            out: dict = {}
            for (e1, w1), c1 in self.terms.items():
                for (e2, w2), c2 in other.terms.items():
                    k = (e1 + e2, w1 + w2)
                    out[k] = out.get(k, QPoly.zero(self.ctx)) + c1 * c2
            return EpochElement(out, self.ctx)
        c = QPoly.coerce(other, self.ctx)
        return EpochElement({w: v * c for w, v in self.terms.items()}, self.ctx)

    def __eq__(self, other):
        return isinstance(other, EpochElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def eta_degrees(self) -> set:
        return {e for e, _ in self.terms}

    def __repr__(self):
        return f"EpochElement({format_epoch(self)})"


def _out_of_order(word) -> list:
    return [k for k in range(len(word) - 1) if word[k].key > word[k + 1].key]


def epoche_normal_form(el: EpochElement, leafcap: int, etacap: int,
                       rng: random.Random | None = None, max_steps: int = 1_000_000) -> EpochElement:
    """Sort every word by the tree order, emitting eta terms from the relation.

    Terms whose eta degree exceeds ``etacap`` or containing a tree with more
    than ``leafcap`` leaves are dropped.  ``rng`` picks a random out-of-order
    pair at each step instead of the leftmost one.
    """
    if leafcap < 1 or etacap < 0:
        raise ValidationError("leafcap must be >= 1 and etacap >= 0")
    ctx = el.ctx

    def keep(eta, word):
        return eta <= etacap and all(t.leaves <= leafcap for t in word)

    todo = [(w, c) for w, c in el.terms.items() if keep(*w)]
    out: dict = {}
    steps = 0
    while todo:
        (eta, word), c = todo.pop()
        bad = _out_of_order(word)
        if not bad:
            k = (eta, word)
            v = out.get(k, QPoly.zero(ctx)) + c
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
            continue
        steps += 1
        if steps > max_steps:
            raise ValidationError("normal form exceeded the step budget")
        k = rng.choice(bad) if rng is not None else bad[0]
        big, small = word[k], word[k + 1]
        swapped = word[:k] + (small, big) + word[k + 2:]
        todo.append(((eta, swapped), c * tree_q(small, big, ctx)))
        joined = word[:k] + (tree_concat(small, big),) + word[k + 2:]
        if keep(eta + 1, joined):
            todo.append(((eta + 1, joined), c))
    return EpochElement(out, ctx)


def rewrite_once(big: Tree, small: Tree, ctx: Context) -> EpochElement:
    """hbar_big hbar_small expressed through the relation (no ordering check)."""
    return (EpochElement.word((small, big), ctx, coeff=tree_q(small, big, ctx))
            + EpochElement.word((tree_concat(small, big),), ctx, eta=1))


def double_application(a: Tree, b: Tree, ctx: Context) -> tuple:
    """Rewrite hbar_a hbar_b, then rewrite the swapped word back.

    Returns (result, expected) where expected is the original word plus
    eta (q_{b,a} hbar_{(a,b)} + hbar_{(b,a)}); the two must be equal.
    """
    first = rewrite_once(a, b, ctx)
    c = first.terms[(0, (b, a))]
    back = rewrite_once(b, a, ctx) * c
    result = back + EpochElement({k: v for k, v in first.terms.items() if k != (0, (b, a))}, ctx)
    expected = (EpochElement.word((a, b), ctx)
                + EpochElement.word((tree_concat(a, b),), ctx, eta=1, coeff=tree_q(b, a, ctx))
                + EpochElement.word((tree_concat(b, a),), ctx, eta=1))
    return result, expected


def random_tree(rng: random.Random, s: int, max_leaves: int) -> Tree:
    n = rng.randint(1, max_leaves)

    def build(n):
        if n == 1:
            return Leaf(rng.choice(("xb", "pb")), rng.randint(1, s))
        k = rng.randint(1, n - 1)
        return Node(build(k), build(n - k))

    return build(n)


def random_word(rng: random.Random, s: int, max_len: int, max_leaves: int) -> tuple:
    return tuple(random_tree(rng, s, max_leaves) for _ in range(rng.randint(1, max_len)))


def confluence_report(ctx: Context, words: Iterable[tuple], leafcap: int, etacap: int,
                      schedules: int = 3, seed: int = 0) -> dict:
    """Compare the leftmost-first normal form with randomly scheduled ones."""
    rng = random.Random(seed)
    total = agree = 0
    for w in words:
        el = EpochElement.word(w, ctx)
        ref = epoche_normal_form(el, leafcap, etacap)
        for _ in range(schedules):
            total += 1
            agree += epoche_normal_form(el, leafcap, etacap, rng=rng) == ref
    return {"runs": total, "agree": agree}


# -- text -----------------------------------------------------------------

def format_epoch(el: EpochElement, thermo: bool = False) -> str:
    if el.is_zero():
        return "0"
    parts = []
    for (eta, word), c in sorted(el.terms.items(), key=lambda kv: (kv[0][0], [t.key for t in kv[0][1]])):
        factors = []
        if eta:
            factors.append("eta" if eta == 1 else f"eta^{eta}")
        factors += [f"hbar[{format_tree(t, thermo)}]" for t in word]
        coef = format_qpoly(c)
        if not factors:
            body = coef
        elif coef == "1":
            body = "*".join(factors)
        elif coef == "-1":
            body = "-" + "*".join(factors)
        elif len(c) > 1:
            body = f"({coef})*" + "*".join(factors)
        else:
            body = f"{coef}*" + "*".join(factors)
        parts.append(body)
    text = parts[0]
    for p in parts[1:]:
        text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return text


_FACTOR = re.compile(r"\s*(?:(hbar)\[|(eta)|q\[(\d+),(\d+)\]|(\d+(?:/\d+)?))")


def parse_epoch(text: str, ctx: Context, thermo: bool = False) -> EpochElement:
    """Parse sums of products of rationals, q[i,j], eta and hbar[tree], with ^int powers."""
    src = text.strip()
    pos = 0
    out = EpochElement({}, ctx)

    def power():
        nonlocal pos
        m = re.compile(r"\s*\^\s*(-?\d+)").match(src, pos)
        if m:
            pos = m.end()
            return int(m.group(1))
        return 1

    first = True
    while pos < len(src):
        m = re.compile(r"\s*([+-])?\s*").match(src, pos)
        sign = -1 if m.group(1) == "-" else 1
        if not first and not m.group(1):
            raise ParseError(f"expected + or - at {pos} in {text!r}")
        pos = m.end()
        first = False
        term = EpochElement.word((), ctx, coeff=sign)
        while True:
            if src.startswith("(", pos):
                raise ParseError("parenthesised coefficients are not supported")
            m = _FACTOR.match(src, pos)
            if not m:
                raise ParseError(f"unexpected text at {pos} in {text!r}")
            pos = m.end()
            if m.group(1):
                depth, start = 1, pos
                while pos < len(src) and depth:
                    depth += {"[": 1, "]": -1}.get(src[pos], 0)
                    pos += 1
                if depth:
                    raise ParseError("unbalanced brackets")
                t = parse_tree(src[start:pos - 1], thermo)
                e = power()
                if e < 0:
                    raise ParseError("hbar powers must be non-negative")
                term = term * EpochElement.word((t,) * e, ctx)
            elif m.group(2):
                e = power()
                if e < 0:
                    raise ParseError("eta powers must be non-negative")
                term = term * EpochElement.word((), ctx, eta=e)
            elif m.group(3):
                term = term * (ctx.q(int(m.group(3)), int(m.group(4))) ** power())
            else:
                term = term * (Fraction(m.group(5)) ** power())
            m2 = re.compile(r"\s*\*").match(src, pos)
            if not m2:
                break
            pos = m2.end()
        out = out + term
        pos = re.compile(r"\s*").match(src, pos).end()
    return out
