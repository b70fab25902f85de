"""Randomised and fixed verification suites behind ``braidleg verify``."""
from __future__ import annotations

import random
from fractions import Fraction

from .algebra import BraidWeight, Element, H, P, X, normal_form, swap_factor
from .bracket import bracket, verify_q_jacobi
from .epoche import (
    EpochElement,
    double_application,
    epoche_normal_form,
    random_tree,
    random_word,
)
from .hamsys import ham_evolve, verify_flow_braiding
from .hj import HamTable, hj_evolve, verify_hj_braiding
from .legendre import (
    LegendreContext,
    LegendreWork,
    cap_lists,
    classical_check,
    covariance_report,
)
from .qcoeff import Context
from .relations import check_relations

DEFAULT_SEED = 20240607

# Hamiltonian supports used by the braiding suites: (K, L) pairs at s = 2
HJ_SUPPORT = [((0, 0), (2, 0)), ((0, 0), (0, 2)), ((1, 0), (0, 1)), ((2, 0), (0, 0)), ((0, 1), (1, 0))]
FLOW_SUPPORT = HJ_SUPPORT + [((0, 0), (1, 1))]


def symbolic_hamiltonian(ctx: Context, support) -> HamTable:
    H_ = HamTable(ctx)
    for K, L in support:
        H_.add(K, L)
    return H_


def transposition_factor(w_left: BraidWeight, w_right: BraidWeight, ctx: Context):
    """Factor C with left*right = C*right*left, by moving letters one at a time.

    Each weight is expanded into single letters xi_k^(+1 or -1); a letter of
    the right word passing a letter of the left word picks up q[b,a]^(e*f)
    from xi_a^e xi_b^f = q[b,a]^(e*f) xi_b^f xi_a^e.
    """
    def letters(w):
        out = []
        for k, e in enumerate(w.xi(), start=1):
            out += [(k, 1 if e > 0 else -1)] * abs(e)
        return out

    word = [("L", a) for a in letters(w_left)] + [("R", b) for b in letters(w_right)]
    exps: dict = {}
    # bubble every R letter to the front, left to right
    changed = True
    while changed:
        changed = False
        for k in range(len(word) - 1):
            (t1, (a, e)), (t2, (b, f)) = word[k], word[k + 1]
            if t1 == "L" and t2 == "R":
                if a != b:
                    key = (min(a, b), max(a, b))
                    # q[b,a] = q[a,b]^-1
                    exps[key] = exps.get(key, 0) + (e * f if b < a else -e * f)
                word[k], word[k + 1] = word[k + 1], word[k]
                changed = True
    return ctx.reduce_mono(exps)


def random_weight(rng: random.Random, s: int, lo: int = -3, hi: int = 3) -> BraidWeight:
    return BraidWeight(tuple(rng.randint(lo, hi) for _ in range(s)),
                       tuple(rng.randint(lo, hi) for _ in range(s)))


def random_phase_monomial(rng: random.Random, ctx: Context, maxdeg: int) -> Element:
    """Word in p, x and h; phase letters are drawn three times as often as h."""
    s = ctx.s
    phase = [P(i) for i in range(1, s + 1)] + [X(a) for a in range(1, s + 1)]
    consts = [H(a, i) for a in range(1, s + 1) for i in range(1, s + 1)]
    word = []
    for _ in range(rng.randint(1, maxdeg)):
        word.append((rng.choice(consts if rng.random() < 0.25 else phase), 1))
    return normal_form(word, ctx)


def _report(suite, seed, passed, total, noun, extra=None) -> dict:
    out = {"suite": suite, "seed": seed, "passed": passed, "total": total,
           "message": f"{passed}/{total} {noun} hold", "ok": passed == total}
    if extra:
        out.update(extra)
    return out


def suite_swap(s: int = 3, seed: int = DEFAULT_SEED, n: int = 100) -> dict:
    rng = random.Random(seed)
    ctx = Context.symbolic(s)
    bad = []
    for _ in range(n):
        a, b = random_weight(rng, s), random_weight(rng, s)
        if swap_factor(a, b, ctx) != transposition_factor(a, b, ctx):
            bad.append([list(a.xi()), list(b.xi())])
    return _report("swap", seed, n - len(bad), n, "factors", {"failures": bad})


def suite_relations(s: int = 2, seed: int = DEFAULT_SEED, maxdeg: int = 2) -> dict:
    r = check_relations(Context.side_conditions(s), maxdeg)
    return _report("relations", seed, r["instances"] - len(r["failures"]), r["instances"], "relations",
                   {"families": r["families"], "failures": r["failures"]})


def suite_jacobi(s: int = 2, seed: int = DEFAULT_SEED, n: int = 20, maxdeg: int = 3) -> dict:
    rng = random.Random(seed)
    ctx = Context.symbolic(s)
    bad = []
    nontrivial = 0
    for _ in range(n):
        F, G, Hm = (random_phase_monomial(rng, ctx, maxdeg) for _ in range(3))
        nontrivial += not bracket(F, bracket(G, Hm)).is_zero()
        if not verify_q_jacobi(F, G, Hm).is_zero():
            bad.append([str(F), str(G), str(Hm)])
    return _report("jacobi", seed, n - len(bad), n, "identities",
                   {"failures": bad, "nontrivial": nontrivial})


def suite_hj(s: int = 2, seed: int = DEFAULT_SEED, Mmax: int = 2, D: int = 2) -> dict:
    if s != 2:
        raise ValueError("the hj suite is defined for s = 2")
    ctx = Context.side_conditions(s)
    series = hj_evolve(None, symbolic_hamiltonian(ctx, HJ_SUPPORT), Mmax, D)
    total = len(series.coeffs) * (2 * s + s * s)
    bad = verify_hj_braiding(series)
    return _report("hj", seed, total - len(bad), total, "commutation relations", {"violations": bad})


def suite_hamsys(s: int = 2, seed: int = DEFAULT_SEED, Mmax: int = 2, D: int = 1) -> dict:
    if s != 2:
        raise ValueError("the hamsys suite is defined for s = 2")
    ctx = Context.symbolic(s)
    Ham = symbolic_hamiltonian(ctx, FLOW_SUPPORT)
    flow = ham_evolve(None, Ham, Mmax, D)
    n = len(flow.entries())
    total = n * (n + 1) // 2 + n * (s * s + len(Ham.entries))
    bad = verify_flow_braiding(flow, Ham)
    return _report("hamsys", seed, total - len(bad), total, "commutation relations", {"violations": bad})


def random_jet_1d(rng: random.Random, R: int = 6) -> dict:
    b = {(2,): Fraction(rng.choice([1, -1, 2, -2, Fraction(1, 2)]))}
    for n in range(3, R + 1):
        b[(n,)] = Fraction(rng.randint(-3, 3))
    return b


def random_cubic_2d(rng: random.Random) -> dict:
    b = {(2, 0): Fraction(1), (0, 2): Fraction(1)}
    for N in ((3, 0), (2, 1), (1, 2), (0, 3)):
        b[N] = Fraction(rng.randint(-3, 3))
    return b


def suite_legendre(s: int = 1, seed: int = DEFAULT_SEED, n: int = 5) -> dict:
    rng = random.Random(seed)
    reports = []
    for _ in range(n):
        if s == 1:
            reports.append(classical_check(random_jet_1d(rng), 1, 6))
        else:
            reports.append(classical_check(random_cubic_2d(rng), 2, 4))
    work = LegendreWork(LegendreContext(Context.symbolic(s), 1))
    cov = covariance_report(work, cap_lists(s, 1))
    passed = sum(r["ok"] for r in reports) + (not cov)
    return _report("legendre", seed, passed, n + 1, "checks",
                   {"mismatches": [r["mismatches"] for r in reports if not r["ok"]], "covariance": cov})


def suite_epoche(s: int = 2, seed: int = DEFAULT_SEED, n: int = 100) -> dict:
    rng = random.Random(seed)
    ctx = Context.symbolic(s)
    ok = 0
    for _ in range(n):
        w = random_word(rng, s, 5, 3)
        epoche_normal_form(EpochElement.word(w, ctx), 6, 4)
        a, b = random_tree(rng, s, 3), random_tree(rng, s, 3)
        res, want = double_application(a, b, ctx)
        ok += res == want
    return _report("epoche", seed, ok, n, "double-application identities")


SUITES = {
    "swap": suite_swap,
    "relations": suite_relations,
    "jacobi": suite_jacobi,
    "hj": suite_hj,
    "hamsys": suite_hamsys,
    "legendre": suite_legendre,
    "epoche": suite_epoche,
}
