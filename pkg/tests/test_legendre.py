import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from braidleg.algebra import (
    ABar, ACap, BBar, BCap, Element, H, Kappa, X, gen_weight, specialize_all_q,
)
from braidleg.classical import (
    legendre_1d_inversion, legendre_1d_recursion, oracle_legendre_1d, oracle_legendre_multidim,
)
from braidleg.errors import CancellationError, DegenerateHessianError, ValidationError
from braidleg.legendre import (
    LegendreContext, LegendreWork, _value, cap_dictionary, cap_lists, classical_check,
    classical_values, compute_A_hash, compute_U, compute_V, covariance_report, f_maps,
    inverse_legendre_map, legendre_map, reduce_hessian_s1, roundtrip, sorted_lists,
)
from braidleg.qcoeff import Context
from braidleg.suites import random_cubic_2d, random_jet_1d

# -- classical oracles -------------------------------------------------------


def test_one_dimensional_examples():
    assert oracle_legendre_1d([1]) == [-1]
    assert oracle_legendre_1d([1, 1], 4) == [-1, 1, -3]
    assert oracle_legendre_1d([2, 0, 0]) == [Fraction(-1, 2), 0, 0]
    with pytest.raises(DegenerateHessianError):
        oracle_legendre_1d([0, 1])


b_tables = st.lists(st.integers(-3, 3), min_size=0, max_size=4).flatmap(
    lambda tail: st.sampled_from([1, -1, 2, -2, Fraction(1, 2)]).map(lambda b2: [b2] + tail))


@given(b_tables)
def test_one_dimensional_routes_agree(b):
    assert legendre_1d_recursion(b, 8) == legendre_1d_inversion(b, 8)


def test_multidimensional_examples():
    assert oracle_legendre_multidim({(2, 0): 1, (0, 2): 1}, 2, 4) == {(2, 0): -1, (0, 2): -1}
    assert oracle_legendre_multidim({(1, 1): 1}, 2, 4) == {(1, 1): -1}


def sympy_legendre(b, s, R):
    """Legendre transform of a polynomial jet through sympy fixed-point substitution."""
    xs, ps, eps = sympy.symbols(f"x1:{s + 1}"), sympy.symbols(f"p1:{s + 1}"), sympy.Symbol("eps")
    S = sum(sympy.Rational(v.numerator, v.denominator) * sympy.prod(x**n / sympy.factorial(n) for x, n in zip(xs, N))
            for N, v in b.items())
    grad = [sympy.diff(S, x) for x in xs]
    Hm = sympy.Matrix([[sympy.diff(g, x).subs({y: 0 for y in xs}) for x in xs] for g in grad])
    nonlin = [sympy.expand(g - sum(Hm[k, j] * xs[j] for j in range(s))) for k, g in enumerate(grad)]
    Hinv = Hm.inv()
    sol = [0] * s
    for _ in range(R):
        sub = {x: v for x, v in zip(xs, sol)}
        rhs = [eps * p - g.subs(sub, simultaneous=True) for p, g in zip(ps, nonlin)]
        sol = [sympy.expand(sum(Hinv[k, j] * rhs[j] for j in range(s))) for k in range(s)]
        sol = [sympy.series(v, eps, 0, R).removeO() if v.has(eps) else v for v in sol]
    St = S.subs({x: v for x, v in zip(xs, sol)}, simultaneous=True) - sum(eps * p * v for p, v in zip(ps, sol))
    St = sympy.expand(sympy.series(sympy.expand(St), eps, 0, R + 1).removeO().subs(eps, 1))
    poly = sympy.Poly(St, *ps)
    out = {}
    for mon, c in poly.terms():
        if sum(mon) >= 2:
            val = c * sympy.prod(sympy.factorial(n) for n in mon)
            out[tuple(mon)] = Fraction(int(sympy.numer(val)), int(sympy.denom(val)))
    return out


@pytest.mark.parametrize("seed", [1, 2])
def test_multidimensional_oracle_against_sympy(seed):
    b = {N: Fraction(v) for N, v in random_cubic_2d(random.Random(seed)).items()}
    want = {M: v for M, v in sympy_legendre(b, 2, 4).items() if v}
    got = {M: v for M, v in oracle_legendre_multidim(b, 2, 4).items() if v}
    assert got == want


# -- U, V and A-sharp --------------------------------------------------------

SYM2 = LegendreWork(LegendreContext(Context.symbolic(2), 2))


def test_u_base_case_is_the_planck_constant():
    for j in (1, 2):
        for w in (1, 2):
            assert compute_U((), j, w, SYM2) == Element.gen(H(w, j), SYM2.ctx)


def test_u_weight_at_generic_q():
    for k in (1, 2):
        for j in (1, 2):
            for w in (1, 2):
                want = (tuple(int(a == w) for a in (1, 2)), tuple(int(i == j) + int(i == k) for i in (1, 2)))
                assert compute_U((k,), j, w, SYM2).is_homogeneous(want)


def test_f_maps():
    assert len(f_maps(3)) == 6
    assert all(0 <= v <= j - 1 for f in f_maps(4) for j, v in enumerate(f, start=1))
    assert len(f_maps(1)) == 1


def test_first_a_sharp_is_a_product_of_two_v_blocks():
    work = LegendreWork(LegendreContext(Context.classical(2), 1, units=False))
    for l0, m0, l1 in sorted_lists(2, 3):
        want = sum((compute_V((m1,), l0, m0, work) * compute_V((), l1, m1, work) for m1 in (1, 2)),
                   Element.zero(work.ctx))
        assert compute_A_hash((l0, m0, l1), work) == want


def scalar_work(b, R):
    vals = classical_values({(n,): v for n, v in enumerate(b, start=2)}, 1, R)
    return LegendreWork(LegendreContext(Context.classical(1), R - 2, "classical", vals)), vals


def test_scalar_shadow_first_coefficient():
    work, _ = scalar_work([1, 1], 3)
    a = dict(zip([(2,), (3,)], oracle_legendre_1d([1, 1], 3)))
    # A-sharp carries one factor -1 per index against the classical a_3 = 1
    assert _value(compute_A_hash((1, 1, 1), work)) == cap_dictionary(a, 1, (1, 1, 1)) == -1
    assert -_value(compute_V((), 1, 1, work)) == cap_dictionary(a, 1, (1, 1)) == a[(2,)] == -1


def test_legendre_map_on_generators():
    ctx = SYM2.ctx
    for g in (H(1, 2), ABar(1, 2), BBar(2, 2)):
        assert legendre_map(Element.gen(g, ctx), SYM2) == Element.gen(g, ctx)
    with pytest.raises(ValidationError):
        legendre_map(Element.gen(BCap((1, 1, 1)), ctx), SYM2)
    with pytest.raises(ValidationError):
        legendre_map(Element.gen(X(1), ctx), SYM2)


def test_legendre_map_in_the_scalar_shadow():
    work, _ = scalar_work([1, 1, 1], 4)
    a = oracle_legendre_1d([1, 1, 1])
    img = legendre_map(Element.gen(ACap((1, 1, 1)), work.ctx), work)
    assert _value(img) == -a[1]


def test_inverse_map_in_the_scalar_shadow():
    b = [1, 1, -2]
    a = oracle_legendre_1d(b)
    ctx = Context.classical(1)
    vals = classical_values({(n,): v for n, v in enumerate(b, start=2)}, 1, 4)
    ivals = {g: v for g, v in vals.items() if g.tag in ("H", "ABar", "BBar")}
    ivals[ACap((1, 1, 1))] = -a[1]
    ivals[ACap((1, 1, 1, 1))] = a[2]
    inv = LegendreWork(LegendreContext(ctx, 2, "classical", ivals), mirror=True)
    assert _value(inverse_legendre_map(Element.gen(BCap((1, 1, 1)), ctx), inv)) == b[1]
    assert _value(inverse_legendre_map(Element.gen(BCap((1, 1, 1, 1)), ctx), inv)) == b[2]


def test_inverse_map_fixes_constants_and_is_covariant():
    inv = LegendreWork(LegendreContext(Context.symbolic(1), 1), mirror=True)
    ctx = inv.ctx
    for g in (H(1, 1), BBar(1, 1)):
        assert inverse_legendre_map(Element.gen(g, ctx), inv) == Element.gen(g, ctx)
    assert covariance_report(inv, cap_lists(1, 1)) == []
    img = inverse_legendre_map(Element.gen(BCap((1, 1, 1)), ctx), inv)
    assert img.is_homogeneous(gen_weight(BCap((1, 1, 1)), 1))


def test_forward_map_is_covariant_at_generic_q():
    work = LegendreWork(LegendreContext(Context.symbolic(2), 1))
    assert covariance_report(work, cap_lists(2, 1)) == []


def test_surviving_units_are_reported():
    with pytest.raises(CancellationError):
        SYM2._stripped(Element.gen(Kappa(1), SYM2.ctx), "probe")


def test_context_guards():
    with pytest.raises(ValidationError):
        LegendreContext(Context.symbolic(1), values={H(1, 1): 1})
    with pytest.raises(ValidationError):
        LegendreContext(Context.symbolic(1), units=False)
    with pytest.raises(ValidationError):
        LegendreContext(Context.symbolic(1), mode="numeric")


@pytest.mark.parametrize("s, r_max", [(1, 3), (2, 1)])
def test_unit_free_recursions_match_generic_q_at_one(s, r_max):
    plain = LegendreWork(LegendreContext(Context.classical(s), r_max, units=False))
    units = LegendreWork(LegendreContext(Context.classical(s), r_max))
    generic = LegendreWork(LegendreContext(Context.symbolic(s), r_max))
    for ls in cap_lists(s, r_max):
        A = plain.compute_A_hash(ls)
        assert units.compute_A_hash(ls) == A
        assert specialize_all_q(generic.compute_A_hash(ls)) == A


# -- classical dictionary ----------------------------------------------------


@pytest.mark.parametrize("b", [[1, 0, 0, 0], [1, 1, 0, 0], [-2, 3, 1, -1]])
def test_classical_check_one_dimensional(b):
    rep = classical_check({(n,): v for n, v in enumerate(b, start=2)}, 1, 5)
    assert rep["ok"], rep["mismatches"]


def test_classical_check_two_dimensional():
    rep = classical_check(random_cubic_2d(random.Random(4)), 2, 4)
    assert rep["ok"], rep["mismatches"]


@given(st.integers(0, 10_000))
def test_classical_check_random_jets(seed):
    assert classical_check(random_jet_1d(random.Random(seed), 5), 1, 5)["ok"]


def test_singular_hessian_is_reported():
    with pytest.raises(DegenerateHessianError):
        classical_values({(3, 0): 1, (2, 0): 1}, 2, 3)


# -- roundtrip ---------------------------------------------------------------


@pytest.mark.parametrize("ctx", [Context.classical(1), Context.symbolic(1)])
def test_roundtrip_one_dimensional(ctx):
    for ls, e in roundtrip(cap_lists(1, 2), LegendreContext(ctx, 2)).items():
        assert reduce_hessian_s1(e) == Element.gen(ACap(ls), ctx)
