from fractions import Fraction
from math import factorial

import sympy

from braidleg.algebra import Element, H, X, elem_mul, rational_value, specialize_gens
from braidleg.hamsys import ham_evolve, verify_flow_braiding
from braidleg.hj import HamTable
from braidleg.qcoeff import Context
from braidleg.suites import FLOW_SUPPORT, symbolic_hamiltonian

t, y = sympy.symbols("t y")


def picard(rhs_x, rhs_p, order):
    """Taylor polynomials of x(t), p(t) with x(0) = p(0) = y by Picard iteration."""
    xs, ps = y, y
    for _ in range(order + 1):
        xs, ps = (y + sympy.integrate(rhs_x(xs, ps), (t, 0, t)),
                  y + sympy.integrate(rhs_p(xs, ps), (t, 0, t)))
        xs = sympy.expand(xs).series(t, 0, order + 1).removeO()
        ps = sympy.expand(ps).series(t, 0, order + 1).removeO()
    return sympy.expand(xs), sympy.expand(ps)


def normalised(poly, n, M):
    c = sympy.Poly(poly, t, y).coeff_monomial(t**n * y**M)
    return Fraction(int(sympy.numer(c)), int(sympy.denom(c))) * factorial(n) * factorial(M)


def numeric(e):
    return rational_value(specialize_gens(e, {H(1, 1): 1}))


def classical_flow(H_, order, D):
    seeds = {"X": {(1, (1,)): Element.scalar(1, H_.ctx)}, "P": {(1, (1,)): Element.scalar(1, H_.ctx)}}
    return ham_evolve(seeds, H_, order, D)


def test_harmonic_oscillator():
    ctx = Context.classical(1)
    flow = classical_flow(HamTable(ctx).add((2,), (0,), 1).add((0,), (2,), 1), 5, 1)
    want_x = sympy.expand(sympy.series(y * (sympy.cos(t) + sympy.sin(t)), t, 0, 6).removeO())
    want_p = sympy.expand(sympy.series(y * (sympy.cos(t) - sympy.sin(t)), t, 0, 6).removeO())
    for n in range(6):
        assert numeric(flow.xcoeffs.get((1, n, (1,)), Element.zero(ctx))) == normalised(want_x, n, 1)
        assert numeric(flow.pcoeffs.get((1, n, (1,)), Element.zero(ctx))) == normalised(want_p, n, 1)
    assert [numeric(flow.xcoeffs[(1, n, (1,))]) for n in (1, 2)] == [1, -1]
    assert [numeric(flow.pcoeffs[(1, n, (1,))]) for n in (1, 2)] == [-1, -1]


def test_cubic_potential_against_picard_iteration():
    ctx = Context.classical(1)
    # H = p^2/2 + x^3/6: x' = p, p' = -x^2/2
    flow = classical_flow(HamTable(ctx).add((0,), (2,), 1).add((3,), (0,), 1), 4, 2)
    want_x, want_p = picard(lambda x, p: p, lambda x, p: -x**2 / 2, 4)
    for n in range(5):
        for M in (1, 2):
            got_x = flow.xcoeffs.get((1, n, (M,)), Element.zero(ctx))
            got_p = flow.pcoeffs.get((1, n, (M,)), Element.zero(ctx))
            assert numeric(got_x) == normalised(want_x, n, M)
            assert numeric(got_p) == normalised(want_p, n, M)


def test_zero_hamiltonian_is_static():
    flow = ham_evolve(None, HamTable(Context.symbolic(2)), 3, 1)
    assert all(n == 0 or e.is_zero() for (_, n, _), e in list(flow.pcoeffs.items()) + list(flow.xcoeffs.items()))


def test_seed_only_flow_braids():
    ctx = Context.symbolic(2)
    assert verify_flow_braiding(ham_evolve(None, HamTable(ctx), 0, 1)) == []


def test_symbolic_flow_braids_and_corruption_is_caught():
    ctx = Context.symbolic(2)
    H_ = symbolic_hamiltonian(ctx, FLOW_SUPPORT)
    flow = ham_evolve(None, H_, 1, 1)
    assert verify_flow_braiding(flow, H_) == []
    key = (1, 1, (0, 0))
    flow.pcoeffs[key] = elem_mul(flow.pcoeffs[key], Element.gen(X(1), ctx))
    assert verify_flow_braiding(flow, H_)
