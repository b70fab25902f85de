from fractions import Fraction
from math import factorial

import sympy

from braidleg.algebra import BSeed, Element, H, TCoef, X, elem_mul, rational_value, specialize_gens
from braidleg.hj import HamTable, generic_seed, hj_evolve, verify_hj_braiding
from braidleg.qcoeff import Context
from braidleg.suites import HJ_SUPPORT, symbolic_hamiltonian

t, x = sympy.symbols("t x")


def series_oracle(expr, m):
    """b_2^(m) = m! * 2! * [t^m x^2] of a classical generating function S(x, t)."""
    c = sympy.series(expr, t, 0, m + 1).removeO().coeff(t, m).coeff(x, 2)
    return Fraction(int(sympy.numer(c)) * factorial(m) * 2, int(sympy.denom(c)))


def numeric_b2(series, m):
    return rational_value(specialize_gens(series.b(m, (2,)), {H(1, 1): 1}))


def harmonic(ctx):
    return HamTable(ctx).add((2,), (0,), 1).add((0,), (2,), 1)


def test_harmonic_oscillator_matches_tangent_series():
    series = hj_evolve({}, harmonic(Context.classical(1)), 5, 2)
    oracle = -x**2 / 2 * sympy.tan(t)
    for m in range(1, 6):
        assert numeric_b2(series, m) == series_oracle(oracle, m)
    assert [numeric_b2(series, m) for m in (1, 2, 3, 5)] == [-1, 0, -2, -16]


def test_symbolic_planck_constant_tracks_bracket_count():
    ctx = Context.classical(1)
    series = hj_evolve({}, harmonic(ctx), 3, 2)
    assert series.b(3, (2,)) == Element.gen(H(1, 1), ctx, 2) * -2


def test_free_particle_with_quadratic_seed():
    ctx = Context.classical(1)
    H_ = HamTable(ctx).add((0,), (2,), 1)
    series = hj_evolve({(2,): Element.scalar(1, ctx)}, H_, 4, 2)
    oracle = x**2 / (2 * (1 + t))
    for m in range(1, 5):
        assert numeric_b2(series, m) == series_oracle(oracle, m)


def test_constant_hamiltonian_only_shifts_the_constant():
    ctx = Context.symbolic(2)
    H_ = HamTable(ctx).add((0, 0), (0, 0))
    series = hj_evolve(None, H_, 2, 2)
    layer = {N: b for N, b in series.layer(1).items() if not b.is_zero()}
    assert layer == {(0, 0): -Element.gen(TCoef((0, 0), (0, 0)), ctx)}
    assert not any(not b.is_zero() for b in series.layer(2).values())


def test_zero_hamiltonian_freezes_the_seed():
    ctx = Context.symbolic(2)
    series = hj_evolve(None, HamTable(ctx), 3, 2)
    for m in (1, 2, 3):
        assert all(b.is_zero() for b in series.layer(m).values())


def test_seed_layer_braids_trivially():
    ctx = Context.side_conditions(2)
    assert verify_hj_braiding(hj_evolve(None, symbolic_hamiltonian(ctx, HJ_SUPPORT), 0, 3)) == []


def test_small_symbolic_series_braids_and_corruption_is_caught():
    ctx = Context.side_conditions(2)
    series = hj_evolve(None, symbolic_hamiltonian(ctx, HJ_SUPPORT), 2, 2)
    assert verify_hj_braiding(series) == []
    b = series.b(1, (2, 0))
    assert not b.is_zero()
    series.coeffs[(1, (2, 0))] = elem_mul(b, Element.gen(X(1), ctx))
    bad = verify_hj_braiding(series)
    assert bad and all(v["m"] == 1 and v["N"] == [2, 0] for v in bad)


def test_generic_seed_uses_seed_generators():
    ctx = Context.symbolic(2)
    seed = generic_seed(ctx, 1)
    assert seed[(1, 0)] == Element.gen(BSeed(0, (1, 0)), ctx)
    assert len(seed) == 3
