from braidleg.algebra import BraidWeight, Element, H, TCoef, X, elem_mul, gen_weight, swap_factor, unit
from braidleg.qcoeff import Context, QPoly
from braidleg.relations import catalogue, check_relations, closed_Q

CTX = Context.side_conditions(2)


def test_every_catalogued_rule_holds():
    rep = check_relations(CTX, 2)
    assert rep["failures"] == []
    assert rep["instances"] > 2000
    assert {"seed/p", "ham/x", "ham/h", "flow/XT"} <= set(rep["families"])


def test_closed_form_matches_swap_factor_under_side_conditions():
    s = 2
    for r in catalogue(CTX, 1):
        wl, wr = gen_weight(r.left, s), gen_weight(r.right, s)
        assert closed_Q(wr, wl, CTX) == swap_factor(wl, wr, CTX)


def _braids(left, right, factor):
    a, b = Element.gen(left, CTX), Element.gen(right, CTX)
    return elem_mul(a, b) == elem_mul(b, a) * factor


def test_coordinate_rule_needs_the_negative_exponent():
    s = 2
    T = TCoef((1, 0), (0, 1))
    good = CTX.q(2, s + 1) ** -1
    flipped = CTX.q(2, s + 1)
    assert _braids(X(1), T, good)
    assert not _braids(X(1), T, flipped)


def flipped_Q(right, left, ctx):
    """The closed form with the sign of the first product reversed."""
    s = ctx.s
    M, N = right
    K, L = left
    out = QPoly.one(ctx)
    for i in range(1, s + 1):
        for a in range(1, s + 1):
            if N[i - 1] * K[a - 1]:
                out = out * ctx.q(i, s + a) ** (-N[i - 1] * K[a - 1])
            if L[i - 1] * M[a - 1]:
                out = out * ctx.q(s + a, i) ** (L[i - 1] * M[a - 1])
    return out


def test_closed_form_sign_matters():
    s = 2
    T = TCoef((0, 0), (1, 0))
    wT = gen_weight(T, s)
    left = BraidWeight(unit(s, 1), unit(s, 1))
    assert _braids(H(1, 1), T, closed_Q(wT, left, CTX))
    assert not _braids(H(1, 1), T, flipped_Q(wT, left, CTX))
