import random

from hypothesis import given, strategies as st

from braidleg.epoche import (
    EpochElement, Leaf, Node, _out_of_order, confluence_report, double_application,
    epoche_normal_form, format_epoch, format_tree, parse_epoch, parse_tree, random_tree,
    random_word, tree_concat, tree_q,
)
from braidleg.qcoeff import Context

CTX = Context.symbolic(2)
seeds = st.integers(0, 2**32)


def test_concatenation():
    x1, p1 = Leaf("xb", 1), Leaf("pb", 1)
    assert tree_concat(x1, p1) == Node(x1, p1)
    a, b, c = x1, p1, Leaf("xb", 2)
    assert tree_concat(tree_concat(a, b), c) != tree_concat(a, tree_concat(b, c))


@given(seeds)
def test_leaf_counts_add(seed):
    rng = random.Random(seed)
    a, b = random_tree(rng, 2, 4), random_tree(rng, 2, 4)
    assert tree_concat(a, b).leaves == a.leaves + b.leaves
    assert tree_q(a, b, CTX) * tree_q(b, a, CTX) == 1


def test_ordered_word_is_unchanged():
    w = (Leaf("xb", 1), Leaf("pb", 1), Node(Leaf("xb", 1), Leaf("pb", 2)))
    el = EpochElement.word(w, CTX)
    assert epoche_normal_form(el, 6, 4) == el


def test_single_rewrite():
    x1, p1 = Leaf("xb", 1), Leaf("pb", 1)
    got = epoche_normal_form(EpochElement.word((p1, x1), CTX), 6, 4)
    # x-bar_1 sits at position s+1 = 3 in the phase-space ordering, p-bar_1 at 1
    want = EpochElement.word((x1, p1), CTX, coeff=CTX.q(3, 1)) + EpochElement.word((Node(x1, p1),), CTX, eta=1)
    assert got == want
    assert epoche_normal_form(EpochElement.word((p1, x1), CTX), 6, 0) == EpochElement.word((x1, p1), CTX, coeff=CTX.q(3, 1))


@given(seeds)
def test_double_application(seed):
    rng = random.Random(seed)
    res, want = double_application(random_tree(rng, 2, 3), random_tree(rng, 2, 3), CTX)
    assert res == want


@given(seeds)
def test_normal_form_terminates_within_caps(seed):
    rng = random.Random(seed)
    w = random_word(rng, 2, 5, 3)
    nf = epoche_normal_form(EpochElement.word(w, CTX), 6, 4)
    for eta, word in nf.terms:
        assert not _out_of_order(word)
        assert 0 <= eta <= 4
        assert all(t.leaves <= 6 for t in word)
    # the eta-free part keeps every tree; each eta step merges two of them
    assert all(len(word) + eta == len(w) for eta, word in nf.terms)


@given(seeds)
def test_eta_degree_adds_under_products(seed):
    rng = random.Random(seed)
    a = EpochElement.word(random_word(rng, 2, 2, 2), CTX, eta=rng.randint(0, 2))
    b = EpochElement.word(random_word(rng, 2, 2, 2), CTX, eta=rng.randint(0, 2))
    (ea,), (eb,) = a.eta_degrees(), b.eta_degrees()
    assert (a * b).eta_degrees() == {ea + eb}
    assert min(epoche_normal_form(a * b, 8, 8).eta_degrees() or {ea + eb}) >= ea + eb


@given(seeds)
def test_classical_graded_limit_commutes(seed):
    rng = random.Random(seed)
    ctx = Context.classical(2)
    u, v = random_word(rng, 2, 3, 3), random_word(rng, 2, 3, 3)
    uv = epoche_normal_form(EpochElement.word(u + v, ctx), 6, 0)
    vu = epoche_normal_form(EpochElement.word(v + u, ctx), 6, 0)
    assert uv == vu


def test_confluence_is_reported():
    rng = random.Random(0)
    words = [random_word(rng, 2, 4, 2) for _ in range(10)]
    rep = confluence_report(CTX, words, 6, 4, schedules=2)
    assert rep["runs"] == 20 and 0 <= rep["agree"] <= 20


@given(seeds)
def test_text_roundtrip(seed):
    rng = random.Random(seed)
    el = epoche_normal_form(EpochElement.word(random_word(rng, 2, 3, 3), CTX), 6, 2)
    assert parse_epoch(format_epoch(el), CTX) == el
    t = random_tree(rng, 2, 4)
    assert parse_tree(format_tree(t)) == t
    assert parse_tree(format_tree(t, thermo=True), thermo=True) == t


def test_thermodynamic_labels():
    assert parse_tree("(Tb,Sb)", thermo=True) == Node(Leaf("pb", 1), Leaf("xb", 1))
    assert parse_tree("(pb,Vb)", thermo=True) == Node(Leaf("pb", 2), Leaf("xb", 2))
