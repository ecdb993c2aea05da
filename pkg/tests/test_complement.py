import pytest

from giventhat import ltl
from giventhat.automaton import Edge, Tgba, accepts_lasso, is_empty, product, universal_automaton
from giventhat.complement import complement, complement_generic, complement_via_formula, degeneralize
from giventhat.limits import CapExceeded
from giventhat.randgen import make_rng, random_automaton, random_formula
from giventhat.translate import translate

from conftest import NEG_PHI, agree_on, lassos


def test_via_formula_duality(mgr):
    c = complement_via_formula("F a", mgr)
    assert agree_on(c, "G !a", lassos(1, 200)) == []
    assert is_empty(complement_via_formula("true", mgr))


def test_via_formula_running(mgr):
    neg_phi = translate(NEG_PHI, mgr)
    assert is_empty(product(neg_phi, complement_via_formula(NEG_PHI, mgr)))


def test_generic_universal_is_empty(mgr):
    assert is_empty(complement_generic(universal_automaton(mgr)))


def test_generic_eventually(mgr):
    c = complement_generic(translate("F a", mgr))
    assert agree_on(c, "G !a", lassos(2, 300)) == []


def test_generic_matches_formula_complement():
    rng = make_rng(31)
    words = lassos(32, 60)
    done = 0
    while done < 100:
        f = random_formula(rng, depth=3)
        a = translate(f)
        if a.num_states > 3:
            continue
        c = complement_generic(a, cap=20000)
        ref = complement_via_formula(f, a.mgr)
        for w in words:
            assert accepts_lasso(c, w) == accepts_lasso(ref, w), (f, w)
        done += 1


def test_generic_random_automata(mgr):
    rng = make_rng(33)
    words = lassos(34, 40)
    for _ in range(40):
        a = random_automaton(rng, mgr, states=rng.randint(1, 3), marks=rng.randint(0, 2))
        c = complement_generic(a, cap=20000)
        assert is_empty(product(a, c))
        for w in words:
            assert accepts_lasso(c, w) != accepts_lasso(a, w)


def test_cap_exceeded(mgr):
    a = translate("G F a & G F b & G(c -> X X !a)", mgr)
    with pytest.raises(CapExceeded):
        complement_generic(a, cap=5)


def test_complement_dispatch(mgr):
    a = translate("G a", mgr)
    via = complement(a, ltl.parse("G a"))
    gen = complement(a)
    for w in lassos(3, 100):
        assert accepts_lasso(via, w) == accepts_lasso(gen, w)


def test_degeneralize_single_mark_unchanged(mgr):
    a = translate("G F a", mgr)
    assert a.num_marks == 1
    d = degeneralize(a)
    assert (d.num_states, len(d.edges)) == (a.num_states, len(a.edges))


def test_degeneralize_running(running):
    a, _ = running
    assert a.num_marks == 2
    d = degeneralize(a)
    assert d.num_marks == 1
    assert d.num_states <= 9
    for w in lassos(4, 300):
        assert accepts_lasso(d, w) == accepts_lasso(a, w)


def test_degeneralize_zero_marks(mgr):
    a = Tgba(mgr, ("a",), 1, 0, 0, [Edge(0, mgr.var("a"), 0, 0)])
    d = degeneralize(a)
    assert d.num_marks == 1
    assert all(e.marks == 1 for e in d.edges)
