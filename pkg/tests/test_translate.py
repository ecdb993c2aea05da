import pytest

from giventhat import ltl
from giventhat.automaton import Edge, Tgba, accepts_lasso, is_universal_syntactic, same_structure
from giventhat.limits import ResourceExceeded
from giventhat.randgen import make_rng, random_formula
from giventhat.translate import eventualities, simplify, translate, translate_simplified

from conftest import NEG_PHI, agree_on, equivalent_to_formula, lassos


def test_running_negated_property(mgr):
    a = simplify(translate(NEG_PHI, mgr))
    assert a.num_marks == 2
    assert a.num_states <= 4
    assert equivalent_to_formula(a, NEG_PHI)


def test_true_is_universal(mgr):
    a = translate("true", mgr)
    assert a.num_states == 1
    assert is_universal_syntactic(a)


def test_false_has_no_edges(mgr):
    assert simplify(translate("false", mgr)).edges == ()


def test_eventually(mgr):
    a = simplify(translate("F a", mgr))
    assert a.num_states == 2
    assert agree_on(a, "F a", lassos(1, 300)) == []


def test_eventualities_get_one_mark_each():
    f = ltl.parse("G F a & G F b & (c U a)")
    assert len(eventualities(f)) == 3


@pytest.mark.parametrize("text", ["G F a & G F b", "a U (b U c)", "G(a -> F b)",
                                  "F G a | G F b", "(a R b) U c", "X X X a", "G(a <-> X !a)"])
def test_small_formulas(text, mgr):
    a = translate_simplified(text, mgr)
    assert agree_on(a, text, lassos(2, 300)) == []


def test_random_formulas_against_evaluator():
    rng = make_rng(17)
    words = lassos(18, 40)
    for _ in range(300):
        f = random_formula(rng, depth=4)
        a = translate(f)
        assert agree_on(a, f, words) == [], f


def test_simplify_preserves_language():
    rng = make_rng(21)
    words = lassos(22, 30)
    for _ in range(500):
        f = random_formula(rng, depth=4)
        raw = translate(f)
        small = simplify(raw)
        assert small.num_states <= raw.num_states
        for w in words:
            assert accepts_lasso(small, w) == accepts_lasso(raw, w), (f, w)


def test_simplify_is_idempotent_on_universal(mgr):
    u = translate("true", mgr)
    assert same_structure(simplify(u), u)
    rng = make_rng(4)
    for _ in range(50):
        once = simplify(translate(random_formula(rng), mgr))
        assert same_structure(simplify(once), once)


def test_simplify_relabelled_automaton(mgr):
    a, b = mgr.var("a"), mgr.var("b")
    mgr.register("c")
    edges = [Edge(0, a, 0, 1), Edge(0, ~a, 0, 0),
             Edge(1, mgr.true, 0b11, 1),
             Edge(2, b, 0b01, 2), Edge(2, ~b, 0b10, 2)]
    relabelled = Tgba(mgr, ("a", "b", "c"), 3, 0, 2, edges)
    small = simplify(relabelled)
    assert (small.num_states, small.num_marks) == (2, 1)
    assert small.ap == ("a",)
    assert equivalent_to_formula(small, "F a")


def test_state_cap():
    with pytest.raises(ResourceExceeded):
        translate("G(a -> X X X X b) & G F c & F G (a | b)", state_cap=3)


def test_too_many_marks():
    f = " & ".join(f"G F p{i}" for i in range(33))
    with pytest.raises(ResourceExceeded):
        translate(f)


def test_shared_manager_keeps_atoms(mgr):
    a1 = translate("a U b", mgr)
    a2 = translate("c", mgr)
    assert a1.mgr is a2.mgr is mgr
    assert set(mgr.names) >= {"a", "b", "c"}
