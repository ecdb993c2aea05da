import pytest

from giventhat import ltl
from giventhat.automaton import (accepts_lasso, is_deterministic, is_empty,
                                 is_universal_syntactic, product, strength, universal_automaton)
from giventhat.given import (ROSTER, BoundedTgba, KnowledgeBase, StrategyOptions, bounds_simplify,
                             guarantees, normalize_name, run_strategy, si_relax, si_restrict,
                             strategy_max, strategy_min, update_bounds_given)
from giventhat.randgen import make_rng, random_formula
from giventhat.translate import simplify, translate

from conftest import NEG_PHI, agree_on, equivalent_to_formula, holds, lassos


def edge_index(a, src, dst):
    return [i for i, e in enumerate(a.edges) if (e.src, e.dst) == (src, dst)]


def test_knowledge_base_from_lines(tmp_path):
    p = tmp_path / "facts.txt"
    p.write_text("# comment\nG c  # trailing\n\nF G b\n")
    kb = KnowledgeBase.from_file(p)
    assert [str(k) for k in kb] == ["G c", "F G b"]
    assert kb.conjunction() is ltl.parse("G c & F G b")
    assert len(kb.relevant_to(ltl.parse("F b"))) == 1
    assert len(KnowledgeBase().relevant_to(ltl.parse("a"))) == 0


def test_min(mgr):
    assert is_empty(strategy_min(ltl.parse("F a"), ltl.parse("G a"), mgr=mgr))
    a = strategy_min(ltl.parse("F a"), ltl.TRUE, mgr=mgr)
    assert agree_on(a, "G !a", lassos(1, 100)) == []


def test_min_with_quantification(mgr):
    k = ltl.parse("X(a & b) & X(!a & b)")
    phi = ltl.parse("G b")
    plain = strategy_min(phi, k, mgr=mgr)
    assert is_empty(plain)
    qe = strategy_min(phi, k, use_qe=True, mgr=mgr)
    assert equivalent_to_formula(qe, "F !b & X b")


def test_max(mgr):
    u = strategy_max(ltl.parse("G a"), ltl.parse("F !a"), mgr=mgr)
    assert is_universal_syntactic(u)
    m = strategy_max(ltl.parse("F a"), ltl.TRUE, mgr=mgr)
    assert agree_on(m, "G !a", lassos(2, 100)) == []


def test_max_keeps_extra_atoms_without_quantification(mgr):
    k = ltl.parse("X(a & b) | G c")
    phi = ltl.parse("G b")
    plain = strategy_max(phi, k, mgr=mgr)
    qe = strategy_max(phi, k, use_qe=True, mgr=mgr)
    from giventhat.automaton import used_ap

    assert set(used_ap(qe)) < set(used_ap(plain))
    assert set(used_ap(qe)) <= {"b"}


def test_running_guarantees(running):
    neg_phi, a_k = running
    mgr = neg_phi.mgr
    c = mgr.var("c")
    sg, tg = guarantees(BoundedTgba(neg_phi), a_k)
    assert mgr.wrap(sg[0]) == c and mgr.wrap(sg[1]) == c
    (loop,) = edge_index(neg_phi, 1, 1)
    (to_q2,) = edge_index(neg_phi, 0, 2)
    assert mgr.wrap(tg[loop]) == c
    assert tg[to_q2] == 0
    sg_t, tg_t = guarantees(BoundedTgba(neg_phi), a_k, sg_over="trim")
    assert sg_t[:2] == sg[:2] and tg_t == tg


def test_vacuous_knowledge(mgr):
    a = simplify(translate(NEG_PHI, mgr))
    b = update_bounds_given(BoundedTgba(a), universal_automaton(mgr, num_marks=1))
    assert b.low == b.high == [e.label.node for e in a.edges]


def test_bounds_fixpoint():
    rng = make_rng(51)
    for _ in range(40):
        phi, k = random_formula(rng, depth=3), random_formula(rng, depth=3)
        a = simplify(translate(ltl.negate(phi)))
        a_k = translate(k, a.mgr)
        once = update_bounds_given(BoundedTgba(a), a_k)
        twice = update_bounds_given(once, a_k)
        assert once.low == twice.low and once.high == twice.high


def test_bm_running_example(running):
    neg_phi, a_k = running
    out = bounds_simplify(update_bounds_given(neg_phi, a_k))
    assert out.num_states == 2
    assert is_deterministic(out) and strength(out) == "terminal"
    assert equivalent_to_formula(out, "F a")


def test_bounds_without_knowledge(mgr):
    a = simplify(translate(NEG_PHI, mgr))
    out = bounds_simplify(BoundedTgba(a))
    for w in lassos(3, 200):
        assert accepts_lasso(out, w) == accepts_lasso(a, w)


def test_bm_preserves_product_with_knowledge():
    rng = make_rng(52)
    words = lassos(53, 80)
    for _ in range(80):
        phi, k = random_formula(rng), random_formula(rng)
        a = simplify(translate(ltl.negate(phi)))
        a_k = translate(k, a.mgr)
        out = bounds_simplify(update_bounds_given(a, a_k))
        p1, p2 = product(out, a_k), product(a, a_k)
        assert is_empty(p1) == is_empty(p2)
        for w in words:
            assert accepts_lasso(p1, w) == accepts_lasso(p2, w), (phi, k, w)


def test_si_relax_next_eventually(mgr):
    a = translate("X F a", mgr)
    facts = [translate("!a", mgr)]
    out, changed, flags = si_relax(a, translate("!X F a", mgr), facts)
    assert changed and not flags
    assert equivalent_to_formula(out, "F a")
    same, changed, _ = si_relax(a, translate("!X F a", mgr), [])
    assert same is a and not changed


def test_si_restrict_next_eventually(mgr):
    a = translate("X F a", mgr)
    out, changed, _ = si_restrict(a, translate("!X F a", mgr), [translate("!a", mgr)])
    assert changed
    assert equivalent_to_formula(out, "G a | F(!a & F a)")


def test_si_restrict_on_insensitive_input(mgr):
    a = translate("F a", mgr)
    out, changed, _ = si_restrict(a, translate("G !a", mgr), [translate("b", mgr)])
    assert out is a and not changed


def test_si_strategies_under_knowledge():
    rng = make_rng(54)
    words = lassos(55, 60)
    for _ in range(40):
        phi, k = random_formula(rng, depth=3), random_formula(rng, depth=2)
        a = simplify(translate(ltl.negate(phi)))
        pos = translate(phi, a.mgr)
        a_k = translate(k, a.mgr)
        for fn in (si_relax, si_restrict):
            out, _, _ = fn(a, pos, [a_k], cap=3000)
            for w in words:
                if holds(k, w):
                    assert accepts_lasso(out, w) == accepts_lasso(a, w), (fn, phi, k, w)


def test_strategy_names():
    assert normalize_name("p.minE") == "p.min∃"
    assert normalize_name("p.max_qe") == "p.max∃"
    assert normalize_name("SIrelax+BM") == "SIrelax+BM"
    with pytest.raises(ValueError):
        normalize_name("fastest")
    with pytest.raises(ValueError):
        normalize_name("raw+BM")
    assert len(ROSTER) == 11 and ROSTER[0] == "raw"


def test_run_strategy_outcomes():
    _, r = run_strategy("raw", "F a")
    assert r.outcome == "unchanged"
    _, r = run_strategy("p.min∃", "F a", ["G a"])
    assert r.outcome == "empty"
    _, r = run_strategy("p.max∃", "G a", ["F !a"])
    assert r.outcome == "universal"
    out, r = run_strategy("BM", "!(" + NEG_PHI + ")", ["F G b", "G c"])
    assert r.outcome == "simplified"
    assert r.before.states > r.after.states == 2
    assert equivalent_to_formula(out, "F a")


def test_run_strategy_relax_then_bm():
    out, r = run_strategy("SIrelax+BM", "!X F a", ["!a"])
    assert r.strategy == "SIrelax+BM"
    assert equivalent_to_formula(out, "F a")


def test_report_dict():
    _, r = run_strategy("BM", "G b", ["G b"], StrategyOptions(with_si=True))
    d = r.as_dict()
    assert d["outcome"] == "empty"
    assert d["before"]["si"] == "yes"
    assert set(d) == {"strategy", "outcome", "before", "after", "time_ms", "flags",
                      "skipped_facts"}


def test_skipped_facts_are_reported():
    _, r = run_strategy("BM", "F a", ["G(a -> X X X X b) & G F c & F G(a | b)"],
                        StrategyOptions(state_cap=3))
    assert r.skipped_facts


def test_state_guarantee_over_trimmed_pairs_is_unsound():
    from giventhat.automaton import LassoWord

    phi = ltl.parse("((c | G b) R b) U a")
    k = ltl.parse("!(X(a -> c) U (b -> c | a))")
    w = LassoWord((frozenset("b"), frozenset("ab"), frozenset("abc")),
                  (frozenset("b"), frozenset("ab"), frozenset("a")))
    assert holds(k, w) and holds(phi, w)
    a = simplify(translate(ltl.negate(phi)))
    a_k = translate(k, a.mgr)
    trimmed = bounds_simplify(update_bounds_given(a, a_k, sg_over="trim"))
    default = bounds_simplify(update_bounds_given(a, a_k))
    assert accepts_lasso(trimmed, w)
    assert not accepts_lasso(default, w)
