import pytest

from giventhat import ltl
from giventhat.automaton import LassoWord, accepts_lasso
from giventhat.boolfn import BddManager
from giventhat.given import run_strategy
from giventhat.randgen import make_rng, random_formula, random_kripke
from giventhat.sysmc import (Kripke, KtsError, check, check_property, is_path, load_system,
                             parse_system, print_system, seek_all, seek_convergent,
                             seek_first_steps, seek_initial, seek_invariants)
from giventhat.translate import translate

from conftest import DATA, holds

A = frozenset({"a"})


def system_lassos(k, rng, n=30, max_len=8):
    """Random ultimately periodic paths of ``k`` as (state prefix, state cycle)."""
    out = []
    for _ in range(n):
        path = [k.initial]
        while True:
            s = rng.choice(k.succ[path[-1]])
            if s in path and (len(path) >= max_len or rng.random() < 0.4):
                i = path.index(s)
                out.append((path[:i], path[i:]))
                break
            path.append(s)
    return out


def word_of(k, prefix, cycle):
    return LassoWord(tuple(k.labels[s] for s in prefix), tuple(k.labels[s] for s in cycle))


def alternator():
    return Kripke(("a",), [A, frozenset()], [[1], [0]], 0)


def test_parse_print_round_trip():
    k = load_system(DATA / "alternator.kts")
    again = parse_system(print_system(k))
    assert (again.ap, again.labels, again.succ, again.initial) == \
        (k.ap, k.labels, k.succ, k.initial)
    assert print_system(again) == print_system(k)


@pytest.mark.parametrize("text", [
    "ap a\n", "kripke\nap a\nstate s0 a=2\n", "kripke\nap a\ninit s0\nstate s0 a=1\nedge s0 s9\n",
    "kripke\nap a b\ninit s0\nstate s0 a=1\n", "kripke\nap a\ninit s1\nstate s0 a=1\n"])
def test_parse_errors(text):
    with pytest.raises(KtsError):
        parse_system(text)


def test_deadlocks_get_self_loops():
    k = Kripke(("a",), [A, frozenset()], [[1], []], 0)
    assert k.succ[1] == [1]


def test_single_state_system():
    k = Kripke(("a",), [A], [[0]], 0)
    mgr = BddManager()
    assert check(k, translate("!F a", mgr)).holds
    v = check(k, translate("F a", mgr))
    assert v.status == "fails"
    assert v.counterexample.prefix == () and v.counterexample.cycle == (A,)


def test_alternator_product():
    k = alternator()
    mgr = BddManager()
    assert check(k, translate("!G F a", mgr)).holds
    v = check(k, translate("!G a", mgr))
    assert not v.holds
    assert is_path(k, v.prefix_states, v.cycle_states)


def test_check_rejects_foreign_atoms():
    with pytest.raises(ValueError):
        check(alternator(), translate("F zz"))


def test_counterexamples_are_valid():
    rng = make_rng(61)
    for _ in range(60):
        k = random_kripke(rng)
        phi = random_formula(rng)
        b = translate(ltl.negate(phi))
        v = check(k, b)
        if v.holds:
            for pre, cyc in system_lassos(k, rng, 10):
                assert holds(phi, word_of(k, pre, cyc))
        else:
            assert is_path(k, v.prefix_states, v.cycle_states)
            assert accepts_lasso(b, v.counterexample)
            assert not holds(phi, v.counterexample)


def test_gated_check():
    k = load_system(DATA / "alternator.kts")
    kb = seek_all(k, "F G b")
    v, aut, report = check_property(k, ltl.parse("F G b"), kb, "raw", gate=True)
    assert v.holds and aut is None and report.strategy == "p.min∃"


def test_seek_initial():
    k = Kripke(("a", "b", "c"), [frozenset({"a", "c"})], [[0]], 0)
    assert seek_initial(k, {"a", "b", "c"}).formula is ltl.parse("a & !b & c")
    assert seek_initial(k, set()).formula is ltl.TRUE
    k5 = Kripke(("a",), [frozenset(), A], [[1], [1]], 0)
    assert seek_initial(k5, {"a"}).formula is ltl.parse("!a")


def test_seek_first_steps():
    facts = seek_first_steps(alternator(), {"a"})
    assert [f.formula for f in facts] == [ltl.parse("X !a"), ltl.parse("X X a")]
    one = Kripke(("a",), [A], [[0]], 0)
    assert [f.formula for f in seek_first_steps(one, {"a"}, n=1)] == [ltl.parse("X a")]


def test_first_steps_frontier_cap():
    k = Kripke(("a",), [A, A, frozenset()], [[1, 2], [0], [0]], 0)
    assert seek_first_steps(k, {"a"}, n=2, frontier_cap=1) == []


def test_seek_invariants():
    k = Kripke(("b", "c"), [frozenset({"c"}), frozenset({"b", "c"})], [[1], [0]], 0)
    texts = {str(f.formula) for f in seek_invariants(k, {"b", "c"})}
    assert "G c" in texts
    one = Kripke(("a", "b"), [A], [[0]], 0)
    texts = {str(f.formula) for f in seek_invariants(one, {"a", "b"})}
    assert texts == {"G a", "G !b"}
    mutex = Kripke(("a", "b"), [frozenset(), A, frozenset({"b"})], [[1, 2], [0], [0]], 0)
    formulas = {f.formula for f in seek_invariants(mutex, {"a", "b"})}
    assert ltl.G(ltl.Not(ltl.parse("a & b"))) in formulas


def test_seek_convergent():
    k = Kripke(("b",), [frozenset(), frozenset({"b"})], [[1], [1]], 0)
    assert [f.formula for f in seek_convergent(k, {"b"})] == [ltl.parse("F G b")]
    assert seek_convergent(alternator(), {"a"}) == []
    split = Kripke(("a",), [frozenset(), A, frozenset()], [[1, 2], [1], [2]], 0)
    got = [f.formula for f in seek_convergent(split, {"a"})]
    assert got == [ltl.parse("F(G a | G !a)")]


def test_seek_all_restricts_atoms():
    k = load_system(DATA / "alternator.kts")
    kb = seek_all(k, "F b")
    assert kb.facts and all(ltl.atoms(f.formula) <= {"b"} for f in kb)


def test_gleaned_facts_hold_on_system_paths():
    rng = make_rng(62)
    for _ in range(40):
        k = random_kripke(rng)
        phi = random_formula(rng)
        kb = seek_all(k, phi)
        paths = system_lassos(k, rng, 15)
        for fact in kb:
            for pre, cyc in paths:
                assert holds(fact.formula, word_of(k, pre, cyc)), (fact, pre, cyc)


def test_verdict_agrees_across_strategies():
    rng = make_rng(63)
    for _ in range(30):
        k = random_kripke(rng)
        phi = random_formula(rng)
        kb = seek_all(k, phi)
        raw = check(k, run_strategy("raw", phi)[0]).status
        bm = check(k, run_strategy("BM", phi, kb)[0]).status
        assert raw == bm, (phi, [str(f) for f in kb])
