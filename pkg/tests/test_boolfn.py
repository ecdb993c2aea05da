import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giventhat.boolfn import BddError, BddManager, sop_size
from giventhat.limits import ResourceExceeded

NAMES = ("a", "b", "c")
VALUATIONS = [frozenset(n for n, bit in zip(NAMES, bits) if bit)
              for bits in itertools.product((0, 1), repeat=3)]


def table_of(sop, mgr):
    """Truth table of a cover computed directly from its literals."""
    out = []
    for v in VALUATIONS:
        out.append(any(all((mgr.name(i) in v) == pol for i, pol in p) for p in sop))
    return tuple(out)


def bdd_from_table(mgr, table):
    f = mgr.false
    for v, bit in zip(VALUATIONS, table):
        if bit:
            f = f | mgr.cube({n: n in v for n in NAMES})
    return f


def within(table, low, high):
    return all((not lo or x) and (not x or hi) for x, lo, hi in zip(table, low, high))


def irredundancy_violations(sop, low, high, mgr):
    bad = []
    for i in range(len(sop)):
        smaller = sop[:i] + sop[i + 1:]
        if within(table_of(smaller, mgr), low, high):
            bad.append(("product", i))
        for j in range(len(sop[i])):
            shorter = sop[:i] + [sop[i][:j] + sop[i][j + 1:]] + sop[i + 1:]
            if within(table_of(shorter, mgr), low, high):
                bad.append(("literal", i, j))
    return bad


@pytest.fixture
def m3():
    return BddManager(NAMES)


def test_single_variable(m3):
    a = m3.var("a")
    assert m3.sat_count(a, ["a"]) == 1
    assert m3.sat_count(m3.true, ["a"]) == 2


def test_contradiction(m3):
    a = m3.var("a")
    assert (a & ~a).is_false


def test_or_counts_three_of_four(m3):
    f = m3.var("a") | m3.var("b")
    models = list(m3.minterms(f, ["a", "b"]))
    assert len(models) == 3 == m3.sat_count(f, ["a", "b"])


def test_and_identity_and_absorption(m3):
    a, c = m3.var("a"), m3.var("c")
    assert (a & m3.true) == a
    assert m3.apply("and", a & c, c) == a & c


def test_or_of_knowledge_labels_is_c(m3):
    b, c = m3.var("b"), m3.var("c")
    assert m3.disj([c, b & c, b & c]) == c


def test_not(m3):
    a, b = m3.var("a"), m3.var("b")
    assert (~m3.true).is_false
    assert m3.sat_count(~a, ["a", "b"]) == m3.sat_count(a, ["a", "b"])
    f = ~(a | b)
    for v in VALUATIONS:
        assert m3.evaluate(f, v) == ("a" not in v and "b" not in v)


def test_exists(m3):
    a, b = m3.var("a"), m3.var("b")
    assert m3.exists(a & b, ["a"]) == b
    assert m3.exists(~a & b, ["a"]) == b
    assert m3.exists(a & b, []) == a & b


def test_implies_check(m3):
    a, b, c = (m3.var(x) for x in NAMES)
    assert m3.implies_check(m3.false, b)
    assert m3.implies_check(a & c, a)
    assert not m3.implies_check(a | b, a)
    assert m3.evaluate(a | b, {"b"}) and not m3.evaluate(a, {"b"})


def test_canonicity(m3):
    a, b = m3.var("a"), m3.var("b")
    assert (a & b) | (a & ~b) == a
    assert (a ^ b) == (a | b) & ~(a & b)
    assert a.implies(a | b).is_true
    assert (a & b) <= a


def test_unknown_variable(m3):
    with pytest.raises(BddError):
        m3.mk_var(7)
    with pytest.raises(BddError):
        m3.index("zz")


def test_mixing_managers():
    m1, m2 = BddManager(["a"]), BddManager(["a"])
    with pytest.raises(Exception):
        m1.var("a") & m2.var("a")


def test_transfer_matches_by_name():
    m1 = BddManager(["a", "b"])
    m2 = BddManager(["b", "a"])
    f = m1.var("a") & ~m1.var("b")
    g = m1.transfer(f, m2)
    assert g == m2.var("a") & ~m2.var("b")


def test_node_cap():
    m = BddManager([f"x{i}" for i in range(16)], node_cap=40)
    with pytest.raises(ResourceExceeded):
        f = m.false
        for i in range(8):
            f = f | (m.var(f"x{i}") & m.var(f"x{i + 8}"))


def test_isop_constant_bounds(m3):
    a, c = m3.var("a"), m3.var("c")
    assert m3.isop(m3.false, a | c) == []
    assert m3.isop(a & c, m3.true) == [()]


def test_isop_interval_collapses_to_a(m3):
    a, c = m3.var("a"), m3.var("c")
    sop = m3.isop(a & c, a | ~c)
    assert sop == [((m3.index("a"), True),)]
    assert m3.sop_to_str(sop) == "a"


def test_isop_of_point_interval_round_trips(m3):
    a, b, c = (m3.var(x) for x in NAMES)
    for f in (a ^ b, (a & b) | ~c, a | (b & c), m3.true, m3.false):
        assert m3.sop_to_bdd(m3.isop(f, f)) == f


def test_isop_rejects_bad_interval(m3):
    with pytest.raises(BddError):
        m3.isop(m3.var("a"), m3.var("b"))


def test_sop_size(m3):
    a, b, c = (m3.var(x) for x in NAMES)
    assert sop_size(m3.isop(m3.true, m3.true)) == 0
    assert sop_size(m3.isop(a & c, a & c)) == 2
    f = (a & b) | ~c
    sop = m3.isop(f, f)
    assert sop_size(sop) == 3
    assert m3.sop_to_bdd(sop) == f


def test_to_expr(m3):
    a, b = m3.var("a"), m3.var("b")
    assert m3.to_expr(m3.true) == "1"
    assert m3.to_expr(m3.false) == "0"
    assert m3.to_expr(a & ~b) == "a & !b"


def test_support(m3):
    a, c = m3.var("a"), m3.var("c")
    assert m3.support(a | c) == ["a", "c"]
    assert m3.support(m3.true) == []


tables = st.tuples(*[st.booleans()] * 8)


@settings(max_examples=300, deadline=None)
@given(tables, tables)
def test_isop_bounds_and_irredundancy(t1, t2):
    low = tuple(x and y for x, y in zip(t1, t2))
    high = tuple(x or y for x, y in zip(t1, t2))
    m = BddManager(NAMES)
    sop = [list(p) for p in m.isop(bdd_from_table(m, low), bdd_from_table(m, high))]
    assert within(table_of(sop, m), low, high)
    assert irredundancy_violations(sop, low, high, m) == []
    for p in sop:
        assert len({i for i, _ in p}) == len(p)
