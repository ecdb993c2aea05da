"""Complementation of TGBAs.

When the automaton comes from a formula, negating the formula is cheap and
exact.  For an arbitrary automaton :func:`complement_generic` degeneralizes
it, moves acceptance to states and applies a rank-based construction over
explicit letters, restricted to tight rankings.
"""

import itertools

from . import ltl
from .automaton import Edge, Tgba
from .boolfn import Bdd
from .limits import CapExceeded, check_deadline, default_complement_cap
from .translate import simplify, translate


def complement_via_formula(f, mgr=None, state_cap=None):
    if isinstance(f, str):
        f = ltl.parse(f)
    return simplify(translate(ltl.negate(f), mgr, state_cap))


def degeneralize(a):
    """Equivalent TGBA with exactly one mark.

    States are ``(q, level)`` pairs; the level is the next mark awaited.
    An edge is accepting when it completes a round through all marks.
    """
    m = a.num_marks
    if m <= 1:
        edges = [e._replace(marks=1 if (m == 0 or e.marks) else 0) for e in a.edges]
        return a.replace(num_marks=1, edges=edges)
    start = (a.initial, 0)
    ids = {start: 0}
    todo = [start]
    edges = []
    while todo:
        q, lvl = todo.pop()
        src = ids[(q, lvl)]
        for e in a.out(q):
            j = lvl
            while j < m and e.marks >> j & 1:
                j += 1
            acc = 0
            if j == m:
                acc, j = 1, 0
            key = (e.dst, j)
            dst = ids.get(key)
            if dst is None:
                dst = ids[key] = len(ids)
                todo.append(key)
            edges.append(Edge(src, e.label, acc, dst))
    return Tgba(a.mgr, a.ap, len(ids), 0, 1, edges)


def _state_based(a):
    """From a one-mark TGBA, a Büchi automaton with accepting states.

    Returns ``(initial, accepting, delta)`` where ``delta[s]`` lists
    ``(label node, dst)`` pairs.
    """
    ids = {(a.initial, 0): 0}
    todo = [(a.initial, 0)]
    delta = []
    accepting = []
    while todo:
        key = todo.pop(0)
        q, flag = key
        delta.append([])
        accepting.append(flag == 1)
        src = ids[key]
        for e in a.out(q):
            nk = (e.dst, 1 if e.marks else 0)
            dst = ids.get(nk)
            if dst is None:
                dst = ids[nk] = len(ids)
                todo.append(nk)
            delta[src].append((e.label.node, dst))
    return 0, accepting, delta


def _tight_rankings(states, bound, accepting, budget, top=None):
    """Tight level rankings over ``states`` below per-state ``bound``.

    A ranking is tight when its maximum rank ``r`` is odd, every odd rank
    up to ``r`` is used, and accepting states carry even ranks.  ``top``
    fixes ``r``; otherwise every feasible ``r`` is enumerated.
    """
    states = sorted(states)
    n = len(states)
    out = []

    def rec(i, ranks, missing, r):
        budget[0] -= 1
        if budget[0] < 0:
            raise CapExceeded("complementation budget exhausted")
        if len(missing) > n - i:
            return
        if i == n:
            out.append(tuple(zip(states, ranks)))
            return
        q = states[i]
        for k in range(min(bound[q], r) + 1):
            if k % 2 == 1 and accepting[q]:
                continue
            rec(i + 1, ranks + [k], missing - {k}, r)

    tops = [top] if top is not None else range(1, 2 * n, 2)
    for r in tops:
        rec(0, [], frozenset(range(1, r + 1, 2)), r)
    return out


def complement_generic(a, cap=None):
    """Automaton for the complement of ``L(a)`` built without a formula.

    Raises :class:`CapExceeded` when more than ``cap`` states (or ranking
    candidates) would be explored.
    """
    cap = default_complement_cap() if cap is None else cap
    mgr = a.mgr
    init, accepting, delta = _state_based(degeneralize(simplify(a)))
    names = list(a.ap)
    letters = []
    for bits in itertools.product((False, True), repeat=len(names)):
        val = dict(zip(names, bits))
        letters.append((frozenset(x for x, b in val.items() if b), mgr.cube(val).node))
    succ_cache = {}

    def step(q, li):
        key = (q, li)
        r = succ_cache.get(key)
        if r is None:
            true_names = letters[li][0]
            r = succ_cache[key] = frozenset(
                d for node, d in delta[q] if mgr.evaluate(node, true_names))
        return r

    budget = [cap * 4]
    start = ("S", frozenset((init,)))
    ids = {start: 0}
    todo = [start]
    edges = {}

    def target(key):
        dst = ids.get(key)
        if dst is None:
            if len(ids) >= cap:
                raise CapExceeded(f"complement exceeds {cap} states")
            dst = ids[key] = len(ids)
            todo.append(key)
        return dst

    acc_of = {}
    while todo:
        check_deadline()
        key = todo.pop()
        src = ids[key]
        if key[0] == "S":
            subset = key[1]
            is_acc = not subset
        else:
            _, ranking, breakpoint = key
            is_acc = not breakpoint
        acc_of[src] = is_acc
        for li, (_, cube) in enumerate(letters):
            if key[0] == "S":
                nxt = frozenset().union(*(step(q, li) for q in subset)) if subset else frozenset()
                dsts = [target(("S", nxt))]
                if nxt:
                    bound = {q: 2 * len(nxt) - 1 for q in nxt}
                    for g in _tight_rankings(nxt, bound, accepting, budget):
                        dsts.append(target(("R", g, frozenset())))
            else:
                bound = {}
                for q, k in ranking:
                    for q2 in step(q, li):
                        bound[q2] = min(bound.get(q2, k), k)
                dsts = []
                if not bound:
                    dsts.append(target(("S", frozenset())))
                else:
                    r = max(k for _, k in ranking)
                    for g in _tight_rankings(bound, bound, accepting, budget, r):
                        even = frozenset(q for q, k in g if k % 2 == 0)
                        if breakpoint:
                            o2 = frozenset().union(*(step(q, li) for q in breakpoint)) & even
                        else:
                            o2 = even
                        dsts.append(target(("R", g, o2)))
            for d in dsts:
                k2 = (src, d)
                edges[k2] = mgr._or(edges.get(k2, 0), cube)
    out = [Edge(s, Bdd(mgr, node), 1 if acc_of[s] else 0, d) for (s, d), node in edges.items()]
    return simplify(Tgba(mgr, a.ap, len(ids), 0, 1, out))


def complement(a, formula=None, cap=None):
    """Complement via ``formula`` when known, otherwise generically."""
    if formula is not None:
        return complement_via_formula(formula, a.mgr)
    return complement_generic(a, cap)
