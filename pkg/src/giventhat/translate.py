"""LTL to TGBA translation and automaton postprocessing.

The translator is a tableau over sets of obligations.  Every formula is
expanded into a disjunction of ``(label, next obligations, pending
eventualities)`` terms; a state is the set of obligations that must hold
from now on.  Each ``U``/``F`` subformula owns one acceptance mark, which
an edge carries unless that eventuality is postponed on the edge.
"""

import logging

from . import ltl
from .automaton import Edge, Tgba, _trim, full_mask, scc_info, used_ap
from .boolfn import Bdd, BddManager
from .limits import ResourceExceeded, check_deadline, default_state_cap

log = logging.getLogger(__name__)


class _Tableau:
    def __init__(self, mgr, marks):
        self.mgr = mgr
        self.marks = marks
        self.memo = {}
        self.implied_memo = {}

    # terms are (label node, next frozenset, pending frozenset)

    def expand(self, f):
        r = self.memo.get(f)
        if r is not None:
            return r
        mgr = self.mgr
        op = f.op
        c = f.children
        empty = frozenset()
        if op == "true":
            r = [(1, empty, empty)]
        elif op == "false":
            r = []
        elif op == "ap":
            r = [(mgr.var(f.name).node, empty, empty)]
        elif op == "not":
            r = [(mgr.literal(c[0].name, False).node, empty, empty)]
        elif op == "and":
            r = [(1, empty, empty)]
            for g in c:
                r = self.combine(r, self.expand(g))
        elif op == "or":
            r = []
            for g in c:
                r = r + self.expand(g)
        elif op == "X":
            r = [(1, self.split(c[0]), empty)]
        elif op == "F":
            me = frozenset((f,))
            r = self.expand(c[0]) + [(1, me, me)]
        elif op == "G":
            me = frozenset((f,))
            r = [(l, n | me, p) for l, n, p in self.expand(c[0])]
        elif op == "U":
            me = frozenset((f,))
            r = self.expand(c[1]) + [(l, n | me, p | me) for l, n, p in self.expand(c[0])]
        elif op == "R":
            me = frozenset((f,))
            both = self.combine(self.expand(c[0]), self.expand(c[1]))
            r = both + [(l, n | me, p) for l, n, p in self.expand(c[1])]
        else:
            raise ValueError(f"formula not in negation normal form: {f}")
        r = self.merge(r)
        self.memo[f] = r
        return r

    def combine(self, left, right):
        and_ = self.mgr._and
        out = []
        for l1, n1, p1 in left:
            for l2, n2, p2 in right:
                node = and_(l1, l2)
                if node:
                    out.append((node, n1 | n2, p1 | p2))
        return out

    def merge(self, terms):
        or_ = self.mgr._or
        by_key = {}
        for l, n, p in terms:
            key = (n, p)
            by_key[key] = or_(by_key.get(key, 0), l)
        return [(l, n, p) for (n, p), l in by_key.items()]

    def split(self, f):
        if f.op == "and":
            return frozenset(f.children)
        return frozenset((f,))

    def implied(self, g, h):
        """Syntactic check that obligation ``g`` entails ``h``."""
        if g is h or h is ltl.TRUE:
            return True
        key = (g, h)
        r = self.implied_memo.get(key)
        if r is not None:
            return r
        self.implied_memo[key] = False
        r = False
        if g.op == "and":
            r = any(self.implied(x, h) for x in g.children)
        if not r and h.op == "and":
            r = all(self.implied(g, x) for x in h.children)
        if not r and h.op == "or":
            r = any(self.implied(g, x) for x in h.children)
        if not r and g.op == "or":
            r = all(self.implied(x, h) for x in g.children)
        if not r and g.op == "G":
            x = g.children[0]
            r = self.implied(x, h) or (h.op in ("G", "F") and self.implied(x, h.children[0]))
        if not r and h.op == "F":
            r = self.implied(g, h.children[0])
        if not r and h.op == "U":
            r = self.implied(g, h.children[1])
        if not r and h.op == "R":
            r = self.implied(g, h.children[0]) and self.implied(g, h.children[1])
        self.implied_memo[key] = r
        return r

    def reduce(self, obligations):
        items = [g for g in obligations if g is not ltl.TRUE]
        if ltl.FALSE in items:
            return None
        keep = []
        for i, g in enumerate(items):
            if any(j != i and self.implied(h, g) and not (self.implied(g, h) and j > i)
                   for j, h in enumerate(items)):
                continue
            keep.append(g)
        return frozenset(keep)

    def successors(self, state):
        terms = [(1, frozenset(), frozenset())]
        for g in state:
            terms = self.combine(terms, self.expand(g))
        reduced = []
        for l, n, p in terms:
            n = self.reduce(n)
            if n is not None:
                reduced.append((l, n, p))
        terms = self.merge(reduced)
        # a term with fewer obligations and fewer postponed eventualities
        # absorbs the letters it shares with a weaker term
        or_, and_, not_ = self.mgr._or, self.mgr._and, self.mgr._not
        out = []
        for i, (l2, n2, p2) in enumerate(terms):
            better = 0
            for j, (l1, n1, p1) in enumerate(terms):
                if i != j and n1 <= n2 and p1 <= p2:
                    better = or_(better, l1)
            l2 = and_(l2, not_(better))
            if l2:
                out.append((l2, n2, p2))
        return out


def eventualities(f):
    """``U`` and ``F`` subformulas of ``f`` in order of first occurrence."""
    out = []

    def walk(g):
        for c in g.children:
            walk(c)
        if g.op in ("U", "F") and g not in out:
            out.append(g)

    walk(f)
    return out


def translate(f, mgr=None, state_cap=None):
    """Build a TGBA recognizing exactly the models of LTL formula ``f``."""
    if isinstance(f, str):
        f = ltl.parse(f)
    mgr = BddManager() if mgr is None else mgr
    cap = default_state_cap() if state_cap is None else state_cap
    g = ltl.simplify_light(ltl.nnf(f))
    names = ltl.atoms_ordered(f)
    for name in names:
        mgr.register(name)
    marks = eventualities(g)
    if len(marks) > 32:
        raise ResourceExceeded(f"{len(marks)} eventualities exceed the 32-mark cap")
    mark_of = {u: 1 << i for i, u in enumerate(marks)}
    full = full_mask(len(marks))
    tab = _Tableau(mgr, marks)
    init = tab.reduce(tab.split(g))
    if init is None:
        return Tgba(mgr, names, 1, 0, len(marks), [])
    states = [init]
    ids = {init: 0}
    edges = []
    i = 0
    while i < len(states):
        check_deadline()
        state = states[i]
        for label, nxt, pending in tab.successors(state):
            dst = ids.get(nxt)
            if dst is None:
                if len(states) >= cap:
                    raise ResourceExceeded(f"translation exceeds the state cap of {cap}")
                dst = ids[nxt] = len(states)
                states.append(nxt)
            pend = 0
            for u in pending:
                pend |= mark_of[u]
            edges.append(Edge(i, Bdd(mgr, label), full & ~pend, dst))
        i += 1
    return Tgba(mgr, names, len(states), 0, len(marks), edges)


# -- postprocessing --------------------------------------------------------------


def _merge_parallel(a):
    or_ = a.mgr._or
    merged = {}
    for e in a.edges:
        key = (e.src, e.dst, e.marks)
        merged[key] = or_(merged.get(key, 0), e.label.node)
    edges = [Edge(s, Bdd(a.mgr, n), m, d) for (s, d, m), n in merged.items()]
    return a.replace(edges=edges)


def _strip_marks(a):
    """Clear marks on edges that are not inside an accepting SCC."""
    sccs, comp, acc = scc_info(a)
    full = a.full_mask
    edges = []
    for e in a.edges:
        c = comp[e.src]
        inside = c != -1 and c == comp[e.dst] and acc[c] is not None and acc[c] & full == full
        edges.append(e if inside or e.marks == 0 else e._replace(marks=0))
    return a.replace(edges=edges)


def _reduce_marks(a):
    """Drop marks whose edge set includes that of another mark."""
    m = a.num_marks
    if m == 0:
        return a
    sets = [frozenset(i for i, e in enumerate(a.edges) if e.marks >> k & 1) for k in range(m)]
    kept = []
    for k in sorted(range(m), key=lambda k: (len(sets[k]), k)):
        if not any(sets[j] <= sets[k] for j in kept):
            kept.append(k)
    kept.sort()
    # every cycle-carrying SCC fully marked: acceptance is trivial
    sccs, comp, acc = scc_info(a)
    full = a.full_mask
    trivial = all(e.marks == full for e in a.edges
                  if comp[e.src] != -1 and comp[e.src] == comp[e.dst])
    if trivial:
        kept = []
    if len(kept) == m:
        return a
    edges = []
    for e in a.edges:
        marks = 0
        for new, old in enumerate(kept):
            if e.marks >> old & 1:
                marks |= 1 << new
        edges.append(e._replace(marks=marks))
    return a.replace(num_marks=len(kept), edges=edges)


def _prune_dominated(a):
    """Remove from an edge the letters of a parallel edge with more marks."""
    mgr = a.mgr
    edges = list(a.edges)
    changed = False
    for s in range(a.num_states):
        out = [i for i, e in enumerate(edges) if e.src == s]
        for i in out:
            ei = edges[i]
            better = 0
            for j in out:
                ej = a.edges[j]
                if i != j and ej.dst == ei.dst and ej.marks != ei.marks \
                        and ej.marks & ei.marks == ei.marks:
                    better = mgr._or(better, ej.label.node)
            if better:
                node = mgr._and(ei.label.node, mgr._not(better))
                if node != ei.label.node:
                    edges[i] = ei._replace(label=Bdd(mgr, node))
                    changed = True
    return a.replace(edges=edges) if changed else a


def _signature_merge(a):
    """Quotient by the coarsest partition where merged states have equal
    outgoing (label, marks, destination class) signatures."""
    n = a.num_states
    cls = [0] * n
    count = 1
    or_ = a.mgr._or
    while True:
        sigs = {}
        new = [0] * n
        for s in range(n):
            acc = {}
            for e in a.out(s):
                key = (cls[e.dst], e.marks)
                acc[key] = or_(acc.get(key, 0), e.label.node)
            sig = (cls[s], frozenset(acc.items()))
            new[s] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == count:
            break
        cls, count = new, len(sigs)
    if count == n:
        return a
    edges = {}
    done = set()
    for s in range(n):
        c = cls[s]
        if c in done:
            continue
        done.add(c)
        for e in a.out(s):
            key = (c, cls[e.dst], e.marks)
            edges[key] = or_(edges.get(key, 0), e.label.node)
    return Tgba(a.mgr, a.ap, count, cls[a.initial], a.num_marks,
                [Edge(s, Bdd(a.mgr, l), m, d) for (s, d, m), l in edges.items()])


SIMULATION_LIMIT = 256


def _direct_simulation(a):
    """``sim[q][r]`` is true when ``r`` directly simulates ``q``: every edge
    of ``q`` is matched, letter by letter, by edges of ``r`` with at least
    the same marks towards simulating states."""
    n = a.num_states
    mgr = a.mgr
    and_, or_, not_ = mgr._and, mgr._or, mgr._not
    out = [a.out(s) for s in range(n)]
    sim = [[True] * n for _ in range(n)]
    changed = True
    while changed:
        check_deadline()
        changed = False
        for q in range(n):
            for r in range(n):
                if q == r or not sim[q][r]:
                    continue
                for e in out[q]:
                    cover = 0
                    for f in out[r]:
                        if e.marks & ~f.marks == 0 and sim[e.dst][f.dst]:
                            cover = or_(cover, f.label.node)
                    if and_(e.label.node, not_(cover)):
                        sim[q][r] = False
                        changed = True
                        break
    return sim


def _simulation_reduce(a):
    """Merge simulation-equivalent states, then drop the letters of an edge
    that a sibling edge reads towards a simulating state with more marks."""
    if a.num_states > SIMULATION_LIMIT:
        return a
    n = a.num_states
    sim = _direct_simulation(a)
    cls = [-1] * n
    count = 0
    for q in range(n):
        if cls[q] == -1:
            for r in range(q, n):
                if cls[r] == -1 and sim[q][r] and sim[r][q]:
                    cls[r] = count
            count += 1
    rep = [0] * count
    for q in range(n - 1, -1, -1):
        rep[cls[q]] = q
    mgr = a.mgr
    and_, or_, not_ = mgr._and, mgr._or, mgr._not
    merged = {}
    for c in range(count):
        for e in a.out(rep[c]):
            key = (c, cls[e.dst], e.marks)
            merged[key] = or_(merged.get(key, 0), e.label.node)
    items = list(merged.items())
    edges = []
    for (c, d, m), node in items:
        better = 0
        for (c2, d2, m2), node2 in items:
            if c2 == c and (d2, m2) != (d, m) and m & ~m2 == 0 and sim[rep[d]][rep[d2]]:
                better = or_(better, node2)
        node = and_(node, not_(better))
        if node:
            edges.append(Edge(c, Bdd(mgr, node), m, d))
    return Tgba(mgr, a.ap, count, cls[a.initial], a.num_marks, edges)


def _canonical(a):
    """Renumber states in BFS order and sort edges deterministically."""
    order = {a.initial: 0}
    queue = [a.initial]
    for s in queue:
        for e in sorted(a.out(s), key=lambda e: (e.dst, e.marks, e.label.node)):
            if e.dst not in order:
                order[e.dst] = len(order)
                queue.append(e.dst)
    edges = sorted((Edge(order[e.src], e.label, e.marks, order[e.dst])
                    for e in a.edges if e.src in order),
                   key=lambda e: (e.src, e.dst, e.marks, e.label.node))
    return Tgba(a.mgr, used_ap(a), len(order), 0, a.num_marks, edges)


def _shape(a):
    return (a.num_states, len(a.edges), a.num_marks,
            tuple((e.src, e.dst, e.marks, e.label.node) for e in a.edges))


def simplify(a):
    """Language-preserving cleanup: trim, mark reduction, pruning of
    dominated letters, merging of states with identical signatures and
    quotient by direct simulation (on automata of at most
    ``SIMULATION_LIMIT`` states)."""
    a = _merge_parallel(a)
    while True:
        check_deadline()
        before = _shape(a)
        a = _trim(a)[0]
        a = _strip_marks(a)
        a = _reduce_marks(a)
        a = _merge_parallel(a)
        a = _prune_dominated(a)
        a = _signature_merge(a)
        a = _simulation_reduce(a)
        if _shape(a) == before:
            break
    return _canonical(a)


def translate_simplified(f, mgr=None, state_cap=None):
    return simplify(translate(f, mgr, state_cap))
