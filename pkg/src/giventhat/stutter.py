"""Stutter-insensitive closure, stutter-sensitive part and the SI test.

Two words are stutter-equivalent when they differ only by finite
repetitions of letters.  ``si_closure(a)`` accepts every word that is
stutter-equivalent to a word of ``a``.  It first adds shortcut edges so
that a run may read a repeated letter once, then splits every state by the
letter just read so that this letter can be repeated at will.
"""

from .automaton import Edge, Tgba, is_empty, product, used_ap
from .boolfn import Bdd
from .limits import CapExceeded, check_deadline, default_complement_cap
from .translate import simplify


def _with_marks(a):
    # a zero-mark automaton would accept runs that stutter forever
    if a.num_marks:
        return a
    return a.replace(num_marks=1, edges=[e._replace(marks=1) for e in a.edges])


def shortcut_closure(a, cap=None):
    """Add ``q -(f1 & f2), M1|M2-> q''`` for every pair of consecutive edges
    ``q -f1,M1-> q' -f2,M2-> q''``, until nothing changes."""
    cap = default_complement_cap() if cap is None else cap
    mgr = a.mgr
    trans = {}
    for e in a.edges:
        key = (e.src, e.dst, e.marks)
        trans[key] = mgr._or(trans.get(key, 0), e.label.node)
    changed = True
    while changed:
        check_deadline()
        changed = False
        out = {}
        for (s, d, m), node in trans.items():
            out.setdefault(s, []).append((d, m, node))
        for (s, mid, m1), f1 in list(trans.items()):
            for d, m2, f2 in out.get(mid, ()):
                both = mgr._and(f1, f2)
                if not both:
                    continue
                key = (s, d, m1 | m2)
                old = trans.get(key, 0)
                new = mgr._or(old, both)
                if new != old:
                    trans[key] = new
                    changed = True
                    if len(trans) > cap:
                        raise CapExceeded(f"shortcut closure exceeds {cap} edges")
    edges = [Edge(s, Bdd(mgr, node), m, d) for (s, d, m), node in trans.items()]
    return a.replace(edges=edges)


def letter_split(a, cap=None):
    """Split states by the letter just read, with a mark-free self-loop on
    that letter so it can be repeated."""
    cap = default_complement_cap() if cap is None else cap
    mgr = a.mgr
    names = used_ap(a)
    cubes = {}

    def letters(label):
        for lt in mgr.minterms(label, names):
            cube = cubes.get(lt)
            if cube is None:
                cube = cubes[lt] = mgr.cube({n: n in lt for n in names}).node
            yield lt, cube

    start = (a.initial, None)
    ids = {start: 0}
    todo = [start]
    edges = []
    while todo:
        check_deadline()
        key = todo.pop()
        q, last = key
        src = ids[key]
        if last is not None:
            edges.append(Edge(src, Bdd(mgr, cubes[last]), 0, src))
        for e in a.out(q):
            for lt, cube in letters(e.label):
                nk = (e.dst, lt)
                dst = ids.get(nk)
                if dst is None:
                    if len(ids) >= cap:
                        raise CapExceeded(f"letter split exceeds {cap} states")
                    dst = ids[nk] = len(ids)
                    todo.append(nk)
                edges.append(Edge(src, Bdd(mgr, cube), e.marks, dst))
    return Tgba(mgr, a.ap, len(ids), 0, a.num_marks, edges)


def si_closure(a, cap=None):
    """Automaton for the smallest stutter-insensitive language containing ``L(a)``."""
    a = _with_marks(simplify(a))
    return simplify(letter_split(shortcut_closure(a, cap), cap))


def is_stutter_insensitive(a, a_neg, cap=None):
    """``a_neg`` must recognize the complement of ``L(a)``."""
    return is_empty(product(si_closure(a, cap), a_neg))


def ss_part(a, a_neg, cap=None):
    """Words of ``L(a)`` that are stutter-equivalent to some rejected word."""
    return simplify(product(a, si_closure(product(si_closure(a, cap), a_neg), cap)))
