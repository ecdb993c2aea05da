"""Transition-based generalized Büchi automata (TGBA).

A :class:`Tgba` has states ``0..n-1``, a single initial state and a list
of :class:`Edge` objects.  Each edge carries a :class:`~giventhat.boolfn.Bdd`
label and a bit set of acceptance marks.  A run is accepting when every
mark in ``0..num_marks-1`` is seen infinitely often; with zero marks every
infinite run is accepting.
"""

from dataclasses import dataclass
from typing import NamedTuple

from .boolfn import Bdd, BddManager, sop_size
from .limits import MAX_MARKS, ResourceExceeded, check_deadline


class Edge(NamedTuple):
    src: int
    label: Bdd
    marks: int
    dst: int


def full_mask(num_marks):
    return (1 << num_marks) - 1


def mark_list(marks):
    return [i for i in range(marks.bit_length()) if marks >> i & 1]


class Tgba:
    """Immutable TGBA value."""

    __slots__ = ("mgr", "ap", "num_states", "initial", "num_marks", "edges", "_out")

    def __init__(self, mgr, ap, num_states, initial, num_marks, edges):
        if num_marks > MAX_MARKS:
            raise ResourceExceeded(f"{num_marks} acceptance marks exceed the cap of {MAX_MARKS}")
        if not 0 <= initial < max(num_states, 1):
            raise ValueError(f"initial state {initial} out of range")
        self.mgr = mgr
        self.ap = tuple(ap)
        self.num_states = max(num_states, 1)
        self.initial = initial
        self.num_marks = num_marks
        mask = full_mask(num_marks)
        clean = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            if e.label.mgr is not mgr:
                raise ValueError("edge label belongs to another BDD manager")
            if e.marks & ~mask:
                raise ValueError(f"edge marks {e.marks:#x} exceed {num_marks} marks")
            if not (0 <= e.src < self.num_states and 0 <= e.dst < self.num_states):
                raise ValueError(f"edge {e.src}->{e.dst} references a missing state")
            if e.label.is_false:
                continue
            clean.append(e)
        self.edges = tuple(clean)
        self._out = None

    @property
    def full_mask(self):
        return full_mask(self.num_marks)

    def out(self, state):
        if self._out is None:
            out = [[] for _ in range(self.num_states)]
            for e in self.edges:
                out[e.src].append(e)
            self._out = out
        return self._out[state]

    def successors(self):
        return [[e.dst for e in self.out(s)] for s in range(self.num_states)]

    def replace(self, **changes):
        fields = {"mgr": self.mgr, "ap": self.ap, "num_states": self.num_states,
                  "initial": self.initial, "num_marks": self.num_marks,
                  "edges": self.edges}
        fields.update(changes)
        return Tgba(**fields)

    def __repr__(self):
        return (f"Tgba(states={self.num_states}, edges={len(self.edges)}, "
                f"marks={self.num_marks}, ap={list(self.ap)})")


def universal_automaton(mgr, ap=(), num_marks=0):
    """One state with a true self-loop carrying every mark."""
    return Tgba(mgr, ap, 1, 0, num_marks, [Edge(0, mgr.true, full_mask(num_marks), 0)])


def empty_automaton(mgr, ap=(), num_marks=0):
    return Tgba(mgr, ap, 1, 0, num_marks, [])


def merge_ap(first, second):
    out = list(first)
    out.extend(x for x in second if x not in out)
    return tuple(out)


def import_automaton(a, mgr):
    """Return ``a`` with its labels expressed in manager ``mgr``."""
    if a.mgr is mgr:
        return a
    for name in a.ap:
        mgr.register(name)
    edges = [Edge(e.src, a.mgr.transfer(e.label, mgr), e.marks, e.dst) for e in a.edges]
    return Tgba(mgr, a.ap, a.num_states, a.initial, a.num_marks, edges)


# -- graph algorithms ------------------------------------------------------------


def tarjan(num_nodes, roots, succ):
    """Iterative Tarjan SCC decomposition restricted to nodes reachable from ``roots``.

    ``succ[v]`` lists the successors of ``v``.  Returns ``(sccs, comp)`` where
    ``sccs`` is in reverse topological order and ``comp[v]`` is the SCC index
    of ``v`` (``-1`` when unreachable).
    """
    index = [-1] * num_nodes
    low = [0] * num_nodes
    on_stack = [False] * num_nodes
    comp = [-1] * num_nodes
    stack = []
    sccs = []
    counter = 0
    for root in roots:
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, iter(succ[root]))]
        while work:
            v, it = work[-1]
            descended = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = len(sccs)
                    members.append(w)
                    if w == v:
                        break
                sccs.append(members)
        check_deadline()
    return sccs, comp


def scc_info(a):
    """SCC decomposition of the reachable part of ``a``.

    Returns ``(sccs, comp, acc)`` where ``acc[i]`` is the union of marks on
    the edges internal to SCC ``i``, or ``None`` when the SCC has no
    internal edge (it carries no cycle).
    """
    sccs, comp = tarjan(a.num_states, [a.initial], a.successors())
    acc = [None] * len(sccs)
    for e in a.edges:
        c = comp[e.src]
        if c != -1 and c == comp[e.dst]:
            acc[c] = e.marks if acc[c] is None else acc[c] | e.marks
    return sccs, comp, acc


def _graph_has_accepting_cycle(num_nodes, roots, succ, full):
    """Emptiness on an explicit graph whose edges are ``(dst, marks)`` pairs."""
    plain = [[d for d, _ in edges] for edges in succ]
    sccs, comp = tarjan(num_nodes, roots, plain)
    acc = {}
    for v in range(num_nodes):
        c = comp[v]
        if c == -1:
            continue
        for d, m in succ[v]:
            if comp[d] == c:
                acc[c] = acc.get(c, 0) | m
                if acc[c] & full == full:
                    return True
    return False


def is_empty(a):
    """True iff ``a`` has no accepting run."""
    _, _, acc = scc_info(a)
    full = a.full_mask
    return not any(m is not None and m & full == full for m in acc)


def accepting_sccs(a):
    sccs, comp, acc = scc_info(a)
    full = a.full_mask
    return [i for i, m in enumerate(acc) if m is not None and m & full == full], sccs, comp


def _trim(a):
    """Trim ``a``; also return the old->new state map and kept edge indices."""
    good, sccs, comp = accepting_sccs(a)
    useful = [False] * a.num_states
    for i in good:
        for s in sccs[i]:
            useful[s] = True
    # backward closure over reachable states
    preds = [[] for _ in range(a.num_states)]
    for e in a.edges:
        if comp[e.src] != -1:
            preds[e.dst].append(e.src)
    stack = [s for s in range(a.num_states) if useful[s]]
    while stack:
        s = stack.pop()
        for p in preds[s]:
            if not useful[p]:
                useful[p] = True
                stack.append(p)
    state_map = {}
    state_map[a.initial] = 0
    for s in range(a.num_states):
        if useful[s] and comp[s] != -1 and s not in state_map:
            state_map[s] = len(state_map)
    kept = []
    edges = []
    for i, e in enumerate(a.edges):
        if useful[e.src] and useful[e.dst] and comp[e.src] != -1:
            kept.append(i)
            edges.append(Edge(state_map[e.src], e.label, e.marks, state_map[e.dst]))
    t = Tgba(a.mgr, a.ap, len(state_map), 0, a.num_marks, edges)
    return t, state_map, kept


def trim(a):
    """Keep only the states and edges that occur on some accepting run."""
    return _trim(a)[0]


def _product(a1, a2):
    """Synchronized product; also returns state pairs and edge origins."""
    if a1.num_marks + a2.num_marks > MAX_MARKS:
        raise ResourceExceeded("product needs more than 32 acceptance marks")
    mgr = a1.mgr
    a2 = import_automaton(a2, mgr)
    shift = a1.num_marks
    pairs = [(a1.initial, a2.initial)]
    ids = {pairs[0]: 0}
    edges = []
    origins = []
    idx1 = {id(e): i for i, e in enumerate(a1.edges)}
    idx2 = {id(e): i for i, e in enumerate(a2.edges)}
    and_ = mgr._and
    todo = 0
    while todo < len(pairs):
        q1, q2 = pairs[todo]
        src = todo
        todo += 1
        check_deadline()
        out2 = a2.out(q2)
        for e1 in a1.out(q1):
            n1 = e1.label.node
            for e2 in out2:
                node = and_(n1, e2.label.node)
                if node == 0:
                    continue
                key = (e1.dst, e2.dst)
                dst = ids.get(key)
                if dst is None:
                    dst = ids[key] = len(pairs)
                    pairs.append(key)
                edges.append(Edge(src, Bdd(mgr, node), e1.marks | (e2.marks << shift), dst))
                origins.append((idx1[id(e1)], idx2[id(e2)]))
    prod = Tgba(mgr, merge_ap(a1.ap, a2.ap), len(pairs), 0,
                a1.num_marks + a2.num_marks, edges)
    return prod, pairs, origins


def product(a1, a2):
    """Automaton for ``L(a1) ∩ L(a2)`` (reachable part only)."""
    return _product(a1, a2)[0]


def sum_(a1, a2):
    """Automaton for ``L(a1) ∪ L(a2)``.

    Both operands are padded to the larger mark count by adding the missing
    marks to every edge; a fresh initial state copies the edges leaving
    both initial states.
    """
    mgr = a1.mgr
    a2 = import_automaton(a2, mgr)
    m = max(a1.num_marks, a2.num_marks)
    pad1 = full_mask(m) & ~a1.full_mask
    pad2 = full_mask(m) & ~a2.full_mask
    off1, off2 = 1, 1 + a1.num_states
    edges = []
    for e in a1.edges:
        edges.append(Edge(e.src + off1, e.label, e.marks | pad1, e.dst + off1))
    for e in a2.edges:
        edges.append(Edge(e.src + off2, e.label, e.marks | pad2, e.dst + off2))
    for e in a1.out(a1.initial):
        edges.append(Edge(0, e.label, e.marks | pad1, e.dst + off1))
    for e in a2.out(a2.initial):
        edges.append(Edge(0, e.label, e.marks | pad2, e.dst + off2))
    return Tgba(mgr, merge_ap(a1.ap, a2.ap), 1 + a1.num_states + a2.num_states,
                0, m, edges)


# -- words ----------------------------------------------------------------------


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word ``prefix . cycle^omega``.

    Each letter is a frozenset holding the atoms that are true; atoms not
    listed are false.
    """

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(frozenset(x) for x in self.prefix))
        object.__setattr__(self, "cycle", tuple(frozenset(x) for x in self.cycle))
        if not self.cycle:
            raise ValueError("lasso cycle must be non-empty")

    def __len__(self):
        return len(self.prefix) + len(self.cycle)

    def letters(self):
        return self.prefix + self.cycle

    def __str__(self):
        def letter(s):
            return "{" + ",".join(sorted(s)) + "}"
        u = " ".join(letter(x) for x in self.prefix)
        v = " ".join(letter(x) for x in self.cycle)
        return f"{u} ({v})^w".strip()


def accepts_lasso(a, w):
    """True iff ``w`` is accepted by ``a``.

    Membership is decided by an emptiness check of the product of ``a``
    with the single-word automaton of ``w``.
    """
    letters = w.letters()
    n = len(letters)
    loop = len(w.prefix)
    evaluate = a.mgr.evaluate
    npos = n
    size = a.num_states * npos
    succ = [[] for _ in range(size)]
    cache = {}
    for e in a.edges:
        node = e.label.node
        for pos in range(npos):
            key = (node, pos)
            ok = cache.get(key)
            if ok is None:
                ok = cache[key] = evaluate(node, letters[pos])
            if ok:
                nxt = pos + 1 if pos + 1 < n else loop
                succ[e.src * npos + pos].append((e.dst * npos + nxt, e.marks))
    return _graph_has_accepting_cycle(size, [a.initial * npos], succ, a.full_mask)


# -- syntactic properties and metrics -------------------------------------------


def is_universal_syntactic(a):
    """One state whose self-loops cover true and each carry every mark."""
    if a.num_states != 1:
        return False
    full = a.full_mask
    cover = a.mgr.false
    for e in a.edges:
        if e.marks != full or e.dst != 0:
            return False
        cover = cover | e.label
    return cover.is_true


def is_deterministic(a):
    """Outgoing labels of every state are pairwise disjoint."""
    mgr = a.mgr
    for s in range(a.num_states):
        seen = 0
        for e in a.out(s):
            if mgr._and(seen, e.label.node) != 0:
                return False
            seen = mgr._or(seen, e.label.node)
    return True


def strength(a):
    """Classify ``a`` as ``"terminal"``, ``"weak"`` or ``"general"``.

    An SCC is weak when it is rejecting (its internal marks miss some mark)
    or when every internal edge carries all marks.  A weak automaton is
    terminal when, in each accepting SCC, every state's internal edges
    cover true.
    """
    sccs, comp, acc = scc_info(a)
    full = a.full_mask
    mgr = a.mgr
    internal = [[] for _ in sccs]
    for e in a.edges:
        c = comp[e.src]
        if c != -1 and c == comp[e.dst]:
            internal[c].append(e)
    terminal = True
    for c, edges in enumerate(internal):
        if not edges:
            continue
        accepting = acc[c] & full == full
        if not accepting:
            continue
        if any(e.marks & full != full for e in edges):
            return "general"
        cover = {}
        for e in edges:
            cover[e.src] = mgr._or(cover.get(e.src, 0), e.label.node)
        if any(cover.get(s, 0) != 1 for s in sccs[c]):
            terminal = False
    return "terminal" if terminal else "weak"


def label_size(label):
    mgr = label.mgr
    return sop_size(mgr.isop(label, label))


def used_ap(a):
    names = set()
    for e in a.edges:
        names.update(a.mgr.support(e.label))
    return [x for x in a.ap if x in names] + sorted(names - set(a.ap))


@dataclass(frozen=True)
class AutomatonStats:
    states: int
    transitions: int
    ap_count: int
    label_size_total: int
    is_si: str
    is_det: bool
    strength: str
    marks: int = 0

    def as_dict(self):
        return {"states": self.states, "transitions": self.transitions,
                "ap": self.ap_count, "sum_label_size": self.label_size_total,
                "si": self.is_si, "det": self.is_det, "strength": self.strength,
                "marks": self.marks}


def stats(a, neg=None, cap=None):
    """Metrics of ``a``; ``neg`` (an automaton for the complement) enables SI."""
    from .limits import CapExceeded, ResourceExceeded as _RE
    from .stutter import is_stutter_insensitive

    si = "unknown"
    if neg is not None:
        try:
            si = "yes" if is_stutter_insensitive(a, neg) else "no"
        except (CapExceeded, _RE):
            si = "unknown"
    return AutomatonStats(
        states=a.num_states,
        transitions=len(a.edges),
        ap_count=len(used_ap(a)),
        label_size_total=sum(label_size(e.label) for e in a.edges),
        is_si=si,
        is_det=is_deterministic(a),
        strength=strength(a),
        marks=a.num_marks,
    )


def same_structure(a, b):
    """Equal up to edge order (same manager, same states, labels and marks)."""
    if a.mgr is not b.mgr or a.num_states != b.num_states or a.initial != b.initial \
            or a.num_marks != b.num_marks or len(a.edges) != len(b.edges):
        return False
    key = lambda e: (e.src, e.dst, e.marks, e.label.node)  # noqa: E731
    return sorted(map(key, a.edges)) == sorted(map(key, b.edges))


def new_manager(*automata):
    mgr = BddManager()
    for a in automata:
        for n in a.ap:
            mgr.register(n)
    return mgr
