"""Explicit Kripke structures, knowledge seeking and model checking.

The system text format (``.kts``) is line oriented::

    kripke
    ap a b
    init s0
    state s0 a=1 b=0
    state s1 a=0 b=1
    edge s0 s1
    edge s1 s0

``#`` starts a comment.  Every state assigns every atom.  States without
successors get a self-loop so that every path is infinite.
"""

import logging
from collections import deque
from dataclasses import dataclass, field

from . import ltl
from .automaton import Edge, LassoWord, Tgba, _product, tarjan
from .boolfn import BddManager
from .given import Fact, KnowledgeBase, run_strategy
from .limits import check_deadline

log = logging.getLogger(__name__)

FRONTIER_CAP = 10**4


class KtsError(ValueError):
    pass


@dataclass
class Kripke:
    ap: tuple
    labels: list
    succ: list
    initial: int = 0
    names: list = field(default=None)

    def __post_init__(self):
        self.ap = tuple(self.ap)
        self.labels = [frozenset(x) for x in self.labels]
        if not self.labels:
            raise KtsError("a system needs at least one state")
        n = len(self.labels)
        if self.names is None:
            self.names = [f"s{i}" for i in range(n)]
        if not 0 <= self.initial < n:
            raise KtsError("initial state out of range")
        succ = []
        for s, out in enumerate(self.succ):
            out = sorted(set(out))
            if any(not 0 <= d < n for d in out):
                raise KtsError(f"edge from {self.names[s]} to a missing state")
            succ.append(out or [s])
        succ.extend([s] for s in range(len(succ), n))
        self.succ = succ

    @property
    def num_states(self):
        return len(self.labels)

    def reachable(self):
        seen = [False] * self.num_states
        seen[self.initial] = True
        order = [self.initial]
        for s in order:
            for d in self.succ[s]:
                if not seen[d]:
                    seen[d] = True
                    order.append(d)
        return order

    def valuation(self, s, names=None):
        names = self.ap if names is None else names
        return {x: x in self.labels[s] for x in names}

    def to_tgba(self, mgr):
        """The system as a zero-mark automaton reading each state's label."""
        for x in self.ap:
            mgr.register(x)
        cubes = [mgr.cube(self.valuation(s)) for s in range(self.num_states)]
        edges = [Edge(s, cubes[s], 0, d) for s in range(self.num_states) for d in self.succ[s]]
        return Tgba(mgr, self.ap, self.num_states, self.initial, 0, edges)


def parse_system(text):
    ap = None
    init = None
    ids = {}
    labels = []
    names = []
    succ = []
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        where = f"line {lineno}"
        if not header:
            if kw != "kripke":
                raise KtsError(f"{where}: expected 'kripke' header")
            header = True
        elif kw == "ap":
            ap = tuple(parts[1:])
        elif kw == "init":
            if len(parts) != 2:
                raise KtsError(f"{where}: init takes one state")
            init = parts[1]
        elif kw == "state":
            if ap is None:
                raise KtsError(f"{where}: state before ap")
            if len(parts) < 2 or parts[1] in ids:
                raise KtsError(f"{where}: missing or duplicate state id")
            val = {}
            for tok in parts[2:]:
                name, eq, bit = tok.partition("=")
                if not eq or bit not in ("0", "1") or name not in ap:
                    raise KtsError(f"{where}: bad assignment {tok!r}")
                val[name] = bit == "1"
            if set(val) != set(ap):
                raise KtsError(f"{where}: state {parts[1]} must assign every atom")
            ids[parts[1]] = len(labels)
            names.append(parts[1])
            labels.append(frozenset(x for x in ap if val[x]))
            succ.append([])
        elif kw == "edge":
            if len(parts) != 3:
                raise KtsError(f"{where}: edge takes two states")
            for x in parts[1:]:
                if x not in ids:
                    raise KtsError(f"{where}: undeclared state {x!r}")
            succ[ids[parts[1]]].append(ids[parts[2]])
        else:
            raise KtsError(f"{where}: unknown keyword {kw!r}")
    if not header:
        raise KtsError("empty system file")
    if ap is None or not labels:
        raise KtsError("system needs an ap line and at least one state")
    if init is None:
        raise KtsError("missing init line")
    if init not in ids:
        raise KtsError(f"init refers to undeclared state {init!r}")
    return Kripke(ap, labels, succ, ids[init], names)


def load_system(path):
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


def print_system(k):
    lines = ["kripke", "ap " + " ".join(k.ap), f"init {k.names[k.initial]}"]
    for s in range(k.num_states):
        bits = " ".join(f"{x}={int(x in k.labels[s])}" for x in k.ap)
        lines.append(f"state {k.names[s]} {bits}".rstrip())
    for s in range(k.num_states):
        for d in k.succ[s]:
            lines.append(f"edge {k.names[s]} {k.names[d]}")
    return "\n".join(lines) + "\n"


# -- model checking --------------------------------------------------------------


@dataclass
class Verdict:
    status: str
    counterexample: LassoWord = None
    prefix_states: list = None
    cycle_states: list = None

    @property
    def holds(self):
        return self.status == "holds"


def _lasso(prod, full):
    """An accepting lasso of ``prod`` as ``(prefix edges, cycle edges)``."""
    n = prod.num_states
    succ = prod.successors()
    sccs, comp = tarjan(n, [prod.initial], succ)
    acc = {}
    for e in prod.edges:
        c = comp[e.src]
        if c != -1 and c == comp[e.dst]:
            acc[c] = acc.get(c, 0) | e.marks
    target = next((c for c, m in acc.items() if m & full == full), None)
    if target is None:
        return None
    members = set(sccs[target])
    # shortest path from the initial state into the SCC
    parent = {prod.initial: None}
    queue = deque([prod.initial])
    entry = None
    while queue:
        s = queue.popleft()
        if s in members:
            entry = s
            break
        for e in prod.out(s):
            if e.dst not in parent:
                parent[e.dst] = e
                queue.append(e.dst)
    prefix = []
    s = entry
    while parent[s] is not None:
        prefix.append(parent[s])
        s = parent[s].src
    prefix.reverse()

    def path_within(src, goal):
        # BFS inside the SCC; ``goal(edge)`` selects the last edge
        par = {src: None}
        q = deque([src])
        while q:
            v = q.popleft()
            for e in prod.out(v):
                if e.dst not in members:
                    continue
                if goal(e):
                    path = [e]
                    u = v
                    while par[u] is not None:
                        path.append(par[u])
                        u = par[u].src
                    path.reverse()
                    return path
                if e.dst not in par:
                    par[e.dst] = e
                    q.append(e.dst)
        raise AssertionError("SCC path search failed")

    cycle = []
    cur = entry
    missing = full
    while missing:
        bit = missing & -missing
        seg = path_within(cur, lambda e: e.marks & bit)
        cycle.extend(seg)
        cur = seg[-1].dst
        for e in seg:
            missing &= ~e.marks
    if cur != entry or not cycle:
        cycle.extend(path_within(cur, lambda e: e.dst == entry))
    return prefix, cycle


def check(k, b):
    """Model check system ``k`` against automaton ``b`` for the negated
    property; ``holds`` when their product is empty."""
    mgr = b.mgr
    missing = [x for x in b.ap if x not in k.ap]
    if missing:
        raise ValueError(f"automaton uses atoms absent from the system: {missing}")
    sys_aut = k.to_tgba(mgr)
    prod, pairs, _ = _product(sys_aut, b)
    found = _lasso(prod, prod.full_mask)
    if found is None:
        return Verdict("holds")
    prefix, cycle = found
    pre_states = [pairs[e.src][0] for e in prefix]
    cyc_states = [pairs[e.src][0] for e in cycle]
    # roll the cycle back into the prefix: same path, shorter lasso
    while pre_states and pre_states[-1] == cyc_states[-1]:
        cyc_states = [pre_states.pop()] + cyc_states[:-1]
    word = LassoWord(tuple(k.labels[s] for s in pre_states),
                     tuple(k.labels[s] for s in cyc_states))
    return Verdict("fails", word, pre_states, cyc_states)


def check_property(k, phi, kb=None, strategy="raw", gate=False, opts=None):
    """Model check ``phi`` on ``k`` through a strategy.

    With ``gate`` the knowledge is first tried with ``p.min∃``: an empty
    result proves ``phi`` without exploring the system.  Returns
    ``(verdict, automaton, report)``; the automaton is ``None`` when the
    gate decided.
    """
    if gate and kb is not None and len(kb):
        b, report = run_strategy("p.min∃", phi, kb, opts)
        if report.outcome == "empty":
            return Verdict("holds"), None, report
    b, report = run_strategy(strategy, phi, kb, opts)
    return check(k, b), b, report


def is_path(k, prefix_states, cycle_states):
    """True when the lasso of states is a real path of ``k`` from its initial state."""
    seq = list(prefix_states) + list(cycle_states)
    if not seq or seq[0] != k.initial:
        return False
    for s, d in zip(seq, seq[1:] + [cycle_states[0]]):
        if d not in k.succ[s]:
            return False
    return True


# -- knowledge seeking -----------------------------------------------------------


def _cube_formula(labels, names):
    names = sorted(names)
    lits = [ltl.Atom(x) if x in labels else ltl.Not(ltl.Atom(x)) for x in names]
    return ltl.And(*lits) if len(lits) > 1 else (lits[0] if lits else ltl.TRUE)


def _disjunction(valuations, names):
    """Compact formula for the set of ``valuations`` projected on ``names``."""
    mgr = BddManager(sorted(names))
    node = mgr.false
    for v in valuations:
        node = node | mgr.cube({x: x in v for x in names})
    return ltl.from_bdd(node)


def seek_initial(k, atoms):
    f = _cube_formula(k.labels[k.initial], atoms)
    return Fact(f, "initial", "label of the initial state")


def seek_first_steps(k, atoms, n=2, frontier_cap=FRONTIER_CAP):
    """``X^d f`` facts where ``f`` covers the labels reachable in exactly ``d`` steps."""
    facts = []
    frontier = {k.initial}
    for d in range(1, n + 1):
        check_deadline()
        frontier = {t for s in frontier for t in k.succ[s]}
        if len(frontier) > frontier_cap:
            log.info("first-steps exploration stops at depth %d: frontier %d", d, len(frontier))
            break
        f = _disjunction([k.labels[s] for s in frontier], atoms)
        if f is ltl.TRUE:
            continue
        for _ in range(d):
            f = ltl.X(f)
        facts.append(Fact(f, "first_steps", f"labels after exactly {d} step{'s' if d > 1 else ''}"))
    return facts


def seek_invariants(k, atoms, labels=()):
    """``G f`` facts established by exhaustive reachability.

    ``labels`` are extra candidate formulas (for instance the edge labels of
    the negated-property automaton) kept when they hold in every reachable
    state.
    """
    reach = k.reachable()
    vals = [k.labels[s] for s in reach]
    atoms = sorted(atoms)
    facts = []
    constant = {}
    for x in atoms:
        seen = {x in v for v in vals}
        if len(seen) == 1:
            constant[x] = seen.pop()
            lit = ltl.Atom(x) if constant[x] else ltl.Not(ltl.Atom(x))
            facts.append(Fact(ltl.G(lit), "invariant", f"{x} constant over reachable states"))
    free = [x for x in atoms if x not in constant]
    for i, x in enumerate(free):
        for y in free[i + 1:]:
            seen = {(x in v, y in v) for v in vals}
            for bx in (False, True):
                for by in (False, True):
                    if (bx, by) not in seen:
                        combo = _cube_formula({z for z, b in ((x, bx), (y, by)) if b}, (x, y))
                        facts.append(Fact(ltl.G(ltl.Not(combo)), "compat",
                                          f"{x}={int(bx)},{y}={int(by)} unreachable"))
    done = set()
    for f in labels:
        if not isinstance(f, ltl.Formula):
            f = ltl.from_bdd(f)
        if f is ltl.TRUE or f in done or not ltl.atoms(f) <= set(k.ap):
            continue
        done.add(f)
        if all(ltl.holds_on_lasso(f, (), (v,)) for v in vals):
            facts.append(Fact(ltl.G(f), "invariant", "automaton label holds everywhere"))
    return facts


def seek_convergent(k, atoms):
    """``F(G a | G !a)`` (or ``FG a`` / ``FG !a``) for atoms that are
    constant inside every SCC that a run can stay in forever."""
    reach = k.reachable()
    n = k.num_states
    sccs, comp = tarjan(n, [k.initial], k.succ)
    cyclic = []
    for i, members in enumerate(sccs):
        if len(members) > 1 or members[0] in k.succ[members[0]]:
            cyclic.append(members)
    facts = []
    for x in sorted(atoms):
        if len({x in k.labels[s] for s in reach}) == 1:
            continue  # already an invariant
        values = set()
        ok = True
        for members in cyclic:
            vals = {x in k.labels[s] for s in members}
            if len(vals) > 1:
                ok = False
                break
            values |= vals
        if not ok:
            continue
        a = ltl.Atom(x)
        if values == {True}:
            f = ltl.F(ltl.G(a))
        elif values == {False}:
            f = ltl.F(ltl.G(ltl.Not(a)))
        else:
            f = ltl.F(ltl.Or(ltl.G(a), ltl.G(ltl.Not(a))))
        facts.append(Fact(f, "convergent", f"{x} constant in every cyclic SCC"))
    return facts


_KIND_ORDER = {"initial": 0, "first_steps": 1, "invariant": 2, "compat": 3, "convergent": 4}


def seek_all(k, phi, labels=(), depth=2):
    """All seekers restricted to the atoms of ``phi``, in canonical order."""
    if isinstance(phi, str):
        phi = ltl.parse(phi)
    atoms = ltl.atoms(phi) & set(k.ap)
    facts = []
    if atoms:
        facts.append(seek_initial(k, atoms))
    facts += seek_first_steps(k, atoms, depth)
    facts += seek_invariants(k, atoms, labels)
    facts += seek_convergent(k, atoms)
    seen = set()
    out = []
    for fact in sorted(facts, key=lambda f: (_KIND_ORDER.get(f.kind, 9), str(f.formula))):
        if fact.formula is ltl.TRUE or fact.formula in seen:
            continue
        seen.add(fact.formula)
        out.append(fact)
    return KnowledgeBase(out)


def automaton_labels(a):
    """Edge labels of ``a`` as formulas, for :func:`seek_invariants`."""
    out = []
    for e in a.edges:
        f = ltl.from_bdd(e.label)
        if f not in out:
            out.append(f)
    return out
