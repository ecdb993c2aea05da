"""Seeded generators for formulas, words, automata and Kripke structures.

All generators take a :class:`random.Random` instance so that corpora and
tests are reproducible.
"""

import random

from . import ltl
from .automaton import Edge, LassoWord, Tgba
from .boolfn import BddManager

ATOMS = ("a", "b", "c")

_UNARY = ("not", "X", "F", "G")
_BINARY = ("and", "or", "U", "R", "implies")


def random_formula(rng, atoms=ATOMS, depth=4):
    """Random LTL formula over ``atoms`` with nesting depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.05:
            return rng.choice((ltl.TRUE, ltl.FALSE))
        return ltl.Atom(rng.choice(atoms))
    if rng.random() < 0.45:
        op = rng.choice(_UNARY)
        sub = random_formula(rng, atoms, depth - 1)
        return {"not": ltl.Not, "X": ltl.X, "F": ltl.F, "G": ltl.G}[op](sub)
    op = rng.choice(_BINARY)
    left = random_formula(rng, atoms, depth - 1)
    right = random_formula(rng, atoms, depth - 1)
    ctor = {"and": ltl.And, "or": ltl.Or, "U": ltl.U, "R": ltl.R,
            "implies": ltl.Implies}[op]
    return ctor(left, right)


def random_letter(rng, atoms=ATOMS):
    return frozenset(x for x in atoms if rng.random() < 0.5)


def random_lasso(rng, atoms=ATOMS, max_prefix=4, max_cycle=4):
    prefix = [random_letter(rng, atoms) for _ in range(rng.randint(0, max_prefix))]
    cycle = [random_letter(rng, atoms) for _ in range(rng.randint(1, max_cycle))]
    return LassoWord(tuple(prefix), tuple(cycle))


def random_label(rng, mgr, atoms):
    """A random non-false Boolean function given as a small DNF."""
    node = mgr.false
    for _ in range(rng.randint(1, 2)):
        cube = {x: rng.random() < 0.5 for x in atoms if rng.random() < 0.6}
        node = node | mgr.cube(cube)
    return node


def random_automaton(rng, mgr=None, atoms=ATOMS, states=4, marks=1, density=1.5):
    """Random TGBA where every state has at least one outgoing edge."""
    mgr = BddManager(atoms) if mgr is None else mgr
    for x in atoms:
        mgr.register(x)
    edges = []
    n_edges = max(states, int(states * density))
    for i in range(n_edges):
        src = i if i < states else rng.randrange(states)
        dst = rng.randrange(states)
        m = 0
        for k in range(marks):
            if rng.random() < 0.5:
                m |= 1 << k
        edges.append(Edge(src, random_label(rng, mgr, atoms), m, dst))
    return Tgba(mgr, atoms, states, 0, marks, edges)


def random_kripke(rng, atoms=ATOMS, states=6, out_degree=2):
    """Random Kripke structure with reachable states ``0..states-1``."""
    from .sysmc import Kripke

    labels = [frozenset(x for x in atoms if rng.random() < 0.5) for _ in range(states)]
    succ = [set() for _ in range(states)]
    for s in range(1, states):
        succ[rng.randrange(s)].add(s)
    for s in range(states):
        for _ in range(rng.randint(1, out_degree)):
            succ[s].add(rng.randrange(states))
    return Kripke(tuple(atoms), labels, [sorted(x) for x in succ], 0)


def make_rng(seed):
    return random.Random(seed)


def random_problem(rng, atoms=ATOMS, depth=4, max_facts=3):
    """A property and facts that share atoms with it.

    Facts come from the seekers run on a random system, so they are
    mutually consistent and of the kinds a model checker can glean.
    """
    from .sysmc import seek_all

    while True:
        phi = random_formula(rng, atoms, depth)
        if ltl.atoms(phi):
            break
    k = random_kripke(rng, atoms, states=rng.randint(3, 7))
    found = list(seek_all(k, phi))
    rng.shuffle(found)
    return phi, [f.formula for f in found[:rng.randint(1, max_facts)]]


def problem_text(phi, facts):
    return "\n".join([str(phi)] + [str(f) for f in facts]) + "\n"


def write_corpus(directory, n, seed=0, atoms=ATOMS, depth=4):
    """Write ``n`` problem files named ``p000.prob`` ... into ``directory``."""
    from pathlib import Path

    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    rng = make_rng(seed)
    paths = []
    for i in range(n):
        phi, facts = random_problem(rng, atoms, depth)
        path = root / f"p{i:03d}.prob"
        path.write_text(problem_text(phi, facts), encoding="utf-8")
        paths.append(path)
    return paths
