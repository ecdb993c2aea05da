"""Simplifying a negated-property automaton given knowledge about the system.

Every fact ``K`` is assumed to hold on the system, so the automaton for
``!phi`` may be replaced by any automaton that agrees with it on the
words of ``K``.  Strategies provided here:

``raw``
    translation of ``!phi`` only.
``p.min`` / ``p.min∃``
    translation of ``!phi & K`` (optionally with the atoms of ``K`` that
    do not occur in ``phi`` quantified away).
``p.max`` / ``p.max∃``
    translation of ``!phi | !K``.
``BM`` / ``p.BM``
    per-transition Boolean bounds derived from the product with ``K``,
    then relabelling with an irredundant cover inside the bounds.
``SIrelax`` / ``SIrestrict`` (and ``p.`` variants)
    replace the automaton by its stutter-insensitive closure, or remove
    its stutter-sensitive part, when the knowledge shows that the words
    added or removed cannot occur.

Names prefixed with ``p.`` use the conjunction of all facts at once; the
others integrate the facts one at a time.  ``A+B`` applies ``A`` then
``B``.
"""

import logging
import time
from dataclasses import dataclass, field

from . import ltl
from .automaton import (Tgba, _product, _trim, import_automaton, is_empty,
                        is_universal_syntactic, product, same_structure, stats, sum_,
                        universal_automaton)
from .boolfn import Bdd, BddManager
from .complement import complement_generic
from .limits import CapExceeded, ResourceExceeded, default_complement_cap
from .stutter import si_closure, ss_part
from .translate import simplify, translate

log = logging.getLogger(__name__)


# -- knowledge -------------------------------------------------------------------


@dataclass(frozen=True)
class Fact:
    formula: ltl.Formula
    kind: str = "user"
    note: str = ""

    def __str__(self):
        return str(self.formula)


@dataclass
class KnowledgeBase:
    facts: list = field(default_factory=list)

    @classmethod
    def from_formulas(cls, formulas, kind="user"):
        out = []
        for f in formulas:
            if isinstance(f, str):
                f = ltl.parse(f)
            out.append(Fact(f, kind))
        return cls(out)

    @classmethod
    def from_lines(cls, lines, kind="user"):
        formulas = []
        for line in lines:
            line = line.split("#", 1)[0].strip()
            if line:
                formulas.append(line)
        return cls.from_formulas(formulas, kind)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)

    def relevant_to(self, phi):
        """Facts sharing at least one atom with ``phi``."""
        names = ltl.atoms(phi)
        return KnowledgeBase([k for k in self.facts if ltl.atoms(k.formula) & names])

    def conjunction(self):
        return ltl.And(*[k.formula for k in self.facts]) if self.facts else ltl.TRUE

    def __len__(self):
        return len(self.facts)

    def __iter__(self):
        return iter(self.facts)


# -- formula-level strategies ---------------------------------------------------


def _hidden(phi, k, use_qe):
    if use_qe:
        return ltl.qe_syntactic(ltl.atoms(k) - ltl.atoms(phi), k)
    return k


def strategy_min(phi, k, use_qe=False, mgr=None, state_cap=None):
    """Automaton for ``!phi & K``."""
    k = _hidden(phi, k, use_qe)
    return simplify(translate(ltl.And(ltl.negate(phi), k), mgr, state_cap))


def strategy_max(phi, k, use_qe=False, mgr=None, state_cap=None):
    """Automaton for ``!phi | !K``, or the universal automaton when the
    dual test shows ``phi & K`` has no model."""
    k = _hidden(phi, k, use_qe)
    mgr = BddManager() if mgr is None else mgr
    if is_empty(translate(ltl.And(phi, k), mgr, state_cap)):
        return universal_automaton(mgr)
    return simplify(translate(ltl.Or(ltl.negate(phi), ltl.negate(k)), mgr, state_cap))


# -- Boolean bounds --------------------------------------------------------------


class BoundedTgba:
    """A TGBA whose edges carry an interval ``[low, high]`` of labels.

    ``base`` keeps the original labels; ``low`` and ``high`` are lists of
    BDD nodes indexed like ``base.edges``.
    """

    def __init__(self, base, low=None, high=None):
        self.base = base
        self.low = list(low) if low is not None else [e.label.node for e in base.edges]
        self.high = list(high) if high is not None else [e.label.node for e in base.edges]

    @property
    def mgr(self):
        return self.base.mgr

    def bounds(self, i):
        mgr = self.mgr
        return Bdd(mgr, self.low[i]), Bdd(mgr, self.high[i])

    def low_automaton(self):
        """The automaton reading lower bounds, and its edge -> base index map."""
        idx = [i for i, n in enumerate(self.low) if n != 0]
        edges = [self.base.edges[i]._replace(label=Bdd(self.mgr, self.low[i])) for i in idx]
        return self.base.replace(edges=edges), idx


def quantify_to(a_k, names):
    """``a_k`` with every atom outside ``names`` existentially quantified."""
    extra = [x for x in a_k.ap if x not in names]
    if not extra:
        return a_k
    mgr = a_k.mgr
    edges = [e._replace(label=mgr.exists(e.label, extra)) for e in a_k.edges]
    return Tgba(mgr, [x for x in a_k.ap if x in names], a_k.num_states, a_k.initial,
                a_k.num_marks, edges)


def guarantees(b, a_k, sg_over="reachable"):
    """State and transition guarantees of ``b`` against knowledge ``a_k``.

    Returns ``(sg, tg)`` as lists of BDD nodes: ``sg[q]`` is the union of
    the labels leaving the knowledge states paired with ``q``, ``tg[i]`` the
    union of knowledge labels synchronizing with edge ``i``.  ``tg`` is read
    on the trimmed product of ``a_k`` with ``b`` at its lower bounds.  By
    default ``sg`` is read on every reachable pair of ``a_k`` with the
    original labels of ``b``, which keeps the language of the product with
    the knowledge whatever labels end up inside the bounds.
    ``sg_over="trim"`` reads it on the trimmed lower-bound product instead:
    smaller guarantees, but the product language can change.
    """
    mgr = b.mgr
    a_k = quantify_to(import_automaton(a_k, mgr), set(b.base.ap))
    low_aut, idx = b.low_automaton()
    prod, pairs, origins = _product(low_aut, a_k)
    _, _, kept = _trim(prod)
    or_ = mgr._or
    k_out = [0] * a_k.num_states
    for e in a_k.edges:
        k_out[e.src] = or_(k_out[e.src], e.label.node)
    if sg_over == "reachable":
        _, paired, _ = _product(b.base, a_k)
    elif sg_over == "trim":
        paired = [pairs[p] for p in {prod.edges[i].src for i in kept}]
    else:
        raise ValueError(f"unknown sg_over {sg_over!r}")
    sg = [0] * b.base.num_states
    for q, k in paired:
        sg[q] = or_(sg[q], k_out[k])
    tg = [0] * len(b.base.edges)
    for i in kept:
        e1, e2 = origins[i]
        j = idx[e1]
        tg[j] = or_(tg[j], a_k.edges[e2].label.node)
    return sg, tg


def update_bounds_given(b, a_k, sg_over="reachable"):
    """Tighten the lower bounds and relax the upper bounds of ``b`` using
    knowledge automaton ``a_k``; returns a new :class:`BoundedTgba`."""
    if not isinstance(b, BoundedTgba):
        b = BoundedTgba(b)
    mgr = b.mgr
    sg, tg = guarantees(b, a_k, sg_over)
    low, high = [], []
    for i, e in enumerate(b.base.edges):
        low.append(mgr._and(b.low[i], tg[i]))
        high.append(mgr._or(b.high[i], mgr._not(sg[e.src])))
    return BoundedTgba(b.base, low, high)


def bounds_simplify(b):
    """Relabel every edge with an irredundant cover inside its bounds."""
    if not isinstance(b, BoundedTgba):
        b = BoundedTgba(b)
    mgr = b.mgr
    edges = []
    for i, e in enumerate(b.base.edges):
        if b.low[i] == 0:
            continue
        lo, hi = b.bounds(i)
        edges.append(e._replace(label=mgr.isop_bdd(lo, hi)))
    return simplify(b.base.replace(edges=edges))


# -- stutter-based strategies ----------------------------------------------------


def si_relax(a, a_neg, fact_automata, cap=None):
    """``si_closure(a)`` if one fact excludes every word it adds, else ``a``.

    Returns ``(automaton, changed, flags)``.
    """
    if not fact_automata:
        return a, False, []
    try:
        closed = si_closure(a, cap)
        added = product(closed, a_neg)
        for k in fact_automata:
            if is_empty(product(added, k)):
                return closed, True, []
    except (CapExceeded, ResourceExceeded) as exc:
        log.info("SIrelax gave up: %s", exc)
        return a, False, ["cap"]
    return a, False, []


def si_restrict(a, a_neg, fact_automata, cap=None):
    """``a`` minus its stutter-sensitive part if one fact excludes that part."""
    if not fact_automata:
        return a, False, []
    try:
        part = ss_part(a, a_neg, cap)
        for k in fact_automata:
            if is_empty(product(part, k)):
                if is_empty(part):
                    return a, False, []
                keep = complement_generic(part, cap)
                return simplify(product(a, keep)), True, []
    except (CapExceeded, ResourceExceeded) as exc:
        log.info("SIrestrict gave up: %s", exc)
        return a, False, ["cap"]
    return a, False, []


# -- strategy driver -------------------------------------------------------------

ROSTER = ("raw", "p.min", "p.max", "p.min∃", "p.max∃", "p.BM", "BM",
          "p.SIrelax", "p.SIrestrict", "SIrelax", "SIrestrict")

_STAGES = {"p.min", "p.max", "p.min∃", "p.max∃", "p.BM", "BM",
           "p.SIrelax", "p.SIrestrict", "SIrelax", "SIrestrict"}


def normalize_name(name):
    """Canonical strategy name; ``E`` or ``_qe`` may stand for ``∃``."""
    stages = []
    for part in name.split("+"):
        part = part.strip()
        for alias in ("_qe", "E"):
            if part.startswith("p.m") and part.endswith(alias):
                part = part[: -len(alias)] + "∃"
        if part == "raw" and len(name.split("+")) == 1:
            return "raw"
        if part not in _STAGES:
            raise ValueError(f"unknown strategy {part!r}; known: {', '.join(ROSTER)}")
        stages.append(part)
    return "+".join(stages)


@dataclass
class StrategyOptions:
    state_cap: int = None
    complement_cap: int = None
    sg_over: str = "reachable"
    with_si: bool = False


@dataclass
class StrategyReport:
    strategy: str
    outcome: str
    before: object
    after: object
    time_ms: float
    flags: list = field(default_factory=list)
    skipped_facts: list = field(default_factory=list)

    def as_dict(self):
        return {"strategy": self.strategy, "outcome": self.outcome,
                "before": self.before.as_dict() if self.before else None,
                "after": self.after.as_dict() if self.after else None,
                "time_ms": round(self.time_ms, 3), "flags": list(self.flags),
                "skipped_facts": list(self.skipped_facts)}


class _Problem:
    """Shared state of one (phi, knowledge) problem: a single BDD manager,
    the raw automaton, its complement and lazily translated facts."""

    def __init__(self, phi, kb, opts):
        self.phi = phi
        self.kb = kb
        self.opts = opts
        self.mgr = BddManager()
        self.raw = simplify(translate(ltl.negate(phi), self.mgr, opts.state_cap))
        self.pos = simplify(translate(phi, self.mgr, opts.state_cap))
        self._facts = None
        self._conj = {}
        self.skipped = []

    def translate(self, f):
        return simplify(translate(f, self.mgr, self.opts.state_cap))

    def fact_automata(self):
        if self._facts is None:
            self._facts = []
            for k in self.kb:
                try:
                    self._facts.append(self.translate(k.formula))
                except (ResourceExceeded, RecursionError) as exc:
                    log.info("skipping fact %s: %s", k, exc)
                    self.skipped.append(str(k))
        return self._facts

    def knowledge(self, qe):
        """Conjunction of all facts, optionally quantified to atoms(phi)."""
        key = bool(qe)
        if key not in self._conj:
            self._conj[key] = _hidden(self.phi, self.kb.conjunction(), qe)
        return self._conj[key]

    def conj_automata(self):
        """One automaton for the conjunction, or nothing if it is too big."""
        if not len(self.kb):
            return []
        try:
            return [self.translate(self.knowledge(False))]
        except ResourceExceeded as exc:
            log.info("skipping conjunction of facts: %s", exc)
            self.skipped.append("<conjunction>")
            return []


def _stage(p, name, cur, first):
    """Apply one stage; returns ``(automaton, flags)``."""
    opts = p.opts
    if name in ("p.min", "p.min∃"):
        qe = name.endswith("∃")
        if first:
            return strategy_min(p.phi, p.kb.conjunction(), qe, p.mgr, opts.state_cap), []
        return simplify(product(cur, p.translate(p.knowledge(qe)))), []
    if name in ("p.max", "p.max∃"):
        qe = name.endswith("∃")
        if first:
            return strategy_max(p.phi, p.kb.conjunction(), qe, p.mgr, opts.state_cap), []
        k = p.knowledge(qe)
        if is_empty(p.translate(ltl.And(p.phi, k))):
            return universal_automaton(p.mgr), []
        return simplify(sum_(cur, p.translate(ltl.negate(k)))), []
    if name in ("BM", "p.BM"):
        facts = p.fact_automata() if name == "BM" else p.conj_automata()
        b = BoundedTgba(cur)
        for a_k in facts:
            b = update_bounds_given(b, a_k, opts.sg_over)
        return bounds_simplify(b), []
    if name in ("SIrelax", "p.SIrelax"):
        facts = p.fact_automata() if name == "SIrelax" else p.conj_automata()
        out, _, flags = si_relax(cur, p.pos, facts, opts.complement_cap)
        return out, flags
    if name in ("SIrestrict", "p.SIrestrict"):
        facts = p.fact_automata() if name == "SIrestrict" else p.conj_automata()
        out, _, flags = si_restrict(cur, p.pos, facts, opts.complement_cap)
        return out, flags
    raise ValueError(f"unknown strategy stage {name!r}")


def _outcome(result, raw):
    if is_empty(result):
        return "empty"
    if is_universal_syntactic(result):
        return "universal"
    if same_structure(result, raw):
        return "unchanged"
    return "simplified"


def automaton_stats(a, neg=None, cap=None):
    """Stats of ``a``; SI uses ``neg`` or, failing that, a capped generic complement."""
    if neg is None and cap is not None:
        try:
            neg = complement_generic(a, cap)
        except (CapExceeded, ResourceExceeded):
            neg = None
    return stats(a, neg, cap)


def run_strategy(name, phi, kb=None, opts=None):
    """Run strategy ``name`` on property ``phi`` with knowledge ``kb``.

    Returns ``(automaton, report)``.  The automaton stands for ``!phi``
    on every system satisfying the facts of ``kb``.
    """
    if isinstance(phi, str):
        phi = ltl.parse(phi)
    if kb is None:
        kb = KnowledgeBase()
    elif not isinstance(kb, KnowledgeBase):
        kb = KnowledgeBase.from_formulas(kb)
    opts = opts or StrategyOptions()
    canon = normalize_name(name)
    t0 = time.perf_counter()
    p = _Problem(phi, kb, opts)
    cur = p.raw
    flags = []
    if canon != "raw":
        for i, stage in enumerate(canon.split("+")):
            cur, more = _stage(p, stage, cur, i == 0)
            flags.extend(more)
    elapsed = (time.perf_counter() - t0) * 1000.0
    outcome = _outcome(cur, p.raw)
    cap = opts.complement_cap if opts.complement_cap is not None else default_complement_cap()
    if opts.with_si:
        before = automaton_stats(p.raw, p.pos, cap)
        neg = p.pos if outcome == "unchanged" else None
        after = automaton_stats(cur, neg, cap)
    else:
        before, after = stats(p.raw), stats(cur)
    report = StrategyReport(canon, outcome, before, after, elapsed, flags, list(p.skipped))
    return cur, report


__all__ = ["Fact", "KnowledgeBase", "BoundedTgba", "StrategyOptions", "StrategyReport",
           "ROSTER", "guarantees", "update_bounds_given", "bounds_simplify", "si_relax",
           "si_restrict", "run_strategy", "normalize_name", "quantify_to",
           "automaton_stats", "strategy_min", "strategy_max"]
