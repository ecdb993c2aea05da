"""Reading and writing a subset of the HOA format.

Supported: one ``Start:`` state, generalized Büchi acceptance written as a
conjunction of ``Inf`` terms (or ``t`` for zero marks), explicit labels
over AP indices, and acceptance sets on transitions.  Acceptance sets
written after a state header apply to all its outgoing transitions.
"""

import re

from .automaton import Edge, Tgba, mark_list
from .boolfn import BddManager


class HoaError(ValueError):
    pass


def _label_text(a, label):
    mgr = a.mgr
    pos = {name: i for i, name in enumerate(a.ap)}
    sop = mgr.isop(label, label)
    if not sop:
        return "f"
    terms = []
    for product in sop:
        if not product:
            return "t"
        lits = sorted(((pos[mgr.name(v)], p) for v, p in product))
        terms.append("&".join(("" if p else "!") + str(i) for i, p in lits))
    return " | ".join(terms)


def hoa_print(a, name=None):
    """HOA text for ``a``; deterministic for a given automaton."""
    m = a.num_marks
    lines = ["HOA: v1"]
    if name:
        lines.append(f'name: "{name}"')
    lines.append(f"States: {a.num_states}")
    lines.append(f"Start: {a.initial}")
    lines.append(f"AP: {len(a.ap)}" + "".join(f' "{x}"' for x in a.ap))
    if m == 0:
        lines.append("acc-name: all")
        lines.append("Acceptance: 0 t")
    else:
        lines.append(f"acc-name: generalized-Buchi {m}")
        lines.append(f"Acceptance: {m} " + "&".join(f"Inf({i})" for i in range(m)))
    lines.append("properties: trans-labels explicit-labels trans-acc")
    lines.append("--BODY--")
    for s in range(a.num_states):
        lines.append(f"State: {s}")
        rows = []
        for e in a.out(s):
            marks = mark_list(e.marks)
            acc = " {" + " ".join(map(str, marks)) + "}" if marks else ""
            rows.append((e.dst, _label_text(a, e.label), acc))
        for dst, text, acc in sorted(rows):
            lines.append(f"[{text}] {dst}{acc}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


class _LabelParser:
    def __init__(self, text, vars_, mgr):
        self.toks = re.findall(r"\d+|[tf!&|()]", text)
        if "".join(self.toks) != re.sub(r"\s+", "", text):
            raise HoaError(f"bad label [{text}]")
        self.i = 0
        self.vars = vars_
        self.mgr = mgr

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        r = self.disj()
        if self.peek() is not None:
            raise HoaError("trailing tokens in label")
        return r

    def disj(self):
        r = self.conj()
        while self.peek() == "|":
            self.take()
            r = r | self.conj()
        return r

    def conj(self):
        r = self.atom()
        while self.peek() == "&":
            self.take()
            r = r & self.atom()
        return r

    def atom(self):
        tok = self.take()
        if tok == "!":
            return ~self.atom()
        if tok == "t":
            return self.mgr.true
        if tok == "f":
            return self.mgr.false
        if tok == "(":
            r = self.disj()
            if self.take() != ")":
                raise HoaError("expected ')' in label")
            return r
        if tok is not None and tok.isdigit():
            i = int(tok)
            if i >= len(self.vars):
                raise HoaError(f"AP index {i} out of range")
            return self.vars[i]
        raise HoaError(f"unexpected label token {tok!r}")


def _parse_acceptance(text):
    text = text.strip()
    m = re.match(r"(\d+)\s*(.*)$", text)
    if not m:
        raise HoaError(f"malformed Acceptance: {text}")
    count, cond = int(m.group(1)), m.group(2).replace(" ", "")
    if cond in ("t", ""):
        # declared sets that the condition ignores play no role
        return count, set()
    if "Fin" in cond or "|" in cond or "!" in cond:
        raise HoaError(f"unsupported acceptance condition: {cond} (only Inf conjunctions)")
    terms = cond.split("&")
    sets = set()
    for t in terms:
        mm = re.fullmatch(r"\(*Inf\((\d+)\)\)*", t)
        if not mm:
            raise HoaError(f"unsupported acceptance term: {t}")
        sets.add(int(mm.group(1)))
    if not sets <= set(range(count)):
        raise HoaError("acceptance refers to undeclared sets")
    return count, sets


def hoa_parse(text, mgr=None):
    """Parse one automaton in the supported HOA subset."""
    mgr = BddManager() if mgr is None else mgr
    header, sep, rest = text.partition("--BODY--")
    if not sep:
        raise HoaError("missing --BODY--")
    body, sep, _ = rest.partition("--END--")
    if not sep:
        raise HoaError("missing --END--")
    states = None
    start = None
    ap = []
    acc = None
    seen_version = False
    for raw in header.splitlines():
        line = raw.strip()
        if not line:
            continue
        key, _, value = line.partition(":")
        value = value.strip()
        if key == "HOA":
            seen_version = True
        elif key == "States":
            states = int(value)
        elif key == "Start":
            if start is not None or "&" in value:
                raise HoaError("only one initial state is supported")
            start = int(value)
        elif key == "AP":
            parts = re.findall(r'"((?:[^"\\]|\\.)*)"', value)
            n = int(value.split()[0])
            if n != len(parts):
                raise HoaError("AP count does not match the listed names")
            ap = parts
        elif key == "Acceptance":
            acc = _parse_acceptance(value)
        elif key in ("acc-name", "name", "properties", "tool") or key[:1].islower():
            continue
        else:
            raise HoaError(f"unsupported header line: {line}")
    if not seen_version:
        raise HoaError("missing HOA: v1 header")
    if acc is None:
        raise HoaError("missing Acceptance header")
    if start is None:
        raise HoaError("missing Start header")
    _, used = acc
    num_marks = len(used)
    renum = {s: i for i, s in enumerate(sorted(used))}
    for name in ap:
        mgr.register(name)
    vars_ = [mgr.var(name) for name in ap]
    edges = []
    cur = None
    state_marks = 0
    max_state = -1
    for raw in body.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("State:"):
            m = re.match(r'State:\s*(?:\[[^\]]*\]\s*)?(\d+)(?:\s*"[^"]*")?\s*(?:\{([^}]*)\})?\s*$',
                         line)
            if not m:
                raise HoaError(f"malformed state line: {line}")
            cur = int(m.group(1))
            max_state = max(max_state, cur)
            state_marks = _marks(m.group(2), renum)
            continue
        if cur is None:
            raise HoaError("transition before any State:")
        m = re.match(r"\[([^\]]*)\]\s*(\d+)\s*(?:\{([^}]*)\})?\s*$", line)
        if not m:
            raise HoaError(f"malformed transition: {line}")
        label = _LabelParser(m.group(1), vars_, mgr).parse()
        dst = int(m.group(2))
        max_state = max(max_state, dst)
        marks = _marks(m.group(3), renum) | state_marks
        edges.append(Edge(cur, label, marks, dst))
    n = states if states is not None else max_state + 1
    if max_state >= n or start >= max(n, 1):
        raise HoaError("state index out of range")
    return Tgba(mgr, ap, n, start, num_marks, edges)


def _marks(text, renum):
    if not text:
        return 0
    out = 0
    for tok in text.split():
        i = int(tok)
        if i in renum:
            out |= 1 << renum[i]
    return out


def read_hoa(path, mgr=None):
    with open(path, encoding="utf-8") as fh:
        return hoa_parse(fh.read(), mgr)


def write_hoa(a, path, name=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(hoa_print(a, name))
