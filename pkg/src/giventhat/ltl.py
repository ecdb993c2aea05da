"""LTL formulas: construction, parsing, printing and rewriting.

Formulas are hash-consed: two structurally equal formulas are the same
Python object, so identity comparison and hashing are cheap.

Grammar (loosest binding first)::

    f ::= f -> f | f <-> f          (right associative)
        | f '|' f
        | f & f
        | f U f | f R f             (right associative)
        | ! f | X f | F f | G f
        | atom | 1 | 0 | true | false | ( f )
"""

import re
import weakref

from .boolfn import BddManager

TEMPORAL = frozenset({"X", "F", "G", "U", "R"})
_UNARY = frozenset({"not", "X", "F", "G"})
_BINARY = frozenset({"implies", "equiv", "U", "R"})


class Formula:
    __slots__ = ("op", "children", "name", "_hash", "__weakref__")

    _table = weakref.WeakValueDictionary()

    def __new__(cls, op, children=(), name=None):
        key = (op, children, name)
        f = cls._table.get(key)
        if f is None:
            f = object.__new__(cls)
            f.op = op
            f.children = children
            f.name = name
            f._hash = hash(key)
            cls._table[key] = f
        return f

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Formula, (self.op, self.children, self.name))

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"Formula({to_string(self)!r})"

    @property
    def is_boolean(self):
        """True when no temporal operator occurs in the formula."""
        return _is_boolean(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


_boolean_memo = weakref.WeakKeyDictionary()


def _is_boolean(f):
    r = _boolean_memo.get(f)
    if r is None:
        r = f.op not in TEMPORAL and all(_is_boolean(c) for c in f.children)
        _boolean_memo[f] = r
    return r


TRUE = Formula("true")
FALSE = Formula("false")


def Atom(name):
    return Formula("ap", (), name)


def Not(f):
    return Formula("not", (f,))


def _nary(op, fs):
    flat = []
    for f in fs:
        if f.op == op:
            flat.extend(f.children)
        else:
            flat.append(f)
    if len(flat) == 1:
        return flat[0]
    if not flat:
        return TRUE if op == "and" else FALSE
    return Formula(op, tuple(flat))


def And(*fs):
    return _nary("and", fs)


def Or(*fs):
    return _nary("or", fs)


def Implies(f, g):
    return Formula("implies", (f, g))


def Equiv(f, g):
    return Formula("equiv", (f, g))


def X(f):
    return Formula("X", (f,))


def F(f):
    return Formula("F", (f,))


def G(f):
    return Formula("G", (f,))


def U(f, g):
    return Formula("U", (f, g))


def R(f, g):
    return Formula("R", (f, g))


# -- parsing --------------------------------------------------------------------


class LtlSyntaxError(ValueError):
    def __init__(self, message, text, pos):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(<->|->|[!&|()])|([A-Za-z_][A-Za-z0-9_]*)|([01]))")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LtlSyntaxError("unexpected character", text, pos)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message):
        raise LtlSyntaxError(message, self.text, self.tokens[self.i][1])

    def parse(self):
        f = self.implication()
        if self.peek() is not None:
            self.error("unexpected token")
        return f

    def implication(self):
        left = self.disjunction()
        tok = self.peek()
        if tok == "->":
            self.take()
            return Implies(left, self.implication())
        if tok == "<->":
            self.take()
            return Equiv(left, self.implication())
        return left

    def disjunction(self):
        items = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            items.append(self.conjunction())
        return Or(*items) if len(items) > 1 else items[0]

    def conjunction(self):
        items = [self.binary_temporal()]
        while self.peek() == "&":
            self.take()
            items.append(self.binary_temporal())
        return And(*items) if len(items) > 1 else items[0]

    def binary_temporal(self):
        left = self.unary()
        tok = self.peek()
        if tok == "U":
            self.take()
            return U(left, self.binary_temporal())
        if tok == "R":
            self.take()
            return R(left, self.binary_temporal())
        return left

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("X", "F", "G"):
            self.take()
            return {"X": X, "F": F, "G": G}[tok](self.unary())
        if tok == "(":
            self.take()
            f = self.implication()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return f
        if tok in ("1", "true"):
            self.take()
            return TRUE
        if tok in ("0", "false"):
            self.take()
            return FALSE
        if tok is not None and (tok[0].isalpha() or tok[0] == "_") and tok not in ("U", "R"):
            self.take()
            return Atom(tok)
        self.error("expected a formula")


def parse(text):
    """Parse LTL ``text`` into a :class:`Formula`."""
    return _Parser(text).parse()


# -- printing -------------------------------------------------------------------

_PREC = {"implies": 1, "equiv": 1, "or": 2, "and": 3, "U": 4, "R": 4}
_SYM = {"implies": " -> ", "equiv": " <-> ", "or": " | ", "and": " & ",
        "U": " U ", "R": " R "}


def to_string(f):
    op = f.op
    if op == "ap":
        return f.name
    if op == "true":
        return "1"
    if op == "false":
        return "0"
    if op in _UNARY:
        child = f.children[0]
        text = to_string(child)
        if child.op in _PREC:
            return f"{'!' if op == 'not' else op}({text})"
        return f"!{text}" if op == "not" else f"{op} {text}"
    prec = _PREC[op]
    parts = []
    for i, child in enumerate(f.children):
        text = to_string(child)
        cp = _PREC.get(child.op)
        right_assoc_ok = op in ("implies", "equiv") and i == len(f.children) - 1
        if cp is not None and (cp < prec or (cp == prec and not right_assoc_ok)):
            text = f"({text})"
        parts.append(text)
    return _SYM[op].join(parts)


# -- queries and rewriting -----------------------------------------------------


def atoms(f):
    """Set of atomic proposition names occurring in ``f``."""
    out = set()
    stack = [f]
    seen = set()
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if g.op == "ap":
            out.add(g.name)
        stack.extend(g.children)
    return out


def atoms_ordered(f):
    """Atom names in order of first occurrence (left to right)."""
    out = []

    def walk(g):
        if g.op == "ap":
            if g.name not in out:
                out.append(g.name)
        for c in g.children:
            walk(c)

    walk(f)
    return out


def negate(f):
    return nnf(Not(f))


def nnf(f):
    """Negation normal form; ``->`` and ``<->`` are expanded."""
    return _nnf(f, False, {})


def _nnf(f, neg, memo):
    key = (f, neg)
    r = memo.get(key)
    if r is not None:
        return r
    op = f.op
    c = f.children
    if op == "ap":
        r = Not(f) if neg else f
    elif op == "true":
        r = FALSE if neg else TRUE
    elif op == "false":
        r = TRUE if neg else FALSE
    elif op == "not":
        r = _nnf(c[0], not neg, memo)
    elif op == "and":
        parts = [_nnf(x, neg, memo) for x in c]
        r = Or(*parts) if neg else And(*parts)
    elif op == "or":
        parts = [_nnf(x, neg, memo) for x in c]
        r = And(*parts) if neg else Or(*parts)
    elif op == "implies":
        r = _nnf(Or(Not(c[0]), c[1]), neg, memo)
    elif op == "equiv":
        a, b = c
        if neg:
            r = Or(And(_nnf(a, False, memo), _nnf(b, True, memo)),
                   And(_nnf(a, True, memo), _nnf(b, False, memo)))
        else:
            r = Or(And(_nnf(a, False, memo), _nnf(b, False, memo)),
                   And(_nnf(a, True, memo), _nnf(b, True, memo)))
    elif op == "X":
        r = X(_nnf(c[0], neg, memo))
    elif op == "F":
        r = G(_nnf(c[0], True, memo)) if neg else F(_nnf(c[0], False, memo))
    elif op == "G":
        r = F(_nnf(c[0], True, memo)) if neg else G(_nnf(c[0], False, memo))
    elif op == "U":
        a, b = (_nnf(x, neg, memo) for x in c)
        r = R(a, b) if neg else U(a, b)
    elif op == "R":
        a, b = (_nnf(x, neg, memo) for x in c)
        r = U(a, b) if neg else R(a, b)
    else:
        raise ValueError(f"unknown operator {op}")
    memo[key] = r
    return r


def simplify_light(f):
    """Constant folding, idempotence and double-negation removal.

    ``X`` is deliberately not distributed over Boolean connectives.
    """
    op = f.op
    if op in ("ap", "true", "false"):
        return f
    c = [simplify_light(x) for x in f.children]
    if op == "not":
        g = c[0]
        if g is TRUE:
            return FALSE
        if g is FALSE:
            return TRUE
        if g.op == "not":
            return g.children[0]
        return Not(g)
    if op in ("and", "or"):
        absorbing, neutral = (FALSE, TRUE) if op == "and" else (TRUE, FALSE)
        items = []
        for g in _nary(op, c).children if len(c) > 1 else c:
            if g is absorbing:
                return absorbing
            if g is neutral or g in items:
                continue
            items.append(g)
        for g in items:
            if Not(g) in items:
                return absorbing
        return _nary(op, items)
    if op in ("X", "F", "G"):
        g = c[0]
        if g is TRUE or g is FALSE:
            return g
        if op in ("F", "G") and g.op == op:
            return g
        return Formula(op, (g,))
    a, b = c
    if op == "U":
        if b is TRUE or b is FALSE or a is FALSE or a is b:
            return b
        if a is TRUE:
            return simplify_light(F(b))
        return U(a, b)
    if op == "R":
        if b is TRUE or b is FALSE or a is TRUE or a is b:
            return b
        if a is FALSE:
            return simplify_light(G(b))
        return R(a, b)
    if op == "implies":
        if a is FALSE or b is TRUE:
            return TRUE
        if a is TRUE:
            return b
        return Implies(a, b)
    if op == "equiv":
        if a is b:
            return TRUE
        return Equiv(a, b)
    raise ValueError(f"unknown operator {op}")


def to_bdd(f, mgr):
    """Bdd of a Boolean (temporal-operator-free) formula."""
    op = f.op
    if op == "ap":
        return mgr.var(f.name)
    if op == "true":
        return mgr.true
    if op == "false":
        return mgr.false
    if op == "not":
        return ~to_bdd(f.children[0], mgr)
    if op == "and":
        return mgr.conj(to_bdd(c, mgr) for c in f.children)
    if op == "or":
        return mgr.disj(to_bdd(c, mgr) for c in f.children)
    if op == "implies":
        return to_bdd(f.children[0], mgr).implies(to_bdd(f.children[1], mgr))
    if op == "equiv":
        return ~(to_bdd(f.children[0], mgr) ^ to_bdd(f.children[1], mgr))
    raise ValueError(f"not a Boolean formula: {to_string(f)}")


def from_bdd(b):
    """Formula for a Bdd, written as its irredundant sum of products."""
    mgr = b.mgr
    cover = mgr.isop(b, b)
    terms = []
    for product in cover:
        lits = [Atom(mgr.name(i)) if pos else Not(Atom(mgr.name(i)))
                for i, pos in product]
        terms.append(And(*lits))
    return Or(*terms)


def qe_syntactic(props, k):
    """Over-approximate ``exists props. k`` by quantifying Boolean subformulas.

    ``k`` is first put in negation normal form so that every maximal
    Boolean subformula occurs positively; each one is then replaced by its
    existential projection.
    """
    props = set(props)
    if not props:
        return k
    mgr = BddManager()

    def walk(f):
        if f.is_boolean:
            if not (atoms(f) & props):
                return f
            b = mgr.exists(to_bdd(f, mgr), [p for p in props if p in mgr._index])
            return from_bdd(b)
        return Formula(f.op, tuple(walk(c) for c in f.children), f.name)

    return simplify_light(walk(nnf(k)))


# -- semantics on ultimately periodic words ------------------------------------


def holds_on_lasso(f, prefix, cycle):
    """Direct evaluation of ``f`` on the word ``prefix . cycle^omega``.

    Letters are collections of the atom names that are true.  This is an
    independent oracle: it never builds an automaton.
    """
    if not cycle:
        raise ValueError("cycle must be non-empty")
    word = [frozenset(x) for x in prefix] + [frozenset(x) for x in cycle]
    n = len(word)
    loop = len(prefix)
    succ = [i + 1 if i + 1 < n else loop for i in range(n)]
    everywhere = frozenset(range(n))
    memo = {}

    def sat(g):
        r = memo.get(g)
        if r is not None:
            return r
        op = g.op
        c = g.children
        if op == "ap":
            r = frozenset(i for i in range(n) if g.name in word[i])
        elif op == "true":
            r = everywhere
        elif op == "false":
            r = frozenset()
        elif op == "not":
            r = everywhere - sat(c[0])
        elif op == "and":
            r = everywhere
            for x in c:
                r = r & sat(x)
        elif op == "or":
            r = frozenset()
            for x in c:
                r = r | sat(x)
        elif op == "implies":
            r = (everywhere - sat(c[0])) | sat(c[1])
        elif op == "equiv":
            a, b = sat(c[0]), sat(c[1])
            r = (a & b) | ((everywhere - a) & (everywhere - b))
        elif op == "X":
            s = sat(c[0])
            r = frozenset(i for i in range(n) if succ[i] in s)
        elif op in ("U", "F"):
            a, b = (everywhere, sat(c[0])) if op == "F" else (sat(c[0]), sat(c[1]))
            r = set(b)
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    if i not in r and i in a and succ[i] in r:
                        r.add(i)
                        changed = True
            r = frozenset(r)
        elif op in ("R", "G"):
            a, b = (frozenset(), sat(c[0])) if op == "G" else (sat(c[0]), sat(c[1]))
            # greatest fixpoint: b holds, and (a holds or the successor is in r)
            r = set(b)
            changed = True
            while changed:
                changed = False
                for i in list(r):
                    if i not in a and succ[i] not in r:
                        r.discard(i)
                        changed = True
            r = frozenset(r)
        else:
            raise ValueError(f"unknown operator {op}")
        memo[g] = r
        return r

    return 0 in sat(f)
