"""Reduced ordered BDDs and Minato's irredundant sum-of-products.

A :class:`BddManager` owns the node table.  Variables are atomic
proposition names, ordered by registration.  Node ``0`` is false and
node ``1`` is true; there are no complemented edges.

User code manipulates :class:`Bdd` handles, which support the usual
operators::

    >>> mgr = BddManager()
    >>> a, b = mgr.var("a"), mgr.var("b")
    >>> f = a & ~b
    >>> mgr.exists(f, ["a"]) == ~b
    True
"""

from .limits import ResourceExceeded, default_node_cap

FALSE = 0
TRUE = 1
_TERMINAL_LEVEL = 1 << 30


class BddError(ValueError):
    pass


class Bdd:
    """Handle on a node of a :class:`BddManager`."""

    __slots__ = ("mgr", "node")

    def __init__(self, mgr, node):
        self.mgr = mgr
        self.node = node

    def _other(self, other):
        if not isinstance(other, Bdd):
            raise TypeError(f"expected Bdd, got {type(other).__name__}")
        if other.mgr is not self.mgr:
            raise BddError("BDDs belong to different managers")
        return other.node

    def __and__(self, other):
        return Bdd(self.mgr, self.mgr._and(self.node, self._other(other)))

    def __or__(self, other):
        return Bdd(self.mgr, self.mgr._or(self.node, self._other(other)))

    def __xor__(self, other):
        return Bdd(self.mgr, self.mgr._xor(self.node, self._other(other)))

    def __invert__(self):
        return Bdd(self.mgr, self.mgr._not(self.node))

    def implies(self, other):
        """Return the Bdd of ``self -> other``."""
        node = self._other(other)
        return Bdd(self.mgr, self.mgr._or(self.mgr._not(self.node), node))

    def __le__(self, other):
        """``f <= g`` holds iff ``f`` implies ``g``."""
        return self.mgr._and(self.node, self.mgr._not(self._other(other))) == FALSE

    def __eq__(self, other):
        return (isinstance(other, Bdd) and other.mgr is self.mgr
                and other.node == self.node)

    def __hash__(self):
        return hash((id(self.mgr), self.node))

    @property
    def is_true(self):
        return self.node == TRUE

    @property
    def is_false(self):
        return self.node == FALSE

    def __bool__(self):
        raise TypeError("use .is_true / .is_false to test a Bdd")

    def __repr__(self):
        return f"Bdd({self.mgr.to_expr(self)})"


class BddManager:
    """Unique table, operation caches and variable registry."""

    def __init__(self, names=(), node_cap=None):
        self.node_cap = default_node_cap() if node_cap is None else node_cap
        self._level = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._lo = [0, 1]
        self._hi = [0, 1]
        self._unique = {}
        self._names = []
        self._index = {}
        self._and_cache = {}
        self._or_cache = {}
        self._xor_cache = {}
        self._not_cache = {}
        self._isop_cache = {}
        self.true = Bdd(self, TRUE)
        self.false = Bdd(self, FALSE)
        for name in names:
            self.register(name)

    # -- variables ---------------------------------------------------------

    def register(self, name):
        """Register ``name`` (if new) and return its variable index."""
        idx = self._index.get(name)
        if idx is None:
            idx = len(self._names)
            self._names.append(name)
            self._index[name] = idx
        return idx

    @property
    def names(self):
        return tuple(self._names)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise BddError(f"unknown variable {name!r}") from None

    def name(self, idx):
        return self._names[idx]

    def mk_var(self, idx):
        if not 0 <= idx < len(self._names):
            raise BddError(f"unknown variable index {idx}")
        return Bdd(self, self._mk(idx, FALSE, TRUE))

    def var(self, name):
        """Bdd for atomic proposition ``name``, registering it if needed."""
        return Bdd(self, self._mk(self.register(name), FALSE, TRUE))

    def literal(self, name, positive=True):
        idx = self.register(name)
        return Bdd(self, self._mk(idx, FALSE, TRUE) if positive
                   else self._mk(idx, TRUE, FALSE))

    def cube(self, assignment):
        """Conjunction of literals from a ``{name: bool}`` mapping."""
        node = TRUE
        for name, value in sorted(assignment.items(),
                                  key=lambda kv: -self.register(kv[0])):
            idx = self._index[name]
            node = self._mk(idx, FALSE, node) if value else self._mk(idx, node, FALSE)
        return Bdd(self, node)

    def wrap(self, node):
        return Bdd(self, node)

    def __len__(self):
        return len(self._level)

    # -- core --------------------------------------------------------------

    def _mk(self, level, lo, hi):
        if lo == hi:
            return lo
        key = (level, lo, hi)
        node = self._unique.get(key)
        if node is None:
            node = len(self._level)
            if node >= self.node_cap:
                raise ResourceExceeded(f"BDD node cap {self.node_cap} exceeded")
            self._level.append(level)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = node
        return node

    def _and(self, f, g):
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE:
            return g
        if g == TRUE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = (f, g)
        cache = self._and_cache
        r = cache.get(key)
        if r is not None:
            return r
        lf, lg = self._level[f], self._level[g]
        if lf == lg:
            r = self._mk(lf, self._and(self._lo[f], self._lo[g]),
                         self._and(self._hi[f], self._hi[g]))
        elif lf < lg:
            r = self._mk(lf, self._and(self._lo[f], g), self._and(self._hi[f], g))
        else:
            r = self._mk(lg, self._and(f, self._lo[g]), self._and(f, self._hi[g]))
        cache[key] = r
        return r

    def _or(self, f, g):
        if f == TRUE or g == TRUE:
            return TRUE
        if f == FALSE:
            return g
        if g == FALSE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = (f, g)
        cache = self._or_cache
        r = cache.get(key)
        if r is not None:
            return r
        lf, lg = self._level[f], self._level[g]
        if lf == lg:
            r = self._mk(lf, self._or(self._lo[f], self._lo[g]),
                         self._or(self._hi[f], self._hi[g]))
        elif lf < lg:
            r = self._mk(lf, self._or(self._lo[f], g), self._or(self._hi[f], g))
        else:
            r = self._mk(lg, self._or(f, self._lo[g]), self._or(f, self._hi[g]))
        cache[key] = r
        return r

    def _xor(self, f, g):
        if f == g:
            return FALSE
        if f == FALSE:
            return g
        if g == FALSE:
            return f
        if f == TRUE:
            return self._not(g)
        if g == TRUE:
            return self._not(f)
        if f > g:
            f, g = g, f
        key = (f, g)
        r = self._xor_cache.get(key)
        if r is not None:
            return r
        lf, lg = self._level[f], self._level[g]
        if lf == lg:
            r = self._mk(lf, self._xor(self._lo[f], self._lo[g]),
                         self._xor(self._hi[f], self._hi[g]))
        elif lf < lg:
            r = self._mk(lf, self._xor(self._lo[f], g), self._xor(self._hi[f], g))
        else:
            r = self._mk(lg, self._xor(f, self._lo[g]), self._xor(f, self._hi[g]))
        self._xor_cache[key] = r
        return r

    def _not(self, f):
        if f <= TRUE:
            return 1 - f
        r = self._not_cache.get(f)
        if r is None:
            r = self._mk(self._level[f], self._not(self._lo[f]), self._not(self._hi[f]))
            self._not_cache[f] = r
            self._not_cache[r] = f
        return r

    def _exists(self, f, levels, memo):
        if f <= TRUE:
            return f
        r = memo.get(f)
        if r is not None:
            return r
        lvl = self._level[f]
        lo = self._exists(self._lo[f], levels, memo)
        hi = self._exists(self._hi[f], levels, memo)
        r = self._or(lo, hi) if lvl in levels else self._mk(lvl, lo, hi)
        memo[f] = r
        return r

    def _cofactors(self, f, level):
        if self._level[f] == level:
            return self._lo[f], self._hi[f]
        return f, f

    # -- public operations ---------------------------------------------------

    def apply(self, op, f, g):
        """Combine two Bdds with ``op`` in {"and", "or", "xor", "implies"}."""
        if f.mgr is not self or g.mgr is not self:
            raise BddError("BDDs belong to a different manager")
        op = op.lower()
        if op == "and":
            node = self._and(f.node, g.node)
        elif op == "or":
            node = self._or(f.node, g.node)
        elif op == "xor":
            node = self._xor(f.node, g.node)
        elif op == "implies":
            node = self._or(self._not(f.node), g.node)
        else:
            raise BddError(f"unknown operator {op!r}")
        return Bdd(self, node)

    def neg(self, f):
        return Bdd(self, self._not(f.node))

    def exists(self, f, names):
        """Existentially quantify the variables ``names`` out of ``f``."""
        levels = {self.index(n) for n in names}
        if not levels:
            return f
        return Bdd(self, self._exists(f.node, levels, {}))

    def implies_check(self, f, g):
        return self._and(f.node, self._not(g.node)) == FALSE

    def conj(self, bdds):
        node = TRUE
        for b in bdds:
            node = self._and(node, b.node)
        return Bdd(self, node)

    def disj(self, bdds):
        node = FALSE
        for b in bdds:
            node = self._or(node, b.node)
        return Bdd(self, node)

    def support(self, f):
        """Names of the variables ``f`` depends on, in variable order."""
        seen = set()
        levels = set()
        stack = [f.node]
        while stack:
            n = stack.pop()
            if n <= TRUE or n in seen:
                continue
            seen.add(n)
            levels.add(self._level[n])
            stack.append(self._lo[n])
            stack.append(self._hi[n])
        return [self._names[i] for i in sorted(levels)]

    def evaluate(self, f, true_names):
        """Evaluate ``f`` under the valuation where exactly ``true_names`` hold."""
        node = f.node if isinstance(f, Bdd) else f
        names = self._names
        lo, hi, level = self._lo, self._hi, self._level
        while node > TRUE:
            node = hi[node] if names[level[node]] in true_names else lo[node]
        return node == TRUE

    def sat_count(self, f, names=None):
        """Number of satisfying valuations over ``names`` (default: all vars)."""
        if names is None:
            names = self._names
        levels = sorted(self.index(n) for n in names)
        if not set(self.support(f)) <= set(names):
            raise BddError("sat_count: function depends on variables outside names")
        pos = {lvl: i for i, lvl in enumerate(levels)}
        nvars = len(levels)
        memo = {}

        def count(n):
            # models over the variables strictly below the level of n
            if n == FALSE:
                return 0
            if n == TRUE:
                return 1
            r = memo.get(n)
            if r is None:
                i = pos[self._level[n]]
                r = 0
                for child in (self._lo[n], self._hi[n]):
                    j = nvars if child <= TRUE else pos[self._level[child]]
                    r += count(child) << (j - i - 1)
                memo[n] = r
            return r

        if f.node <= TRUE:
            return f.node << nvars
        return count(f.node) << pos[self._level[f.node]]

    def minterms(self, f, names):
        """Enumerate satisfying valuations of ``f`` over ``names``.

        Each valuation is yielded as a frozenset of the names that are true.
        """
        names = list(names)
        for bits in range(1 << len(names)):
            true_names = frozenset(n for i, n in enumerate(names) if bits >> i & 1)
            if self.evaluate(f, true_names):
                yield true_names

    def transfer(self, f, target):
        """Copy ``f`` into manager ``target`` (variables matched by name)."""
        if target is self:
            return f
        memo = {}
        idx = [target.register(n) for n in self._names]

        def copy(n):
            if n <= TRUE:
                return n
            r = memo.get(n)
            if r is None:
                v = target._mk(idx[self._level[n]], FALSE, TRUE)
                lo, hi = copy(self._lo[n]), copy(self._hi[n])
                # ite(v, hi, lo); target order may differ from ours
                r = target._or(target._and(v, hi), target._and(target._not(v), lo))
                memo[n] = r
            return r

        return Bdd(target, copy(f.node))

    # -- irredundant sum of products -----------------------------------------

    def isop(self, low, high):
        """Minato-Morreale ISOP: an irredundant cover ``c`` with low <= c <= high.

        Returns a list of products; each product is a tuple of
        ``(var_index, polarity)`` pairs in variable order.
        """
        if low.mgr is not self or high.mgr is not self:
            raise BddError("BDDs belong to a different manager")
        if not self.implies_check(low, high):
            raise BddError("isop: lower bound does not imply upper bound")
        cover, _ = self._isop(low.node, high.node)
        return [tuple(p) for p in cover]

    def isop_bdd(self, low, high):
        """Bdd of the cover returned by :meth:`isop`."""
        if not self.implies_check(low, high):
            raise BddError("isop: lower bound does not imply upper bound")
        return Bdd(self, self._isop(low.node, high.node)[1])

    def _isop(self, lo_b, hi_b):
        if lo_b == FALSE:
            return (), FALSE
        if hi_b == TRUE:
            return ((),), TRUE
        key = (lo_b, hi_b)
        r = self._isop_cache.get(key)
        if r is not None:
            return r
        level = min(self._level[lo_b], self._level[hi_b])
        l0, l1 = self._cofactors(lo_b, level)
        u0, u1 = self._cofactors(hi_b, level)
        c0, f0 = self._isop(self._and(l0, self._not(u1)), u0)
        c1, f1 = self._isop(self._and(l1, self._not(u0)), u1)
        rest = self._or(self._and(l0, self._not(f0)), self._and(l1, self._not(f1)))
        cd, fd = self._isop(rest, self._and(u0, u1))
        x = self._mk(level, FALSE, TRUE)
        nx = self._mk(level, TRUE, FALSE)
        node = self._or(self._or(self._and(nx, f0), self._and(x, f1)), fd)
        cover = (tuple(((level, False),) + p for p in c0)
                 + tuple(((level, True),) + p for p in c1) + cd)
        r = (cover, node)
        self._isop_cache[key] = r
        return r

    def sop_to_bdd(self, sop):
        node = FALSE
        for product in sop:
            term = TRUE
            for idx, positive in product:
                lit = self._mk(idx, FALSE, TRUE) if positive else self._mk(idx, TRUE, FALSE)
                term = self._and(term, lit)
            node = self._or(node, term)
        return Bdd(self, node)

    # -- printing --------------------------------------------------------------

    def sop_to_str(self, sop, names=None, neg="!", conj=" & ", disj=" | ",
                   true="1", false="0"):
        if not sop:
            return false
        if sop == [()]:
            return true
        name = names or (lambda i: self._names[i])
        terms = []
        for product in sop:
            if not product:
                return true
            lits = [name(i) if pol else f"{neg}{name(i)}" for i, pol in product]
            terms.append(conj.join(lits))
        if len(terms) > 1:
            terms = [f"({t})" if len(p) > 1 else t for t, p in zip(terms, sop)]
        return disj.join(terms)

    def to_expr(self, f):
        """Readable SOP text for ``f`` (``1``/``0`` for constants)."""
        return self.sop_to_str(self.isop(f, f))


def sop_size(sop):
    """Number of literal occurrences of a cover (0 for both constants)."""
    return sum(len(p) for p in sop)
