from pathlib import Path

import pytest

from giventhat import ltl
from giventhat.automaton import accepts_lasso, is_empty, product
from giventhat.boolfn import BddManager
from giventhat.complement import complement_generic
from giventhat.hoa import read_hoa
from giventhat.randgen import make_rng, random_lasso
from giventhat.translate import translate

DATA = Path(__file__).resolve().parent.parent / "src" / "giventhat" / "data"

NEG_PHI = "F(a & c) | G((F b) & (F !b))"


def lassos(seed, n=200, atoms=("a", "b", "c"), max_len=6):
    """Random lassos with |u| + |v| <= max_len."""
    rng = make_rng(seed)
    out = []
    while len(out) < n:
        w = random_lasso(rng, atoms, max_prefix=max_len - 1, max_cycle=max_len)
        if len(w) <= max_len:
            out.append(w)
    return out


def holds(f, w):
    if isinstance(f, str):
        f = ltl.parse(f)
    return ltl.holds_on_lasso(f, w.prefix, w.cycle)


def included_in_formula(a, f):
    """L(a) is a subset of L(f), using the translation of !f."""
    if isinstance(f, str):
        f = ltl.parse(f)
    return is_empty(product(a, translate(ltl.negate(f), a.mgr)))


def equivalent_to_formula(a, f, cap=5000):
    """Two-way containment: a against !f, and f against a complement of a."""
    if isinstance(f, str):
        f = ltl.parse(f)
    return (included_in_formula(a, f)
            and is_empty(product(translate(f, a.mgr), complement_generic(a, cap))))


def agree_on(a, f, words):
    """Words where membership in ``a`` and truth of ``f`` differ."""
    return [w for w in words if accepts_lasso(a, w) != holds(f, w)]


@pytest.fixture
def mgr():
    return BddManager()


@pytest.fixture
def running(mgr):
    neg_phi = read_hoa(DATA / "running_neg_phi.hoa", mgr)
    a_k = read_hoa(DATA / "running_knowledge.hoa", mgr)
    return neg_phi, a_k


# -- acceptance criteria reporting ------------------------------------------------

CRITERIA = {}


def record(number, title, ok, detail=""):
    CRITERIA[number] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        title, ok, detail = CRITERIA[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}  {detail}")
