"""Simplify negated-property omega-automata using knowledge about the system.

Main entry points:

* :func:`giventhat.translate.translate` builds a TGBA from an LTL formula.
* :func:`giventhat.given.run_strategy` simplifies the automaton of ``!phi``
  given facts known to hold on the system.
* :func:`giventhat.sysmc.check` model checks an explicit system.
"""

__version__ = "0.1.0"

from .ltl import parse
from .translate import translate, simplify
from .given import KnowledgeBase, run_strategy, ROSTER

__all__ = ["parse", "translate", "simplify", "KnowledgeBase", "run_strategy", "ROSTER",
           "__version__"]
