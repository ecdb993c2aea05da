"""Command line interface.

Exit codes: 0 success, 1 error, 10 the simplified automaton is empty (the
property holds on every system satisfying the facts), 20 it is universal
(the property fails on every such system), 30 ``check`` found a
counterexample.
"""

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, ltl
from .automaton import stats
from .given import KnowledgeBase, StrategyOptions, automaton_stats, normalize_name, run_strategy
from .hoa import hoa_parse, hoa_print
from .limits import (DeadlineExceeded, ResourceExceeded, deadline,
                     default_timeout_ms)
from .sysmc import automaton_labels, check_property, load_system, seek_all
from .translate import simplify, translate

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 10
EXIT_UNIVERSAL = 20
EXIT_FAILS = 30

BENCH_COLUMNS = ["problem", "strategy", "outcome", "states", "transitions", "ap",
                 "sum_label_size", "si", "det", "time_ms", "timeout"]

log = logging.getLogger("giventhat")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _apply_caps(args):
    for flag, env in (("node_cap", "GIVENTHAT_NODE_CAP"), ("state_cap", "GIVENTHAT_STATE_CAP"),
                      ("complement_cap", "GIVENTHAT_COMPLEMENT_CAP")):
        value = getattr(args, flag, None)
        if value is not None:
            os.environ[env] = str(value)


def _options(args, with_si=False):
    return StrategyOptions(state_cap=args.state_cap, complement_cap=args.complement_cap,
                           with_si=with_si)


def cmd_translate(args):
    f = ltl.parse(args.formula)
    if args.negate:
        f = ltl.negate(f)
    a = simplify(translate(f))
    _write(args.output, hoa_print(a, name=str(f)))
    return EXIT_OK


def _exit_for(outcome):
    return {"empty": EXIT_EMPTY, "universal": EXIT_UNIVERSAL}.get(outcome, EXIT_OK)


def cmd_given(args):
    phi = ltl.parse(args.formula)
    kb = KnowledgeBase.from_file(args.facts) if args.facts else KnowledgeBase()
    if not args.all_facts:
        kb = kb.relevant_to(phi)
    a, report = run_strategy(args.strategy, phi, kb, _options(args))
    text = hoa_print(a, name=f"{report.strategy} given {len(kb)} facts")
    if args.report == "json":
        doc = {"tool": "giventhat", "version": __version__, "formula": str(phi),
               "facts": [str(k) for k in kb], "report": report.as_dict()}
        if args.output:
            _write(args.output, text)
        else:
            doc["hoa"] = text
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        _write(args.output, text)
        print(f"strategy={report.strategy} outcome={report.outcome} "
              f"states={report.after.states} transitions={report.after.transitions} "
              f"time_ms={report.time_ms:.1f}", file=sys.stderr)
    return _exit_for(report.outcome)


def cmd_stats(args):
    with open(args.input, encoding="utf-8") as fh:
        a = hoa_parse(fh.read())
    neg = None
    if args.neg_formula:
        neg = translate(ltl.parse(args.neg_formula), a.mgr)
    print(json.dumps(stats(a, neg).as_dict(), indent=2))
    return EXIT_OK


def cmd_seek(args):
    k = load_system(args.system)
    phi = ltl.parse(args.formula)
    raw = simplify(translate(ltl.negate(phi)))
    kb = seek_all(k, phi, automaton_labels(raw), depth=args.depth)
    lines = []
    for fact in kb:
        comment = f"{fact.kind}: {fact.note}" if fact.note else fact.kind
        lines.append(f"{fact.formula}  # {comment}")
    _write(args.output, "\n".join(lines) + ("\n" if lines else ""))
    return EXIT_OK


def _lasso_text(word):
    return str(word)


def cmd_check(args):
    k = load_system(args.system)
    phi = ltl.parse(args.formula)
    if args.facts:
        kb = KnowledgeBase.from_file(args.facts).relevant_to(phi)
    elif args.seek:
        raw = simplify(translate(ltl.negate(phi)))
        kb = seek_all(k, phi, automaton_labels(raw))
    else:
        kb = KnowledgeBase()
    verdict, _, report = check_property(k, phi, kb, args.strategy, args.gate, _options(args))
    print(f"strategy: {report.strategy} ({report.outcome}, {len(kb)} facts)")
    print(f"verdict: {verdict.status}")
    if verdict.counterexample is not None:
        names = [k.names[s] for s in verdict.prefix_states]
        loop = [k.names[s] for s in verdict.cycle_states]
        print(f"counterexample: {_lasso_text(verdict.counterexample)}")
        print(f"states: {' '.join(names)} ({' '.join(loop)})^w".replace("  ", " "))
        return EXIT_FAILS
    return EXIT_OK


# -- bench -----------------------------------------------------------------------


def read_problem(path):
    """A problem file holds the property on its first line and facts after it."""
    lines = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                lines.append(line)
    if not lines:
        raise ValueError(f"{path}: empty problem file")
    return ltl.parse(lines[0]), KnowledgeBase.from_lines(lines[1:])


def _si_of(result, report, pos_neg_formula, timeout_ms, cap):
    """SI column: exact via the property when unchanged, else capped complement."""
    try:
        with deadline(timeout_ms):
            neg = None
            if report.outcome == "unchanged":
                neg = translate(pos_neg_formula, result.mgr)
            return automaton_stats(result, neg, cap).is_si
    except (DeadlineExceeded, ResourceExceeded, RecursionError):
        return "unknown"


def bench_rows(path, strategies, timeout_ms, si_cap=2000):
    """CSV rows for one problem file and every strategy."""
    name = Path(path).stem
    rows = []
    try:
        phi, kb = read_problem(path)
    except (OSError, ValueError) as exc:
        log.error("skipping %s: %s", path, exc)
        return [dict(zip(BENCH_COLUMNS, [name, s, "error"] + [""] * 7 + [0]))
                for s in strategies]
    kb = kb.relevant_to(phi)
    for strategy in strategies:
        row = {"problem": name, "strategy": strategy}
        try:
            with deadline(timeout_ms):
                result, report = run_strategy(strategy, phi, kb)
        except DeadlineExceeded:
            row.update(outcome="timeout", states="", transitions="", ap="", sum_label_size="",
                       si="", det="", time_ms=timeout_ms, timeout=1)
            rows.append(row)
            continue
        except (ResourceExceeded, RecursionError) as exc:
            log.warning("%s/%s: %s", name, strategy, exc)
            row.update(outcome="error", states="", transitions="", ap="", sum_label_size="",
                       si="", det="", time_ms="", timeout=0)
            rows.append(row)
            continue
        st = report.after
        row.update(outcome=report.outcome, states=st.states, transitions=st.transitions,
                   ap=st.ap_count, sum_label_size=st.label_size_total,
                   si=_si_of(result, report, phi, timeout_ms, si_cap),
                   det=int(st.is_det), time_ms=round(report.time_ms, 3), timeout=0)
        rows.append(row)
    return rows


def _bench_job(job):
    return bench_rows(*job)


def run_bench(problems, strategies, csv_path, timeout_ms=None, workers=1, si_cap=2000):
    """Run every strategy on every problem and write one CSV row per pair."""
    timeout_ms = default_timeout_ms() if timeout_ms is None else timeout_ms
    jobs = [(str(p), strategies, timeout_ms, si_cap) for p in problems]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bench_job, jobs))
    else:
        results = [_bench_job(j) for j in jobs]
    out = sys.stdout if csv_path in (None, "-") else open(csv_path, "w", newline="",
                                                           encoding="utf-8")
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        count = 0
        for rows in results:
            for row in rows:
                writer.writerow(row)
                count += 1
    finally:
        if out is not sys.stdout:
            out.close()
    return count


def cmd_bench(args):
    root = Path(args.problems)
    problems = sorted(root.glob("*.prob")) if root.is_dir() else [root]
    if not problems:
        raise ValueError(f"no .prob files under {root}")
    strategies = [normalize_name(s) for s in args.strategies.split(",") if s.strip()]
    n = run_bench(problems, strategies, args.csv, args.timeout, args.workers, args.si_cap)
    print(f"{n} rows ({len(problems)} problems x {len(strategies)} strategies)",
          file=sys.stderr)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="giventhat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--node-cap", type=int, help="BDD node cap (env GIVENTHAT_NODE_CAP)")
    p.add_argument("--state-cap", type=int, help="translator state cap (env GIVENTHAT_STATE_CAP)")
    p.add_argument("--complement-cap", type=int,
                   help="complementation state cap (env GIVENTHAT_COMPLEMENT_CAP)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("translate", help="LTL formula to HOA")
    s.add_argument("--formula", required=True)
    s.add_argument("--negate", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_translate)

    s = sub.add_parser("given", help="simplify the automaton of !phi given facts")
    s.add_argument("--formula", required=True)
    s.add_argument("--facts")
    s.add_argument("--strategy", default="BM")
    s.add_argument("--report", choices=["text", "json"], default="text")
    s.add_argument("--all-facts", action="store_true",
                   help="keep facts whose atoms do not meet the formula's")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_given)

    s = sub.add_parser("stats", help="metrics of a HOA automaton")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--neg-formula", help="formula of the complement, enables the SI column")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("seek", help="glean facts from a system")
    s.add_argument("--system", required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_seek)

    s = sub.add_parser("check", help="model check a system")
    s.add_argument("--system", required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--facts")
    s.add_argument("--seek", action="store_true", help="use facts found by the seekers")
    s.add_argument("--strategy", default="raw")
    s.add_argument("--gate", action="store_true",
                   help="try p.min∃ first and stop if it proves the property")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("bench", help="run strategies over a problem corpus")
    s.add_argument("--problems", required=True)
    s.add_argument("--strategies", default=",".join(["raw", "p.min∃", "p.max∃", "BM",
                                                     "SIrelax+BM"]))
    s.add_argument("--timeout", type=int, default=None, help="per-run timeout in ms")
    s.add_argument("--csv", default="-")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--si-cap", type=int, default=2000,
                   help="complement cap used for the SI column")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    _apply_caps(args)
    try:
        return args.func(args)
    except (ValueError, OSError, ResourceExceeded, DeadlineExceeded) as exc:
        print(f"giventhat: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
