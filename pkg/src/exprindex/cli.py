"""``exprindex`` command line.

Exit codes: 0 success, 1 I/O error, 2 parse error, 3 the index and the
linear-scan baseline disagree.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Dict, List, Optional, Sequence, Tuple

from . import oracle
from .corpus import Corpus, CorpusError, load_corpus
from .expr_core import ExprRef, ParseError, VarNames, cell_table, parse, render, variables
from .gen import Shape, gen_corpus
from .instance_trie import InstanceTrie, QueryMode
from .substitution import render_substitution
from .unify import unify

EXIT_IO, EXIT_PARSE, EXIT_MISMATCH = 1, 2, 3


class Mismatch(Exception):
    pass


def _out(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _parse_arg(text: str, what: str) -> ExprRef:
    try:
        return parse(text)
    except ParseError as exc:
        raise ParseError(f"{what}: {exc.message}", exc.pos, text) from None


def build_trie(corpus: Corpus) -> InstanceTrie:
    trie = InstanceTrie()
    for e in corpus.expressions:
        trie.insert(e)
    return trie


def linear_retrieve(corpus: Corpus, q: ExprRef, mode: QueryMode) -> List[Tuple[str, str]]:
    """Baseline answers as ``(canonical text, mode)`` in corpus order."""
    trees = [oracle.tree_of_cells(e) for e in corpus.expressions]
    found = oracle.oracle_retrieve(trees, oracle.tree_of_cells(q), mode.name)
    return [(str(t), str(m)) for t, m in found.items()]


def trie_retrieve(trie: InstanceTrie, q: ExprRef, mode: QueryMode) -> Tuple[List[Tuple[str, str]], int]:
    r = trie.retrieve(q, mode)
    return [(render(m.expr), str(m.mode)) for m in r.matches], r.visited


# -- commands -----------------------------------------------------------------

def cmd_parse(args) -> int:
    e = _parse_arg(args.expr, "expression")
    for index, tag, payload in cell_table(e):
        _out(f"{index:>4}  {tag:<5}  {payload}")
    _out(render(e))
    return 0


def cmd_unify(args) -> int:
    e1 = _parse_arg(args.e1, "first expression")
    e2 = _parse_arg(args.e2, "second expression")
    result = unify(e1, e2)
    names = VarNames()
    for v in variables(e1) + variables(e2):
        names(v)
    _out(f"mode={result.mode}")
    _out(f"S1={render_substitution(result.s1, names)}")
    _out(f"S2={render_substitution(result.s2, names)}")
    return 0


def cmd_query(args) -> int:
    corpus = load_corpus(args.corpus)
    q = _parse_arg(args.query, "query")
    mode = QueryMode(args.mode)
    if args.baseline:
        rows, visited, size = linear_retrieve(corpus, q, mode), len(corpus), len(corpus)
    else:
        trie = build_trie(corpus)
        rows, visited = trie_retrieve(trie, q, mode)
        size = len(trie)
    for text, m in rows:
        _out(f"{text}\t{m}")
    _out(f"visited={visited} of {size}")
    return 0


def cmd_dump(args) -> int:
    trie = build_trie(load_corpus(args.corpus))
    sys.stdout.write(trie.dump(args.format))
    return 0


def cmd_gen(args) -> int:
    shape = Shape(max_depth=args.max_depth, max_vars=args.max_vars, var_prob=args.var_prob)
    text = gen_corpus(args.seed, args.size, shape)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def run_bench(corpus: Corpus, queries: Corpus, modes: Sequence[QueryMode] = tuple(QueryMode)) -> Dict:
    """Time the index against the linear scan; raises :class:`Mismatch`."""
    t0 = time.monotonic()
    trie = build_trie(corpus)
    report = {
        "corpus": len(corpus),
        "stored": len(trie),
        "queries": len(queries),
        "build_s": time.monotonic() - t0,
        "modes": {},
    }
    trees = [oracle.tree_of_cells(e) for e in corpus.expressions]
    qtrees = [oracle.tree_of_cells(q) for q in queries.expressions]
    for mode in modes:
        results = visits = below = 0
        t_trie = t_base = 0.0
        for q, qt in zip(queries.expressions, qtrees):
            t = time.monotonic()
            rows, visited = trie_retrieve(trie, q, mode)
            t_trie += time.monotonic() - t
            t = time.monotonic()
            expected = oracle.oracle_retrieve(trees, qt, mode.name)
            t_base += time.monotonic() - t
            got = {(text, m) for text, m in rows}
            if len(got) != len(rows) or got != {(str(k), str(m)) for k, m in expected.items()}:
                raise Mismatch(f"{mode.value} query {render(q)}: index and baseline differ")
            results += len(rows)
            visits += visited
            below += visited < len(trie)
        n = max(len(queries), 1)
        report["modes"][mode.value] = {
            "results": results,
            "visits": visits,
            "visits_below_size": below,
            "trie_s": t_trie,
            "trie_mean_ms": 1000 * t_trie / n,
            "linear_s": t_base,
            "linear_mean_ms": 1000 * t_base / n,
        }
    return report


def cmd_bench(args) -> int:
    corpus = load_corpus(args.corpus)
    queries = load_corpus(args.queries)
    try:
        report = run_bench(corpus, queries)
    except Mismatch as exc:
        print(f"MISMATCH: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    _out(f"corpus {report['corpus']} expressions, {report['stored']} stored, "
         f"{report['queries']} queries, build {report['build_s']:.3f}s")
    _out(f"{'mode':<15}{'results':>9}{'visits':>10}{'<size':>7}"
         f"{'trie s':>10}{'trie ms/q':>11}{'linear s':>10}{'lin ms/q':>10}")
    for name, r in report["modes"].items():
        _out(f"{name:<15}{r['results']:>9}{r['visits']:>10}{r['visits_below_size']:>7}"
             f"{r['trie_s']:>10.3f}{r['trie_mean_ms']:>11.3f}{r['linear_s']:>10.3f}{r['linear_mean_ms']:>10.3f}")
    if args.kv:
        for key in ("corpus", "stored", "queries", "build_s"):
            _out(f"{key}={report[key]}")
        for name, r in report["modes"].items():
            for key, value in r.items():
                _out(f"{name}.{key}={value}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exprindex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="show the cell encoding of an expression")
    s.add_argument("expr")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("unify", help="mode and unifier of two expressions")
    s.add_argument("e1")
    s.add_argument("e2")
    s.set_defaults(func=cmd_unify)

    modes = [m.value for m in QueryMode]
    s = sub.add_parser("query", help="retrieve from a corpus")
    s.add_argument("--corpus", required=True)
    s.add_argument("--mode", choices=modes, default="unifiable")
    s.add_argument("--baseline", choices=["linear"])
    s.add_argument("query")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("dump", help="print the instance trie of a corpus")
    s.add_argument("--corpus", required=True)
    s.add_argument("--format", choices=["text", "dot"], default="text")
    s.set_defaults(func=cmd_dump)

    s = sub.add_parser("bench", help="index against linear scan")
    s.add_argument("--corpus", required=True)
    s.add_argument("--queries", required=True)
    s.add_argument("--baseline", choices=["linear"], default="linear")
    s.add_argument("--kv", action="store_true", help="also print key=value lines")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("gen", help="write a random corpus")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--size", type=int, default=100)
    s.add_argument("--max-depth", type=int, default=Shape.max_depth)
    s.add_argument("--max-vars", type=int, default=Shape.max_vars)
    s.add_argument("--var-prob", type=float, default=Shape.var_prob)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
