"""Command-line front end.  Every output line is a standalone JSON object.

Exit status: 0 on success, 1 when ``analyze`` finds nothing, 2 on any
configuration or usage error (with one diagnostic line on stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path

from .lattice import GrammarError
from .lexicon import (
    BUNDLED_GRAMMAR,
    CompiledLexicon,
    CompileOptions,
    GrammarConfig,
    Lexicon,
    SpecError,
    UnknownLemma,
    load_grammar,
    parse_spec,
)
from .phonology import PhonologyError, normalize

GOLD_WORDS = (
    "arabada", "yolcu", "şekerci", "sabahçı", "kitabı", "çağırttı",
    "bildirilmemişti", "kurusu", "yaşlılar", "yürürken", "kalemleri",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def resolve_grammar(arg: str | None) -> Path:
    """--grammar, then $LEXRULE_GRAMMAR, then ./grammar, then the bundled grammar."""
    if arg:
        return Path(arg)
    env = os.environ.get("LEXRULE_GRAMMAR")
    if env:
        return Path(env)
    local = Path("grammar")
    if (local / "rules.txt").is_file():
        return local
    return BUNDLED_GRAMMAR


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lexrule", description="Lexical-rule morphology engine.")
    p.add_argument("--grammar", help="grammar directory (hierarchy.txt, rules.txt, senses.txt, roots.txt)")
    p.add_argument("--mode", choices=("runtime", "compiled"), default="runtime")
    p.add_argument("--lexicon", help="compiled lexicon JSON to use in compiled mode")
    p.add_argument("--max-caus", type=int, default=2, help="causative applications per word")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="print every analysis of each word")
    a.add_argument("words", nargs="+")

    g = sub.add_parser("generate", help="print surface forms of a lemma")
    g.add_argument("lemma")
    g.add_argument("--spec", default="", help="slot=value pairs, e.g. case=locative,rel=ki")

    c = sub.add_parser("compile", help="precompile the closure and write it as JSON")
    c.add_argument("--out", required=True)

    b = sub.add_parser("bench", help="compare runtime and compiled modes")
    b.add_argument("--words", help="file with one word per line (default: gold forms plus a sample)")
    b.add_argument("--sample", type=int, default=200)
    b.add_argument("--seed", type=int, default=0)

    sub.add_parser("stats", help="compile and print statistics")
    return p


def _emit(obj, out):
    out.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _analysis(surface: str, e) -> dict:
    d = e.to_json()
    return {
        "surface": surface,
        "root": d["root"],
        "type": d["type"],
        "history": d["history"],
        "case": d["case"],
        "slots": d["slots"],
        "lf": d["lf"],
    }


def _compiled(args, lex: Lexicon) -> CompiledLexicon:
    if args.lexicon:
        try:
            data = json.loads(Path(args.lexicon).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise GrammarError(f"cannot read compiled lexicon {args.lexicon}: {exc}") from None
        return CompiledLexicon.from_json(data, lex)
    return lex.compile()


def _bench(args, lex: Lexicon, out) -> int:
    start = time.perf_counter()
    compiled = lex.compile()
    build = time.perf_counter() - start
    if args.words:
        words = [normalize(w) for w in Path(args.words).read_text(encoding="utf-8").split()]
    else:
        keys = sorted(compiled.index)
        rng = random.Random(args.seed)
        words = list(GOLD_WORDS) + rng.sample(keys, min(args.sample, len(keys)))
    timings = {"runtime": 0.0, "compiled": 0.0}
    mismatches = []
    for w in words:
        t0 = time.perf_counter()
        r = {e.key() for e in lex.analyze(w)}
        t1 = time.perf_counter()
        c = {e.key() for e in compiled.analyze(w)}
        t2 = time.perf_counter()
        timings["runtime"] += t1 - t0
        timings["compiled"] += t2 - t1
        if r != c:
            mismatches.append(w)
    n = max(len(words), 1)
    _emit({"mode": "runtime", "resident_entries": lex.resident_entries, "build_seconds": 0.0,
           "per_query_ms": round(1000 * timings["runtime"] / n, 3)}, out)
    _emit({"mode": "compiled", "resident_entries": compiled.entry_count, "build_seconds": round(build, 3),
           "index_keys": len(compiled.index), "per_query_ms": round(1000 * timings["compiled"] / n, 3)}, out)
    _emit({"words": len(words), "identical": not mismatches, "mismatches": mismatches}, out)
    return 0 if not mismatches else 1


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        config = GrammarConfig.from_dir(resolve_grammar(args.grammar), args.mode)
        lex = Lexicon(load_grammar(config), max_caus=args.max_caus)

        if args.command == "analyze":
            if args.mode == "compiled":
                compiled = _compiled(args, lex)
                find = compiled.analyze
            else:
                find = lex.analyze
            found = False
            for w in args.words:
                surface = normalize(w)
                for e in find(surface):
                    found = True
                    _emit(_analysis(surface, e), out)
            return 0 if found else 1

        if args.command == "generate":
            spec = parse_spec(args.spec)
            for s in lex.generate(args.lemma, spec):
                _emit({"lemma": normalize(args.lemma), "surface": s}, out)
            return 0

        if args.command == "compile":
            compiled = lex.compile(CompileOptions(max_caus=args.max_caus))
            try:
                compiled.dump(args.out)
            except OSError as exc:
                raise GrammarError(f"cannot write {args.out}: {exc.strerror}") from None
            _emit(compiled.stats.to_json(), out)
            return 0

        if args.command == "stats":
            _emit(_compiled(args, lex).stats.to_json(), out)
            return 0

        return _bench(args, lex, out)
    except (UsageError, GrammarError, SpecError, UnknownLemma, PhonologyError, OSError) as exc:
        msg = str(exc).replace("\n", " ")
        if isinstance(exc, UnknownLemma):
            msg = msg.strip("'\"")
        err.write(f"lexrule: error: {msg}\n")
        return 2


def main() -> None:
    for stream in (sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(encoding="utf-8")
    sys.exit(run())


if __name__ == "__main__":
    main()
