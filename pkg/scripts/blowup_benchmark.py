"""Compare runtime and precompiled lexicons on the bundled sample.

Compiles growing prefixes of the root list, then times analysis of every
compiled key (or a sample of them) in both modes and counts mismatches.
Prints JSON lines.
"""

import argparse
import json
import random
import time

from lexrule import CompileOptions, Lexicon, compile_closure, load_grammar


def growth(grammar, steps: int):
    roots = grammar.roots
    for n in sorted({max(1, len(roots) * i // steps) for i in range(1, steps + 1)}):
        start = time.perf_counter()
        lex = compile_closure(roots[:n], grammar.rules, CompileOptions())
        yield {"roots": n, "entries": lex.stats.total, "keys": lex.stats.index_keys,
               "seconds": round(time.perf_counter() - start, 3)}


def equivalence(lexicon: Lexicon, sample: int | None, seed: int):
    start = time.perf_counter()
    compiled = lexicon.compile()
    build = time.perf_counter() - start
    keys = sorted(compiled.index)
    if sample is not None and sample < len(keys):
        keys = random.Random(seed).sample(keys, sample)
    runtime_s = compiled_s = 0.0
    mismatches = []
    for k in keys:
        t0 = time.perf_counter()
        r = {e.key() for e in lexicon.analyze(k)}
        t1 = time.perf_counter()
        c = {e.key() for e in compiled.analyze(k)}
        t2 = time.perf_counter()
        runtime_s += t1 - t0
        compiled_s += t2 - t1
        if r != c:
            mismatches.append(k)
    n = max(len(keys), 1)
    return {
        "resident_runtime": lexicon.resident_entries,
        "resident_compiled": compiled.entry_count,
        "build_seconds": round(build, 3),
        "queries": len(keys),
        "runtime_ms_per_query": round(1000 * runtime_s / n, 3),
        "compiled_ms_per_query": round(1000 * compiled_s / n, 4),
        "mismatches": mismatches,
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grammar")
    p.add_argument("--steps", type=int, default=4, help="root-list prefixes to compile")
    p.add_argument("--sample", type=int, help="analyze only this many keys (default: all)")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    grammar = load_grammar(args.grammar)
    for row in growth(grammar, args.steps):
        print(json.dumps(row), flush=True)
    result = equivalence(Lexicon(grammar), args.sample, args.seed)
    print(json.dumps(result, ensure_ascii=False))
    raise SystemExit(0 if not result["mismatches"] else 1)


if __name__ == "__main__":
    main()
