"""Count closure sizes as optional binary slots are added one at a time.

Each added slot should double the number of entries for a single root.
Prints one JSON line per step.
"""

import argparse
import json
import time

from lexrule import CompileOptions, compile_closure, load_grammar

NOMINAL = ("plu", "loc", "ki")
VERBAL = ("caus", "pass", "neg", "abil", "perf", "past", "p3sg", "pl")


def sweep(grammar, lemma: str, rule_ids: tuple[str, ...], max_caus: int):
    (root,) = [r for r in grammar.roots if r.lemma == lemma]
    for k in range(len(rule_ids) + 1):
        ids = rule_ids[:k]
        start = time.perf_counter()
        lex = compile_closure([root], grammar.rules, CompileOptions(max_caus=max_caus, rules=ids))
        yield {
            "root": lemma,
            "rules": list(ids),
            "entries": lex.stats.total,
            "expected": 2**k,
            "seconds": round(time.perf_counter() - start, 4),
        }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--noun", default="kalem")
    p.add_argument("--verb", default="bil")
    p.add_argument("--grammar")
    args = p.parse_args()
    grammar = load_grammar(args.grammar)
    ok = True
    for lemma, ids in ((args.noun, NOMINAL), (args.verb, VERBAL)):
        for row in sweep(grammar, lemma, ids, max_caus=1):
            ok &= row["entries"] == row["expected"]
            print(json.dumps(row, ensure_ascii=False))
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
