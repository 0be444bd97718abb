"""Root lexicon, runtime analysis and generation, and closure compilation.

Runtime mode keeps one base entry per root and derives on demand.
Analysis strips suffixes to find candidate roots, then re-derives forward
from each candidate, pruning any branch whose surface form stops being a
prefix of the input.  Compiled mode precomputes the closure of every root
and indexes it by surface string.
"""

from __future__ import annotations

import json
import logging
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .desc import Desc, parse
from .entry import SEMANTIC_FEATURES, LexicalEntry, RootEntry
from .fs import from_description, subsumes
from .lattice import GrammarError, TypeLattice, iter_declarations, load_hierarchy
from .phonology import VOWELS, normalize, strip_closure
from .rules import LexicalRule, RuleSet, SenseTable, SlotAutomaton, apply_rule, load_rules, load_senses
from .semantics import SemanticForm

log = logging.getLogger(__name__)

BUNDLED_GRAMMAR = Path(__file__).parent / "grammar"
MODES = ("runtime", "compiled")


class ConfigError(GrammarError):
    """Unreadable or inconsistent grammar configuration."""


class UnknownLemma(LookupError):
    pass


class SpecError(ValueError):
    """Malformed generation spec."""


class ClosureError(GrammarError):
    """Rule application did not reach a fixed point within the limit."""

    def __init__(self, rule: str, limit: int):
        super().__init__(f"rule {rule!r} keeps applying: derivation longer than {limit} steps")
        self.rule = rule
        self.limit = limit


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class GrammarConfig:
    hierarchy: Path
    rules: Path
    senses: Path
    roots: Path
    mode: str = "runtime"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, not {self.mode!r}")
        for name in ("hierarchy", "rules", "senses", "roots"):
            p = Path(getattr(self, name))
            if not p.is_file() or not os.access(p, os.R_OK):
                raise ConfigError(f"{name} file {p} is not readable")

    @classmethod
    def from_dir(cls, directory: str | os.PathLike, mode: str = "runtime") -> "GrammarConfig":
        d = Path(directory)
        if not d.is_dir():
            raise ConfigError(f"grammar directory {d} does not exist")
        return cls(d / "hierarchy.txt", d / "rules.txt", d / "senses.txt", d / "roots.txt", mode)


@dataclass
class Grammar:
    lattice: TypeLattice
    rules: RuleSet
    senses: SenseTable
    roots: list[RootEntry]


def load_grammar(source: GrammarConfig | str | os.PathLike | None = None) -> Grammar:
    """Load a grammar from a config or directory; None means the bundled one."""
    if not isinstance(source, GrammarConfig):
        source = GrammarConfig.from_dir(source or BUNDLED_GRAMMAR)
    try:
        lattice = load_hierarchy(source.hierarchy.read_text(encoding="utf-8"))
        senses = load_senses(source.senses.read_text(encoding="utf-8"))
        rules = load_rules(source.rules.read_text(encoding="utf-8"), lattice, senses)
        roots = load_roots(source.roots.read_text(encoding="utf-8"), lattice)
    except UnicodeDecodeError as exc:
        raise ConfigError(f"grammar file is not UTF-8: {exc}") from None
    return Grammar(lattice, rules, senses, roots)


# ---------------------------------------------------------------------------
# roots


def load_roots(source: str, lattice: TypeLattice) -> list[RootEntry]:
    """Parse ``root LEMMA type=T ...`` lines and validate them."""
    if "\n" not in source and Path(source).exists():
        source = Path(source).read_text(encoding="utf-8")
    roots, seen = [], set()
    for no, decl in iter_declarations(source):
        words = decl.split()
        where = f"root file line {no}"
        if words[0] != "root" or len(words) < 2:
            raise GrammarError(f"{where}: expected 'root LEMMA type=TYPE ...'")
        lemma = normalize(words[1])
        if not lemma.isalpha() or not any(ch in VOWELS for ch in lemma):
            raise GrammarError(f"{where}: lemma {lemma!r} must be letters with at least one vowel")
        if lemma in seen:
            raise GrammarError(f"{where}: duplicate lemma {lemma!r}")
        kv = {}
        for w in words[2:]:
            k, eq, v = w.partition("=")
            if not eq or k not in ("type", "subcat", "feats", "flags", "pred"):
                raise GrammarError(f"{where}: bad field {w!r}")
            kv[k] = v
        t = kv.get("type")
        if t is None or t not in lattice.types or not lattice.is_subtype(t, "word"):
            raise GrammarError(f"{where}: unknown lexical type {t!r}")
        subcat = tuple(c for c in kv.get("subcat", "").split(",") if c)
        for c in subcat:
            if c not in lattice.types or not lattice.is_subtype(c, "case"):
                raise GrammarError(f"{where}: unknown case {c!r} in subcat")
        if subcat and not lattice.is_subtype(t, "verb-l"):
            raise GrammarError(f"{where}: only verbs take a subcat frame")
        feats = set()
        for f in (x for x in kv.get("feats", "").split(",") if x):
            name = f.lstrip("+")
            if name not in SEMANTIC_FEATURES:
                raise GrammarError(f"{where}: unknown semantic feature {f!r}")
            feats.add(name)
        flags = {x for x in kv.get("flags", "").split(",") if x}
        if flags - {"alt", "front"}:
            raise GrammarError(f"{where}: unknown flags {sorted(flags - {'alt', 'front'})}")
        root = RootEntry(lemma, t, subcat, kv.get("pred", ""), frozenset(feats), "alt" in flags, "front" in flags)
        base_entry(root, lattice)  # constraints must hold on the base entry
        seen.add(lemma)
        roots.append(root)
    return roots


_NOUN_HEAD = "common [CASE: nominative, MOD: null, REL: -, PRED: -, NUM: sg, POSS: poss-none]"
_VERB_HEAD = (
    "verb [MOD: null, VOICE: active, NEG: -, ABIL: -, ASPECT: asp-none, "
    "TENSE: tense-none, PERSON: per-none, NUM: sg]"
)


def base_entry(root: RootEntry, lattice: TypeLattice) -> LexicalEntry:
    """The underived entry for ``root``, with type constraints enforced."""
    t = root.type
    if lattice.is_subtype(t, "noun-l"):
        text = f'{t} [SYNSEM|LOCAL [CAT|HEAD: {_NOUN_HEAD}, CONT|INDEX: "x"]]'
        lf = SemanticForm.simple("x", root.pred, INST="x")
    elif lattice.is_subtype(t, "adjective-l"):
        text = f'{t} [SYNSEM|LOCAL [CAT|HEAD|PRED: +, CONT|INDEX: "x"]]'
        lf = SemanticForm.simple("x", root.pred, INST="x")
    elif lattice.is_subtype(t, "verb-l"):
        args = [
            f'[LOCAL [CAT|HEAD: noun [CASE: {c}, MOD: null], CONT|INDEX: "x{i}"]]'
            for i, c in enumerate(root.subcat, 1)
        ]
        text = f'{t} [SYNSEM|LOCAL [CAT [HEAD: {_VERB_HEAD}, SUBCAT: <{", ".join(args)}>], CONT|INDEX: "e"]]'
        roles = {"EV": "e", **{f"ARG{i}": f"x{i}" for i in range(1, len(root.subcat) + 1)}}
        lf = SemanticForm.simple("e", root.pred, **roles)
    else:
        text = f'{t} [SYNSEM|LOCAL|CONT|INDEX: "x"]'
        lf = SemanticForm.simple("x", root.pred, INST="x")
    fs = from_description(text, lattice, constraints=True)
    if fs is None:
        raise GrammarError(f"root {root.lemma!r} violates the constraints of {t}")
    return LexicalEntry(root.lemma, fs, lf, root)


# ---------------------------------------------------------------------------
# closure


def closure(
    base: LexicalEntry,
    rules: Iterable[LexicalRule],
    automaton: SlotAutomaton,
    keep: Callable[[str], bool] | None = None,
    limit: int = 16,
) -> list[LexicalEntry]:
    """All entries derivable from ``base``, deduplicated by isomorphism.

    ``keep`` is a test on surface forms; a derived entry failing it is
    pruned together with everything below it.
    """
    rules = list(rules)
    seen = {base.key(): base}
    frontier = [base]
    while frontier:
        nxt = []
        for e in frontier:
            for r in rules:
                for out in apply_rule(r, e, automaton, keep):
                    k = out.key()
                    if k in seen:
                        continue
                    if len(out.history) > limit:
                        raise ClosureError(Counter(out.history).most_common(1)[0][0], limit)
                    seen[k] = out
                    nxt.append(out)
        frontier = nxt
    return list(seen.values())


def _sort_key(e: LexicalEntry):
    return (e.phon, len(e.history), e.history, json.dumps(e.lf.to_json(), sort_keys=True, ensure_ascii=False))


@dataclass(frozen=True)
class CompileOptions:
    max_caus: int | None = 2
    recursion_limit: int = 16
    rules: tuple[str, ...] | None = None


@dataclass
class CompileStats:
    total: int = 0
    per_root: dict[str, int] = field(default_factory=dict)
    per_slot: dict[str, int] = field(default_factory=dict)
    build_seconds: float = 0.0
    index_keys: int = 0

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "per_root": dict(self.per_root),
            "per_slot": dict(self.per_slot),
            "build_seconds": round(self.build_seconds, 4),
            "index_keys": self.index_keys,
        }


@dataclass
class CompiledLexicon:
    index: dict[str, list[LexicalEntry]]
    stats: CompileStats

    @property
    def entry_count(self) -> int:
        return sum(len(v) for v in self.index.values())

    def entries(self):
        for k in sorted(self.index):
            yield from self.index[k]

    def analyze(self, surface: str) -> list[LexicalEntry]:
        return list(self.index.get(normalize(surface), []))

    def to_json(self) -> dict:
        return {"entries": [e.to_json() for e in self.entries()], "stats": self.stats.to_json()}

    def dump(self, path: str | os.PathLike):
        Path(path).write_text(json.dumps(self.to_json(), ensure_ascii=False, indent=1), encoding="utf-8")

    @classmethod
    def from_json(cls, data: Mapping, lexicon: "Lexicon") -> "CompiledLexicon":
        """Rebuild by replaying every stored history against the runtime rules."""
        index: dict[str, list[LexicalEntry]] = {}
        taken = set()
        for item in data["entries"]:
            e = lexicon.replay(item["root"], item["history"], item["phon"], item["lf"], exclude=taken)
            if e is None:
                raise GrammarError(f"stored entry {item['phon']!r} {item['history']} is not re-derivable")
            taken.add(e.key())
            index.setdefault(e.phon, []).append(e)
        s = data.get("stats", {})
        stats = CompileStats(
            len(taken), dict(s.get("per_root", {})), dict(s.get("per_slot", {})),
            float(s.get("build_seconds", 0.0)), len(index),
        )
        return cls(index, stats)


def compile_closure(roots: Iterable[RootEntry], rules: RuleSet, options: CompileOptions = CompileOptions()) -> CompiledLexicon:
    """Fixed point of rule application over every root."""
    start = time.perf_counter()
    if options.rules is not None:
        rules = rules.subset(options.rules)
    automaton = rules.automaton.with_caps(CAUS=options.max_caus) if "CAUS" in rules.automaton else rules.automaton
    active = list(rules)
    index: dict[str, list[LexicalEntry]] = {}
    per_root: dict[str, int] = {}
    per_slot = {r.slot: 0 for r in active}
    for root in roots:
        entries = closure(base_entry(root, rules.lattice), active, automaton, limit=options.recursion_limit)
        per_root[root.lemma] = len(entries)
        for e in entries:
            index.setdefault(e.phon, []).append(e)
            for slot in {s for s, _ in e.slots}:
                per_slot[slot] = per_slot.get(slot, 0) + 1
    for v in index.values():
        v.sort(key=_sort_key)
    stats = CompileStats(
        total=sum(per_root.values()),
        per_root=per_root,
        per_slot=per_slot,
        build_seconds=time.perf_counter() - start,
        index_keys=len(index),
    )
    return CompiledLexicon(index, stats)


def stats(lex: CompiledLexicon) -> CompileStats:
    return lex.stats


# ---------------------------------------------------------------------------
# runtime lexicon

SPEC_ALIASES = {
    "derivation": "DERIV",
    "conversion": "CONV",
    "plural": "PLU",
    "possessive": "POSS",
    "relativizer": "REL",
    "causative": "CAUS",
    "passive": "PASS",
    "negation": "NEG",
    "aspect": "ASP",
    "adverbial": "ADV",
    "agreement": "PERSON",
    "number": "NUM",
}


def parse_spec(text: str) -> dict[str, str]:
    """``k=v,k=v`` -> dict; the CLI form of a generation spec."""
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        k, eq, v = part.partition("=")
        if not eq or not k.strip() or not v.strip():
            raise SpecError(f"spec item {part!r} is not key=value")
        out[k.strip()] = v.strip()
    return out


class Lexicon:
    """Runtime lexicon: only base entries are resident."""

    def __init__(self, grammar: Grammar, max_caus: int | None = 2, recursion_limit: int = 16):
        self.grammar = grammar
        self.rules = grammar.rules
        self.lattice = grammar.lattice
        self.automaton = self.rules.automaton
        if "CAUS" in self.automaton:
            self.automaton = self.automaton.with_caps(CAUS=max_caus)
        self.recursion_limit = recursion_limit
        self._bases = {r.lemma: base_entry(r, self.lattice) for r in grammar.roots}
        self._templates = sorted(self.rules.templates(), key=str)

    @classmethod
    def load(cls, source=None, **kw) -> "Lexicon":
        return cls(load_grammar(source), **kw)

    @property
    def resident_entries(self) -> int:
        return len(self._bases)

    @property
    def roots(self) -> list[RootEntry]:
        return [e.root for e in self._bases.values()]

    def base(self, lemma: str) -> LexicalEntry:
        try:
            return self._bases[normalize(lemma)]
        except KeyError:
            raise UnknownLemma(f"unknown lemma {lemma!r}") from None

    def _closure(self, base, rules=None, keep=None):
        return closure(base, rules if rules is not None else list(self.rules), self.automaton, keep, self.recursion_limit)

    def candidate_roots(self, surface: str) -> list[str]:
        stems = strip_closure(surface, self._templates)
        return sorted(s for s in stems if s in self._bases)

    def analyze(self, surface: str) -> list[LexicalEntry]:
        surface = normalize(surface)
        if not surface:
            return []
        out = {}
        for lemma in self.candidate_roots(surface):
            base = self._bases[lemma]

            def keep(phon, lemma=lemma, alt=base.root.alternates):
                return surface.startswith(phon) or (alt and phon == lemma and surface.startswith(lemma[:-1]))

            for e in self._closure(base, keep=keep):
                if e.phon == surface:
                    out.setdefault(e.key(), e)
        return sorted(out.values(), key=_sort_key)

    def _spec_slots(self, spec: Mapping[str, str]) -> dict[str, list[str]]:
        slots = {}
        for k, v in spec.items():
            slot = SPEC_ALIASES.get(k.lower(), k.upper())
            if slot not in self.automaton:
                raise SpecError(f"unknown spec key {k!r}")
            slots[slot] = [p.lower() for p in v.split("+")]
        return slots

    def generate(self, lemma: str, spec: Mapping[str, str] | str | Desc) -> list[str]:
        """Surface forms of ``lemma`` matching ``spec``, sorted.

        A mapping names exactly the slots to fill, each with a rule gloss
        or id (``+`` joins repeated applications).  A description string
        instead selects every derivable entry it subsumes.
        """
        base = self.base(lemma)
        if isinstance(spec, (str, Desc)):
            pattern = from_description(spec, self.lattice)
            if pattern is None:
                raise SpecError("spec description is inconsistent")
            return sorted({e.phon for e in self._closure(base) if subsumes(pattern, e.fs)})
        wanted = self._spec_slots(spec)

        def named(r, parts):
            return r.id.lower() in parts or r.gloss.lower() in parts

        rules = [r for r in self.rules if r.slot in wanted and named(r, wanted[r.slot])]
        out = set()
        for e in self._closure(base, rules):
            got: dict[str, list[str]] = {}
            for rid in e.history:
                got.setdefault(self.rules[rid].slot, []).append(rid)
            if got.keys() != wanted.keys():
                continue
            if all(
                len(got[s]) == len(parts) and all(named(self.rules[rid], [p]) for rid, p in zip(got[s], parts))
                for s, parts in wanted.items()
            ):
                out.add(e.phon)
        return sorted(out)

    def replay(self, lemma, history, phon=None, lf_json=None, exclude=()) -> LexicalEntry | None:
        """Re-derive an entry by applying ``history`` to the base entry."""
        current = [self.base(lemma)]
        for rid in history:
            rule = self.rules.rules.get(rid)
            if rule is None:
                return None
            current = [o for e in current for o in apply_rule(rule, e, self.automaton)]
        for e in current:
            if phon is not None and e.phon != phon:
                continue
            if lf_json is not None and e.lf.to_json() != lf_json:
                continue
            if e.key() not in exclude:
                return e
        return None

    def compile(self, options: CompileOptions | None = None) -> CompiledLexicon:
        if options is None:
            options = CompileOptions(max_caus=self.automaton.caps.get("CAUS"), recursion_limit=self.recursion_limit)
        return compile_closure(self.roots, self.rules, options)
