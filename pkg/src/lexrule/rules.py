"""Lexical rules, the slot automaton and subcategorization frames.

Rule file syntax (``%`` comments, indented lines continue)::

    slots nominal DERIV CONV PLU POSS CASE REL
    slots verbal CAUS*2 PASS ...           # CAUS may apply twice; CAUS* is unbounded

    rule loc slot=CASE gloss=locative tmpl=DA
      in=[SYNSEM|LOCAL [CAT|HEAD: noun [CASE: nominative], CONT|INDEX: #3]]
      out=[SYNSEM|LOCAL|CAT|HEAD|CASE: locative, ...]
      lf=insert:at(WHAT=#6, WHERE=#3)

A later ``rule`` line with an id already seen adds a clause to that rule;
clause keys it omits (``tmpl in out call lf``) are copied from the first
clause.  Every clause that applies yields an output.

``in`` is unified with the entry.  ``out`` is a list of edits: each
top-level path is overwritten with the described value, and a type name
in front of the bracket replaces the root type.  Tags are shared between
``in``, ``call`` arguments, ``out`` and ``lf``; ``$x`` in ``out`` is a
fresh variable.  ``call=move-object(#2, #4, [...])`` and
``call=append(#a, #b, #c)`` are relations over lists, run between the
``in`` and ``out`` steps.

``lf`` is one of ``identity``, ``insert:P(R=#t, ...)`` (add a
predication), ``wrap:P(R=#t, ..., R=@lf)`` (new form whose restriction
takes the input form ``@lf`` as argument), or ``sense:(...)`` which is
``wrap`` with the predicate chosen from the sense table by the root's
semantic features.  ``wrap#t`` / ``sense#t`` also set the new index.

``tmpl`` lists allomorphs as ``TEMPLATE@condition;...``; conditions are
stem-final classes (``V`` for any vowel, or letters) optionally prefixed
with ``poly:`` to require a polysyllabic stem.  The first admitted
allomorph is used.  Flags: ``internal`` (never applied on its own) and
``feed=ID`` (apply the internal rule ID first).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .desc import Desc, DescriptionError, parse, split_top_level
from .entry import CASE_PATH, LexicalEntry, SUBCAT_PATH
from .fs import FeatureStructure, Graph, atoms_in, fresh_namer
from .lattice import ELIST, FIRST, NELIST, REST, GrammarError, TypeLattice, is_atom, iter_declarations
from .phonology import Allomorph, parse_allomorphs, realize, select_allomorph
from .semantics import Predication, SemanticForm

log = logging.getLogger(__name__)


class RuleError(GrammarError):
    """A rule is misconfigured (distinct from a rule not applying)."""


# ---------------------------------------------------------------------------
# slot automaton


@dataclass(frozen=True)
class SlotAutomaton:
    sequences: dict[str, tuple[str, ...]]
    caps: dict[str, int | None]

    def __post_init__(self):
        pos = {}
        for name, slots in self.sequences.items():
            for rank, s in enumerate(slots):
                if s in pos:
                    raise RuleError(f"slot {s} declared twice")
                pos[s] = (name, rank)
        object.__setattr__(self, "_pos", pos)

    def __contains__(self, slot):
        return slot in self._pos

    def sequence_of(self, slot: str) -> str:
        return self._pos[slot][0]

    def admits(self, applied: Iterable[str], slot: str) -> bool:
        """May a rule at ``slot`` follow the slots already ``applied``?"""
        seq, rank = self._pos[slot]
        top, count = -1, 0
        for s in applied:
            q, r = self._pos.get(s, (None, -1))
            if q != seq:
                continue
            top = max(top, r)
            count += s == slot
        if rank > top:
            return True
        if rank == top:
            cap = self.caps.get(slot, 1)
            return cap is None or count < cap
        return False

    def with_caps(self, **caps: int | None) -> "SlotAutomaton":
        return SlotAutomaton(self.sequences, {**self.caps, **caps})


# ---------------------------------------------------------------------------
# logical-form actions

_LF_RE = re.compile(r"^(?P<kind>insert|wrap|sense)(?P<index>#\w+)?:(?P<pred>[\w\-]*)\((?P<args>.*)\)$")


@dataclass(frozen=True)
class LFAction:
    kind: str
    pred: str = ""
    args: tuple[tuple[str, str], ...] = ()
    index: str | None = None

    @classmethod
    def parse(cls, text: str) -> "LFAction":
        text = text.strip()
        if text == "identity":
            return cls("identity")
        m = _LF_RE.match(text)
        if m is None:
            raise RuleError(f"bad lf action {text!r}")
        args = []
        for part in split_top_level(m["args"]):
            role, eq, val = part.partition("=")
            val = val.strip()
            if not eq or not (val.startswith("#") or val == "@lf"):
                raise RuleError(f"bad lf argument {part!r} in {text!r}")
            args.append((role.strip(), val))
        if m["kind"] != "sense" and not m["pred"]:
            raise RuleError(f"lf action {text!r} names no predicate")
        return cls(m["kind"], m["pred"], tuple(args), m["index"])

    def tags(self) -> set[str]:
        out = {v for _, v in self.args if v.startswith("#")}
        if self.index:
            out.add(self.index)
        return out

    def apply(self, lf: SemanticForm, resolve, senses=()) -> list[SemanticForm]:
        if self.kind == "identity":
            return [lf]
        args = tuple((r, lf if v == "@lf" else resolve(v)) for r, v in self.args)
        index = resolve(self.index) if self.index else None
        if self.kind == "insert":
            return [lf.insert(Predication(self.pred, args))]
        if self.kind == "wrap":
            return [lf.wrap(self.pred, args, index)]
        return [lf.wrap(p, args, index) for p in senses]


@dataclass(frozen=True)
class SenseTable:
    """Semantic feature -> sense predicate, in file order."""

    pairs: tuple[tuple[str, str], ...] = ()

    def senses(self, features) -> list[str]:
        out = []
        for feat, pred in self.pairs:
            if feat in features and pred not in out:
                out.append(pred)
        return out

    def features(self) -> set[str]:
        return {f for f, _ in self.pairs}


def load_senses(source: str) -> SenseTable:
    """``sense FEATURE PREDICATE`` lines."""
    if "\n" not in source and Path(source).exists():
        source = Path(source).read_text(encoding="utf-8")
    pairs = []
    for no, decl in iter_declarations(source):
        words = decl.split()
        if len(words) != 3 or words[0] != "sense":
            raise GrammarError(f"sense table line {no}: expected 'sense FEATURE PREDICATE'")
        pairs.append((words[1].lstrip("+"), words[2]))
    return SenseTable(tuple(pairs))


# ---------------------------------------------------------------------------
# rules


@dataclass(eq=False)
class RuleClause:
    allomorphs: tuple[Allomorph, ...]
    in_desc: Desc
    out_desc: Desc
    calls: tuple[tuple[str, tuple[Desc, ...]], ...]
    lf: LFAction
    # typed paths of the input description, for a cheap pre-check
    probes: tuple[tuple[tuple[str, ...], str], ...] = ()

    def __post_init__(self):
        self.probes = tuple(_probes(self.in_desc, ()))

    def may_apply(self, fs: FeatureStructure) -> bool:
        glb = fs.lattice.glb
        for path, t in self.probes:
            have = fs.type_at(path)
            if have is not None and glb(have, t) is None:
                return False
        return True


def _probes(d: Desc, prefix):
    if d.type is not None and not d.type.startswith("$"):
        yield prefix, d.type
    for path, sub in d.pairs:
        yield from _probes(sub, prefix + path)


@dataclass(eq=False)
class LexicalRule:
    id: str
    slot: str
    gloss: str
    clauses: list[RuleClause]
    lattice: TypeLattice
    automaton: SlotAutomaton
    internal: bool = False
    feed: "LexicalRule | None" = None
    senses: SenseTable | None = None

    def templates(self):
        for c in self.clauses:
            for a in c.allomorphs:
                yield a.template
        if self.feed is not None:
            yield from self.feed.templates()

    @property
    def zero_affix(self) -> bool:
        return all(not c.allomorphs for c in self.clauses)

    def __repr__(self):
        return f"LexicalRule({self.id!r}, slot={self.slot})"


@dataclass
class RuleSet:
    rules: dict[str, LexicalRule]
    automaton: SlotAutomaton
    lattice: TypeLattice
    senses: SenseTable = field(default_factory=SenseTable)

    def __iter__(self) -> Iterator[LexicalRule]:
        return (r for r in self.rules.values() if not r.internal)

    def __getitem__(self, rule_id: str) -> LexicalRule:
        return self.rules[rule_id]

    def __len__(self):
        return sum(1 for _ in self)

    def templates(self) -> set:
        return {t for r in self.rules.values() for t in r.templates()}

    def subset(self, ids: Iterable[str]) -> "RuleSet":
        ids = set(ids)
        unknown = ids - set(self.rules)
        if unknown:
            raise RuleError(f"unknown rules {sorted(unknown)}")
        keep = {k: r for k, r in self.rules.items() if k in ids or r.internal}
        return replace(self, rules=keep)


def _fields(decl: str) -> list[str]:
    out, buf, depth, quoted = [], [], 0, False
    for ch in decl:
        if ch == '"':
            quoted = not quoted
        elif not quoted:
            if ch in "[<(":
                depth += 1
            elif ch in "]>)":
                depth -= 1
            elif ch.isspace() and depth == 0:
                if buf:
                    out.append("".join(buf))
                    buf = []
                continue
        buf.append(ch)
    if buf:
        out.append("".join(buf))
    merged = []
    for tok in out:
        # `in=noun-l [...]`: a bracket after a type name belongs to it
        if merged and tok[0] in "[<":
            merged[-1] += " " + tok
        else:
            merged.append(tok)
    return merged


_CALL_RE = re.compile(r"^(?P<name>[\w\-]+)\((?P<args>.*)\)$")


def _parse_desc(text: str, where: str) -> Desc:
    try:
        return parse(text)
    except DescriptionError as exc:
        raise RuleError(f"{where}: {exc}") from None


def load_rules(source: str, lattice: TypeLattice, senses: SenseTable | None = None) -> RuleSet:
    """Parse and validate a rule file against ``lattice``."""
    if "\n" not in source and Path(source).exists():
        source = Path(source).read_text(encoding="utf-8")
    senses = senses or SenseTable()
    sequences: dict[str, tuple[str, ...]] = {}
    caps: dict[str, int | None] = {}
    raw: dict[str, list[tuple[int, dict]]] = {}
    for no, decl in iter_declarations(source):
        words = _fields(decl)
        if words[0] == "slots":
            slots = []
            for w in words[2:]:
                name, star, n = w.partition("*")
                slots.append(name)
                caps[name] = (int(n) if n else None) if star else 1
            sequences[words[1]] = tuple(slots)
        elif words[0] == "rule":
            if len(words) < 2:
                raise RuleError(f"line {no}: rule without id")
            kv: dict = {"call": []}
            for w in words[2:]:
                k, eq, v = w.partition("=")
                if not eq:
                    kv[k] = True
                elif k == "call":
                    kv["call"].append(v)
                else:
                    kv[k] = v
            raw.setdefault(words[1], []).append((no, kv))
        else:
            raise RuleError(f"line {no}: unknown declaration {words[0]!r}")
    automaton = SlotAutomaton(sequences, caps)

    rules: dict[str, LexicalRule] = {}
    feeds = {}
    for rid, lines in raw.items():
        first_no, first = lines[0]
        slot = first.get("slot")
        if slot is None or slot not in automaton:
            raise RuleError(f"line {first_no}: rule {rid} has unknown slot {slot!r}")
        clauses = []
        for no, kv in lines:
            merged = {**first, **{k: v for k, v in kv.items() if k != "call" or v}}
            where = f"rule {rid} (line {no})"
            tmpl = merged.get("tmpl")
            in_d = _parse_desc(merged["in"], where) if "in" in merged else Desc()
            out_d = _parse_desc(merged["out"], where) if "out" in merged else Desc()
            if out_d.tag is not None or out_d.items is not None:
                raise RuleError(f"{where}: out must be a plain bracket of edits")
            calls = []
            for c in merged.get("call", []):
                m = _CALL_RE.match(c)
                if m is None or m["name"] not in RELATIONS:
                    raise RuleError(f"{where}: bad call {c!r}")
                calls.append((m["name"], tuple(_parse_desc(a, where) for a in split_top_level(m["args"]))))
            lf = LFAction.parse(merged.get("lf", "identity"))
            for d in (in_d, out_d, *(a for _, args in calls for a in args)):
                lattice.validate_description(d, where)
            known = {t for d in (in_d, out_d, *(a for _, args in calls for a in args)) for t in d.tags()}
            missing = lf.tags() - known
            if missing:
                raise RuleError(f"{where}: lf refers to unbound tags {sorted(missing)}")
            if lf.kind == "sense" and not senses.pairs:
                raise RuleError(f"{where}: sense action but no sense table loaded")
            allomorphs = parse_allomorphs(tmpl) if tmpl else ()
            clause = RuleClause(allomorphs, in_d, out_d, tuple(calls), lf)
            _static_check(clause, lattice, where)
            clauses.append(clause)
        rules[rid] = LexicalRule(
            id=rid,
            slot=slot,
            gloss=first.get("gloss", rid),
            clauses=clauses,
            lattice=lattice,
            automaton=automaton,
            internal=bool(first.get("internal", False)),
            senses=senses,
        )
        if "feed" in first:
            feeds[rid] = first["feed"]
    for rid, fid in feeds.items():
        if fid not in rules or not rules[fid].internal:
            raise RuleError(f"rule {rid} is fed by {fid!r}, which is not an internal rule")
        rules[rid].feed = rules[fid]
    return RuleSet(rules, automaton, lattice, senses)


def _static_check(clause: RuleClause, lattice: TypeLattice, where: str):
    """Input and output descriptions must be satisfiable on their own."""
    g = Graph(lattice)
    tags: dict[str, int] = {}
    fresh = fresh_namer(set())
    root = g.build(clause.in_desc, tags, fresh)
    if root is None or not g.infer(root) or not g.enforce(root):
        raise RuleError(f"{where}: input description is inconsistent")
    for _, args in clause.calls:
        for a in args:
            if g.build(a, tags, fresh) is None:
                raise RuleError(f"{where}: call argument is inconsistent")
    if not _edit(g, root, clause.out_desc, tags, fresh) or not g.infer(root):
        raise RuleError(f"{where}: output paths are not appropriate for the output type")


def _edit(g: Graph, root: int, out: Desc, tags, fresh) -> bool:
    if out.type is not None:
        g.retype(root, out.type)
    for path, sub in out.pairs:
        v = g.build(sub, tags, fresh)
        if v is None:
            return False
        node = root
        for f in path[:-1]:
            nxt = g.arc(node, f)
            if nxt is None:
                nxt = g.new(g.lat.root)
                g.set_arc(node, f, nxt)
            node = nxt
        g.set_arc(node, path[-1], v)
    return True


# ---------------------------------------------------------------------------
# list relations used by call=


def _elements(g: Graph, n: int) -> list[int] | None:
    out = []
    while True:
        t = g.type(n)
        if t == ELIST:
            return out
        first, rest = g.arc(n, FIRST), g.arc(n, REST)
        if t != NELIST or first is None or rest is None:
            return None
        out.append(first)
        n = rest


def _make_list(g: Graph, elts: list[int], tail: int | None = None) -> int:
    node = g.new(ELIST) if tail is None else tail
    for e in reversed(elts):
        cell = g.new(NELIST)
        g.set_arc(cell, FIRST, e)
        g.set_arc(cell, REST, node)
        node = cell
    return node


def _rel_move_object(g: Graph, tags, args, fresh):
    """move-object(Frame, Rest, Object): Object is deleted from Frame."""
    if len(args) != 3:
        raise RuleError("move-object takes three arguments")
    nodes = [g.build(a, tags, fresh) for a in args]
    if None in nodes:
        return
    frame, rest, obj = nodes
    elts = _elements(g, frame)
    if elts is None:
        return
    for i, e in enumerate(elts):
        h = g.copy()
        if h.unify(e, obj) and h.unify(rest, _make_list(h, elts[:i] + elts[i + 1 :])):
            yield h, dict(tags)


def _rel_append(g: Graph, tags, args, fresh):
    """append(A, B, C): C is the list A followed by the list B."""
    if len(args) != 3:
        raise RuleError("append takes three arguments")
    nodes = [g.build(a, tags, fresh) for a in args]
    if None in nodes:
        return
    a, b, c = nodes
    elts = _elements(g, a)
    if elts is None:
        return
    h = g.copy()
    if h.unify(c, _make_list(h, elts, tail=b)):
        yield h, dict(tags)


RELATIONS = {"move-object": _rel_move_object, "append": _rel_append}


# ---------------------------------------------------------------------------
# application


def _lazy_fresh(entry: LexicalEntry):
    """Fresh-name supply that only collects the used names when first asked."""
    namer = None

    def fresh(token: str) -> str:
        nonlocal namer
        if namer is None:
            namer = fresh_namer(atoms_in(entry.fs) | {f'"{v}"' for v in entry.lf.variables()})
        return namer(token)

    return fresh


def _apply_clause(rule: LexicalRule, clause: RuleClause, entry: LexicalEntry, accept=None):
    if not clause.may_apply(entry.fs):
        return []
    if clause.allomorphs:
        tmpl = select_allomorph(entry.phon, clause.allomorphs)
        if tmpl is None:
            return []
        bare = entry.bare
        phon = realize(entry.phon, tmpl, bare and entry.root.alternates, bare and entry.root.front)
    else:
        phon = entry.phon
    if accept is not None and not accept(phon):
        return []
    g = Graph(rule.lattice)
    root = g.add_fs(entry.fs)
    tags: dict[str, int] = {}
    fresh = _lazy_fresh(entry)
    n = g.build(clause.in_desc, tags, fresh)
    if n is None or not g.unify(root, n):
        return []
    states = [(g, tags)]
    for name, args in clause.calls:
        states = [s for g1, t1 in states for s in RELATIONS[name](g1, t1, args, fresh)]
    out = []
    for g1, t1 in states:
        if not _edit(g1, root, clause.out_desc, t1, fresh) or not g1.infer(root) or not g1.enforce(root):
            continue
        fs = g1.extract(root)
        if fs is None:
            continue

        def resolve(tag, g1=g1, t1=t1):
            t = g1.type(t1[tag])
            if not is_atom(t):
                raise RuleError(f"rule {rule.id}: lf tag {tag} is bound to {t!r}, not a variable")
            return t.strip('"')

        senses = ()
        if clause.lf.kind == "sense":
            senses = rule.senses.senses(entry.root.features)
            if not senses:
                log.info("no %s sense licensed for %r (features %s)", rule.id, entry.root.lemma,
                         sorted(entry.root.features))
        for lf in clause.lf.apply(entry.lf, resolve, senses):
            out.append((phon, fs, lf))
    return out


def _run(rule: LexicalRule, entry: LexicalEntry, accept=None) -> list[tuple[str, FeatureStructure, SemanticForm]]:
    out = []
    for clause in rule.clauses:
        out.extend(_apply_clause(rule, clause, entry, accept))
    return out


def apply_rule(
    rule: LexicalRule,
    entry: LexicalEntry,
    automaton: SlotAutomaton | None = None,
    accept: Callable[[str], bool] | None = None,
) -> list[LexicalEntry]:
    """All outputs of ``rule`` on ``entry``; empty when it does not apply.

    The slot automaton is checked first, then each clause is tried
    independently.  Outputs carry the extended surface form, the edited
    and re-constrained structure, the composed logical form, and the
    history with this rule appended.  ``accept`` filters on the surface
    form before any unification is done; analysis uses it to prune.
    """
    automaton = automaton or rule.automaton
    if not automaton.admits((s for s, _ in entry.slots), rule.slot):
        return []
    inputs = [entry]
    if rule.feed is not None:
        inputs = [
            LexicalEntry(p, fs, lf, entry.root, entry.history, entry.slots) for p, fs, lf in _run(rule.feed, entry, accept)
        ]
    history = entry.history + (rule.id,)
    slots = entry.slots + ((rule.slot, rule.gloss),)
    out = []
    for e in inputs:
        for phon, fs, lf in _run(rule, e, accept):
            out.append(LexicalEntry(phon, fs, lf, entry.root, history, slots))
    return out


# ---------------------------------------------------------------------------
# subcategorization frames


@dataclass(frozen=True)
class SubcatElement:
    synsem: FeatureStructure

    @property
    def case(self) -> str | None:
        return self.synsem.type_at(("LOCAL", "CAT", "HEAD", "CASE"))

    @property
    def index(self) -> str | None:
        t = self.synsem.type_at(("LOCAL", "CONT", "INDEX"))
        return t.strip('"') if t and is_atom(t) else None

    @property
    def nonref(self) -> bool:
        return self.synsem.type_at(("LOCAL", "CAT", "ADJUNCTS", "NON-REF")) == "+"

    @property
    def preverbal(self) -> bool:
        return self.synsem.type_at(("PREVERBAL",)) == "+"

    @property
    def cont(self) -> FeatureStructure | None:
        return self.synsem.get(("LOCAL", "CONT"))


@dataclass(frozen=True)
class SubcatFrame:
    """The arguments a head still requires, most prominent first."""

    elements: tuple[SubcatElement, ...]

    @classmethod
    def of(cls, entry: LexicalEntry | FeatureStructure) -> "SubcatFrame":
        fs = entry.fs if isinstance(entry, LexicalEntry) else entry
        items = fs.list_items(SUBCAT_PATH)
        if items is None:
            raise ValueError("entry has no closed SUBCAT list")
        return cls(tuple(SubcatElement(s) for s in items))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def cases(self) -> tuple[str | None, ...]:
        return tuple(e.case for e in self.elements)

    def roles(self) -> tuple[str, ...]:
        """Grammatical role of each element, read off position and case."""
        out = []
        for i, e in enumerate(self.elements):
            if e.nonref or e.case == "accusative":
                out.append("dobj")
            elif i == 0 and e.case == "nominative":
                out.append("subj")
            elif e.case == "dative":
                out.append("iobj")
            else:
                out.append("obl")
        return tuple(out)


def move_object(frame: SubcatFrame) -> tuple[SubcatFrame, SubcatElement] | None:
    """Delete the accusative object; return the remaining frame and the object."""
    for i, e in enumerate(frame.elements):
        if e.case == "accusative":
            return SubcatFrame(frame.elements[:i] + frame.elements[i + 1 :]), e
    return None


def entry_case(entry: LexicalEntry) -> str | None:
    return entry.fs.type_at(CASE_PATH)
