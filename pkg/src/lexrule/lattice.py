"""Type lattice: subtype order, greatest lower bounds, appropriateness.

The hierarchy file is line oriented; ``%`` starts a comment and an
indented line continues the previous declaration::

    type top
    type word sub top
    type qualitative-l sub adjective-l
    feat word SYNSEM synsem
    cons quantitative-l [SYNSEM|LOCAL|CAT|HEAD: quantitative-adj [...]]
    atoms index

``type`` may name several parents (``type x sub a b``).  ``atoms T``
makes every quoted string ``"..."`` an implicit leaf subtype of ``T``;
these are used as logical-form variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .desc import Desc, DescriptionError, parse

LIST, ELIST, NELIST = "list", "e-list", "ne-list"
FIRST, REST = "FIRST", "REST"


class GrammarError(Exception):
    """A grammar file is malformed or internally inconsistent."""


class HierarchyError(GrammarError):
    pass


def is_atom(t: str) -> bool:
    return t.startswith('"')


def iter_declarations(text: str):
    """Yield (line number, declaration) pairs, joining continuation lines."""
    current, start = None, 0
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0].isspace() and current is not None:
            current += " " + line.strip()
            continue
        if current is not None:
            yield start, current
        current, start = line.strip(), no
    if current is not None:
        yield start, current


@dataclass(eq=False)
class TypeLattice:
    """An immutable, validated type hierarchy.

    ``glb`` returns ``None`` for incompatible types.  Instances are built
    by :func:`load_hierarchy` and are safe to share between threads.
    """

    types: frozenset[str]
    parents: dict[str, tuple[str, ...]]
    appropriateness: dict[str, dict[str, str]]
    constraints: dict[str, Desc]
    atom_host: str | None = None
    root: str = field(init=False)

    def __post_init__(self):
        self._validate_edges()
        self._ancestors = {t: self._closure(t) for t in self.types}
        self._descendants = {t: set() for t in self.types}
        for t, ups in self._ancestors.items():
            for u in ups:
                self._descendants[u].add(t)
        roots = [t for t in self.types if not self.parents.get(t)]
        if len(roots) != 1:
            raise HierarchyError(f"expected a single most general type, found {sorted(roots)}")
        self.root = roots[0]
        if self.atom_host is not None and self.atom_host not in self.types:
            raise HierarchyError(f"atom type {self.atom_host!r} is not declared")
        self._glb = self._glb_table()
        self._approp = self._inherit_appropriateness()
        self._intro = self._introducers()
        self._constrained = {
            t: tuple(c for c in self._topological() if c in self.constraints and c in self._ancestors[t])
            for t in self.types
        }

    # construction helpers

    def _validate_edges(self):
        for child, ups in self.parents.items():
            for p in ups:
                if p not in self.types:
                    raise HierarchyError(f"type {child!r} has undeclared parent {p!r}")
        # Kahn's algorithm; leftovers sit on a cycle
        indeg = {t: len(self.parents.get(t, ())) for t in self.types}
        children = {t: [] for t in self.types}
        for c, ups in self.parents.items():
            for p in ups:
                children[p].append(c)
        queue = sorted(t for t, d in indeg.items() if d == 0)
        order = []
        while queue:
            t = queue.pop()
            order.append(t)
            for c in children[t]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != len(self.types):
            cyc = sorted(t for t, d in indeg.items() if d > 0)
            raise HierarchyError(f"cycle in subtype edges among {cyc}")
        self._order = order

    def _topological(self):
        return self._order

    def _closure(self, t: str) -> frozenset[str]:
        seen, stack = {t}, [t]
        while stack:
            for p in self.parents.get(stack.pop(), ()):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return frozenset(seen)

    def _glb_table(self) -> dict[tuple[str, str], str | None]:
        table = {}
        ordered = sorted(self.types)
        for i, a in enumerate(ordered):
            for b in ordered[i:]:
                common = self._descendants[a] & self._descendants[b]
                if not common:
                    g = None
                else:
                    maximal = [c for c in common if not (self._ancestors[c] - {c}) & common]
                    if len(maximal) > 1:
                        raise HierarchyError(
                            f"types {a!r} and {b!r} have no unique greatest lower bound: "
                            f"{sorted(maximal)}"
                        )
                    g = maximal[0]
                table[a, b] = table[b, a] = g
        return table

    def _inherit_appropriateness(self) -> dict[str, dict[str, str]]:
        approp: dict[str, dict[str, str]] = {}
        for t in self._order:
            merged: dict[str, str] = {}
            for p in self.parents.get(t, ()):
                for f, r in approp[p].items():
                    if f in merged:
                        g = self.glb(merged[f], r)
                        if g is None:
                            raise HierarchyError(f"feature {f} inherited by {t!r} with clashing restrictions")
                        merged[f] = g
                    else:
                        merged[f] = r
            for f, r in self.appropriateness.get(t, {}).items():
                if r not in self.types:
                    raise HierarchyError(f"feature {f} on {t!r} restricted to undeclared type {r!r}")
                if f in merged and not self.is_subtype(r, merged[f]):
                    raise HierarchyError(
                        f"feature {f} re-introduced on {t!r} with {r!r}, incompatible with inherited {merged[f]!r}"
                    )
                merged[f] = r
            approp[t] = merged
        return approp

    def _introducers(self) -> dict[str, str | None]:
        intro: dict[str, set[str]] = {}
        for t, feats in self.appropriateness.items():
            for f in feats:
                intro.setdefault(f, set()).add(t)
        out = {}
        for f, ts in intro.items():
            most_general = {t for t in ts if not any(u != t and u in self._ancestors[t] for u in ts)}
            out[f] = next(iter(most_general)) if len(most_general) == 1 else None
        return out

    # queries

    def check(self, t: str):
        if t not in self.types and not (is_atom(t) and self.atom_host is not None):
            raise KeyError(f"unknown type {t!r}")

    def glb(self, a: str, b: str) -> str | None:
        if a == b:
            return a
        try:
            return self._glb[a, b]
        except KeyError:
            pass
        if is_atom(a) or is_atom(b):
            if is_atom(a) and is_atom(b):
                return None
            atom, other = (a, b) if is_atom(a) else (b, a)
            return atom if self.atom_host in self._descendants[other] else None
        return self._glb[a, b]

    def is_subtype(self, specific: str, general: str) -> bool:
        """True when ``specific`` is ``general`` or one of its subtypes."""
        if specific == general:
            return True
        if is_atom(general):
            return False
        if is_atom(specific):
            return self.atom_host in self._descendants[general]
        return general in self._ancestors[specific]

    def supertypes(self, t: str) -> frozenset[str]:
        if is_atom(t):
            return self._ancestors[self.atom_host] | {t}
        return self._ancestors[t]

    def subtypes(self, t: str) -> frozenset[str]:
        return frozenset(self._descendants[t])

    def approp(self, t: str) -> dict[str, str]:
        if is_atom(t):
            return {}
        return self._approp[t]

    def introducer(self, feature: str) -> str | None:
        return self._intro.get(feature)

    def features(self) -> set[str]:
        return set(self._intro)

    def constrained_supertypes(self, t: str) -> tuple[str, ...]:
        if is_atom(t):
            return ()
        return self._constrained[t]

    def validate_description(self, d: Desc, where: str = "description"):
        for t in d.types():
            if t.startswith("$") or is_atom(t):
                if self.atom_host is None:
                    raise GrammarError(f"{where}: atoms used but no atom type declared")
                continue
            if t not in self.types:
                raise GrammarError(f"{where}: unknown type {t!r}")
        known = self.features()
        for f in d.features():
            if f not in known and f not in (FIRST, REST):
                raise GrammarError(f"{where}: unknown feature {f!r}")


def load_hierarchy(source: str) -> TypeLattice:
    """Parse hierarchy text (or a path to a hierarchy file) into a lattice."""
    if "\n" not in source and Path(source).exists():
        source = Path(source).read_text(encoding="utf-8")
    types: set[str] = set()
    parents: dict[str, list[str]] = {}
    approp: dict[str, dict[str, str]] = {}
    cons: dict[str, Desc] = {}
    atom_host = None
    for no, decl in iter_declarations(source):
        words = decl.split()
        kw = words[0]
        if kw == "type":
            if len(words) == 2:
                types.add(words[1])
            elif len(words) >= 4 and words[2] == "sub":
                types.add(words[1])
                parents.setdefault(words[1], []).extend(words[3:])
            else:
                raise HierarchyError(f"line {no}: expected 'type NAME [sub PARENT...]'")
        elif kw == "feat":
            if len(words) != 4:
                raise HierarchyError(f"line {no}: expected 'feat TYPE FEATURE VALUETYPE'")
            _, t, f, r = words
            if t not in types:
                raise HierarchyError(f"line {no}: feature {f} declared on undeclared type {t!r}")
            approp.setdefault(t, {})[f] = r
        elif kw == "cons":
            if len(words) < 3:
                raise HierarchyError(f"line {no}: expected 'cons TYPE DESCRIPTION'")
            t = words[1]
            body = decl.split(None, 2)[2]
            try:
                cons[t] = parse(body)
            except DescriptionError as exc:
                raise HierarchyError(f"line {no}: {exc}") from None
        elif kw == "atoms":
            atom_host = words[1]
        else:
            raise HierarchyError(f"line {no}: unknown declaration {kw!r}")
    for t in cons:
        if t not in types:
            raise HierarchyError(f"constraint on undeclared type {t!r}")
    lattice = TypeLattice(
        types=frozenset(types),
        parents={t: tuple(dict.fromkeys(ps)) for t, ps in parents.items()},
        appropriateness=approp,
        constraints=cons,
        atom_host=atom_host,
    )
    for t, d in cons.items():
        lattice.validate_description(d, f"constraint on {t}")
    return lattice
