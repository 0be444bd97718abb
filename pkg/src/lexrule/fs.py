"""Typed feature structures: unification, subsumption, type constraints.

A :class:`FeatureStructure` is an immutable rooted DAG stored in a
canonical numbering (breadth first from the root, features in sorted
order).  Two structures are isomorphic exactly when they compare equal,
so structures can be hashed, deduplicated and used as dictionary keys.

All destructive work happens on a private :class:`Graph` with union-find
node merging; results are read back out with :meth:`Graph.extract`.
Unification failure is a normal result and is reported as ``None``.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterator

from .desc import OPEN, Desc, parse
from .lattice import ELIST, FIRST, LIST, NELIST, REST, GrammarError, TypeLattice, is_atom

MAX_CONSTRAINT_ROUNDS = 10_000


class LatticeMismatch(ValueError):
    """Structures typed against different lattices were combined."""


class FeatureStructure:
    __slots__ = ("lattice", "types", "arcs", "_hash")

    def __init__(self, lattice: TypeLattice, types: tuple[str, ...], arcs: tuple[tuple[tuple[str, int], ...], ...]):
        self.lattice = lattice
        self.types = types
        self.arcs = arcs
        self._hash = None

    @classmethod
    def top(cls, lattice: TypeLattice) -> "FeatureStructure":
        """The empty structure typed at the lattice root."""
        return cls(lattice, (lattice.root,), ((),))

    def __eq__(self, other):
        if not isinstance(other, FeatureStructure):
            return NotImplemented
        return self.types == other.types and self.arcs == other.arcs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.types, self.arcs))
        return self._hash

    def __len__(self):
        return len(self.types)

    @property
    def type(self) -> str:
        return self.types[0]

    def _node(self, path) -> int | None:
        n = 0
        for f in path:
            n = dict(self.arcs[n]).get(f)
            if n is None:
                return None
        return n

    def type_at(self, path) -> str | None:
        n = self._node(path)
        return None if n is None else self.types[n]

    def get(self, path) -> "FeatureStructure | None":
        """The substructure found by following ``path``, or None."""
        n = self._node(path)
        if n is None:
            return None
        if n == 0:
            return self
        g = Graph(self.lattice)
        base = g.add_fs(self)
        return g.extract(base + n)

    def shares(self, p1, p2) -> bool:
        """True if both paths lead to the very same node."""
        a, b = self._node(p1), self._node(p2)
        return a is not None and a == b

    def paths(self) -> Iterator[tuple[tuple[str, ...], str]]:
        """Every path (depth first, sorted features) with the type it reaches."""
        def walk(n, prefix):
            yield prefix, self.types[n]
            for f, m in self.arcs[n]:
                yield from walk(m, prefix + (f,))
        yield from walk(0, ())

    def list_items(self, path=()) -> list["FeatureStructure"] | None:
        """Elements of a FIRST/REST list at ``path`` (None if not a closed list)."""
        out = []
        path = tuple(path)
        while True:
            t = self.type_at(path)
            if t is None:
                return None
            if t == ELIST:
                return out
            first = self.get(path + (FIRST,))
            if first is None:
                return None
            out.append(first)
            path += (REST,)

    def reentrant_nodes(self) -> set[int]:
        counts: dict[int, int] = {}
        for arcs in self.arcs:
            for _, m in arcs:
                counts[m] = counts.get(m, 0) + 1
        return {n for n, c in counts.items() if c > 1}

    def to_text(self) -> str:
        """Render as a description that :func:`from_description` reads back."""
        shared = sorted(self.reentrant_nodes())
        tags = {n: f"#{i}" for i, n in enumerate(shared, 1)}
        printed = set()

        def render(n):
            t = self.types[n]
            head = []
            if n in tags:
                head.append(tags[n])
                if n in printed:
                    return head[0]
                printed.add(n)
            head.append(t)
            if self.arcs[n]:
                body = ", ".join(f"{f}: {render(m)}" for f, m in self.arcs[n])
                head.append(f"[{body}]")
            return " ".join(head)

        return render(0)

    def __repr__(self):
        return f"FeatureStructure({self.to_text()})"


class Graph:
    """Mutable working graph used by unification and rule application."""

    __slots__ = ("lat", "types", "arcs", "uf")

    def __init__(self, lattice: TypeLattice):
        self.lat = lattice
        self.types: list[str] = []
        self.arcs: list[dict[str, int]] = []
        self.uf: list[int] = []

    def copy(self) -> "Graph":
        g = Graph(self.lat)
        g.types = list(self.types)
        g.arcs = [dict(a) for a in self.arcs]
        g.uf = list(self.uf)
        return g

    def new(self, t: str) -> int:
        self.types.append(t)
        self.arcs.append({})
        self.uf.append(len(self.uf))
        return len(self.uf) - 1

    def find(self, n: int) -> int:
        uf = self.uf
        while uf[n] != n:
            uf[n] = uf[uf[n]]
            n = uf[n]
        return n

    def type(self, n: int) -> str:
        return self.types[self.find(n)]

    def arc(self, n: int, f: str) -> int | None:
        m = self.arcs[self.find(n)].get(f)
        return None if m is None else self.find(m)

    def follow(self, n: int, path) -> int | None:
        for f in path:
            n = self.arc(n, f)
            if n is None:
                return None
        return n

    def set_arc(self, n: int, f: str, m: int):
        self.arcs[self.find(n)][f] = m

    def retype(self, n: int, t: str):
        self.types[self.find(n)] = t

    def add_fs(self, fs: FeatureStructure) -> int:
        if fs.lattice is not self.lat:
            raise LatticeMismatch("feature structure typed against a different lattice")
        base = len(self.types)
        self.types.extend(fs.types)
        self.arcs.extend({f: base + m for f, m in arcs} for arcs in fs.arcs)
        self.uf.extend(range(base, base + len(fs.types)))
        return base

    def unify(self, a: int, b: int) -> bool:
        glb = self.lat.glb
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            t = glb(self.types[x], self.types[y])
            if t is None:
                return False
            self.uf[y] = x
            self.types[x] = t
            ax = self.arcs[x]
            for f, v in self.arcs[y].items():
                if f in ax:
                    stack.append((ax[f], v))
                else:
                    ax[f] = v
            self.arcs[y] = {}
        return True

    def reachable(self, root: int) -> list[int]:
        root = self.find(root)
        seen = {root}
        order = [root]
        for n in order:
            for m in self.arcs[n].values():
                m = self.find(m)
                if m not in seen:
                    seen.add(m)
                    order.append(m)
        return order

    def infer(self, root: int) -> bool:
        """Close the graph under appropriateness; False if ill-typed."""
        lat = self.lat
        work = self.reachable(root)
        while work:
            n = self.find(work.pop())
            arcs = self.arcs[n]
            if not arcs:
                continue
            t = self.types[n]
            approp = lat.approp(t)
            for f in list(arcs):
                if f not in approp:
                    intro = lat.introducer(f)
                    t2 = None if intro is None else lat.glb(t, intro)
                    if t2 is None:
                        return False
                    self.types[n] = t = t2
                    approp = lat.approp(t)
                    if f not in approp:
                        return False
                v = self.find(arcs[f])
                tv = lat.glb(self.types[v], approp[f])
                if tv is None:
                    return False
                if tv != self.types[v]:
                    self.types[v] = tv
                    work.append(v)
        return True

    def enforce(self, root: int) -> bool:
        """Unify in the constraints of every node's type and supertypes."""
        lat = self.lat
        applied: set[tuple[int, str]] = set()
        rounds = 0
        while True:
            progress = False
            for n in self.reachable(root):
                for c in lat.constrained_supertypes(self.types[self.find(n)]):
                    n = self.find(n)
                    if (n, c) in applied:
                        continue
                    rounds += 1
                    if rounds > MAX_CONSTRAINT_ROUNDS:
                        raise GrammarError("type constraints do not terminate")
                    applied.add((n, c))
                    croot = self.build(lat.constraints[c], {})
                    # new structure only appears below n, so inference can stay local
                    if croot is None or not self.unify(n, croot) or not self.infer(n):
                        return False
                    applied.add((self.find(n), c))
                    progress = True
            if not progress:
                return True

    def build(self, d: Desc, tags: dict[str, int], fresh: Callable[[str], str] | None = None) -> int | None:
        """Add the nodes described by ``d``; None if it is inconsistent."""
        t = d.type
        if t is None:
            t = self.lat.root if d.items is None else LIST
        elif t.startswith("$"):
            if fresh is None:
                raise GrammarError(f"fresh atom {t} used where no fresh names are available")
            t = fresh(t)
        n = self.new(t)
        for path, sub in d.pairs:
            v = self.build(sub, tags, fresh)
            if v is None or not self.put(n, path, v):
                return None
        if d.items is not None:
            cur = n
            if not self.unify(cur, self.new(ELIST if not d.items and d.tail is None else LIST)):
                return None
            for item in d.items:
                cur = self.find(cur)
                if not self.unify(cur, self.new(NELIST)):
                    return None
                v = self.build(item, tags, fresh)
                if v is None or not self.put(cur, (FIRST,), v):
                    return None
                nxt = self.new(LIST)
                if not self.put(cur, (REST,), nxt):
                    return None
                cur = self.arc(cur, REST)
            if d.items:
                if d.tail is None:
                    if not self.unify(cur, self.new(ELIST)):
                        return None
                elif d.tail is not OPEN:
                    v = self.build(d.tail, tags, fresh)
                    if v is None or not self.unify(cur, v):
                        return None
        if d.tag is not None:
            if d.tag in tags:
                if not self.unify(tags[d.tag], n):
                    return None
            else:
                tags[d.tag] = n
        return self.find(n)

    def put(self, n: int, path, v: int) -> bool:
        """Unify ``v`` into the value at ``path`` below ``n``, creating arcs."""
        for f in path[:-1]:
            m = self.arc(n, f)
            if m is None:
                m = self.new(self.lat.root)
                self.set_arc(n, f, m)
            n = m
        f = path[-1]
        m = self.arc(n, f)
        if m is None:
            self.set_arc(n, f, v)
            return True
        return self.unify(m, v)

    def extract(self, root: int) -> FeatureStructure | None:
        """Canonical structure reachable from ``root``; None if cyclic."""
        root = self.find(root)
        index = {root: 0}
        order = [root]
        out_arcs = []
        for n in order:
            row = []
            for f in sorted(self.arcs[n]):
                m = self.find(self.arcs[n][f])
                if m not in index:
                    index[m] = len(order)
                    order.append(m)
                row.append((f, index[m]))
            out_arcs.append(tuple(row))
        if _has_cycle(out_arcs):
            return None
        return FeatureStructure(self.lat, tuple(self.types[n] for n in order), tuple(out_arcs))


def _has_cycle(arcs) -> bool:
    state = [0] * len(arcs)
    for start in range(len(arcs)):
        if state[start]:
            continue
        stack = [(start, iter(arcs[start]))]
        state[start] = 1
        while stack:
            n, it = stack[-1]
            for _, m in it:
                if state[m] == 1:
                    return True
                if state[m] == 0:
                    state[m] = 1
                    stack.append((m, iter(arcs[m])))
                    break
            else:
                state[n] = 2
                stack.pop()
    return False


def from_description(
    d: Desc | str,
    lattice: TypeLattice,
    fresh: Callable[[str], str] | None = None,
    constraints: bool = False,
) -> FeatureStructure | None:
    """Build a well-typed structure from a description; None if inconsistent."""
    if isinstance(d, str):
        d = parse(d)
    g = Graph(lattice)
    root = g.build(d, {}, fresh)
    if root is None or not g.infer(root):
        return None
    if constraints and not g.enforce(root):
        return None
    return g.extract(root)


def unify(f1: FeatureStructure, f2: FeatureStructure) -> FeatureStructure | None:
    """Most general structure subsumed by both inputs, or None on failure.

    Node types are resolved by the lattice glb, reentrancies of both
    inputs are preserved, and neither input is modified.
    """
    if f1.lattice is not f2.lattice:
        raise LatticeMismatch("cannot unify structures typed against different lattices")
    g = Graph(f1.lattice)
    a = g.add_fs(f1)
    b = g.add_fs(f2)
    if not g.unify(a, b) or not g.infer(a):
        return None
    return g.extract(a)


def unifiable(f1: FeatureStructure, f2: FeatureStructure) -> bool:
    return unify(f1, f2) is not None


def subsumes(general: FeatureStructure, specific: FeatureStructure) -> bool:
    """True iff every path, type and reentrancy of ``general`` holds in ``specific``."""
    lat = general.lattice
    mapping = {0: 0}
    stack = [0]
    while stack:
        g = stack.pop()
        s = mapping[g]
        if not lat.is_subtype(specific.types[s], general.types[g]):
            return False
        s_arcs = dict(specific.arcs[s])
        for f, gm in general.arcs[g]:
            sm = s_arcs.get(f)
            if sm is None:
                return False
            if gm in mapping:
                if mapping[gm] != sm:
                    return False
            else:
                mapping[gm] = sm
                stack.append(gm)
    return True


def enforce_constraints(f: FeatureStructure, lattice: TypeLattice | None = None) -> FeatureStructure | None:
    """Unify each node with the constraints of its type and all supertypes."""
    lattice = lattice or f.lattice
    if f.lattice is not lattice:
        raise LatticeMismatch("structure typed against a different lattice")
    g = Graph(lattice)
    root = g.add_fs(f)
    if not g.enforce(root):
        return None
    return g.extract(root)


def fresh_namer(used: set[str]) -> Callable[[str], str]:
    """Map ``$c``-style tokens to quoted atoms not in ``used``, memoized."""
    memo: dict[str, str] = {}

    def fresh(token: str) -> str:
        if token not in memo:
            prefix = token[1:]
            for i in itertools.count(1):
                cand = f'"{prefix}{i}"'
                if cand not in used:
                    break
            used.add(cand)
            memo[token] = cand
        return memo[token]

    return fresh


def atoms_in(fs: FeatureStructure) -> set[str]:
    return {t for t in fs.types if is_atom(t)}
