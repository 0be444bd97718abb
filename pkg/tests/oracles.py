"""Reference implementations used as test oracles.

They trade speed for obviousness: glb by enumerating common subtypes,
unification by congruence closure over explicit path sets, and a
structure generator driven by a seeded RNG.
"""

from __future__ import annotations

import random

# ---------------------------------------------------------------------------
# glb


def below(parents: dict[str, tuple[str, ...]], t: str) -> set[str]:
    """Every ancestor of t, including t, by walking the declared edges."""
    out, todo = set(), [t]
    while todo:
        x = todo.pop()
        if x not in out:
            out.add(x)
            todo.extend(parents.get(x, ()))
    return out


def brute_glb(types, parents, a: str, b: str):
    """Maximal common subtypes of a and b: None, a single type, or a set when ambiguous."""
    common = {t for t in types if {a, b} <= below(parents, t)}
    maximal = {t for t in common if not any(u != t and u in below(parents, t) for u in common)}
    if not maximal:
        return None
    if len(maximal) == 1:
        return maximal.pop()
    return maximal


# ---------------------------------------------------------------------------
# path view of a structure


def path_map(fs) -> dict[tuple[str, ...], int]:
    """Every path from the root, mapped to the node it reaches."""
    out = {(): 0}
    todo = [()]
    while todo:
        p = todo.pop()
        for f, m in fs.arcs[out[p]]:
            q = p + (f,)
            out[q] = m
            todo.append(q)
    return out


def signature(fs):
    """Isomorphism-invariant summary: typed paths plus the path partition."""
    if fs is None:
        return None
    pm = path_map(fs)
    typed = frozenset((p, fs.types[n]) for p, n in pm.items())
    groups: dict[int, set] = {}
    for p, n in pm.items():
        groups.setdefault(n, set()).add(p)
    return typed, frozenset(frozenset(g) for g in groups.values())


def oracle_unify(f1, f2):
    """Signature of the unification of f1 and f2 computed by congruence closure."""
    lat = f1.lattice
    pm1, pm2 = path_map(f1), path_map(f2)
    ptype = {}
    for pm, fs in ((pm1, f1), (pm2, f2)):
        for p, n in pm.items():
            ptype.setdefault(p, []).append(fs.types[n])
    paths = set(ptype)
    parent = {p: p for p in paths}

    def find(p):
        while parent[p] != p:
            p = parent[p]
        return p

    def union(p, q):
        p, q = find(p), find(q)
        if p != q:
            parent[q] = p
            return True
        return False

    for pm in (pm1, pm2):
        by_node: dict[int, list] = {}
        for p, n in pm.items():
            by_node.setdefault(n, []).append(p)
        for group in by_node.values():
            for q in group[1:]:
                union(group[0], q)
    changed = True
    while changed:
        changed = False
        classes: dict = {}
        for p in paths:
            classes.setdefault(find(p), []).append(p)
        for members in classes.values():
            ext: dict[str, list] = {}
            for p in members:
                for q in paths:
                    if len(q) == len(p) + 1 and q[:-1] == p:
                        ext.setdefault(q[-1], []).append(q)
            for qs in ext.values():
                for q in qs[1:]:
                    changed |= union(qs[0], q)
    # class graph
    classes = {}
    for p in paths:
        classes.setdefault(find(p), []).append(p)
    ctype = {}
    for c, members in classes.items():
        t = lat.root
        for p in members:
            for pt in ptype[p]:
                t = lat.glb(t, pt)
                if t is None:
                    return None
        ctype[c] = t
    arcs = {c: {} for c in classes}
    for p in paths:
        if p:
            arcs[find(p[:-1])][p[-1]] = find(p)
    # the unified graph must stay acyclic
    state = {}

    def cyclic(c):
        state[c] = 1
        for d in arcs[c].values():
            if state.get(d) == 1 or (d not in state and cyclic(d)):
                return True
        state[c] = 2
        return False

    if cyclic(find(())):
        return None
    # appropriateness closure
    changed = True
    while changed:
        changed = False
        for c, out in arcs.items():
            for f, d in out.items():
                t = ctype[c]
                if f not in lat.approp(t):
                    intro = lat.introducer(f)
                    t2 = None if intro is None else lat.glb(t, intro)
                    if t2 is None or f not in lat.approp(t2):
                        return None
                    ctype[c] = t = t2
                    changed = True
                v = lat.glb(ctype[d], lat.approp(t)[f])
                if v is None:
                    return None
                if v != ctype[d]:
                    ctype[d] = v
                    changed = True
    # read back the signature from the root class
    typed, groups = set(), {}
    todo = [((), find(()))]
    while todo:
        p, c = todo.pop()
        typed.add((p, ctype[c]))
        groups.setdefault(c, set()).add(p)
        for f, d in arcs[c].items():
            todo.append((p + (f,), d))
    return frozenset(typed), frozenset(frozenset(g) for g in groups.values())


# ---------------------------------------------------------------------------
# random structures

SMALL_HIERARCHY = """
type top
type a sub top
type b sub top
type c sub a b
type d sub a
type e sub c
type f sub b
type g sub d
type h sub e g
type v sub top
type v1 sub v
type v2 sub v
type v3 sub v1 v2
feat a F top
feat b G v
feat c H a
feat f K v
"""


def random_description(
    rng: random.Random, lattice, depth: int = 3, tags: int = 2, noise: float = 0.05, root: str | None = None
) -> str:
    """A random description text over ``lattice``.

    Most features are appropriate for the chosen type and most values are
    subtypes of the appropriate value, so structures grow several levels
    deep.  With probability ``noise`` a node instead gets an arbitrary type
    or feature, which exercises type raising and clashes.  Reentrancy tags
    are sprinkled in so that some structures share nodes.
    """
    names = sorted(t for t in lattice.types if t not in ("list", "e-list", "ne-list"))
    feats = sorted(lattice.features() - {"FIRST", "REST"})
    all_types = sorted(lattice.types)

    def node(d, want):
        parts = []
        if rng.random() < 0.3:
            # tags are keyed by the expected value type so that most reuses are consistent
            parts.append(f"#t{all_types.index(want)}_{rng.randrange(tags)}")
        pool = sorted(t for t in lattice.subtypes(want) if t in names) or names
        rich = [t for t in pool if lattice.approp(t)]
        if d > 0 and rich and rng.random() < 0.75:
            pool = rich
        t = rng.choice(names if rng.random() < noise else pool)
        parts.append(t)
        approp = {f: v for f, v in lattice.approp(t).items() if f in feats}
        choices = feats if rng.random() < noise else sorted(approp)
        if d > 0 and choices and rng.random() < 0.8:
            chosen = rng.sample(choices, rng.randint(1, min(3, len(choices))))
            body = ", ".join(f"{f}: {node(d - 1, approp.get(f, lattice.root))}" for f in chosen)
            parts.append(f"[{body}]")
        return " ".join(parts)

    return node(depth, root or lattice.root)


def random_structures(rng: random.Random, lattice, n: int, depth: int = 3, root: str | None = None):
    """n well-formed structures (inconsistent descriptions are skipped)."""
    from lexrule.fs import from_description

    out = []
    while len(out) < n:
        fs = from_description(random_description(rng, lattice, depth, root=root), lattice)
        if fs is not None:
            out.append(fs)
    return out


def random_tuples(rng: random.Random, lattice, n: int, size: int = 2, depth: int = 3):
    """n tuples of structures whose roots share a feature-bearing supertype."""
    rich = sorted(t for t in lattice.types if lattice.approp(t))
    return [tuple(random_structures(rng, lattice, size, depth, root=rng.choice(rich))) for _ in range(n)]
