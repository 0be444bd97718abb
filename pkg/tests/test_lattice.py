import itertools
import random

import pytest

from lexrule.lattice import GrammarError, HierarchyError, iter_declarations, load_hierarchy
from oracles import SMALL_HIERARCHY, brute_glb


def test_bundled_hierarchy_shape(lattice):
    assert lattice.root == "top"
    for t in ("substantive-l", "noun-l", "qualitative-l", "quantitative-l", "verb-l", "adverb-l", "postposition-l"):
        assert lattice.is_subtype(t, "word")
    assert lattice.is_subtype("qualitative-l", "substantive-l")
    assert lattice.is_subtype("common", "noun")


def test_glb_reflexive_and_absorbing(lattice):
    for t in lattice.types:
        assert lattice.glb(t, t) == t
        for p in lattice.parents.get(t, ()):
            assert lattice.glb(t, p) == t
            assert lattice.glb(p, t) == t


def test_sibling_adjective_types_are_incompatible(lattice):
    assert lattice.glb("qualitative-l", "quantitative-l") is None


def test_glb_matches_brute_force_on_bundled_lattice(lattice):
    for a, b in itertools.product(sorted(lattice.types), repeat=2):
        assert lattice.glb(a, b) == brute_glb(lattice.types, lattice.parents, a, b), (a, b)


def test_glb_unknown_type(lattice):
    with pytest.raises(KeyError):
        lattice.glb("noun", "no-such-type")


def test_atoms_sit_below_their_host(lattice):
    assert lattice.glb('"x1"', "index") == '"x1"'
    assert lattice.glb('"x1"', "top") == '"x1"'
    assert lattice.glb('"x1"', '"x2"') is None
    assert lattice.glb('"x1"', "noun") is None


def test_features_are_inherited(lattice):
    assert lattice.approp("common")["CASE"] == "case"
    assert lattice.approp("qualitative-l")["SYNSEM"] == "synsem"
    assert lattice.introducer("CASE") == "noun"


def test_cycle_detected():
    with pytest.raises(HierarchyError, match="cycle"):
        load_hierarchy("type top\ntype a sub top b\ntype b sub a\n")


def test_glb_ambiguity_detected():
    text = "type top\ntype x sub top\ntype y sub top\ntype p sub x y\ntype q sub x y\n"
    assert brute_glb({"top", "x", "y", "p", "q"}, {"x": ("top",), "y": ("top",), "p": ("x", "y"), "q": ("x", "y")}, "x", "y") == {"p", "q"}
    with pytest.raises(HierarchyError, match="greatest lower bound"):
        load_hierarchy(text)


def test_incompatible_feature_reintroduction():
    text = "type top\ntype a sub top\ntype b sub a\ntype u sub top\ntype w sub top\nfeat a F u\nfeat b F w\n"
    with pytest.raises(HierarchyError):
        load_hierarchy(text)


@pytest.mark.parametrize(
    "text",
    [
        "type top\ntype a sub nothing\n",
        "type top\ntype other\n",
        "type top\nfeat zzz F top\n",
        "type top\ncons zzz [F: top]\n",
        "type top\nbogus line\n",
        "type top\ntype a sub top\ncons a [F: top]\n",
    ],
)
def test_malformed_hierarchies(text):
    with pytest.raises(GrammarError):
        load_hierarchy(text)


def test_continuation_lines_and_comments():
    text = "type top % root\ncons top\n  [A: b,\n   C: d]\n% whole-line comment\n"
    decls = list(iter_declarations(text))
    assert decls[0] == (1, "type top")
    assert decls[1][0] == 2 and "C: d" in decls[1][1]


def _random_hierarchy(rng, n):
    names = [f"t{i}" for i in range(n)]
    parents = {}
    for i, t in enumerate(names[1:], 1):
        k = rng.choice((1, 1, 2))
        parents[t] = tuple(sorted(set(rng.sample(names[:i], min(k, i)))))
    text = "type t0\n" + "".join(f"type {t} sub {' '.join(ps)}\n" for t, ps in parents.items())
    return names, parents, text


@pytest.mark.parametrize("seed", range(40))
def test_random_hierarchies_against_brute_force(seed):
    rng = random.Random(seed)
    names, parents, text = _random_hierarchy(rng, rng.randint(3, 9))
    expected = {(a, b): brute_glb(names, parents, a, b) for a in names for b in names}
    if any(isinstance(v, set) for v in expected.values()):
        with pytest.raises(HierarchyError):
            load_hierarchy(text)
        return
    lat = load_hierarchy(text)
    for (a, b), want in expected.items():
        assert lat.glb(a, b) == want


def test_small_hierarchy_multiple_inheritance():
    lat = load_hierarchy(SMALL_HIERARCHY)
    assert lat.glb("a", "b") == "c"
    assert lat.glb("d", "b") == "h"
    assert lat.glb("v1", "v2") == "v3"
    assert lat.glb("a", "v") is None
    assert set(lat.approp("h")) == {"F", "G", "H"}


def test_validate_description_rejects_unknowns(lattice):
    from lexrule.desc import parse

    with pytest.raises(GrammarError):
        lattice.validate_description(parse("[NOPE: noun]"))
    with pytest.raises(GrammarError):
        lattice.validate_description(parse("[CASE: not-a-type]"))
