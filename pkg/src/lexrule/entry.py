"""Root and lexical entries."""

from __future__ import annotations

from dataclasses import dataclass, field

from .fs import FeatureStructure
from .semantics import SemanticForm

SEMANTIC_FEATURES = frozenset({"animate", "artifact", "container", "period", "place", "goods", "edible"})

CASE_PATH = ("SYNSEM", "LOCAL", "CAT", "HEAD", "CASE")
HEAD_PATH = ("SYNSEM", "LOCAL", "CAT", "HEAD")
SUBCAT_PATH = ("SYNSEM", "LOCAL", "CAT", "SUBCAT")
INDEX_PATH = ("SYNSEM", "LOCAL", "CONT", "INDEX")


@dataclass(frozen=True)
class RootEntry:
    lemma: str
    type: str
    subcat: tuple[str, ...] = ()
    pred: str = ""
    features: frozenset[str] = frozenset()
    alternates: bool = False
    front: bool = False

    def __post_init__(self):
        if not self.pred:
            object.__setattr__(self, "pred", self.lemma)


@dataclass(frozen=True, eq=False)
class LexicalEntry:
    phon: str
    fs: FeatureStructure
    lf: SemanticForm
    root: RootEntry
    history: tuple[str, ...] = ()
    slots: tuple[tuple[str, str], ...] = ()
    _key: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_key", (self.phon, self.fs, self.lf))

    def key(self) -> tuple:
        """Identity up to isomorphism: surface, structure and logical form."""
        return self._key

    @property
    def type(self) -> str:
        return self.fs.type

    @property
    def synsem(self) -> FeatureStructure:
        return self.fs.get(("SYNSEM",))

    @property
    def case(self) -> str | None:
        return self.fs.type_at(CASE_PATH)

    @property
    def bare(self) -> bool:
        """No overt suffix realized yet (zero-affix rules do not count)."""
        return self.phon == self.root.lemma

    def slot_values(self) -> dict[str, str]:
        out: dict[str, list[str]] = {}
        for slot, gloss in self.slots:
            out.setdefault(slot, []).append(gloss)
        return {s: "+".join(g) for s, g in out.items()}

    def to_json(self) -> dict:
        return {
            "phon": self.phon,
            "type": self.type,
            "history": list(self.history),
            "case": self.case,
            "slots": self.slot_values(),
            "lf": self.lf.to_json(),
            "root": self.root.lemma,
        }

    def __repr__(self):
        return f"LexicalEntry({self.phon!r}, {self.type}, history={list(self.history)})"
