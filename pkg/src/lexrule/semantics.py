"""Logical forms: an index plus a set of restricting predications.

Restrictions are a frozenset, so inserting a predication twice changes
nothing and equality ignores order.  Predication arguments are either
variable names or nested :class:`SemanticForm` values, which is how a
second-order predicate such as ``cause`` takes a whole logical form as
its argument.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

Arg = Union[str, "SemanticForm"]


@dataclass(frozen=True)
class Predication:
    pred: str
    args: tuple[tuple[str, Arg], ...]
    quants: tuple[str, ...] = ()

    def arg(self, role: str) -> Arg | None:
        for r, v in self.args:
            if r == role:
                return v
        return None

    def to_json(self) -> dict:
        return {
            "pred": self.pred,
            "args": {r: (v.to_json() if isinstance(v, SemanticForm) else v) for r, v in self.args},
            "quants": list(self.quants),
        }


@dataclass(frozen=True)
class SemanticForm:
    index: str
    restrictions: frozenset[Predication] = field(default_factory=frozenset)

    @classmethod
    def simple(cls, index: str, pred: str, **args: str) -> "SemanticForm":
        return cls(index, frozenset({Predication(pred, tuple(args.items()))}))

    def insert(self, p: Predication) -> "SemanticForm":
        if p in self.restrictions:
            return self
        return SemanticForm(self.index, self.restrictions | {p})

    def wrap(self, pred: str, args: tuple[tuple[str, Arg], ...], index: str | None = None) -> "SemanticForm":
        """A new form whose single restriction takes this one as an argument."""
        return SemanticForm(index or self.index, frozenset({Predication(pred, args)}))

    def find(self, pred: str) -> list[Predication]:
        return [p for p in self.restrictions if p.pred == pred]

    def variables(self) -> set[str]:
        out = {self.index}
        for p in self.restrictions:
            for _, v in p.args:
                if isinstance(v, SemanticForm):
                    out |= v.variables()
                else:
                    out.add(v)
        return out

    def to_json(self) -> dict:
        restr = [p.to_json() for p in self.restrictions]
        restr.sort(key=lambda d: json.dumps(d, sort_keys=True, ensure_ascii=False))
        return {"index": self.index, "restr": restr}

    def __str__(self):
        def arg(v):
            return str(v) if isinstance(v, SemanticForm) else v

        body = ", ".join(
            sorted(f"{p.pred}(" + ", ".join(f"{r}={arg(v)}" for r, v in p.args) + ")" for p in self.restrictions)
        )
        return f"{self.index}:{{{body}}}"


IDENTITY = "identity"
