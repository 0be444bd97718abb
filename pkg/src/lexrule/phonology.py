"""Turkish morphophonology over orthographic strings.

Suffix templates use four metaphonemes, resolved from context::

    A  low unround vowel:      a after back vowels, e after front
    I  high vowel:             ı i u ü by backness and rounding
    D  dental stop:            t after voiceless consonants, else d
    C  palatal affricate:      ç after voiceless consonants, else c

A leading ``(y)``, ``(s)`` or ``(n)`` is a buffer consonant that only
surfaces after vowel-final stems.  All other letters are literal, so
``ki`` is realized invariantly.
"""

from __future__ import annotations

import functools
import itertools
import re
import unicodedata
from dataclasses import dataclass

VOWELS = frozenset("aeıioöuü")
BACK = frozenset("aıou")
ROUND = frozenset("oöuü")
HIGH = frozenset("ıiuü")
VOICELESS = frozenset("pçtksşhf")
METAPHONEMES = frozenset("AIDC")
BUFFERS = frozenset("ysn")

_FRONT_OF = {"a": "e", "ı": "i", "o": "ö", "u": "ü"}
_VOICED_STOP = {"p": "b", "ç": "c", "t": "d", "k": "ğ"}
_DEVOICED = {"b": "p", "c": "ç", "d": "t", "ğ": "k", "g": "k"}
_REALIZATIONS = {"A": "ae", "I": "ıiuü", "D": "dt", "C": "cç"}


class PhonologyError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    kind: str  # vowel | consonant | metaphoneme | buffer
    char: str

    @property
    def back(self) -> bool:
        return self.char in BACK

    @property
    def round(self) -> bool:
        return self.char in ROUND

    @property
    def high(self) -> bool:
        return self.char in HIGH

    @property
    def voiced(self) -> bool:
        return self.kind == "consonant" and self.char not in VOICELESS

    @property
    def vowel_like(self) -> bool:
        return self.kind == "vowel" or self.char in ("A", "I")


@dataclass(frozen=True)
class MorphTemplate:
    text: str
    segments: tuple[Segment, ...]

    @classmethod
    def parse(cls, text: str) -> "MorphTemplate":
        segs = []
        for m in re.finditer(r"\(([a-zçğıöşü])\)|(.)", text):
            buf, ch = m.groups()
            if buf is not None:
                if buf not in BUFFERS:
                    raise PhonologyError(f"unknown buffer ({buf}) in {text!r}")
                if segs:
                    raise PhonologyError(f"buffer must lead the template: {text!r}")
                segs.append(Segment("buffer", buf))
            elif ch in METAPHONEMES:
                segs.append(Segment("metaphoneme", ch))
            elif ch in VOWELS:
                segs.append(Segment("vowel", ch))
            elif ch.isalpha() and ch.islower():
                segs.append(Segment("consonant", ch))
            else:
                raise PhonologyError(f"bad template symbol {ch!r} in {text!r}")
        if not segs or all(s.kind == "buffer" for s in segs):
            raise PhonologyError(f"empty template {text!r}")
        return cls(text, tuple(segs))

    @property
    def buffer(self) -> str | None:
        return self.segments[0].char if self.segments[0].kind == "buffer" else None

    def body(self) -> tuple[Segment, ...]:
        return self.segments[1:] if self.buffer else self.segments

    @functools.cached_property
    def realizations(self) -> frozenset[str]:
        """Every string this template could surface as, in any context."""
        choices = []
        for s in self.body():
            choices.append(_REALIZATIONS.get(s.char, s.char) if s.kind == "metaphoneme" else s.char)
        bodies = {"".join(p) for p in itertools.product(*choices)}
        if self.buffer:
            bodies |= {self.buffer + b for b in bodies}
        return frozenset(bodies)

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class Allomorph:
    """A template guarded by a stem condition such as ``poly:V,l,r``."""

    template: MorphTemplate
    polysyllabic: bool = False
    finals: frozenset[str] | None = None

    def admits(self, stem: str) -> bool:
        if self.polysyllabic and syllables(stem) < 2:
            return False
        if self.finals is None:
            return True
        last = stem[-1]
        return ("V" in self.finals and last in VOWELS) or last in self.finals


def parse_allomorphs(text: str) -> tuple[Allomorph, ...]:
    """``t@poly:V,l,r;DIr`` -> first allomorph whose condition holds wins."""
    out = []
    for part in text.split(";"):
        tmpl, _, cond = part.partition("@")
        poly, finals = False, None
        if cond:
            if cond.startswith("poly"):
                poly = True
                cond = cond[4:].lstrip(":")
            if cond:
                finals = frozenset(c.strip() for c in cond.split(","))
        out.append(Allomorph(MorphTemplate.parse(tmpl.strip()), poly, finals))
    return tuple(out)


def select_allomorph(stem: str, allomorphs) -> MorphTemplate | None:
    for a in allomorphs:
        if a.admits(stem):
            return a.template
    return None


def syllables(word: str) -> int:
    return sum(ch in VOWELS for ch in word)


def last_vowel(word: str) -> str | None:
    for ch in reversed(word):
        if ch in VOWELS:
            return ch
    return None


def harmonize(v: str, context: str) -> str:
    """Resolve metaphoneme A or I against the preceding vowel."""
    if context not in VOWELS:
        raise PhonologyError(f"harmony context {context!r} is not a vowel")
    back = context in BACK
    if v == "A":
        return "a" if back else "e"
    if v == "I":
        if context in ROUND:
            return "u" if back else "ü"
        return "ı" if back else "i"
    raise PhonologyError(f"{v!r} is not a vowel metaphoneme")


def assimilate_voice(c: str, context: str) -> str:
    """Resolve metaphoneme D or C against the preceding segment."""
    voiceless = context in VOICELESS
    if c == "D":
        return "t" if voiceless else "d"
    if c == "C":
        return "ç" if voiceless else "c"
    raise PhonologyError(f"{c!r} is not a consonant metaphoneme")


def voice_final(stem: str) -> str:
    """kitap -> kitab, renk -> reng, çocuk -> çocuğ."""
    last = stem[-1]
    if last not in _VOICED_STOP:
        return stem
    if last == "k" and len(stem) > 1 and stem[-2] == "n":
        return stem[:-1] + "g"
    return stem[:-1] + _VOICED_STOP[last]


def realize(stem: str, template: MorphTemplate, alternates: bool = False, front: bool = False) -> str:
    """Attach ``template`` to ``stem``.

    ``alternates`` voices a final stop before a vowel-initial suffix;
    ``front`` makes the stem harmonize as front-voweled (saat -> saatte).
    Both are lexical flags and only meaningful on a bare root.
    """
    ctx = last_vowel(stem)
    if ctx is None:
        raise PhonologyError(f"stem {stem!r} has no vowel")
    if front:
        ctx = _FRONT_OF.get(ctx, ctx)
    body = template.body()
    vowel_final = stem[-1] in VOWELS
    out = stem
    if template.buffer and vowel_final:
        out += template.buffer
    elif alternates and not vowel_final and body[0].vowel_like:
        out = voice_final(out)
    for seg in body:
        if seg.kind == "metaphoneme":
            ch = harmonize(seg.char, ctx) if seg.char in "AI" else assimilate_voice(seg.char, out[-1])
        else:
            ch = seg.char
        if ch in VOWELS:
            ctx = ch
        out += ch
    return out


def candidate_strips(surface: str, templates, flags=((False, False), (True, False), (False, True), (True, True))):
    """All (stem, template) pairs with realize(stem, template) == surface.

    The first pair is always ``(surface, None)``, the empty strip.  Stems
    ending in a voiced stop are also tried devoiced, which undoes final
    stop alternation.
    """
    out = [(surface, None)]
    seen = set()
    for tmpl in templates:
        for r in tmpl.realizations:
            if len(r) >= len(surface) or not surface.endswith(r):
                continue
            stem = surface[: -len(r)]
            cands = [stem]
            if stem[-1] in _DEVOICED:
                cands.append(stem[:-1] + _DEVOICED[stem[-1]])
            for cand in cands:
                if (cand, tmpl) in seen or last_vowel(cand) is None:
                    continue
                if any(realize(cand, tmpl, alt, fr) == surface for alt, fr in flags):
                    seen.add((cand, tmpl))
                    out.append((cand, tmpl))
    return out


def strip_closure(surface: str, templates) -> set[str]:
    """Every stem reachable from ``surface`` by repeated stripping."""
    templates = list(templates)
    found = {surface}
    stack = [surface]
    while stack:
        s = stack.pop()
        for stem, tmpl in candidate_strips(s, templates):
            if tmpl is not None and stem not in found:
                found.add(stem)
                stack.append(stem)
    return found


_TURKISH_UPPER = str.maketrans({"I": "ı", "İ": "i"})


def normalize(word: str) -> str:
    """NFC, then lowercase with Turkish dotted and dotless i."""
    return unicodedata.normalize("NFC", word.strip()).translate(_TURKISH_UPPER).lower()
