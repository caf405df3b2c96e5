"""Free-group words, finite presentations and their text format."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .intlinalg import IntMatrix

Letter = tuple[str, int]

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_TOKEN_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)(?:\^([+-]?\d+))?$")


def _free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for name, e in letters:
        if e not in (1, -1):
            raise ValueError(f"letter exponent must be +1 or -1, got {e}")
        if out and out[-1][0] == name and out[-1][1] == -e:
            out.pop()
        else:
            out.append((name, e))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word; letters are (generator name, +1 or -1)."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _free_reduce(self.letters))

    @classmethod
    def from_string(cls, text: str) -> "Word":
        return parse_word(text)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def inverse(self) -> "Word":
        return Word(tuple((s, -e) for s, e in reversed(self.letters)))

    def symbols(self) -> set[str]:
        return {s for s, _ in self.letters}

    def is_positive(self) -> bool:
        return all(e == 1 for _, e in self.letters)

    def exponent_sum(self, name: str) -> int:
        return sum(e for s, e in self.letters if s == name)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"


EMPTY = Word()


def reduce(letters: Iterable[Letter]) -> Word:
    return Word(tuple(letters))


def concat(u: Word, v: Word) -> Word:
    return u * v


def invert(u: Word) -> Word:
    return u.inverse()


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


def letter(name: str, exp: int = 1) -> Word:
    return Word(((name, exp),))


def format_word(w: Word) -> str:
    """Render with runs collapsed, e.g. ``a^2 b^-1``; the empty word is ``1``."""
    if not w.letters:
        return "1"
    parts = []
    i = 0
    lets = w.letters
    while i < len(lets):
        j = i
        while j < len(lets) and lets[j] == lets[i]:
            j += 1
        name, e = lets[i]
        k = (j - i) * e
        parts.append(name if k == 1 else f"{name}^{k}")
        i = j
    return " ".join(parts)


class PresentationSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _parse_tokens(text: str, line_no: int = 1, col0: int = 1) -> list[tuple[str, int, int]]:
    """Split a word into (name, power, column) triples."""
    out = []
    for m in re.finditer(r"\S+", text):
        tok = m.group(0)
        col = col0 + m.start()
        if tok == "1":
            continue
        tm = _TOKEN_RE.match(tok)
        if tm is None:
            raise PresentationSyntaxError(f"bad token {tok!r}", line_no, col)
        k = int(tm.group(2)) if tm.group(2) is not None else 1
        if k == 0:
            raise PresentationSyntaxError(f"zero exponent in {tok!r}", line_no, col)
        out.append((tm.group(1), k, col))
    return out


def parse_word(text: str) -> Word:
    letters: list[Letter] = []
    for name, k, _ in _parse_tokens(text):
        letters.extend([(name, 1 if k > 0 else -1)] * abs(k))
    return Word(tuple(letters))


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    symmetric: bool = field(default=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("duplicate generator names")
        for g in self.generators:
            if not _NAME_RE.match(g):
                raise ValueError(f"invalid generator name {g!r}")
        gens = set(self.generators)
        for r in self.relators:
            bad = r.symbols() - gens
            if bad:
                raise ValueError(f"relator {r} uses undeclared generator(s) {sorted(bad)}")
        if self.symmetric and not symmetric_invariants_hold(self.generators, self.relators):
            raise ValueError("presentation flagged symmetric but the invariants fail")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def index(self, name: str) -> int:
        return self.generators.index(name)

    def __str__(self) -> str:
        return format_presentation(self)


def inverse_partners(generators: Sequence[str], relators: Sequence[Word]) -> dict[str, str] | None:
    """Map each generator to a partner witnessed by a length-2 relator, if all have one."""
    partner: dict[str, str] = {}
    for r in relators:
        if len(r) == 2 and r.is_positive():
            (s, _), (t, _) = r.letters
            partner.setdefault(s, t)
            partner.setdefault(t, s)
    if all(g in partner for g in generators):
        return partner
    return None


def symmetric_invariants_hold(generators: Sequence[str], relators: Sequence[Word]) -> bool:
    if not all(r.is_positive() for r in relators):
        return False
    return inverse_partners(generators, relators) is not None


def parse_presentation(text: str) -> Presentation:
    gens: list[str] | None = None
    rels: list[Word] = []
    pending: list[tuple[list[tuple[str, int, int]], int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        key, sep, rest = stripped.partition(":")
        if not sep:
            raise PresentationSyntaxError("expected 'gens:' or 'rel:'", line_no, indent + 1)
        key = key.strip()
        body_col = indent + len(key) + 2 + (len(rest) - len(rest.lstrip()))
        if key == "gens":
            if gens is not None:
                raise PresentationSyntaxError("duplicate 'gens:' line", line_no, indent + 1)
            names = [n.strip() for n in rest.split(",")] if rest.strip() else []
            for n in names:
                if not _NAME_RE.match(n):
                    raise PresentationSyntaxError(f"invalid generator name {n!r}", line_no, body_col)
            if len(set(names)) != len(names):
                raise PresentationSyntaxError("duplicate generator name", line_no, body_col)
            gens = names
        elif key == "rel":
            pending.append((_parse_tokens(rest.strip(), line_no, body_col), line_no))
        else:
            raise PresentationSyntaxError(f"unknown key {key!r}", line_no, indent + 1)
    if gens is None:
        raise PresentationSyntaxError("missing 'gens:' line", 1, 1)
    declared = set(gens)
    for tokens, line_no in pending:
        letters: list[Letter] = []
        for name, k, col in tokens:
            if name not in declared:
                raise PresentationSyntaxError(f"undeclared generator {name!r}", line_no, col)
            letters.extend([(name, 1 if k > 0 else -1)] * abs(k))
        rels.append(Word(tuple(letters)))
    return Presentation(tuple(gens), tuple(rels), symmetric_invariants_hold(gens, rels))


def format_presentation(p: Presentation) -> str:
    lines = ["gens: " + ", ".join(p.generators)]
    lines.extend("rel: " + format_word(r) for r in p.relators)
    return "\n".join(lines) + "\n"


def plus_name(s: str) -> str:
    return f"{s}_p"


def minus_name(s: str) -> str:
    return f"{s}_m"


def symmetrize(p: Presentation) -> Presentation:
    """Positive presentation on S x {+1,-1}; ``s`` corresponds to ``s_p``.

    One canonical rewriting per relator plus the inverse-pair relators.
    """
    gens = []
    for s in p.generators:
        gens += [plus_name(s), minus_name(s)]
    taken = set(gens)
    if len(taken) != len(gens):
        raise ValueError("generator renaming collides; rename generators ending in _p/_m")
    rels = [Word(((plus_name(s), 1), (minus_name(s), 1))) for s in p.generators]
    for r in p.relators:
        rels.append(symmetric_image(r))
    return Presentation(tuple(gens), tuple(rels), True)


def symmetric_image(w: Word) -> Word:
    """Letterwise rewriting s^e -> (s, e) into the positive alphabet.

    Note the result is not freely reduced against anything: ``s_p s_m`` is a
    positive word, not a cancelling pair.
    """
    return Word(tuple((plus_name(s) if e == 1 else minus_name(s), 1) for s, e in w.letters))


def abelianization_matrix(p: Presentation) -> IntMatrix:
    """|S| x |R| matrix of exponent sums (a relation matrix for the abelianization)."""
    return IntMatrix([[r.exponent_sum(s) for r in p.relators] for s in p.generators],
                     len(p.generators), len(p.relators))


def exponent_vector(w: Word, generators: Sequence[str]) -> list[int]:
    pos = {g: i for i, g in enumerate(generators)}
    v = [0] * len(generators)
    for s, e in w.letters:
        v[pos[s]] += e
    return v
