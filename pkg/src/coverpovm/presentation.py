"""Finitely presented groups: words, presentations, and the text grammar.

Words are stored as tuples of nonzero signed letters: letter ``+k`` is the
generator with 0-based index ``k-1`` and ``-k`` is its inverse.  Everything
here has value semantics; objects are immutable after construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = [
    "GeneratorSymbol",
    "Word",
    "Presentation",
    "ParseError",
    "free_reduce",
    "cyclic_reduce",
    "parse_presentation",
    "parse_word",
    "render_word",
    "render_presentation",
    "abelianized_relations",
]

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class GeneratorSymbol:
    """A named generator with its 0-based position in the presentation."""

    name: str
    index: int

    def __post_init__(self):
        if not self.name or not self.name[0].isalpha():
            raise ValueError(f"invalid generator name {self.name!r}")


def _free_reduce_letters(letters) -> tuple[int, ...]:
    out: list[int] = []
    for l in letters:
        if l == 0:
            raise ValueError("word letters must be nonzero")
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the generators (letters are signed 1-based)."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _free_reduce_letters(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-l for l in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def is_cyclically_reduced(self) -> bool:
        ls = self.letters
        return not ls or ls[0] != -ls[-1]

    def max_generator_index(self) -> int:
        """Largest 0-based generator index used, or -1 for the empty word."""
        return max((abs(l) for l in self.letters), default=0) - 1


def free_reduce(w) -> Word:
    """Freely reduce a Word or raw letter sequence.  Idempotent."""
    letters = w.letters if isinstance(w, Word) else tuple(w)
    return Word(letters)


def cyclic_reduce(w) -> Word:
    """Cyclically reduce (conjugate to shortest form) after free reduction."""
    ls = list(free_reduce(w).letters)
    while len(ls) >= 2 and ls[0] == -ls[-1]:
        ls = ls[1:-1]
    return Word(tuple(ls))


def commutator(a: Word, b: Word) -> Word:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


@dataclass(frozen=True)
class Presentation:
    """Generators plus freely and cyclically reduced, nonempty relators."""

    generators: tuple[GeneratorSymbol, ...]
    relators: tuple[Word, ...]
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for i, g in enumerate(self.generators):
            if g.index != i:
                raise ValueError("generator indices must be 0,1,2,... in order")
        ngens = len(self.generators)
        for r in self.relators:
            if not r.letters:
                raise ValueError("empty relator")
            if not r.is_cyclically_reduced():
                raise ValueError(f"relator {r.letters} not cyclically reduced")
            if r.max_generator_index() >= ngens:
                raise ValueError("relator references undeclared generator")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def generator_names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def gen(self, name: str) -> Word:
        """The length-1 word for a named generator."""
        for g in self.generators:
            if g.name == name:
                return Word((g.index + 1,))
        raise KeyError(name)

    def with_extra_relators(self, extra: list[Word]) -> "Presentation":
        """Quotient presentation: same generators, added (reduced) relators."""
        new = list(self.relators)
        for w in extra:
            r = cyclic_reduce(w)
            if r.letters:
                new.append(r)
        return Presentation(self.generators, tuple(new))


class ParseError(ValueError):
    """Syntax error in presentation text, with a 0-based position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Scanner:
    """Tokenizer for the `< gens | relators >` grammar."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def take_ident(self) -> str:
        self.skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            raise ParseError("expected identifier", self.pos)
        self.pos = m.end()
        return m.group()

    def take_int(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise ParseError("expected integer exponent", start)
        return int(self.text[start:self.pos])

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _split_ident_run(run: str, pos: int, names: dict[str, int]) -> list[int]:
    """Split a juxtaposed identifier run into declared generator letters.

    Greedy longest-match with backtracking so that multi-letter generator
    names cannot shadow a valid alternative split.
    """
    lengths = sorted({len(n) for n in names}, reverse=True)
    n = len(run)
    fail: set[int] = set()

    def dfs(i: int) -> list[int] | None:
        if i == n:
            return []
        if i in fail:
            return None
        for L in lengths:
            if i + L <= n and run[i:i + L] in names:
                rest = dfs(i + L)
                if rest is not None:
                    return [names[run[i:i + L]] + 1] + rest
        fail.add(i)
        return None

    out = dfs(0)
    if out is None:
        raise ParseError(f"cannot resolve {run!r} into declared generators", pos)
    return out


def _parse_atom(sc: _Scanner, names: dict[str, int]) -> list[int]:
    ch = sc.peek()
    if ch == "(":
        sc.expect("(")
        letters = _parse_word_body(sc, names)
        sc.expect(")")
        return letters
    sc.skip_ws()
    start = sc.pos
    run = sc.take_ident()
    return _split_ident_run(run, start, names)


def _parse_factor(sc: _Scanner, names: dict[str, int]) -> list[int]:
    letters = _parse_atom(sc, names)
    if sc.peek() == "^":
        sc.expect("^")
        e = sc.take_int()
        if e < 0:
            letters = [-l for l in reversed(letters)]
            e = -e
        letters = letters * e
    return letters


def _parse_word_body(sc: _Scanner, names: dict[str, int]) -> list[int]:
    letters = _parse_factor(sc, names)
    while True:
        ch = sc.peek()
        if ch == "*":
            sc.expect("*")
            letters += _parse_factor(sc, names)
        elif ch == "(" or (ch and (ch.isalpha())):
            letters += _parse_factor(sc, names)
        else:
            return letters


def parse_word(text: str, gen_names) -> Word:
    """Parse a single word (no relator punctuation) over the given names."""
    names = {n: i for i, n in enumerate(gen_names)}
    sc = _Scanner(text)
    letters = _parse_word_body(sc, names)
    if not sc.at_end():
        raise ParseError("trailing characters after word", sc.pos)
    return Word(tuple(letters))


def parse_presentation(text: str) -> Presentation:
    """Parse `< gens | items >` where each item is a word or `w1 = w2 = ...`.

    An equation chain contributes one relator per adjacent pair
    (w1*w2^-1, w2*w3^-1, ...).  Relators are freely and cyclically reduced;
    a relator that reduces to the empty word is rejected.
    """
    sc = _Scanner(text)
    sc.expect("<")
    gens: list[GeneratorSymbol] = []
    if sc.peek() not in ("|", ">"):
        while True:
            name = sc.take_ident()
            gens.append(GeneratorSymbol(name, len(gens)))
            if sc.peek() == ",":
                sc.expect(",")
            else:
                break
    names = {g.name: g.index for g in gens}
    if len(names) != len(gens):
        raise ParseError("duplicate generator name", sc.pos)
    relators: list[Word] = []
    sc.expect("|")
    if sc.peek() != ">":
        while True:
            sides = [_parse_word_body(sc, names)]
            while sc.peek() == "=":
                sc.expect("=")
                sides.append(_parse_word_body(sc, names))
            start = sc.pos
            if len(sides) == 1:
                raw = [tuple(sides[0])]
            else:
                raw = [
                    tuple(sides[i]) + tuple(-l for l in reversed(sides[i + 1]))
                    for i in range(len(sides) - 1)
                ]
            for letters in raw:
                r = cyclic_reduce(Word(letters))
                if not r.letters:
                    raise ParseError("relator reduces to the empty word", start)
                relators.append(r)
            if sc.peek() == ",":
                sc.expect(",")
            else:
                break
    sc.expect(">")
    if not sc.at_end():
        raise ParseError("trailing characters after '>'", sc.pos)
    return Presentation(tuple(gens), tuple(relators), source=text)


def render_word(w: Word, gen_names) -> str:
    """Render a word in the input grammar (syllables joined by '*')."""
    if not w.letters:
        return ""
    parts: list[str] = []
    i = 0
    ls = w.letters
    while i < len(ls):
        j = i
        while j < len(ls) and ls[j] == ls[i]:
            j += 1
        name = gen_names[abs(ls[i]) - 1]
        e = (j - i) if ls[i] > 0 else -(j - i)
        parts.append(name if e == 1 else f"{name}^{e}")
        i = j
    return "*".join(parts)


def render_presentation(p: Presentation) -> str:
    """Canonical text form; reparsing yields an equal Presentation."""
    gens = ", ".join(p.generator_names())
    rels = ", ".join(render_word(r, p.generator_names()) for r in p.relators)
    return f"< {gens} | {rels} >"


def abelianized_relations(p: Presentation) -> list[list[int]]:
    """Net exponent-sum matrix: one row per relator, one column per generator."""
    rows = []
    for r in p.relators:
        row = [0] * p.ngens
        for l in r.letters:
            row[abs(l) - 1] += 1 if l > 0 else -1
        rows.append(row)
    return rows
