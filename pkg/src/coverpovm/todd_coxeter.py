"""Coset enumeration (HLT with immediate coincidence processing).

The coset table stores one row per coset and one column per generator and
per generator inverse: generator k acts through column 2k and its inverse
through column 2k+1, so the inverse of column c is always c^1.  Undefined
entries are -1.  Coset 0 is the subgroup itself.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .presentation import Presentation, Word

__all__ = [
    "CosetTable",
    "PermutationRep",
    "CosetLimitExceeded",
    "UndefinedTransition",
    "enumerate_cosets",
    "coset_action",
    "trace",
    "word_cols",
]

DEFAULT_MAX_COSETS = 10**6


class CosetLimitExceeded(RuntimeError):
    """Live cosets would exceed max_cosets before the enumeration closed."""

    def __init__(self, max_cosets: int):
        super().__init__(
            f"coset enumeration exceeded {max_cosets} live cosets; "
            "the subgroup may have infinite index"
        )
        self.max_cosets = max_cosets


class UndefinedTransition(ValueError):
    """A trace hit an undefined coset-table entry."""


def word_cols(w: Word, ngens: int) -> tuple[int, ...]:
    """Translate a word into a sequence of table columns."""
    cols = []
    for l in w.letters:
        k = abs(l) - 1
        if k >= ngens:
            raise ValueError(f"word uses generator {k} outside presentation")
        cols.append(2 * k if l > 0 else 2 * k + 1)
    return tuple(cols)


@dataclass(frozen=True)
class CosetTable:
    """A (typically complete) coset table with value semantics."""

    ngens: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return 2 * self.ngens

    def entry(self, coset: int, col: int) -> int:
        return self.rows[coset][col]

    def is_complete(self) -> bool:
        return all(v >= 0 for row in self.rows for v in row)

    def flattened(self) -> tuple[int, ...]:
        return tuple(v for row in self.rows for v in row)

    def trace(self, start: int, w: Word) -> int:
        cur = start
        for c in word_cols(w, self.ngens):
            nxt = self.rows[cur][c]
            if nxt < 0:
                raise UndefinedTransition(
                    f"undefined transition from coset {cur} on column {c}"
                )
            cur = nxt
        return cur

    def validate(self, p: Presentation, subgens: tuple[Word, ...] = ()) -> None:
        """Check consistency, relator closure, and subgroup-word closure."""
        if p.ngens != self.ngens:
            raise ValueError("generator count mismatch")
        for i, row in enumerate(self.rows):
            for c, v in enumerate(row):
                if v >= 0 and self.rows[v][c ^ 1] != i:
                    raise ValueError(f"inconsistent entries at ({i},{c})")
        if self.is_complete():
            for r in p.relators:
                for i in range(self.n):
                    if self.trace(i, r) != i:
                        raise ValueError(f"relator does not close at coset {i}")
        for w in subgens:
            if self.trace(0, w) != 0:
                raise ValueError("subgroup generator does not fix coset 0")

    def to_csv(self) -> str:
        """CSV dump: one row per coset, generator/inverse image columns."""
        buf = io.StringIO()
        heads = []
        for k in range(self.ngens):
            heads += [f"g{k}", f"g{k}^-1"]
        buf.write("coset," + ",".join(heads) + "\n")
        for i, row in enumerate(self.rows):
            buf.write(str(i) + "," + ",".join(str(v) for v in row) + "\n")
        return buf.getvalue()


@dataclass(frozen=True)
class PermutationRep:
    """Permutations of {0..degree-1}, one per generator, acting on cosets."""

    degree: int
    images: tuple[tuple[int, ...], ...]

    def act(self, point: int, w: Word) -> int:
        for l in w.letters:
            img = self.images[abs(l) - 1]
            if l > 0:
                point = img[point]
            else:
                point = img.index(point)
        return point

    def word_image(self, w: Word) -> tuple[int, ...]:
        """The permutation (one-line form) of an arbitrary word."""
        inv = [None] * len(self.images)
        out = list(range(self.degree))
        for l in w.letters:
            k = abs(l) - 1
            if l > 0:
                img = self.images[k]
            else:
                if inv[k] is None:
                    im = self.images[k]
                    v = [0] * self.degree
                    for a, b in enumerate(im):
                        v[b] = a
                    inv[k] = tuple(v)
                img = inv[k]
            out = [img[x] for x in out]
        return tuple(out)


def coset_action(t: CosetTable) -> PermutationRep:
    """The permutation representation on cosets of a complete table."""
    if not t.is_complete():
        raise ValueError("coset table is not complete")
    images = tuple(
        tuple(t.rows[i][2 * k] for i in range(t.n)) for k in range(t.ngens)
    )
    return PermutationRep(t.n, images)


def trace(t: CosetTable, start: int, w: Word) -> int:
    return t.trace(start, w)


def enumerate_cosets(
    p: Presentation,
    subgens: list[Word] | tuple[Word, ...] = (),
    max_cosets: int = DEFAULT_MAX_COSETS,
) -> CosetTable:
    """Enumerate cosets of <subgens> in the presented group (HLT strategy).

    Returns the completed, compacted table; cosets are numbered in definition
    order, which makes the output deterministic.  Raises CosetLimitExceeded
    if more than max_cosets cosets would be alive at once.
    """
    if max_cosets < 1:
        raise ValueError("max_cosets must be >= 1")
    ngens = p.ngens
    ncols = 2 * ngens
    rel_cols = [word_cols(r, ngens) for r in p.relators]
    sub_cols = [word_cols(Word(tuple(w)) if not isinstance(w, Word) else w, ngens)
                for w in subgens]

    table: list[list[int]] = [[-1] * ncols]
    parent = [0]  # union-find; parent[i] <= i
    nlive = 1

    def rep(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def define(a: int, c: int) -> int:
        nonlocal nlive
        if nlive >= max_cosets:
            raise CosetLimitExceeded(max_cosets)
        b = len(table)
        table.append([-1] * ncols)
        parent.append(b)
        nlive += 1
        table[a][c] = b
        table[b][c ^ 1] = a
        return b

    def merge(a: int, b: int, queue: list[int]):
        nonlocal nlive
        a, b = rep(a), rep(b)
        if a != b:
            lo, hi = (a, b) if a < b else (b, a)
            parent[hi] = lo
            nlive -= 1
            queue.append(hi)

    def coincidence(a: int, b: int):
        queue: list[int] = []
        merge(a, b, queue)
        while queue:
            dead = queue.pop()
            row = table[dead]
            for c in range(ncols):
                d = row[c]
                if d < 0:
                    continue
                table[d][c ^ 1] = -1
                mu, nu = rep(dead), rep(d)
                if table[mu][c] >= 0:
                    merge(nu, table[mu][c], queue)
                elif table[nu][c ^ 1] >= 0:
                    merge(mu, table[nu][c ^ 1], queue)
                else:
                    table[mu][c] = nu
                    table[nu][c ^ 1] = mu

    def scan_and_fill(a: int, cols: tuple[int, ...]):
        f, i = a, 0
        b, j = a, len(cols) - 1
        while True:
            while i <= j and table[f][cols[i]] >= 0:
                f = table[f][cols[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][cols[j] ^ 1] >= 0:
                b = table[b][cols[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if j == i:
                table[f][cols[i]] = b
                table[b][cols[i] ^ 1] = f
                return
            define(f, cols[i])

    for cols in sub_cols:
        if cols:
            scan_and_fill(0, cols)
    alpha = 0
    while alpha < len(table):
        if rep(alpha) != alpha:
            alpha += 1
            continue
        for cols in rel_cols:
            scan_and_fill(alpha, cols)
            if rep(alpha) != alpha:
                break
        if rep(alpha) == alpha:
            for c in range(ncols):
                if table[alpha][c] < 0:
                    define(alpha, c)
        alpha += 1

    # compact: renumber live cosets in definition order
    live = [i for i in range(len(table)) if rep(i) == i]
    new_of = {old: new for new, old in enumerate(live)}
    rows = tuple(
        tuple(new_of[rep(v)] for v in table[old]) for old in live
    )
    return CosetTable(ngens, rows)
