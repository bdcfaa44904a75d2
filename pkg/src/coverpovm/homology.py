"""First homology of coverings: Schreier rewriting, abelianization, Smith form.

Smith normal form is done in exact (arbitrary-precision) integer arithmetic;
intermediate entries can blow up well past 64 bits even on small matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .presentation import (
    GeneratorSymbol,
    Presentation,
    Word,
    abelianized_relations,
    cyclic_reduce,
)
from .todd_coxeter import CosetTable

__all__ = [
    "AbelianInvariants",
    "schreier_generators",
    "rewrite_presentation",
    "smith_normal_form",
    "first_homology",
    "homology_string",
]


@dataclass(frozen=True)
class AbelianInvariants:
    """free_rank copies of Z plus cyclic torsion factors d1 | d2 | ..."""

    free_rank: int
    torsion: tuple[int, ...]

    def __post_init__(self):
        for a in self.torsion:
            if a < 2:
                raise ValueError("torsion coefficients must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError("torsion coefficients must form a chain")


def homology_string(inv: AbelianInvariants) -> str:
    """Table notation: "1" per Z factor, "1/k" per Z/k factor, "0" if trivial."""
    parts = [f"1/{k}" for k in inv.torsion] + ["1"] * inv.free_rank
    return "+".join(parts) if parts else "0"


def _letter_of_col(col: int) -> int:
    k = col // 2 + 1
    return k if col % 2 == 0 else -k


def _schreier_tree(t: CosetTable, column_order=None):
    """BFS transversal words and the set of tree edges (coset, gen) they use.

    column_order maps a coset to the iteration order of its columns; the
    default (natural order) gives the lexicographic-by-generator transversal.
    """
    n = t.n
    ncols = t.ncols
    transversal: list[tuple[int, ...] | None] = [None] * n
    transversal[0] = ()
    tree: set[tuple[int, int]] = set()
    queue = [0]
    head = 0
    while head < len(queue):
        a = queue[head]
        head += 1
        cols = range(ncols) if column_order is None else column_order(a)
        for c in cols:
            b = t.rows[a][c]
            if transversal[b] is None:
                transversal[b] = transversal[a] + (_letter_of_col(c),)
                g = c // 2
                if c % 2 == 0:
                    tree.add((a, g))
                else:
                    tree.add((b, g))
                queue.append(b)
    return transversal, tree


def schreier_generators(p: Presentation, t: CosetTable) -> list[Word]:
    """Nontrivial Schreier generators t_a * g * t_{a.g}^-1 (BFS transversal)."""
    if not t.is_complete():
        raise ValueError("coset table is not complete")
    transversal, tree = _schreier_tree(t)
    out = []
    for a in range(t.n):
        for g in range(t.ngens):
            if (a, g) in tree:
                continue
            b = t.rows[a][2 * g]
            w = Word(transversal[a] + (g + 1,)
                     + tuple(-l for l in reversed(transversal[b])))
            out.append(w)
    return out


def rewrite_presentation(p: Presentation, t: CosetTable,
                         column_order=None) -> Presentation:
    """Reidemeister-Schreier presentation of the subgroup behind the table.

    Generators are the nontrivial Schreier generators; relators are the
    rewrites of every ambient relator from every coset (freely and cyclically
    reduced, dropped if trivial, otherwise untouched: no simplification).
    """
    if not t.is_complete():
        raise ValueError("coset table is not complete")
    _, tree = _schreier_tree(t, column_order)
    index_of: dict[tuple[int, int], int] = {}
    for a in range(t.n):
        for g in range(t.ngens):
            if (a, g) not in tree:
                index_of[(a, g)] = len(index_of)
    gens = tuple(
        GeneratorSymbol(f"s{i + 1}", i) for i in range(len(index_of))
    )
    relators = []
    for a in range(t.n):
        for r in p.relators:
            letters = []
            beta = a
            for l in r.letters:
                g = abs(l) - 1
                if l > 0:
                    idx = index_of.get((beta, g))
                    if idx is not None:
                        letters.append(idx + 1)
                    beta = t.rows[beta][2 * g]
                else:
                    beta = t.rows[beta][2 * g + 1]
                    idx = index_of.get((beta, g))
                    if idx is not None:
                        letters.append(-(idx + 1))
            red = cyclic_reduce(Word(tuple(letters)))
            if red.letters:
                relators.append(red)
    return Presentation(gens, tuple(relators))


def smith_normal_form(mat) -> tuple[list[int], int]:
    """Diagonal of the Smith normal form and its rank, exactly over Z.

    The diagonal is nonnegative, padded with zeros to min(rows, cols), and
    satisfies d1 | d2 | ... (pivoting on the smallest nonzero entry with a
    divisibility fix-up pass).
    """
    A = [[int(v) for v in row] for row in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    diag: list[int] = []
    t = 0
    size = min(m, n)
    while t < size:
        # locate the smallest-magnitude nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        A[t], A[bi] = A[bi], A[t]
        if bj != t:
            for row in A:
                row[t], row[bj] = row[bj], row[t]
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
        while True:
            pivot = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = A[i][t] // pivot
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = A[t][j] // pivot
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    dirty = True
            if dirty:
                # a remainder became the new smallest entry; re-pivot
                best = None
                for i in range(t, m):
                    for j in range(t, n):
                        v = A[i][j]
                        if v and (best is None
                                  or abs(v) < abs(A[best[0]][best[1]])):
                            best = (i, j)
                bi, bj = best
                A[t], A[bi] = A[bi], A[t]
                if bj != t:
                    for row in A:
                        row[t], row[bj] = row[bj], row[t]
                if A[t][t] < 0:
                    A[t] = [-v for v in A[t]]
                continue
            # pivot must divide the whole trailing block
            viol = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % pivot:
                        viol = i
                        break
                if viol is not None:
                    break
            if viol is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[viol])]
        diag.append(A[t][t])
        t += 1
    diag += [0] * (size - len(diag))
    rank = sum(1 for v in diag if v)
    return diag, rank


def first_homology(sub: Presentation) -> AbelianInvariants:
    """Cokernel of the abelianized relation matrix as free rank + torsion."""
    mat = abelianized_relations(sub)
    if not mat:
        return AbelianInvariants(sub.ngens, ())
    diag, rank = smith_normal_form(mat)
    torsion = tuple(v for v in diag if v >= 2)
    return AbelianInvariants(sub.ngens - rank, torsion)
