"""Conjugacy classes of finite-index subgroups by canonical coset-table search.

The search walks partial coset tables in standard form (new cosets are only
introduced at the first undefined slot in row-major order), propagates relator
deductions after every assignment, and prunes branches whose table would not
be lexicographically minimal among all re-rootings.  Each surviving complete
table is the canonical representative of one conjugacy class of subgroups,
equivalently one equivalence class of connected coverings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .presentation import (
    GeneratorSymbol,
    Presentation,
    Word,
    cyclic_reduce,
    free_reduce,
)
from .todd_coxeter import CosetTable, PermutationRep, coset_action, word_cols

__all__ = [
    "SubgroupRecord",
    "EtaSequence",
    "NodeBudgetExceeded",
    "low_index_subgroups",
    "eta_sequence",
    "classify_covering",
    "conjugacy_class_size",
    "cusp_count",
    "total_subgroup_counts",
    "image_order",
    "records_to_json",
]

DEFAULT_NODE_BUDGET = 10**8
IMAGE_ORDER_CAP = 20000

try:  # compiled search kernel; pure Python below remains the reference
    import os as _os

    if _os.environ.get("COVERPOVM_FORCE_PYTHON"):
        _FAST = None
    else:
        from . import _search_fast as _FAST
except Exception:  # pragma: no cover - numba genuinely unavailable
    _FAST = None


class NodeBudgetExceeded(RuntimeError):
    """Search node budget ran out; carries the classes found so far."""

    def __init__(self, budget: int, partial_tables):
        super().__init__(
            f"low-index search exceeded node budget {budget}; "
            f"{len(partial_tables)} classes found before the cap (partial result)"
        )
        self.budget = budget
        self.partial = True
        self.partial_tables = partial_tables


@dataclass
class SubgroupRecord:
    """One conjugacy-class representative of a finite-index subgroup."""

    index: int
    table: CosetTable
    rep: PermutationRep
    covering_type: str  # "cyc" | "reg" | "irr"
    image_order: int | None = field(default=None)  # None until computed


@dataclass(frozen=True)
class EtaSequence:
    """counts[d-1] = number of conjugacy classes of index-d subgroups."""

    counts: tuple[int, ...]

    def __getitem__(self, d: int) -> int:
        """Count at degree d (1-based)."""
        return self.counts[d - 1]

    def as_list(self) -> list[int]:
        return list(self.counts)


def _substitute_letters(letters, gen: int, repl: tuple[int, ...]):
    """Replace every occurrence of 1-based generator `gen` by `repl`."""
    out: list[int] = []
    for l in letters:
        if l == gen:
            out.extend(repl)
        elif l == -gen:
            out.extend(-x for x in reversed(repl))
        else:
            out.append(l)
    return tuple(out)


def _renumber_without(letters, gen: int):
    return tuple(
        (l - 1 if l > gen else l) if l > 0 else (l + 1 if -l > gen else l)
        for l in letters
    )


_TIETZE_LIMIT = 24


def _tietze_reduce(p: Presentation):
    """Eliminate generators occurring exactly once in some relator.

    Internal accelerator for the subgroup search: returns an isomorphic
    presentation with (usually far) fewer generators plus, for each original
    generator, the word over the reduced generators it maps to.  Results of
    the search are translated back, so callers never see the reduced form.
    """
    ngens = p.ngens
    relators = [r.letters for r in p.relators]
    gen_words: list[tuple[int, ...]] = [(i + 1,) for i in range(ngens)]
    while True:
        best = None
        for ri, rel in enumerate(relators):
            if len(rel) > _TIETZE_LIMIT:
                continue
            for g in range(1, ngens + 1):
                if sum(1 for l in rel if abs(l) == g) == 1:
                    key = (len(rel), ri, g)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        _, ri, g = best
        rel = relators.pop(ri)
        pos = next(i for i, l in enumerate(rel) if abs(l) == g)
        rot = rel[pos:] + rel[:pos]  # starts with +-g
        rest = rot[1:]
        if rot[0] == g:  # g * rest = 1  =>  g = rest^-1
            repl = tuple(-x for x in reversed(rest))
        else:  # g^-1 * rest = 1  =>  g = rest
            repl = rest
        relators = [
            cyclic_reduce(Word(_substitute_letters(r, g, repl))).letters
            for r in relators
        ]
        relators = [r for r in relators if r]
        gen_words = [
            free_reduce(_substitute_letters(w, g, repl)).letters for w in gen_words
        ]
        relators = [_renumber_without(r, g) for r in relators]
        gen_words = [_renumber_without(w, g) for w in gen_words]
        ngens -= 1
    if ngens == p.ngens:
        return p, None
    gens = tuple(GeneratorSymbol(f"t{i + 1}", i) for i in range(ngens))
    seen = set()
    uniq = []
    for r in relators:
        if r not in seen:
            seen.add(r)
            uniq.append(Word(r))
    reduced = Presentation(gens, tuple(uniq))
    return reduced, [Word(w) for w in gen_words]


def _reconstruct_tables(tables, gen_words, ngens: int):
    """Translate reduced-search tables back to the original generators.

    Each original generator acts through its word over the reduced ones; the
    resulting action is put into canonical form (lexicographically minimal
    standard renumbering over all base points).
    """
    out = []
    for rows in tables:
        n = len(rows)
        ncols_red = len(rows[0]) if rows else 0
        full_rows = []
        perms = []
        for w in gen_words:
            perm = []
            for start in range(n):
                cur = start
                for l in w.letters:
                    col = 2 * (l - 1) if l > 0 else 2 * (-l - 1) + 1
                    cur = rows[cur][col]
                perm.append(cur)
            perms.append(perm)
        for i in range(n):
            row = []
            for k in range(ngens):
                row.append(perms[k][i])
                row.append(perms[k].index(i))
            full_rows.append(tuple(row))
        full_rows = tuple(full_rows)
        best = min(
            _standard_rerooting(full_rows, root) for root in range(n)
        )
        ncols = 2 * ngens
        out.append(tuple(
            tuple(best[r * ncols + c] for c in range(ncols)) for r in range(n)
        ))
    return out


def _relator_rotations(p: Presentation) -> list[tuple[int, ...]]:
    """All cyclic rotations of all relators (as column words), deduplicated."""
    out: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for r in p.relators:
        cols = word_cols(r, p.ngens)
        for s in range(len(cols)):
            rot = cols[s:] + cols[:s]
            if rot not in seen:
                seen.add(rot)
                out.append(rot)
    return out


def _search_tables(p: Presentation, d_max: int, node_budget: int,
                   progress=None) -> list[tuple[tuple[int, ...], ...]]:
    """All canonical complete tables with <= d_max cosets, sorted canonically."""
    ncols = 2 * p.ngens
    if _FAST is not None:
        status, tables, _nodes = _FAST.search_tables_fast(
            ncols, d_max, _relator_rotations(p), node_budget
        )
        if status == _FAST.STATUS_BUDGET:
            raise NodeBudgetExceeded(node_budget, tables)
        tables.sort(key=lambda rows: (len(rows), rows))
        return tables
    return _search_tables_py(p, d_max, node_budget, progress)


def _search_tables_py(p: Presentation, d_max: int, node_budget: int,
                      progress=None) -> list[tuple[tuple[int, ...], ...]]:
    """Pure-Python reference implementation of the table search."""
    ngens = p.ngens
    ncols = 2 * ngens
    rots_by_col: list[list[tuple[int, ...]]] = [[] for _ in range(ncols)]
    for rot in _relator_rotations(p):
        rots_by_col[rot[0]].append(rot)

    size = d_max * ncols
    tab = [-1] * size
    tau = [-1] * d_max
    sigma = [0] * d_max
    results: list[tuple[tuple[int, ...], ...]] = []
    state = {"n": 1, "nodes": 0}
    trail: list[int] = []
    stack: list[tuple[int, int]] = []

    def propagate() -> bool:
        """Drain the deduction stack; False on a forced coincidence."""
        while stack:
            gamma, c = stack.pop()
            for rot in rots_by_col[c]:
                f = gamma
                i = 0
                b = gamma
                j = len(rot) - 1
                while True:
                    while i <= j:
                        v = tab[f * ncols + rot[i]]
                        if v < 0:
                            break
                        f = v
                        i += 1
                    if i > j:
                        if f != b:
                            return False
                        break
                    while j >= i:
                        v = tab[b * ncols + (rot[j] ^ 1)]
                        if v < 0:
                            break
                        b = v
                        j -= 1
                    if j == i:
                        c2 = rot[i]
                        pos1 = f * ncols + c2
                        pos2 = b * ncols + (c2 ^ 1)
                        tab[pos1] = b
                        tab[pos2] = f
                        trail.append(pos1)
                        trail.append(pos2)
                        stack.append((f, c2))
                        stack.append((b, c2 ^ 1))
                        break
                    if j < i:
                        if f != b:
                            return False
                        break
                    break  # gap of two or more: no information yet
        return True

    def first_in_class(n: int) -> bool:
        """False iff some re-rooted standard renumbering is definitely smaller."""
        cur00 = tab[0]
        for gamma in range(1, n):
            v0 = tab[gamma * ncols]
            if v0 < 0 or cur00 < 0:
                continue
            nv0 = 0 if v0 == gamma else 1
            if nv0 > cur00:
                continue
            # walk the renumbered table in row-major order
            sigma[0] = gamma
            slen = 1
            tau[gamma] = 0
            verdict = 0
            i = 0
            while i < slen:
                base_old = sigma[i] * ncols
                base_cur = i * ncols
                for c in range(ncols):
                    v = tab[base_old + c]
                    cur = tab[base_cur + c]
                    if v < 0 or cur < 0:
                        verdict = 2  # cannot decide from this root
                        break
                    nv = tau[v]
                    if nv < 0:
                        nv = slen
                        tau[v] = nv
                        sigma[slen] = v
                        slen += 1
                    if nv != cur:
                        verdict = -1 if nv < cur else 1
                        break
                if verdict:
                    break
                i += 1
            for k in range(slen):
                tau[sigma[k]] = -1
            if verdict == -1:
                return False
        return True

    def recurse(lo: int):
        n = state["n"]
        limit = n * ncols
        pos = lo
        while pos < limit and tab[pos] >= 0:
            pos += 1
        if pos >= limit:
            rows = tuple(
                tuple(tab[r * ncols: r * ncols + ncols]) for r in range(n)
            )
            results.append(rows)
            return
        alpha, c = divmod(pos, ncols)
        cinv = c ^ 1
        betas = [b for b in range(n) if tab[b * ncols + cinv] < 0]
        if n < d_max:
            betas.append(n)
        pos2base = cinv
        for beta in betas:
            state["nodes"] += 1
            if state["nodes"] > node_budget:
                raise NodeBudgetExceeded(node_budget, list(results))
            if progress is not None and state["nodes"] % 1_000_000 == 0:
                progress(state["nodes"])
            new_coset = beta == n
            if new_coset:
                state["n"] = n + 1
            mark = len(trail)
            pos2 = beta * ncols + pos2base
            tab[pos] = beta
            tab[pos2] = alpha
            trail.append(pos)
            trail.append(pos2)
            stack.clear()
            stack.append((alpha, c))
            stack.append((beta, cinv))
            ok = propagate()
            if ok:
                ok = first_in_class(state["n"])
            if ok:
                recurse(pos)
            for q in range(len(trail) - 1, mark - 1, -1):
                tab[trail[q]] = -1
            del trail[mark:]
            if new_coset:
                state["n"] = n

    recurse(0)
    results.sort(key=lambda rows: (len(rows), rows))
    return results


def _image_closure(rep: PermutationRep, cap: int) -> list[tuple[int, ...]] | None:
    """Elements of the permutation image, or None once more than cap exist."""
    n = rep.degree
    ident = tuple(range(n))
    gens = [g for g in rep.images]
    gens += [tuple(sorted(range(n), key=lambda i: g[i])) for g in rep.images]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = tuple(g[a[i]] for i in range(n))
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
                    if len(seen) > cap:
                        return None
        frontier = nxt
    return sorted(seen)


def _perm_order(perm: tuple[int, ...]) -> int:
    from math import lcm

    n = len(perm)
    seen = [False] * n
    out = 1
    for i in range(n):
        if not seen[i]:
            l, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                l += 1
            out = lcm(out, l)
    return out


def classify_covering(r: SubgroupRecord) -> str:
    """"cyc" for cyclic image, "reg" for normal with non-cyclic image, else "irr"."""
    d = r.index
    elems = _image_closure(r.rep, d)
    if elems is None:
        return "irr"  # image larger than degree: not regular, hence not cyclic
    if any(_perm_order(g) == d for g in elems):
        return "cyc"
    return "reg" if d > 1 else "cyc"


def image_order(r: SubgroupRecord, cap: int = IMAGE_ORDER_CAP) -> int | None:
    """Order of the transitive image, or None if it exceeds cap ("large")."""
    if r.image_order is not None:
        return r.image_order
    elems = _image_closure(r.rep, cap)
    if elems is not None:
        r.image_order = len(elems)
    return r.image_order


def _standard_rerooting(rows, root: int) -> tuple[int, ...]:
    """Flattened standard renumbering of a complete table from a new base."""
    n = len(rows)
    ncols = len(rows[0])
    tau = [-1] * n
    sigma = [root]
    tau[root] = 0
    flat: list[int] = []
    i = 0
    while i < len(sigma):
        for c in range(ncols):
            v = rows[sigma[i]][c]
            if tau[v] < 0:
                tau[v] = len(sigma)
                sigma.append(v)
            flat.append(tau[v])
        i += 1
    return tuple(flat)


def low_index_subgroups(
    p: Presentation,
    d_max: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    progress=None,
) -> list[SubgroupRecord]:
    """One SubgroupRecord per conjugacy class of subgroups of index <= d_max.

    Output order is canonical: ascending index, then lexicographic on the
    flattened coset table.  Raises NodeBudgetExceeded (with partial results
    attached) if the search node budget runs out.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    reduced, gen_words = _tietze_reduce(p)
    if gen_words is None:
        tables = _search_tables(p, d_max, node_budget, progress)
    elif reduced.ngens == 0:  # the group is trivial
        tables = [(tuple([0] * (2 * p.ngens)),)]
    else:
        reduced_tables = _search_tables(reduced, d_max, node_budget, progress)
        tables = _reconstruct_tables(reduced_tables, gen_words, p.ngens)
        tables.sort(key=lambda rows: (len(rows), rows))
    records = []
    for rows in tables:
        table = CosetTable(p.ngens, rows)
        table.validate(p)  # re-validate every emitted record
        rep = coset_action(table)
        rec = SubgroupRecord(index=table.n, table=table, rep=rep,
                             covering_type="")
        rec.covering_type = classify_covering(rec)
        records.append(rec)
    return records


def eta_sequence(
    p: Presentation,
    d_max: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    progress=None,
) -> EtaSequence:
    """Class counts per degree 1..d_max (the covering-cardinality sequence)."""
    records = low_index_subgroups(p, d_max, node_budget, progress)
    counts = [0] * d_max
    for r in records:
        counts[r.index - 1] += 1
    return EtaSequence(tuple(counts))


def conjugacy_class_size(r: SubgroupRecord) -> int:
    """Number of distinct subgroups conjugate to the record's subgroup."""
    rows = r.table.rows
    distinct = {_standard_rerooting(rows, root) for root in range(r.index)}
    return len(distinct)


def total_subgroup_counts(
    p: Presentation,
    d_max: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> list[int]:
    """Total subgroup counts per degree (classes expanded by class size)."""
    records = low_index_subgroups(p, d_max, node_budget)
    counts = [0] * d_max
    for r in records:
        counts[r.index - 1] += conjugacy_class_size(r)
    return counts


def cusp_count(r: SubgroupRecord, peripherals) -> int:
    """Total orbit count of the peripheral (meridian, longitude) pairs.

    peripherals: one (meridian Word, longitude Word) pair per link component.
    """
    if not peripherals:
        raise ValueError("no peripheral data supplied")
    d = r.index
    total = 0
    for meridian, longitude in peripherals:
        pm = r.rep.word_image(meridian)
        pl = r.rep.word_image(longitude)
        seen = [False] * d
        for s in range(d):
            if seen[s]:
                continue
            total += 1
            queue = [s]
            seen[s] = True
            while queue:
                x = queue.pop()
                for y in (pm[x], pl[x]):
                    if not seen[y]:
                        seen[y] = True
                        queue.append(y)
        # orbits of the generated group equal orbits of the generator graph
    return total


def records_to_json(records: list[SubgroupRecord]) -> list[dict]:
    """JSON-ready rows with stable field order."""
    out = []
    for r in records:
        out.append(
            {
                "index": r.index,
                "permutations": [list(img) for img in r.rep.images],
                "covering_type": r.covering_type,
                "class_size": conjugacy_class_size(r),
            }
        )
    return out
