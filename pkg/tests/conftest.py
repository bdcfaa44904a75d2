import numpy as np
import pytest

from coverpovm import catalog
from coverpovm.lowindex import low_index_subgroups


@pytest.fixture(scope="session")
def trefoil():
    return catalog.get("trefoil")


@pytest.fixture(scope="session")
def figure8():
    return catalog.get("figure8")


@pytest.fixture(scope="session")
def trefoil_records6(trefoil):
    return low_index_subgroups(trefoil.presentation, 6)


@pytest.fixture(scope="session")
def fig8_records5(figure8):
    return low_index_subgroups(figure8.presentation, 5)


# ---------------------------------------------------------------------------
# independent oracles (no coset tables, no canonicality pruning)

def sym_group_tables(n):
    """All elements of S_n as tuples plus a composition table (apply a then b)."""
    import itertools

    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    comp = np.zeros((size, size), dtype=np.int32)
    inv = np.zeros(size, dtype=np.int32)
    for i, a in enumerate(perms):
        inv[i] = index[tuple(sorted(range(n), key=lambda k: a[k]))]
        for j, b in enumerate(perms):
            comp[i, j] = index[tuple(b[a[k]] for k in range(n))]
    return perms, comp, inv


def count_transitive_classes(presentation, n, chunk=200_000):
    """Conjugacy classes of transitive relator-respecting tuples in S_n.

    Brute force over generator-image tuples with chunked numpy filtering
    (each relator is applied as soon as its generators are all assigned),
    then a transitivity filter and orbit counting under simultaneous
    conjugation.  Fully independent of the coset-table search.
    """
    perms, comp, inv = sym_group_tables(n)
    size = len(perms)
    ngens = presentation.ngens
    identity = perms.index(tuple(range(n)))
    relators = [r.letters for r in presentation.relators]
    support = [frozenset(abs(l) - 1 for l in r) for r in relators]

    # assignment order that completes relator supports as early as possible
    order: list[int] = []
    while len(order) < ngens:
        remaining = [g for g in range(ngens) if g not in order]
        order.append(min(
            remaining,
            key=lambda g: (
                min((len(s - set(order) - {g}) for s in support if g in s),
                    default=ngens),
                g,
            ),
        ))

    def relator_holds(block, assigned, rel):
        out = np.full(block.shape[0], identity, dtype=np.int32)
        for l in rel:
            col = block[:, assigned.index(abs(l) - 1)]
            img = col if l > 0 else inv[col]
            out = comp[out, img]
        return out == identity

    assigned: list[int] = []
    tuples = np.zeros((1, 0), dtype=np.int32)
    for g in order:
        assigned.append(g)
        due = [rel for rel, sup in zip(relators, support)
               if g in sup and sup <= set(assigned)]
        grown = []
        for start in range(0, len(tuples), chunk):
            part = tuples[start:start + chunk]
            block = np.column_stack([
                np.repeat(part, size, axis=0),
                np.tile(np.arange(size, dtype=np.int32), len(part)),
            ])
            for rel in due:
                block = block[relator_holds(block, assigned, rel)]
            grown.append(block)
        tuples = np.vstack(grown)
    tuples = tuples[:, [assigned.index(g) for g in range(ngens)]]

    keep = []
    for row in tuples:
        seen = {0}
        frontier = [0]
        gens = [perms[i] for i in row]
        while frontier:
            x = frontier.pop()
            for p in gens:
                if p[x] not in seen:
                    seen.add(p[x])
                    frontier.append(p[x])
        if len(seen) == n:
            keep.append(tuple(row))
    if not keep:
        return 0

    arr = np.array(keep, dtype=np.int32)
    canon = [min(tuple(comp[comp[inv[s], row], s]) for s in range(size))
             for row in arr]
    return len(set(canon))


def hall_free_rank2_counts(d_max):
    """Total subgroup counts of the rank-2 free group by Hall's recurrence."""
    from math import factorial

    counts = []
    for d in range(1, d_max + 1):
        total = d * factorial(d)
        for i in range(1, d):
            total -= factorial(d - i) * counts[i - 1]
        counts.append(total)
    return counts
