"""Reproduce the published covering/POVM tables and diff against the oracles.

Each check yields a cell with status PASS, WARN, FAIL, or INFO.  Cells the
sources themselves disagree on (or that depend on the fiducial pool, as
recorded in the oracle sidecar) are WARN, never FAIL: the run exits 0 unless
a non-flagged cell mismatches.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from . import catalog
from .homology import first_homology, homology_string, rewrite_presentation
from .lowindex import DEFAULT_NODE_BUDGET, cusp_count, eta_sequence, low_index_subgroups
from .povm import PauliGroupSpec, povm_scan
from .todd_coxeter import enumerate_cosets

__all__ = ["Cell", "reproduce", "TABLES"]

TABLES = ("t1", "t2", "t4", "t5")


@dataclass
class Cell:
    status: str  # PASS | WARN | FAIL | INFO
    label: str
    detail: str

    def line(self) -> str:
        return f"{self.status:4s} {self.label}: {self.detail}"


def _class_rows(entry, d_max, node_budget, with_povm=False, factors=None):
    """(record, ty, hom, cp, scan) rows for every class of index <= d_max."""
    p = entry.presentation
    records = low_index_subgroups(p, d_max, node_budget)
    rows = []
    for r in records:
        hom = homology_string(first_homology(rewrite_presentation(p, r.table)))
        cp = cusp_count(r, entry.peripherals) if entry.peripherals else None
        scan = None
        if with_povm and r.index >= 2:
            spec = PauliGroupSpec.for_dimension(r.index, factors)
            scan = povm_scan(r, spec)
        rows.append((r, r.covering_type, hom, cp, scan))
    return rows


def _check_eta(cells, entry, d_max, node_budget, expected, label_prefix):
    eta = eta_sequence(entry.presentation, d_max, node_budget).as_list()
    for d in range(1, min(d_max, len(expected)) + 1):
        ok = eta[d - 1] == expected[d - 1]
        cells.append(Cell(
            "PASS" if ok else "FAIL",
            f"{label_prefix} eta[{d}]",
            f"computed {eta[d - 1]}, published {expected[d - 1]}",
        ))
    return eta


def _t1(node_budget):
    cells: list[Cell] = []
    entry = catalog.get("trefoil")
    oracle = entry.oracle
    eta = _check_eta(cells, entry, 10, node_budget, oracle["eta"], "trefoil")
    extra = oracle.get("eta_extra", {})
    if "9" in extra:
        conf = extra["9"]["conflict"]
        cells.append(Cell(
            "WARN", "trefoil eta[9]",
            f"computed {eta[8]}; the sources disagree ({conf}) - flagged, not failed",
        ))
    if "10" in extra:
        ok = eta[9] == extra["10"]["value"]
        cells.append(Cell("PASS" if ok else "FAIL", "trefoil eta[10]",
                          f"computed {eta[9]}, published {extra['10']['value']}"))

    rows = _class_rows(entry, 6, node_budget, with_povm=True)
    table1 = oracle["table1"]
    for d in range(2, 7):
        got = Counter((ty, hom, cp) for r, ty, hom, cp, _ in rows if r.index == d)
        want = Counter((ty, hom, int(cp)) for ty, hom, cp in table1[str(d)])
        ok = got == want
        cells.append(Cell(
            "PASS" if ok else "FAIL", f"trefoil rows d={d}",
            "computed (ty,hom,cp) multiset matches" if ok else
            f"computed {sorted(got.items())} vs published {sorted(want.items())}",
        ))

    ic_rows = oracle.get("ic_rows", {})
    for d in range(3, 7):
        specs = ic_rows.get(str(d), [])
        classes = [(ty, hom, cp, scan) for r, ty, hom, cp, scan in rows if r.index == d]
        available = list(classes)
        for spec_row in specs:
            sig = (spec_row["ty"], spec_row["hom"], spec_row["cp"])
            match = next(
                (c for c in available if (c[0], c[1], c[2]) == sig), None)
            if match is None:
                cells.append(Cell("FAIL", f"trefoil IC d={d} {spec_row['label']}",
                                  f"no class with signature {sig}"))
                continue
            available.remove(match)
            scan = match[3]
            best = scan.best if scan else None
            ok = bool(best and best.is_ic)
            if spec_row.get("sic"):
                ok = ok and best.is_sic
            cells.append(Cell(
                "PASS" if ok else "FAIL",
                f"trefoil IC d={d} {spec_row['label']}",
                f"rank {best.gram_rank if best else 0}, pp {best.pp if best else '-'}"
                + (", SIC" if best and best.is_sic else ""),
            ))
        extra_ic = sum(
            1 for c in available if c[3] and c[3].best and c[3].best.is_ic)
        if extra_ic:
            cells.append(Cell(
                "INFO", f"trefoil IC d={d}",
                f"{extra_ic} additional class(es) certify IC beyond the published labels",
            ))
    return cells


def _t2(node_budget):
    cells: list[Cell] = []
    entry = catalog.get("figure8")
    oracle = entry.oracle
    _check_eta(cells, entry, 8, node_budget, oracle["eta"], "figure8")

    rows = _class_rows(entry, 5, node_budget, with_povm=True)
    table2 = oracle["table2"]
    for d in range(2, 6):
        got = [(ty, cp, scan.best.gram_rank if scan and scan.best else 0,
                scan.best.pp if scan and scan.best else None)
               for r, ty, hom, cp, scan in rows if r.index == d]
        want = table2[str(d)]
        flagged = any(w.get("flags") for w in want)
        ty_ok = Counter(t for t, _, _, _ in got) >= Counter(w["ty"] for w in want)
        cp_ok = Counter(c for _, c, _, _ in got) >= Counter(w["cp"] for w in want)
        status = "PASS" if (ty_ok and cp_ok) else ("WARN" if flagged else "FAIL")
        cells.append(Cell(status, f"figure8 rows d={d}",
                          f"computed ty/cp {sorted((t, c) for t, c, _, _ in got)} "
                          f"vs published {sorted((w['ty'], w['cp']) for w in want)}"))
        for w in want:
            label = f"figure8 rk d={d} (ty {w['ty']}, cp {w['cp']})"
            target = (w["rk"], w.get("pp"))
            hit = next(((t, c, rk, pp) for (t, c, rk, pp) in got
                        if rk == target[0] and (target[1] is None or pp == target[1])),
                       None)
            if w.get("flags"):
                comp = sorted(set((rk, pp) for _, _, rk, pp in got))
                cells.append(Cell("WARN", label,
                                  f"published rk {w['rk']} pp {w.get('pp', '-')}; "
                                  f"computed (rk, pp) set {comp}; flagged: "
                                  + "; ".join(w["flags"])))
            else:
                cells.append(Cell(
                    "PASS" if hit else "FAIL", label,
                    f"published rk {w['rk']} pp {w.get('pp', '-')}; "
                    + (f"matched computed class {hit[:2]}" if hit else
                       f"no computed class matches (computed {got})"),
                ))
    return cells


def _t4(node_budget):
    cells: list[Cell] = []
    entry = catalog.get("borromean")
    oracle = entry.oracle
    h1 = homology_string(first_homology(entry.presentation))
    cells.append(Cell("PASS" if h1 == oracle["h1"] else "FAIL", "borromean H1",
                      f"computed {h1}, expected {oracle['h1']}"))
    rows = _class_rows(entry, 3, node_budget)
    for d in ("2", "3"):
        block = oracle["table4"][d]
        got = Counter((ty, hom, cp)
                      for r, ty, hom, cp, _ in rows if r.index == int(d))
        if d == "2":
            cells.append(Cell(
                "PASS" if sum(got.values()) == 7 else "FAIL",
                "borromean class count d=2",
                f"computed {sum(got.values())} classes (published rows are "
                "deduplicated by homology type)"))
        flags = block.get("flags", {})
        for ty, hom, cp in block["rows"]:
            present = got.get((ty, hom, int(cp)), 0) > 0
            label = f"borromean d={d} ({ty}, {hom}, cp {cp})"
            if present:
                cells.append(Cell("PASS", label, "present among computed classes"))
            elif hom in flags:
                cells.append(Cell("WARN", label, f"published row not reproduced: {flags[hom]}"))
            else:
                cells.append(Cell("FAIL", label, "missing from computed classes"))
    return cells


def _t5(node_budget):
    cells: list[Cell] = []
    jobs = [("trefoil", "-1,1"), ("trefoil", "1,1"), ("trefoil", "0,1"),
            ("figure8", "0,1")]
    for key, pq in jobs:
        entry = catalog.get(key)
        oracle = entry.oracle["surgeries"][pq]
        p, q = (int(v) for v in pq.split(","))
        quo = catalog.surgery_quotient(entry, 1, p, q)
        eta = eta_sequence(quo, 10, node_budget).as_list()
        ok = eta == oracle["eta"]
        cells.append(Cell("PASS" if ok else "FAIL",
                          f"{key}({pq}) = {oracle['name']}",
                          f"eta {eta} vs published {oracle['eta']}"))
        if "order" in oracle:
            n = enumerate_cosets(quo, [], max_cosets=10**6).n
            cells.append(Cell("PASS" if n == oracle["order"] else "FAIL",
                              f"{key}({pq}) group order",
                              f"coset enumeration gives {n}, expected {oracle['order']}"))
    return cells


def reproduce(table: str, node_budget: int = DEFAULT_NODE_BUDGET):
    """Run one table reproduction; returns (exit_code, cells)."""
    fns = {"t1": _t1, "t2": _t2, "t4": _t4, "t5": _t5}
    if table not in fns:
        raise ValueError(f"unknown table {table!r}; choose from {TABLES}")
    cells = fns[table](node_budget)
    code = 1 if any(c.status == "FAIL" for c in cells) else 0
    return code, cells
