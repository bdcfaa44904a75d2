"""Built-in group presentations with peripheral data and paper-derived oracles.

The catalog lives in two human-editable data files: ``data/catalog.txt``
(presentations and peripheral words in the presentation grammar) and
``data/oracles.json`` (expected sequences, table rows, and flags for cells
the sources disagree on).  Users may add entries to either file without
touching code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from math import gcd

from .presentation import Presentation, Word, parse_presentation, parse_word

__all__ = ["CatalogEntry", "get", "keys", "surgery_quotient", "load_catalog"]


@dataclass
class CatalogEntry:
    key: str
    presentation: Presentation
    components: int = 1
    peripherals: list[tuple[Word, Word]] | None = None
    provenance: str = ""
    oracle: dict = field(default_factory=dict)


def _parse_catalog_text(text: str) -> dict[str, dict]:
    sections: dict[str, dict] = {}
    current: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = {}
            sections[line[1:-1].strip()] = current
            continue
        if current is None or "=" not in line:
            raise ValueError(f"catalog.txt line {lineno}: expected 'key = value'")
        k, v = line.split("=", 1)
        current[k.strip()] = v.strip()
    return sections


def _build_entry(key: str, fields: dict[str, str], oracle: dict) -> CatalogEntry:
    pres = parse_presentation(fields["presentation"])
    components = int(fields.get("components", "1"))
    names = pres.generator_names()
    peripherals = None
    if "peripheral1" in fields:
        peripherals = []
        for c in range(1, components + 1):
            spec = fields.get(f"peripheral{c}")
            if spec is None:
                peripherals = None
                break
            m_text, l_text = spec.split(";")
            peripherals.append(
                (parse_word(m_text.strip(), names), parse_word(l_text.strip(), names))
            )
    return CatalogEntry(
        key=key,
        presentation=pres,
        components=components,
        peripherals=peripherals,
        provenance=fields.get("provenance", ""),
        oracle=oracle,
    )


def load_catalog() -> dict[str, CatalogEntry]:
    data = resources.files("coverpovm").joinpath("data")
    sections = _parse_catalog_text(
        data.joinpath("catalog.txt").read_text(encoding="utf-8")
    )
    oracles = json.loads(data.joinpath("oracles.json").read_text(encoding="utf-8"))
    out = {}
    for key, fields in sections.items():
        out[key] = _build_entry(key, fields, oracles.get(key, {}))
    return out


_CACHE: dict[str, CatalogEntry] | None = None


def _catalog() -> dict[str, CatalogEntry]:
    global _CACHE
    if _CACHE is None:
        _CACHE = load_catalog()
    return _CACHE


def keys() -> list[str]:
    return sorted(_catalog())


def get(key: str) -> CatalogEntry:
    try:
        return _catalog()[key]
    except KeyError:
        known = ", ".join(keys())
        raise KeyError(f"unknown catalog key {key!r}; known keys: {known}") from None


def surgery_quotient(entry: CatalogEntry, component: int, p: int, q: int) -> Presentation:
    """Quotient by the normal closure of meridian^p * longitude^q.

    component is 1-based; requires peripheral data and gcd(p, q) = 1.
    """
    if entry.peripherals is None:
        raise ValueError(f"catalog entry {entry.key!r} has no peripheral data")
    if not (1 <= component <= len(entry.peripherals)):
        raise ValueError(f"component must be in 1..{len(entry.peripherals)}")
    if gcd(p, q) != 1:
        raise ValueError("surgery coefficients must be coprime (or (0,1))")
    meridian, longitude = entry.peripherals[component - 1]
    filling = (meridian ** p) * (longitude ** q)
    return entry.presentation.with_extra_relators([filling])
