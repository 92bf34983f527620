"""Type taxonomy with aliases: the lightweight TBox behind merging and mining.

Types form a tree under the implicit root ``Thing``. Terms that the
taxonomy does not know are kept verbatim and behave like direct children of
``Thing`` wherever callers opt into that (``lenient=True``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable, Mapping

from dtgraph.errors import (
    AliasConflictError,
    CycleError,
    DuplicateTypeError,
    TaxonomyError,
    UnknownParentError,
    UnknownTypeError,
)

ROOT = "Thing"


class CanonicalType(str):
    """A type name plus whether the taxonomy recognised it."""

    resolved: bool

    def __new__(cls, value: str, resolved: bool = True):
        obj = super().__new__(cls, value)
        obj.resolved = resolved
        return obj


def _fold(term: str) -> str:
    return term.strip().casefold()


@dataclass(frozen=True)
class Taxonomy:
    parents: Mapping[str, str | None]
    aliases: Mapping[str, str] = field(default_factory=dict)  # folded alias -> canonical

    def __post_init__(self):
        lookup = {_fold(name): name for name in self.parents}
        lookup.update(self.aliases)
        object.__setattr__(self, "_lookup", lookup)
        depth: dict[str, int] = {ROOT: 0}
        for name in self.parents:
            chain = []
            cur: str | None = name
            while cur not in depth:
                chain.append(cur)
                cur = self.parents[cur]
            for k, t in enumerate(reversed(chain), start=1):
                depth[t] = depth[cur] + k
        object.__setattr__(self, "_depth", depth)

    @classmethod
    def empty(cls) -> Taxonomy:
        return cls({ROOT: None})

    def __len__(self) -> int:
        return len(self.parents)

    def __contains__(self, name: object) -> bool:
        return name in self.parents

    @property
    def types(self) -> list[str]:
        return list(self.parents)

    def canonical_type(self, term: str) -> CanonicalType:
        hit = self._lookup.get(_fold(term))
        if hit is not None:
            return CanonicalType(hit, True)
        return CanonicalType(term.strip(), False)

    def _known(self, name: str, lenient: bool) -> str:
        if name in self.parents:
            return name
        if lenient:
            return name
        raise UnknownTypeError(f"unknown type {name!r}", entry=name)

    def parent(self, name: str, lenient: bool = False) -> str | None:
        self._known(name, lenient)
        if name in self.parents:
            return self.parents[name]
        return ROOT

    def ancestors(self, name: str, lenient: bool = False) -> list[str]:
        """``name`` followed by its ancestors up to and including ``Thing``."""
        out = [self._known(name, lenient)]
        cur = self.parent(name, lenient)
        while cur is not None:
            out.append(cur)
            cur = self.parents[cur]
        return out

    def depth(self, name: str, lenient: bool = False) -> int:
        self._known(name, lenient)
        return self._depth.get(name, 1)

    def is_subtype(self, a: str, b: str, lenient: bool = False) -> bool:
        self._known(b, lenient)
        return b in self.ancestors(a, lenient)

    def generalize(self, a: str, b: str, lenient: bool = False) -> str:
        """Least common ancestor of ``a`` and ``b``."""
        up_b = set(self.ancestors(b, lenient))
        for t in self.ancestors(a, lenient):
            if t in up_b:
                return t
        raise AssertionError("tree has a single root")  # unreachable

    def generalize_all(self, names: Iterable[str], lenient: bool = False) -> str:
        names = list(names)
        acc = names[0]
        for t in names[1:]:
            acc = self.generalize(acc, t, lenient)
        return acc

    def to_dict(self) -> dict:
        by_canon: dict[str, list[str]] = {}
        for alias, canon in self.aliases.items():
            by_canon.setdefault(canon, []).append(alias)
        return {
            "types": [
                {"name": name, "parent": parent, "aliases": sorted(by_canon.get(name, []))}
                for name, parent in self.parents.items()
                if name != ROOT
            ]
        }


def load_taxonomy(document: Mapping | str | PathLike) -> Taxonomy:
    """Validate a taxonomy document (mapping, or path to a JSON file)."""
    if not isinstance(document, Mapping):
        with open(document, encoding="utf-8") as fh:
            document = json.load(fh)
    entries = document.get("types")
    if not isinstance(entries, list):
        raise TaxonomyError("taxonomy document needs a 'types' list")

    parents: dict[str, str | None] = {ROOT: None}
    folded_names: dict[str, str] = {_fold(ROOT): ROOT}
    raw_aliases: list[tuple[str, str]] = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, Mapping) or not isinstance(entry.get("name"), str) or not entry["name"].strip():
            raise TaxonomyError(f"types[{i}]: entry needs a non-empty 'name'", entry=str(i))
        name = entry["name"].strip()
        if name == ROOT:
            raise DuplicateTypeError(f"{ROOT!r} is implied and must not be declared", entry=name)
        if _fold(name) in folded_names:
            raise DuplicateTypeError(f"duplicate type name {name!r}", entry=name)
        parent = entry.get("parent", ROOT)
        if not isinstance(parent, str) or not parent.strip():
            raise TaxonomyError(f"type {name!r}: parent must be a type name", entry=name)
        parents[name] = parent.strip()
        folded_names[_fold(name)] = name
        for alias in entry.get("aliases", []) or []:
            if not isinstance(alias, str) or not alias.strip():
                raise AliasConflictError(f"type {name!r}: aliases must be non-empty text", entry=name)
            raw_aliases.append((alias, name))

    for name, parent in parents.items():
        if parent is not None and parent not in parents:
            raise UnknownParentError(f"type {name!r} has unknown parent {parent!r}", entry=name)

    for name in parents:
        seen = set()
        cur: str | None = name
        while cur is not None:
            if cur in seen:
                raise CycleError(f"parent links of {name!r} form a cycle", entry=name)
            seen.add(cur)
            cur = parents[cur]

    aliases: dict[str, str] = {}
    for alias, canon in raw_aliases:
        key = _fold(alias)
        if key in folded_names and folded_names[key] != canon:
            raise AliasConflictError(
                f"alias {alias!r} of {canon!r} collides with type {folded_names[key]!r}", entry=alias
            )
        if key in aliases and aliases[key] != canon:
            raise AliasConflictError(
                f"alias {alias!r} maps to both {aliases[key]!r} and {canon!r}", entry=alias
            )
        if key != _fold(canon):
            aliases[key] = canon
    return Taxonomy(parents, aliases)
