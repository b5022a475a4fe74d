"""MeSH tree taxonomy: load a flattened descriptor→tree-number TSV and project
descriptors onto second-level Disease-branch (C) codes."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

HEADER = ("descriptor_ui", "descriptor_name", "tree_numbers")

_FIRST_SEGMENT = re.compile(r"^[A-Z][0-9]+$")
_SEGMENT = re.compile(r"^[0-9]+$")


class TaxonomyError(ValueError):
    """Malformed taxonomy source."""


class UnknownDescriptor(KeyError):
    """Descriptor is not present in the taxonomy."""


@dataclass(frozen=True, order=True)
class TreeCode:
    segments: tuple[str, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("empty tree code")
        if not _FIRST_SEGMENT.match(self.segments[0]):
            raise ValueError(f"bad first segment {self.segments[0]!r}")
        for seg in self.segments[1:]:
            if not _SEGMENT.match(seg):
                raise ValueError(f"bad segment {seg!r}")

    @classmethod
    def parse(cls, text: str) -> "TreeCode":
        text = text.strip()
        try:
            return cls(tuple(text.split(".")))
        except ValueError as exc:
            raise ValueError(f"unparsable tree code {text!r}: {exc}") from None

    @property
    def level(self) -> int:
        return len(self.segments)

    @property
    def branch(self) -> str:
        return self.segments[0][0]

    def truncate(self, level: int) -> "TreeCode":
        return TreeCode(self.segments[:level])

    def __str__(self) -> str:
        return ".".join(self.segments)


def first_level_parent(code: TreeCode | str) -> TreeCode | str:
    """Level-1 prefix of a tree code (``C04.588`` -> ``C04``).

    Returns the same type it was given, so string-keyed networks stay strings.
    """
    if isinstance(code, TreeCode):
        return code.truncate(1)
    return code.split(".", 1)[0]


@dataclass
class MeshTaxonomy:
    # UI -> codes; names resolve through _by_name (casefolded) to a UI
    descriptors: dict[str, frozenset[TreeCode]] = field(default_factory=dict)
    names: dict[str, str] = field(default_factory=dict)
    labels: dict[TreeCode, str] = field(default_factory=dict)
    source: str | None = None
    _by_name: dict[str, str] = field(default_factory=dict, repr=False)
    _owner: dict[TreeCode, str] = field(default_factory=dict, repr=False)

    def resolve(self, descriptor: str) -> str:
        """Return the descriptor UI for a UI (case-sensitive) or a name (case-insensitive)."""
        if descriptor in self.descriptors:
            return descriptor
        ui = self._by_name.get(descriptor.strip().casefold())
        if ui is None:
            raise UnknownDescriptor(descriptor)
        return ui

    def __contains__(self, descriptor: str) -> bool:
        try:
            self.resolve(descriptor)
        except UnknownDescriptor:
            return False
        return True

    def codes(self, descriptor: str) -> frozenset[TreeCode]:
        return self.descriptors[self.resolve(descriptor)]

    def label(self, code: TreeCode | str) -> str:
        if isinstance(code, str):
            code = TreeCode.parse(code)
        return self.labels.get(code, str(code))

    def add(self, ui: str, name: str, codes) -> None:
        codes = frozenset(codes)
        if ui in self.descriptors:
            self.descriptors[ui] = self.descriptors[ui] | codes
        else:
            self.descriptors[ui] = codes
            self.names[ui] = name
            self._by_name[name.casefold()] = ui
        # a code shared by several descriptors takes the name of the smallest UI,
        # so labels do not depend on row order
        for code in codes:
            owner = self._owner.get(code)
            if owner is None or ui < owner:
                self._owner[code] = ui
                self.labels[code] = self.names[ui]


def second_level_c_codes(tax: MeshTaxonomy, descriptor: str) -> set[TreeCode]:
    """Distinct level-2 C-branch prefixes of a descriptor's tree codes.

    Raises UnknownDescriptor if the descriptor is absent; a known descriptor
    without any C code of level >= 2 gives an empty set.
    """
    return {
        code.truncate(2)
        for code in tax.codes(descriptor)
        if code.branch == "C" and code.level >= 2
    }


def load_taxonomy(path: str | Path) -> MeshTaxonomy:
    tax = MeshTaxonomy(source=str(path))
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HEADER:
            raise TaxonomyError(f"{path}:1: expected header {HEADER}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise TaxonomyError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            ui, name, trees = (c.strip() for c in row)
            if not ui or not name:
                raise TaxonomyError(f"{path}:{lineno}: empty descriptor UI or name")
            try:
                codes = [TreeCode.parse(t) for t in trees.split(";") if t.strip()]
            except ValueError as exc:
                raise TaxonomyError(f"{path}:{lineno}: {exc}") from None
            if not codes:
                raise TaxonomyError(f"{path}:{lineno}: no tree numbers")
            tax.add(ui, name, codes)
    return tax


def dump_taxonomy(tax: MeshTaxonomy, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\t".join(HEADER) + "\n")
        for ui in sorted(tax.descriptors):
            trees = ";".join(str(c) for c in sorted(tax.descriptors[ui]))
            fh.write(f"{ui}\t{tax.names[ui]}\t{trees}\n")
