"""Article records, journal stratification (I / NI / NI-month) and reduction of
articles to sets of second-level topic codes."""

from __future__ import annotations

import calendar
import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .mesh import MeshTaxonomy, UnknownDescriptor, second_level_c_codes

log = logging.getLogger(__name__)


def normalize_issn(issn: str | None) -> str | None:
    if not issn:
        return None
    issn = issn.strip().upper().replace(" ", "")
    if len(issn) == 8 and "-" not in issn:
        issn = issn[:4] + "-" + issn[4:]
    return issn or None


def normalize_title(title: str | None) -> str | None:
    if not title:
        return None
    title = " ".join(title.split()).casefold()
    return title or None


@dataclass(frozen=True)
class ArticleRecord:
    pmid: str
    year: int
    month: int  # 0 = unknown
    journal_issn: str | None
    journal_title: str | None
    descriptors: tuple[str, ...]

    @property
    def journal_key(self) -> str | None:
        return normalize_issn(self.journal_issn) or normalize_title(self.journal_title)

    def to_json(self) -> dict:
        return {
            "pmid": self.pmid,
            "year": self.year,
            "month": self.month or None,
            "journal_issn": self.journal_issn,
            "journal_title": self.journal_title,
            "mesh": list(self.descriptors),
        }


def _record_from_obj(obj) -> ArticleRecord:
    if not isinstance(obj, dict):
        raise ValueError("not a JSON object")
    pmid = obj.get("pmid")
    if not isinstance(pmid, (str, int)) or isinstance(pmid, bool) or not str(pmid).strip():
        raise ValueError("missing pmid")
    year = obj.get("year")
    if not isinstance(year, int) or isinstance(year, bool) or year <= 0:
        raise ValueError(f"bad year {year!r}")
    month = obj.get("month")
    if month is None:
        month = 0
    if not isinstance(month, int) or isinstance(month, bool) or not 0 <= month <= 12:
        raise ValueError(f"bad month {month!r}")
    mesh = obj.get("mesh", [])
    if not isinstance(mesh, list) or not all(isinstance(m, str) for m in mesh):
        raise ValueError("mesh must be a list of strings")
    issn, title = obj.get("journal_issn"), obj.get("journal_title")
    for value in (issn, title):
        if value is not None and not isinstance(value, str):
            raise ValueError("journal fields must be strings or null")
    return ArticleRecord(str(pmid).strip(), year, month, issn, title, tuple(mesh))


def parse_records(path: str | Path) -> tuple[list[ArticleRecord], int]:
    """Read corpus JSONL; returns (records in file order, skipped line count).

    Malformed lines and duplicate pmids are skipped with a logged warning.
    Blank lines are ignored without counting.
    """
    records: list[ArticleRecord] = []
    seen: set[str] = set()
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = _record_from_obj(json.loads(line))
                if rec.pmid in seen:
                    raise ValueError(f"duplicate pmid {rec.pmid}")
            except ValueError as exc:  # JSONDecodeError is a ValueError
                skipped += 1
                log.warning("%s:%d: skipped record: %s", path, lineno, exc)
                continue
            seen.add(rec.pmid)
            records.append(rec)
    return records, skipped


def write_records(records, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class StratumConfig:
    year: int
    impactful_journals: frozenset[str]
    ni_month: int = 6

    def __post_init__(self):
        if not 1 <= self.ni_month <= 12:
            raise ValueError(f"ni_month must be in 1..12, got {self.ni_month}")
        if not self.impactful_journals:
            raise ValueError("impactful_journals is empty")

    @property
    def month_label(self) -> str:
        return "NI-" + calendar.month_name[self.ni_month]

    def is_impactful(self, rec: ArticleRecord) -> bool:
        issn = normalize_issn(rec.journal_issn)
        if issn and issn in self.impactful_journals:
            return True
        title = normalize_title(rec.journal_title)
        return bool(title and title in self.impactful_journals)


def load_journal_list(path: str | Path, year: int) -> frozenset[str]:
    """Impactful journal keys (normalized ISSNs and titles) for one year."""
    keys: set[str] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["issn", "journal_title", "year", "stratum"]
        if reader.fieldnames != expected:
            raise ValueError(f"{path}: expected header {','.join(expected)}")
        for lineno, row in enumerate(reader, start=2):
            if row["stratum"].strip() != "I":
                raise ValueError(f"{path}:{lineno}: unknown stratum {row['stratum']!r}")
            try:
                row_year = int(row["year"])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad year {row['year']!r}") from None
            if row_year != year:
                continue
            for key in (normalize_issn(row["issn"]), normalize_title(row["journal_title"])):
                if key:
                    keys.add(key)
    return frozenset(keys)


@dataclass
class Strata:
    impactful: list[ArticleRecord]
    non_impactful: list[ArticleRecord]
    ni_month: list[ArticleRecord]
    rejected: int = 0
    month_label: str = "NI-June"

    def counts(self) -> dict[str, int]:
        return {
            "I": len(self.impactful),
            "NI": len(self.non_impactful),
            self.month_label: len(self.ni_month),
            "rejected_year": self.rejected,
            # every journal absent from the list is NI, so this equals |NI|
            "unlisted_journal_articles": len(self.non_impactful),
        }

    def items(self):
        yield "I", self.impactful
        yield "NI", self.non_impactful
        yield self.month_label, self.ni_month


def stratify(records, cfg: StratumConfig) -> Strata:
    """Split one year's records into I, NI and the NI month subsample.

    Records from other years are rejected and counted. Records with unknown
    month (0) stay in NI but never enter the month subsample.
    """
    out = Strata([], [], [], month_label=cfg.month_label)
    for rec in records:
        if rec.year != cfg.year:
            out.rejected += 1
            continue
        if cfg.is_impactful(rec):
            out.impactful.append(rec)
        else:
            out.non_impactful.append(rec)
            if rec.month == cfg.ni_month:
                out.ni_month.append(rec)
    if out.rejected:
        log.warning("rejected %d records with year != %d", out.rejected, cfg.year)
    return out


@dataclass(frozen=True)
class TopicBag:
    pmid: str
    topics: frozenset[str]

    def to_json(self) -> dict:
        return {"pmid": self.pmid, "topics": sorted(self.topics)}


@dataclass
class BagStats:
    articles: int = 0
    kept: int = 0
    dropped: int = 0
    unknown_descriptors: int = 0
    unknown_names: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "articles": self.articles,
            "kept": self.kept,
            "dropped_no_topic": self.dropped,
            "unknown_descriptors": self.unknown_descriptors,
        }


def to_topic_bags(corpus, tax: MeshTaxonomy) -> tuple[list[TopicBag], BagStats]:
    stats = BagStats()
    bags: list[TopicBag] = []
    for rec in corpus:
        stats.articles += 1
        topics: set[str] = set()
        for desc in rec.descriptors:
            try:
                topics.update(str(c) for c in second_level_c_codes(tax, desc))
            except UnknownDescriptor:
                stats.unknown_descriptors += 1
                stats.unknown_names[desc] = stats.unknown_names.get(desc, 0) + 1
        if topics:
            bags.append(TopicBag(rec.pmid, frozenset(topics)))
            stats.kept += 1
        else:
            stats.dropped += 1
    return bags, stats


def write_bags(bags, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for bag in bags:
            fh.write(json.dumps(bag.to_json()) + "\n")


def read_bags(path: str | Path) -> list[TopicBag]:
    bags = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                bags.append(TopicBag(str(obj["pmid"]), frozenset(obj["topics"])))
    return bags
