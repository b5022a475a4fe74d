"""Optional live fetcher for PubMed E-utilities (esearch + efetch) that writes
corpus JSONL."""

from __future__ import annotations

import calendar
import json
import logging
import os
import time
import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass

import httpx

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/"
# esearch refuses retstart beyond this; larger windows are split by day
ESEARCH_MAX = 9999
DEFAULT_QUERY = '("{start}"[PDAT] : "{end}"[PDAT]) AND "journal article"[Publication Type]'
RETRY_STATUS = {429, 500, 502, 503, 504}
MAX_ATTEMPTS = 5

_MONTHS = {name.lower(): i for i, name in enumerate(calendar.month_abbr) if name}


class FetchError(RuntimeError):
    pass


@dataclass
class FetchPlan:
    year: int
    month: int | None = None
    batch_size: int = 200
    rate_limit: float | None = None
    api_key: str | None = None
    query_template: str = DEFAULT_QUERY

    def __post_init__(self):
        if self.api_key is None:
            self.api_key = os.environ.get("PUBMED_API_KEY") or None
        if self.rate_limit is None:
            self.rate_limit = 10.0 if self.api_key else 3.0
        if not 1 <= self.batch_size <= 10000:
            raise ValueError("batch_size must be in [1, 10000]")
        if self.rate_limit <= 0:
            raise ValueError("rate_limit must be positive")
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValueError("month must be in 1..12")

    def windows(self) -> list[tuple[str, str]]:
        if self.month is None:
            return [(f"{self.year}/01/01", f"{self.year}/12/31")]
        last = calendar.monthrange(self.year, self.month)[1]
        return [(f"{self.year}/{self.month:02d}/01", f"{self.year}/{self.month:02d}/{last:02d}")]

    def term(self, start: str, end: str) -> str:
        return self.query_template.format(start=start, end=end, year=self.year)


class RateLimiter:
    """At most ``rate`` calls in any sliding one-second window."""

    def __init__(self, rate: float, clock=time.monotonic, sleep=time.sleep):
        self.rate = rate
        self.clock = clock
        self.sleep = sleep
        self.calls: deque[float] = deque()
        self.limit = max(1, int(rate))

    def wait(self) -> None:
        now = self.clock()
        if self.rate < 1:
            if self.calls:
                ready = self.calls[-1] + 1.0 / self.rate
                if now < ready:
                    self.sleep(ready - now)
                    # sleep returns no earlier than asked; guard against clock rounding
                    now = max(self.clock(), ready)
        else:
            while True:
                while self.calls and self.calls[0] + 1.0 <= now:
                    self.calls.popleft()
                if len(self.calls) < self.limit:
                    break
                ready = self.calls[0] + 1.0
                self.sleep(ready - now)
                now = max(self.clock(), ready)
        self.calls.append(now)


class EutilsClient:
    def __init__(
        self,
        plan: FetchPlan,
        base_url: str = DEFAULT_BASE_URL,
        transport: httpx.BaseTransport | None = None,
        clock=time.monotonic,
        sleep=time.sleep,
        backoff: float = 1.0,
    ):
        self.plan = plan
        self.sleep = sleep
        self.backoff = backoff
        self.limiter = RateLimiter(plan.rate_limit, clock, sleep)
        self.http = httpx.Client(base_url=base_url.rstrip("/") + "/", transport=transport, timeout=60.0)
        self.request_log: list[float] = []

    def close(self):
        self.http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _get(self, endpoint: str, params: dict) -> httpx.Response:
        params = dict(params)
        if self.plan.api_key:
            params["api_key"] = self.plan.api_key
        last = None
        for attempt in range(MAX_ATTEMPTS):
            self.limiter.wait()
            self.request_log.append(self.limiter.calls[-1])
            try:
                resp = self.http.get(endpoint, params=params)
            except httpx.TransportError as exc:
                last = repr(exc)
            else:
                if resp.status_code == 200:
                    return resp
                last = f"HTTP {resp.status_code}"
                if resp.status_code not in RETRY_STATUS:
                    break
            if attempt < MAX_ATTEMPTS - 1:
                delay = self.backoff * 2 ** attempt
                log.warning("%s failed (%s); retrying in %.1fs", endpoint, last, delay)
                self.sleep(delay)
        raise FetchError(f"{endpoint} failed after retries: {last}")

    def _esearch(self, term: str, retstart: int, retmax: int) -> tuple[int, list[str]]:
        resp = self._get("esearch.fcgi", {
            "db": "pubmed", "term": term, "retmode": "json",
            "retstart": retstart, "retmax": retmax,
        })
        result = resp.json()["esearchresult"]
        return int(result.get("count", 0)), list(result.get("idlist", []))

    def _search_window(self, start: str, end: str) -> list[str]:
        term = self.plan.term(start, end)
        size = self.plan.batch_size
        count, ids = self._esearch(term, 0, size)
        if count > ESEARCH_MAX + 1 and start != end:
            return self._search_by_day(start, end)
        while len(ids) < count:
            _, page = self._esearch(term, len(ids), size)
            if not page:
                break
            ids.extend(page)
        return ids

    def _search_by_day(self, start: str, end: str) -> list[str]:
        y, m0, _ = map(int, start.split("/"))
        _, m1, _ = map(int, end.split("/"))
        ids = []
        for m in range(m0, m1 + 1):
            for d in range(1, calendar.monthrange(y, m)[1] + 1):
                day = f"{y}/{m:02d}/{d:02d}"
                ids.extend(self._search_window(day, day))
        return ids

    def search_ids(self) -> list[str]:
        """All pmids in the plan's date window, in page order, deduplicated."""
        seen: set[str] = set()
        out = []
        for start, end in self.plan.windows():
            for pmid in self._search_window(start, end):
                if pmid not in seen:
                    seen.add(pmid)
                    out.append(pmid)
        return out

    def _efetch(self, ids: list[str]) -> dict[str, dict]:
        resp = self._get("efetch.fcgi", {"db": "pubmed", "id": ",".join(ids), "retmode": "xml"})
        return parse_pubmed_xml(resp.text)

    def fetch_records(self, ids: list[str]):
        """Yield corpus JSON objects in input order.

        A failed or incomplete batch is retried one id at a time; ids that still
        cannot be fetched or parsed are skipped and counted in ``self.skipped``.
        Exhausted retries on a single-id request propagate as FetchError.
        """
        self.skipped = 0
        size = self.plan.batch_size
        for i in range(0, len(ids), size):
            batch = ids[i:i + size]
            try:
                found = self._efetch(batch)
            except (FetchError, ET.ParseError) as exc:
                log.warning("batch of %d failed (%s); fetching individually", len(batch), exc)
                found = {}
            for pmid in [p for p in batch if p not in found]:
                try:
                    found.update(self._efetch([pmid]))
                except ET.ParseError:
                    pass
            for pmid in batch:
                if pmid in found:
                    yield found[pmid]
                else:
                    self.skipped += 1
                    log.warning("pmid %s could not be fetched or parsed", pmid)


def _month_number(text: str | None) -> int | None:
    if not text:
        return None
    text = text.strip()
    if text.isdigit():
        m = int(text)
        return m if 1 <= m <= 12 else None
    return _MONTHS.get(text[:3].lower())


def _pub_month(article: ET.Element) -> int | None:
    pub = article.find("Journal/JournalIssue/PubDate")
    if pub is not None:
        month = _month_number(pub.findtext("Month"))
        if month is None:
            medline = pub.findtext("MedlineDate")  # e.g. "1999 Jun-Jul"
            if medline and len(medline.split()) > 1:
                month = _month_number(medline.split()[1][:3])
        if month is not None:
            return month
    for date in article.findall("ArticleDate"):
        if date.get("DateType", "Electronic") == "Electronic":
            month = _month_number(date.findtext("Month"))
            if month is not None:
                return month
    return None


def _pub_year(article: ET.Element) -> int | None:
    for path in ("Journal/JournalIssue/PubDate/Year", "ArticleDate/Year"):
        text = article.findtext(path)
        if text and text.strip().isdigit():
            return int(text)
    medline = article.findtext("Journal/JournalIssue/PubDate/MedlineDate")
    if medline and medline[:4].isdigit():
        return int(medline[:4])
    return None


def parse_pubmed_xml(text: str) -> dict[str, dict]:
    """Map pmid -> corpus JSON object for each parsable PubmedArticle."""
    root = ET.fromstring(text)
    out = {}
    for art in root.iter("PubmedArticle"):
        citation = art.find("MedlineCitation")
        if citation is None:
            continue
        pmid = citation.findtext("PMID")
        article = citation.find("Article")
        if not pmid or article is None:
            continue
        year = _pub_year(article)
        if year is None:
            log.warning("pmid %s has no publication year", pmid)
            continue
        issn = article.findtext("Journal/ISSN") or citation.findtext("MedlineJournalInfo/ISSNLinking")
        mesh = [
            d.text.strip()
            for d in citation.findall("MeshHeadingList/MeshHeading/DescriptorName")
            if d.text
        ]
        out[pmid.strip()] = {
            "pmid": pmid.strip(),
            "year": year,
            "month": _pub_month(article),
            "journal_issn": issn.strip() if issn else None,
            "journal_title": (article.findtext("Journal/Title") or "").strip() or None,
            "mesh": mesh,
        }
    return out


def fetch_to_jsonl(plan: FetchPlan, out_path, base_url: str = DEFAULT_BASE_URL, transport=None, **client_kw) -> tuple[int, int]:
    """Search and fetch; write JSONL. Returns (lines written, skipped)."""
    written = 0
    with EutilsClient(plan, base_url, transport, **client_kw) as client:
        ids = client.search_ids()
        log.info("found %d pmids for %s", len(ids), plan)
        with open(out_path, "w", encoding="utf-8") as fh:
            for obj in client.fetch_records(ids):
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
                written += 1
        return written, client.skipped
