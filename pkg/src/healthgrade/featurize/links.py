"""Hyperlink counts and domain popularity ranks."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence
from urllib.parse import urlsplit

import tldextract

from ..errors import DataError

log = logging.getLogger(__name__)

DEFAULT_RANK = 10_000_001

# offline: use the public-suffix snapshot bundled with tldextract
_extract = tldextract.TLDExtract(suffix_list_urls=(), cache_dir=None)


@lru_cache(maxsize=65536)
def registered_domain(host: str) -> str:
    """Reduce a host to its registrable domain (``www.a.co.uk`` -> ``a.co.uk``)."""
    host = host.lower().rstrip(".")
    ext = _extract(host)
    if ext.domain and ext.suffix:
        return f"{ext.domain}.{ext.suffix}"
    return host


def url_domain(url: str) -> str | None:
    try:
        host = urlsplit(url).hostname
    except ValueError:
        return None
    return registered_domain(host) if host else None


@dataclass(frozen=True)
class RankTable:
    ranks: Mapping[str, int] = field(default_factory=dict)
    default_rank: int = DEFAULT_RANK

    def __post_init__(self):
        bad = [d for d, r in self.ranks.items() if r < 1]
        if bad:
            raise ValueError(f"ranks must be >= 1: {bad[:3]}")

    def rank(self, domain: str) -> int:
        return self.ranks.get(domain, self.default_rank)

    @classmethod
    def from_csv_text(cls, text: str, default_rank: int = DEFAULT_RANK) -> "RankTable":
        ranks = {}
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or row[0].startswith("#") or (lineno == 1 and row[0].strip() == "domain"):
                continue
            if len(row) != 2:
                raise DataError(f"rank table line {lineno}: expected 'domain,rank'")
            try:
                ranks[registered_domain(row[0].strip())] = int(row[1])
            except ValueError:
                raise DataError(f"rank table line {lineno}: rank {row[1]!r} is not an integer") from None
        return cls(ranks, default_rank)

    @classmethod
    def load(cls, path=None, default_rank: int = DEFAULT_RANK) -> "RankTable":
        if path is None:
            text = resources.files("healthgrade.data").joinpath("ranks.csv").read_text("utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return cls.from_csv_text(text, default_rank)

    def to_dict(self) -> dict:
        return {"ranks": dict(sorted(self.ranks.items())), "default_rank": self.default_rank}

    @classmethod
    def from_dict(cls, d: dict) -> "RankTable":
        return cls(d["ranks"], d["default_rank"])


@dataclass(frozen=True)
class LinkSummary:
    internal: int
    external: int
    external_domains: tuple[str, ...]  # distinct, sorted


def link_summary(source_url: str, links: Sequence[str]) -> LinkSummary:
    home = url_domain(source_url)
    internal = external = 0
    domains = set()
    for link in links:
        d = url_domain(link)
        if d is None:
            log.warning("skipping unparsable link %r", link)
            continue
        if d == home:
            internal += 1
        else:
            external += 1
            domains.add(d)
    return LinkSummary(internal, external, tuple(sorted(domains)))


def rank_values(summary: LinkSummary, domains: Sequence[str], table: RankTable) -> dict[int, float]:
    """Sparse ``{position in domains: rank}`` for the linked external domains."""
    pos = {d: i for i, d in enumerate(domains)}
    return {pos[d]: float(table.rank(d)) for d in summary.external_domains if d in pos}
