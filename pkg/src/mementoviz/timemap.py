"""Core Memento data model: original resources, capture datetimes, TimeMaps.

All types here are immutable values; they can be shared freely between
threads. TimeMaps keep their mementos sorted ascending by capture datetime
(ties broken by URI) and deduplicated by memento URI.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from email.utils import format_datetime, parsedate_to_datetime
from typing import Iterable, Sequence
from urllib.parse import urlsplit


class InvertedRange(ValueError):
    """Raised when a date-range filter has start > end."""


@dataclass(frozen=True, slots=True)
class OriginalUri:
    """An original (live-web) resource address."""

    value: str

    def __post_init__(self) -> None:
        parts = urlsplit(self.value)
        if parts.scheme not in ("http", "https") or not parts.netloc:
            raise ValueError(f"not an absolute http(s) URI: {self.value!r}")

    def __str__(self) -> str:
        return self.value


class ArchiveKind(enum.Enum):
    """Supported web archives. Values double as short cache labels."""

    INTERNET_ARCHIVE = "ia"
    ARCHIVE_IT = "ait"


@dataclass(frozen=True, slots=True)
class ArchiveSource:
    """Which archive to query; Archive-It is addressed per collection.

    An absent collection number means "all", which Archive-It accepts as a
    literal path segment spanning every collection.
    """

    kind: ArchiveKind
    collection: str = "all"

    def __post_init__(self) -> None:
        c = self.collection
        if not c:
            raise ValueError("collection must be non-empty (use 'all' for no collection)")
        if c != "all" and not (c.isascii() and c.isdigit()):
            raise ValueError(f"collection must be 'all' or a decimal integer string: {c!r}")

    @property
    def label(self) -> str:
        return self.kind.value


@dataclass(frozen=True, order=True, slots=True)
class MementoDatetime:
    """A capture instant: UTC, second precision.

    Round-trips losslessly between the RFC 1123 form used in link-format
    (``Sun, 06 Nov 1994 08:49:37 GMT``) and the compact 14-digit form used
    inside archive URLs (``19941106084937``).
    """

    instant: datetime

    def __post_init__(self) -> None:
        if self.instant.tzinfo is None or self.instant.utcoffset() != timedelta(0):
            raise ValueError("instant must be timezone-aware UTC")
        if self.instant.microsecond != 0:
            raise ValueError("instant must have second precision")

    @classmethod
    def from_timestamp14(cls, text: str) -> "MementoDatetime":
        if len(text) != 14 or not (text.isascii() and text.isdigit()):
            raise ValueError(f"not a 14-digit timestamp: {text!r}")
        parsed = datetime.strptime(text, "%Y%m%d%H%M%S")
        return cls(parsed.replace(tzinfo=timezone.utc))

    @classmethod
    def from_http_date(cls, text: str) -> "MementoDatetime":
        try:
            parsed = parsedate_to_datetime(text)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"not an RFC 1123 date: {text!r}") from exc
        if parsed.tzinfo is None:
            parsed = parsed.replace(tzinfo=timezone.utc)
        return cls(parsed.astimezone(timezone.utc))

    @property
    def timestamp14(self) -> str:
        return self.instant.strftime("%Y%m%d%H%M%S")

    @property
    def http_date(self) -> str:
        return format_datetime(self.instant, usegmt=True)

    def __str__(self) -> str:
        return self.timestamp14


@dataclass(frozen=True, slots=True)
class MementoRecord:
    """One archived capture: its URI-M, when it was captured, and the
    original resource whose TimeMap produced it."""

    uri_m: str
    datetime: MementoDatetime
    source_uri_r: OriginalUri

    def __post_init__(self) -> None:
        if not self.uri_m:
            raise ValueError("uri_m must be non-empty")

    @property
    def sort_key(self) -> tuple[MementoDatetime, str]:
        return (self.datetime, self.uri_m)


@dataclass(frozen=True, slots=True)
class TimeMap:
    """A datetime-ordered list of mementos for one or more original URIs."""

    uri_rs: tuple[OriginalUri, ...]
    mementos: tuple[MementoRecord, ...]

    def __post_init__(self) -> None:
        if not self.uri_rs:
            raise ValueError("a TimeMap needs at least one original URI")
        if len(set(self.uri_rs)) != len(self.uri_rs):
            raise ValueError("uri_rs must be unique")
        keys = [m.sort_key for m in self.mementos]
        if keys != sorted(keys):
            raise ValueError("mementos must be sorted by (datetime, uri_m)")
        uri_ms = [m.uri_m for m in self.mementos]
        if len(set(uri_ms)) != len(uri_ms):
            raise ValueError("mementos must be unique by uri_m")

    @classmethod
    def build(
        cls,
        uri_rs: Iterable[OriginalUri],
        records: Iterable[MementoRecord],
    ) -> "TimeMap":
        """Normalize arbitrary record order: dedup by uri_m keeping the
        first occurrence, then sort."""
        unique_uri_rs = list(dict.fromkeys(uri_rs))
        seen: dict[str, MementoRecord] = {}
        for record in records:
            seen.setdefault(record.uri_m, record)
        ordered = sorted(seen.values(), key=lambda m: m.sort_key)
        return cls(tuple(unique_uri_rs), tuple(ordered))

    def __len__(self) -> int:
        return len(self.mementos)

    def datetimes(self) -> list[MementoDatetime]:
        return [m.datetime for m in self.mementos]

    def date_range(self) -> tuple[MementoDatetime, MementoDatetime]:
        if not self.mementos:
            raise ValueError("empty TimeMap has no date range")
        return (self.mementos[0].datetime, self.mementos[-1].datetime)


@dataclass(frozen=True, slots=True)
class Histogram:
    """Memento counts binned by calendar month (UTC), gaps materialized."""

    bins: tuple[tuple[str, int], ...]

    def total(self) -> int:
        return sum(count for _, count in self.bins)


def merge_timemaps(maps: Sequence[TimeMap]) -> TimeMap:
    """Union of several TimeMaps, re-sorted into one global date order.

    Records keep their source_uri_r so later stages know which original
    each memento came from. A uri_m appearing in several inputs keeps the
    earliest-listed map's record.
    """
    if not maps:
        raise ValueError("merge_timemaps needs at least one TimeMap")
    uri_rs: list[OriginalUri] = []
    records: list[MementoRecord] = []
    for tm in maps:
        uri_rs.extend(tm.uri_rs)
        records.extend(tm.mementos)
    return TimeMap.build(uri_rs, records)


def filter_by_date_range(
    tm: TimeMap, start: MementoDatetime, end: MementoDatetime
) -> TimeMap:
    """Keep mementos with start <= datetime <= end, both ends inclusive."""
    if start > end:
        raise InvertedRange(f"start {start} is after end {end}")
    kept = tuple(m for m in tm.mementos if start <= m.datetime <= end)
    return TimeMap(tm.uri_rs, kept)


def month_label(dt: MementoDatetime) -> str:
    return dt.instant.strftime("%Y-%m")


def build_histogram_from_datetimes(datetimes: Sequence[MementoDatetime]) -> Histogram:
    """Histogram over raw datetimes; months with no captures between the
    first and last bin appear with a zero count."""
    if not datetimes:
        return Histogram(())
    counts: dict[tuple[int, int], int] = {}
    for dt in datetimes:
        key = (dt.instant.year, dt.instant.month)
        counts[key] = counts.get(key, 0) + 1
    year, month = min(counts)
    last = max(counts)
    bins: list[tuple[str, int]] = []
    while (year, month) <= last:
        bins.append((f"{year:04d}-{month:02d}", counts.get((year, month), 0)))
        month += 1
        if month > 12:
            year, month = year + 1, 1
    return Histogram(tuple(bins))


def build_histogram(tm: TimeMap) -> Histogram:
    return build_histogram_from_datetimes(tm.datetimes())
