"""Shared builders for model objects in tests."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from mementoviz.timemap import MementoDatetime, MementoRecord, OriginalUri, TimeMap

EXAMPLE_URI = OriginalUri("http://example.com/")


def dt(ts14: str) -> MementoDatetime:
    return MementoDatetime.from_timestamp14(ts14)


def at(year=2016, month=1, day=1, hour=0, minute=0, second=0) -> MementoDatetime:
    return MementoDatetime(datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc))


def spaced_datetimes(n: int, start: MementoDatetime, step: timedelta) -> list[MementoDatetime]:
    out = []
    current = start.instant
    for _ in range(n):
        out.append(MementoDatetime(current.replace(microsecond=0)))
        current += step
    return out


def record(when: MementoDatetime, uri_r: OriginalUri = EXAMPLE_URI, suffix: str = "") -> MementoRecord:
    uri_m = f"http://archive.test/web/{when.timestamp14}{suffix}/{uri_r}"
    return MementoRecord(uri_m, when, uri_r)


def timemap(datetimes: list[MementoDatetime], uri_r: OriginalUri = EXAMPLE_URI) -> TimeMap:
    seen: dict[str, int] = {}
    records = []
    for when in datetimes:
        n = seen.get(when.timestamp14, 0)
        seen[when.timestamp14] = n + 1
        records.append(record(when, uri_r, suffix=f"-{n}" if n else ""))
    return TimeMap.build([uri_r], records)
