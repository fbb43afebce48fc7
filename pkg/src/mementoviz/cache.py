"""File-backed caches for TimeMap datetimes and fingerprints.

Per (archive, collection, URI-R) there are two JSON cache files: the
histogram cache holds the datetime list of the full TimeMap, and the
fingerprint cache holds (datetime, uri_m, hex) entries for mementos whose
fingerprints were already computed. Reconciling a fingerprint cache with
the currently-archived working set decides whether fingerprints are
missing (compute just those) or the archive dropped mementos (work with
the surviving entries, keep the file intact in case they come back).

Writes are atomic (temp file + rename) and serialize deterministically;
a file that fails to parse, or carries a different format_version, is
classified CacheCorrupt and is safest treated as a miss.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Literal, NamedTuple

from .archives import MementoGone, MementoUnreachable
from .simhash import FINGERPRINT_VERSION, SimHashValue
from .timemap import MementoDatetime, MementoRecord, OriginalUri

logger = logging.getLogger(__name__)

# The format version doubles as the fingerprint-scheme version: changing
# the token-hash seed invalidates every fingerprint cache on disk.
FORMAT_VERSION = FINGERPRINT_VERSION

_SAFE_FILENAME_CHARS = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._-"
)

CacheKind = Literal["histogram", "simhash"]


class CacheMiss(KeyError):
    """No cache file exists for this key."""


class CacheCorrupt(ValueError):
    """The cache file exists but cannot be trusted."""


@dataclass(frozen=True, slots=True)
class CacheKey:
    archive_label: str  # "ia" | "ait"
    collection: str
    uri_r: OriginalUri


def _encode_component(text: str) -> str:
    out = []
    for byte in text.encode("utf-8"):
        ch = chr(byte)
        out.append(ch if ch in _SAFE_FILENAME_CHARS else f"%{byte:02X}")
    return "".join(out)


def cache_key_filename(key: CacheKey, kind: CacheKind) -> str:
    """Deterministic, filesystem-safe name: kind, archive label, collection,
    and the percent-encoded URI-R joined by underscores."""
    return (
        f"{kind}_{_encode_component(key.archive_label)}"
        f"_{_encode_component(key.collection)}"
        f"_{_encode_component(str(key.uri_r))}.json"
    )


@dataclass(frozen=True, slots=True)
class HistogramCache:
    format_version: int
    fetched_at: MementoDatetime
    datetimes: tuple[MementoDatetime, ...]

    def __post_init__(self) -> None:
        values = [dt.timestamp14 for dt in self.datetimes]
        if values != sorted(values):
            raise ValueError("histogram cache datetimes must be sorted ascending")

    @classmethod
    def fresh(cls, datetimes: Iterable[MementoDatetime]) -> "HistogramCache":
        now = datetime.now(timezone.utc).replace(microsecond=0)
        return cls(FORMAT_VERSION, MementoDatetime(now), tuple(sorted(datetimes)))


@dataclass(frozen=True, slots=True)
class SimHashEntry:
    datetime: MementoDatetime
    uri_m: str
    simhash: SimHashValue

    @property
    def sort_key(self) -> tuple[MementoDatetime, str]:
        return (self.datetime, self.uri_m)


@dataclass(frozen=True, slots=True)
class SimHashCache:
    format_version: int
    entries: tuple[SimHashEntry, ...]

    def __post_init__(self) -> None:
        keys = [e.sort_key for e in self.entries]
        if keys != sorted(keys):
            raise ValueError("fingerprint cache entries must be sorted old to new")

    @classmethod
    def empty(cls) -> "SimHashCache":
        return cls(FORMAT_VERSION, ())


@dataclass(frozen=True, slots=True)
class UpToDate:
    pass


@dataclass(frozen=True, slots=True)
class UpdateCache:
    missing: tuple[MementoRecord, ...]


@dataclass(frozen=True, slots=True)
class DeleteExtra:
    working: tuple[SimHashEntry, ...]


ReconcileAction = UpToDate | UpdateCache | DeleteExtra


class UpdateOutcome(NamedTuple):
    cache: SimHashCache
    skipped: list[MementoRecord]


class CacheStore:
    """Directory of cache files with per-key write locks.

    Locks are advisory and in-process only: the service runs one writer per
    key at a time, concurrent readers are safe because writes are atomic.
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, key: CacheKey) -> threading.Lock:
        name = cache_key_filename(key, "simhash")
        with self._locks_guard:
            return self._locks.setdefault(name, threading.Lock())

    def path_for(self, key: CacheKey, kind: CacheKind) -> Path:
        return self.root / cache_key_filename(key, kind)

    def _write_atomic(self, path: Path, payload: dict) -> None:
        data = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
        fd, tmp_name = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise

    def _read_json(self, path: Path) -> dict:
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            raise CacheMiss(str(path)) from None
        try:
            payload = json.loads(raw)
        except ValueError as exc:
            raise CacheCorrupt(f"unparseable cache file {path.name}: {exc}") from exc
        if not isinstance(payload, dict):
            raise CacheCorrupt(f"cache file {path.name} is not a JSON object")
        if payload.get("format_version") != FORMAT_VERSION:
            raise CacheCorrupt(
                f"cache file {path.name} has format_version "
                f"{payload.get('format_version')!r}, expected {FORMAT_VERSION}"
            )
        return payload

    def store_histogram(self, key: CacheKey, cache: HistogramCache) -> None:
        payload = {
            "format_version": cache.format_version,
            "fetched_at": cache.fetched_at.timestamp14,
            "datetimes": [dt.timestamp14 for dt in cache.datetimes],
        }
        self._write_atomic(self.path_for(key, "histogram"), payload)

    def load_histogram(self, key: CacheKey) -> HistogramCache:
        path = self.path_for(key, "histogram")
        payload = self._read_json(path)
        try:
            return HistogramCache(
                payload["format_version"],
                MementoDatetime.from_timestamp14(payload["fetched_at"]),
                tuple(MementoDatetime.from_timestamp14(v) for v in payload["datetimes"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CacheCorrupt(f"bad histogram cache {path.name}: {exc}") from exc

    def store_simhash(self, key: CacheKey, cache: SimHashCache) -> None:
        payload = {
            "format_version": cache.format_version,
            "entries": [
                {
                    "datetime": e.datetime.timestamp14,
                    "uri_m": e.uri_m,
                    "simhash": e.simhash.hex,
                }
                for e in cache.entries
            ],
        }
        self._write_atomic(self.path_for(key, "simhash"), payload)

    def load_simhash(self, key: CacheKey) -> SimHashCache:
        path = self.path_for(key, "simhash")
        payload = self._read_json(path)
        try:
            entries = tuple(
                SimHashEntry(
                    MementoDatetime.from_timestamp14(e["datetime"]),
                    e["uri_m"],
                    SimHashValue(e["simhash"]),
                )
                for e in payload["entries"]
            )
            return SimHashCache(payload["format_version"], entries)
        except (KeyError, TypeError, ValueError) as exc:
            raise CacheCorrupt(f"bad fingerprint cache {path.name}: {exc}") from exc

    def load_simhash_or_empty(self, key: CacheKey) -> SimHashCache:
        try:
            return self.load_simhash(key)
        except CacheMiss:
            return SimHashCache.empty()
        except CacheCorrupt as exc:
            logger.warning("treating corrupt fingerprint cache as a miss: %s", exc)
            return SimHashCache.empty()


def missing_records(
    cached: SimHashCache, live: Iterable[MementoRecord]
) -> tuple[MementoRecord, ...]:
    """Live records whose capture datetimes have no cached fingerprint yet
    (multiset comparison, so repeated datetimes are budgeted)."""
    live = list(live)
    budget = dict(
        Counter(r.datetime for r in live) - Counter(e.datetime for e in cached.entries)
    )
    missing = []
    for record in live:
        if budget.get(record.datetime, 0) > 0:
            budget[record.datetime] -= 1
            missing.append(record)
    return tuple(missing)


def reconcile(cached: SimHashCache, live: list[MementoRecord]) -> ReconcileAction:
    """Compare cached fingerprint entries against the current working set
    by capture datetime.

    Cached entries the archive no longer serves win the classification:
    they must be dropped from the working set before anything else, since
    their mementos cannot be rendered. New fingerprints are picked up by a
    later reconcile once the working sets match again.
    """
    cached_counts = Counter(e.datetime for e in cached.entries)
    live_counts = Counter(r.datetime for r in live)
    if cached_counts - live_counts:
        return DeleteExtra(apply_delete_extra(cached, live))
    if live_counts - cached_counts:
        return UpdateCache(missing_records(cached, live))
    return UpToDate()


def apply_delete_extra(
    cached: SimHashCache, live: list[MementoRecord]
) -> tuple[SimHashEntry, ...]:
    """Working subset of cached entries whose datetimes the archive still
    serves. Never touches the cache file: dropped mementos may be archived
    again later, and their fingerprints stay valid."""
    budget = Counter(r.datetime for r in live)
    working = []
    for entry in cached.entries:
        if budget.get(entry.datetime, 0) > 0:
            budget[entry.datetime] -= 1
            working.append(entry)
    return tuple(working)


def apply_update_cache(
    store: CacheStore,
    key: CacheKey,
    cached: SimHashCache,
    missing: Iterable[MementoRecord],
    fetch_html: Callable[[str], bytes],
    fingerprint: Callable[[bytes], SimHashValue],
) -> UpdateOutcome:
    """Fingerprint only the missing records, merge with the cached entries,
    and overwrite the cache file with the sorted result.

    Cached fingerprints are never recomputed. A missing memento that turns
    out to be gone or unreachable is skipped and reported rather than
    failing the batch.
    """
    new_entries: list[SimHashEntry] = []
    skipped: list[MementoRecord] = []
    for record in missing:
        try:
            html = fetch_html(record.uri_m)
        except (MementoGone, MementoUnreachable) as exc:
            logger.warning("skipping unfetchable memento %s: %s", record.uri_m, exc)
            skipped.append(record)
            continue
        new_entries.append(SimHashEntry(record.datetime, record.uri_m, fingerprint(html)))
    merged = sorted((*cached.entries, *new_entries), key=lambda e: e.sort_key)
    new_cache = SimHashCache(FORMAT_VERSION, tuple(merged))
    store.store_simhash(key, new_cache)
    return UpdateOutcome(new_cache, skipped)


class ThumbnailCache:
    """Size-capped PNG store keyed by (uri_m, attempt).

    When the cap is exceeded after a write, the oldest files (by mtime) are
    deleted first. A refresh bumps the attempt number, so stale generations
    age out naturally.
    """

    def __init__(self, root: Path | str, max_bytes: int = 512 * 1024 * 1024):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.max_bytes = max_bytes
        self._write_lock = threading.Lock()

    def _path(self, uri_m: str, attempt: int) -> Path:
        digest = hashlib.sha256(uri_m.encode("utf-8")).hexdigest()
        return self.root / f"{digest}_{attempt}.png"

    def load(self, uri_m: str, attempt: int) -> bytes | None:
        try:
            return self._path(uri_m, attempt).read_bytes()
        except FileNotFoundError:
            return None

    def store(self, uri_m: str, attempt: int, png: bytes) -> None:
        path = self._path(uri_m, attempt)
        with self._write_lock:
            fd, tmp_name = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".png")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(png)
                os.replace(tmp_name, path)
            except BaseException:
                try:
                    os.unlink(tmp_name)
                except OSError:
                    pass
                raise
            self._evict()

    def _evict(self) -> None:
        files = [p for p in self.root.iterdir() if p.suffix == ".png"]
        total = sum(p.stat().st_size for p in files)
        if total <= self.max_bytes:
            return
        for path in sorted(files, key=lambda p: p.stat().st_mtime):
            try:
                size = path.stat().st_size
                path.unlink()
                total -= size
            except OSError:
                continue
            if total <= self.max_bytes:
                return
