"""Summarization jobs: state machine, progress events, and the pipeline.

A job walks fetch -> date-filter -> sample -> per-URI cache reconcile ->
fingerprint missing -> threshold sweep, then parks at menu_ready until the
user picks a representative count; rendering moves it to done. Every stage
appends monotonically numbered progress events which the SSE endpoint
replays and live-streams.

Jobs are in-memory with a TTL. All mutation happens under the job's
condition variable; readers take consistent snapshots.
"""

from __future__ import annotations

import io
import logging
import threading
import time
import uuid
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

from PIL import Image

from ..archives import ArchiveClient, EmptyTimeMap, raw_mode_uri
from ..cache import (
    CacheKey,
    CacheStore,
    DeleteExtra,
    HistogramCache,
    SimHashCache,
    ThumbnailCache,
    UpdateCache,
    apply_delete_extra,
    apply_update_cache,
    missing_records,
    reconcile,
)
from ..render import RenderBackend, Thumbnail, capture_thumbnail
from ..sampling import SamplingConfig, sample_timemap
from ..selection import EmptyInput, FingerprintedMemento, SummaryMenu, enumerate_menu
from ..simhash import SimHashValue, fingerprint_html
from ..timemap import (
    ArchiveSource,
    MementoDatetime,
    MementoRecord,
    OriginalUri,
    TimeMap,
    filter_by_date_range,
    merge_timemaps,
)

logger = logging.getLogger(__name__)

SMALL_TIMEMAP_LIMIT = 12  # below this, "generate all thumbnails" is offered

# Progress fractions per stage; hashing gets the big slice because it
# dominates wall time on cold caches.
FRACTION_FETCHED = 0.2
FRACTION_HASHED = 0.8
FRACTION_SELECTED = 0.9


class JobState(str, Enum):
    CREATED = "created"
    FETCHING = "fetching"
    HASHING = "hashing"
    SELECTING = "selecting"
    MENU_READY = "menu_ready"
    RENDERING = "rendering"
    DONE = "done"
    FAILED = "failed"


TERMINAL_STATES = frozenset({JobState.DONE, JobState.FAILED})


@dataclass(frozen=True, slots=True)
class ProgressEvent:
    seq: int
    stage: str
    detail: str
    fraction: float

    def payload(self) -> dict:
        return {
            "seq": self.seq,
            "stage": self.stage,
            "detail": self.detail,
            "fraction": round(self.fraction, 4),
        }


class JobError(Exception):
    """Pipeline failure carrying the user-facing detail message."""


@dataclass
class SummaryJob:
    id: str
    uri_rs: list[OriginalUri]
    archive: ArchiveSource
    date_range: tuple[MementoDatetime, MementoDatetime] | None
    created_at: float = field(default_factory=time.monotonic)

    state: JobState = JobState.CREATED
    events: list[ProgressEvent] = field(default_factory=list)
    menu: SummaryMenu | None = None
    working: list[MementoRecord] = field(default_factory=list)
    fingerprints: list[FingerprintedMemento] = field(default_factory=list)
    small_timemap: bool = False
    selection: list[int] | None = None
    thumbnails: dict[str, Thumbnail] = field(default_factory=dict)
    attempts: dict[str, int] = field(default_factory=dict)
    error: str | None = None

    def __post_init__(self) -> None:
        self._cond = threading.Condition()

    def emit(self, stage: JobState, detail: str, fraction: float) -> None:
        with self._cond:
            self.state = stage
            event = ProgressEvent(len(self.events) + 1, stage.value, detail, fraction)
            self.events.append(event)
            self._cond.notify_all()

    def fail(self, detail: str) -> None:
        with self._cond:
            self.error = detail
        self.emit(JobState.FAILED, detail, 1.0)

    def snapshot_events(self, after_seq: int = 0) -> list[ProgressEvent]:
        with self._cond:
            return [e for e in self.events if e.seq > after_seq]

    def wait_events(self, after_seq: int, timeout: float) -> list[ProgressEvent]:
        """Events with seq > after_seq, blocking up to timeout for new ones."""
        with self._cond:
            self._cond.wait_for(
                lambda: self.events and self.events[-1].seq > after_seq, timeout
            )
            return [e for e in self.events if e.seq > after_seq]

    def is_settled(self, after_seq: int) -> bool:
        """True when no event beyond after_seq exists and the job is terminal."""
        with self._cond:
            caught_up = not self.events or self.events[-1].seq <= after_seq
            return caught_up and self.state in TERMINAL_STATES


class JobStore:
    def __init__(self, ttl_seconds: float = 3600.0):
        self.ttl = ttl_seconds
        self._jobs: dict[str, SummaryJob] = {}
        self._lock = threading.Lock()

    def create(
        self,
        uri_rs: list[OriginalUri],
        archive: ArchiveSource,
        date_range: tuple[MementoDatetime, MementoDatetime] | None,
    ) -> SummaryJob:
        job = SummaryJob(uuid.uuid4().hex, uri_rs, archive, date_range)
        with self._lock:
            self._purge()
            self._jobs[job.id] = job
        return job

    def get(self, job_id: str) -> SummaryJob | None:
        with self._lock:
            self._purge()
            return self._jobs.get(job_id)

    def _purge(self) -> None:
        now = time.monotonic()
        expired = [
            jid
            for jid, job in self._jobs.items()
            if now - job.created_at > self.ttl and job.state in TERMINAL_STATES
        ]
        for jid in expired:
            del self._jobs[jid]


@dataclass
class PipelineDeps:
    """Everything the pipeline touches, injectable for tests."""

    client: ArchiveClient
    store: CacheStore
    thumbnails: ThumbnailCache
    backend: RenderBackend
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    fingerprint: Callable[[bytes], SimHashValue] = fingerprint_html
    viewport: tuple[int, int] = (1024, 768)
    thumbnail_width: int = 240
    base_settle_wait: float = 3.0
    render_timeout: float = 30.0
    render_workers: int = 4
    raw_memento_urls: bool = False

    def __post_init__(self) -> None:
        self._render_slots = threading.BoundedSemaphore(self.render_workers)


def cache_key_for(archive: ArchiveSource, uri_r: OriginalUri) -> CacheKey:
    return CacheKey(archive.label, archive.collection, uri_r)


def run_summary(job: SummaryJob, deps: PipelineDeps) -> None:
    """Drive a job from CREATED to MENU_READY (or FAILED)."""
    try:
        merged = _fetch_phase(job, deps)
        working = _filter_and_sample(job, deps, merged)
        fingerprints = _hash_phase(job, deps, working)
        _select_phase(job, fingerprints)
    except JobError as exc:
        job.fail(str(exc))
    except Exception as exc:  # keep the job's stream coherent on bugs too
        logger.exception("job %s crashed", job.id)
        job.fail(f"internal error: {exc}")


def _fetch_phase(job: SummaryJob, deps: PipelineDeps) -> TimeMap:
    job.emit(JobState.FETCHING, "fetching TimeMaps", 0.0)
    maps: list[TimeMap] = []
    empty: list[str] = []
    for i, uri_r in enumerate(job.uri_rs):
        try:
            tm = deps.client.fetch_timemap(job.archive, uri_r)
        except EmptyTimeMap:
            empty.append(str(uri_r))
            continue
        except Exception as exc:
            raise JobError(f"cannot fetch TimeMap for {uri_r}: {exc}") from exc
        deps.store.store_histogram(
            cache_key_for(job.archive, uri_r), HistogramCache.fresh(tm.datetimes())
        )
        maps.append(tm)
        job.emit(
            JobState.FETCHING,
            f"fetched {uri_r}: {len(tm)} mementos",
            FRACTION_FETCHED * (i + 1) / len(job.uri_rs),
        )
    if not maps:
        raise JobError("no mementos found for " + ", ".join(empty))
    return merge_timemaps(maps)


def _filter_and_sample(job: SummaryJob, deps: PipelineDeps, merged: TimeMap) -> TimeMap:
    if job.date_range is not None:
        merged = filter_by_date_range(merged, *job.date_range)
        if not merged.mementos:
            raise JobError("empty range: no mementos in the selected date range")
    job.small_timemap = len(merged) < SMALL_TIMEMAP_LIMIT
    sampled = sample_timemap(merged, deps.sampling)
    if len(sampled) < len(merged):
        job.emit(
            JobState.FETCHING,
            f"sampled {len(sampled)} of {len(merged)} mementos",
            FRACTION_FETCHED,
        )
    return sampled


def _hash_phase(
    job: SummaryJob, deps: PipelineDeps, working: TimeMap
) -> list[FingerprintedMemento]:
    """Reconcile per URI-R, fingerprint what is missing, and pair every
    surviving record with its fingerprint."""
    job.emit(JobState.HASHING, "reconciling fingerprint caches", FRACTION_FETCHED)

    per_uri: dict[OriginalUri, list[MementoRecord]] = {}
    for record in working.mementos:
        per_uri.setdefault(record.source_uri_r, []).append(record)

    plans: list[tuple[CacheKey, SimHashCache, list[MementoRecord], tuple[MementoRecord, ...]]] = []
    total_missing = 0
    for uri_r, live in per_uri.items():
        key = cache_key_for(job.archive, uri_r)
        cached = deps.store.load_simhash_or_empty(key)
        action = reconcile(cached, live)
        if isinstance(action, UpdateCache):
            missing = action.missing
            job.emit(
                JobState.HASHING,
                f"{uri_r}: {len(missing)} new mementos to fingerprint",
                FRACTION_FETCHED,
            )
        elif isinstance(action, DeleteExtra):
            dropped = len(cached.entries) - len(action.working)
            missing = missing_records(cached, live)
            job.emit(
                JobState.HASHING,
                f"{uri_r}: {dropped} cached mementos no longer archived",
                FRACTION_FETCHED,
            )
        else:
            missing = ()
            job.emit(JobState.HASHING, f"{uri_r}: fingerprint cache up to date", FRACTION_FETCHED)
        plans.append((key, cached, live, missing))
        total_missing += len(missing)

    hashed = 0

    def progress_fetch(uri_m: str) -> bytes:
        nonlocal hashed
        html = deps.client.fetch_memento_html(uri_m)
        hashed += 1
        span = FRACTION_HASHED - FRACTION_FETCHED
        job.emit(
            JobState.HASHING,
            f"fingerprinted {hashed}/{total_missing} mementos",
            FRACTION_FETCHED + span * hashed / max(total_missing, 1),
        )
        return html

    fingerprints: list[FingerprintedMemento] = []
    for key, cached, live, missing in plans:
        skipped: list[MementoRecord] = []
        cache_now = cached
        if missing:
            with deps.store.lock(key):
                cache_now, skipped = apply_update_cache(
                    deps.store, key, cached, missing, progress_fetch, deps.fingerprint
                )
            for record in skipped:
                job.emit(
                    JobState.HASHING,
                    f"memento unavailable, skipped: {record.uri_m}",
                    FRACTION_FETCHED,
                )
        skipped_uris = {r.uri_m for r in skipped}
        live_ok = [r for r in live if r.uri_m not in skipped_uris]
        entries = apply_delete_extra(cache_now, live_ok)
        by_datetime: dict[MementoDatetime, deque] = {}
        for entry in entries:
            by_datetime.setdefault(entry.datetime, deque()).append(entry)
        for record in live_ok:
            queue = by_datetime.get(record.datetime)
            if queue:
                entry = queue.popleft()
                fingerprints.append(FingerprintedMemento(record, entry.simhash))

    fingerprints.sort(key=lambda fp: fp.record.sort_key)
    return fingerprints


def _select_phase(job: SummaryJob, fingerprints: list[FingerprintedMemento]) -> None:
    job.emit(JobState.SELECTING, "sweeping distance thresholds", FRACTION_HASHED)
    try:
        menu = enumerate_menu(fingerprints)
    except EmptyInput as exc:
        raise JobError("no fingerprintable mementos remain") from exc
    with job._cond:
        job.working = [fp.record for fp in fingerprints]
        job.fingerprints = fingerprints
        job.menu = menu
    counts = ", ".join(str(c) for c in menu.counts())
    job.emit(JobState.MENU_READY, f"summary sizes available: {counts}", FRACTION_SELECTED)


def render_selection(job: SummaryJob, deps: PipelineDeps, indices: list[int]) -> list[Thumbnail]:
    """Render the chosen working-set indices and move the job to DONE.

    Thumbnails come from the disk cache when the same attempt was already
    rendered; failures yield placeholder thumbnails, never an abort.
    """
    records = [job.working[i] for i in indices]
    job.emit(JobState.RENDERING, f"rendering {len(records)} thumbnails", FRACTION_SELECTED)
    done_count = 0
    rendered: dict[str, Thumbnail] = {}
    total = len(records)

    def render_one(record: MementoRecord) -> Thumbnail:
        nonlocal done_count
        attempt = job.attempts.get(record.uri_m, 1)
        cached_png = deps.thumbnails.load(record.uri_m, attempt)
        if cached_png is not None:
            thumb = _thumbnail_from_png(record, cached_png, attempt)
        else:
            thumb = _capture(record, deps, attempt)
            if thumb.status == "ok":
                deps.thumbnails.store(record.uri_m, attempt, thumb.image)
        with job._cond:
            done_count += 1
            progress = done_count
        job.emit(
            JobState.RENDERING,
            f"rendered {progress}/{total}: {record.uri_m}",
            FRACTION_SELECTED + (1.0 - FRACTION_SELECTED) * progress / total,
        )
        return thumb

    threads_needed = min(deps.render_workers, total)
    if threads_needed <= 1:
        results = [render_one(r) for r in records]
    else:
        with ThreadPoolExecutor(max_workers=threads_needed) as pool:
            results = list(pool.map(render_one, records))

    for record, thumb in zip(records, results):
        rendered[record.uri_m] = thumb
    with job._cond:
        job.thumbnails.update(rendered)
        job.selection = list(indices)
        for record in records:
            job.attempts.setdefault(record.uri_m, 1)
    failures = sum(1 for t in results if t.status != "ok")
    detail = f"{total - failures}/{total} thumbnails rendered"
    if failures:
        detail += f" ({failures} failed)"
    job.emit(JobState.DONE, detail, 1.0)
    return results


def refresh_thumbnail_in_job(
    job: SummaryJob, deps: PipelineDeps, uri_m: str
) -> Thumbnail:
    """Re-capture one memento with the next attempt (longer settle wait)."""
    attempt = job.attempts.get(uri_m, 1) + 1
    record = next(r for r in job.working if r.uri_m == uri_m)
    thumb = _capture(record, deps, attempt)
    if thumb.status == "ok":
        deps.thumbnails.store(uri_m, attempt, thumb.image)
    with job._cond:
        job.attempts[uri_m] = attempt
        job.thumbnails[uri_m] = thumb
    return thumb


def _capture(record: MementoRecord, deps: PipelineDeps, attempt: int) -> Thumbnail:
    render_uri = raw_mode_uri(record.uri_m) if deps.raw_memento_urls else record.uri_m
    with deps._render_slots:
        thumb = capture_thumbnail(
            deps.backend,
            render_uri,
            record.datetime,
            record.source_uri_r,
            attempt=attempt,
            viewport=deps.viewport,
            thumbnail_width=deps.thumbnail_width,
            base_settle_wait=deps.base_settle_wait,
            timeout=deps.render_timeout,
        )
    if render_uri != record.uri_m:
        thumb = replace(thumb, uri_m=record.uri_m)
    return thumb


def _thumbnail_from_png(record: MementoRecord, png: bytes, attempt: int) -> Thumbnail:
    with Image.open(io.BytesIO(png)) as image:
        width, height = image.size
    return Thumbnail(
        uri_m=record.uri_m,
        datetime=record.datetime,
        source_uri_r=record.source_uri_r,
        image=png,
        width=width,
        height=height,
        attempt=attempt,
        status="ok",
    )
