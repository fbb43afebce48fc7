"""HTTP API for the three-phase workflow.

Phase 1: GET /api/timemap shows how many captures exist and when (the
histogram the UI brushes over). Phase 2: POST /api/summarize starts a job
that fingerprints captures and computes the representative-count menu;
progress streams over /api/jobs/{id}/events as server-sent events.
Phase 3: POST /api/jobs/{id}/thumbnails renders the chosen set, after
which the URI-M list, animated GIF, and embeddable pages are available.

Everything runs against injectable dependencies (archive client, caches,
render backend) so the whole API is testable with a fixture archive and
the deterministic stub renderer.
"""

from __future__ import annotations

import html as html_mod
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from urllib.parse import quote, urlencode

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, RedirectResponse, Response, StreamingResponse
from pydantic import BaseModel

from ..archives import ArchiveClient, ArchiveError, ArchiveUnreachable, EmptyTimeMap
from ..cache import CacheCorrupt, CacheMiss, CacheStore, HistogramCache, ThumbnailCache
from ..gif import GifSpec, NoRenderableFrames, assemble_gif
from ..render import StubRenderBackend, Thumbnail
from ..timemap import (
    ArchiveKind,
    ArchiveSource,
    MementoDatetime,
    OriginalUri,
    build_histogram_from_datetimes,
)
from .config import ServiceConfig
from .jobs import (
    JobState,
    JobStore,
    PipelineDeps,
    SummaryJob,
    cache_key_for,
    refresh_thumbnail_in_job,
    render_selection,
    run_summary,
)

logger = logging.getLogger(__name__)

EMBED_KINDS = ("grid", "slider")
SSE_KEEPALIVE_SECONDS = 1.0


class DateRangeBody(BaseModel):
    start: str
    end: str


class SummarizeRequest(BaseModel):
    uri_rs: list[str]
    archive: str
    collection: str = "all"
    date_range: DateRangeBody | None = None


class ThumbnailsRequest(BaseModel):
    selection: int | str | list[int]


class EmbedRequest(BaseModel):
    kind: str
    included_uri_ms: list[str]


def default_deps(config: ServiceConfig) -> PipelineDeps:
    if config.render_backend == "cdp":
        from ..cdp import CdpRenderBackend

        backend = CdpRenderBackend(config.cdp_endpoint)
    elif config.render_backend == "stub":
        backend = StubRenderBackend()
    else:
        raise ValueError(f"unknown render backend {config.render_backend!r}")
    client = ArchiveClient(
        endpoints=config.endpoints(),
        user_agent=config.user_agent,
        timeout=config.fetch_timeout,
    )
    return PipelineDeps(
        client=client,
        store=CacheStore(config.cache_dir),
        thumbnails=ThumbnailCache(
            config.cache_dir / "thumbnails", config.thumbnail_cache_max_bytes
        ),
        backend=backend,
        sampling=config.sampling,
        viewport=config.viewport,
        thumbnail_width=config.thumbnail_width,
        base_settle_wait=config.base_settle_wait,
        render_timeout=config.render_timeout,
        render_workers=config.render_workers,
        raw_memento_urls=config.raw_memento_urls,
    )


def _parse_archive(archive: str, collection: str) -> ArchiveSource:
    kinds = {k.value: k for k in ArchiveKind}
    if archive not in kinds:
        raise HTTPException(400, f"unknown archive {archive!r}; expected one of {sorted(kinds)}")
    try:
        return ArchiveSource(kinds[archive], collection or "all")
    except ValueError as exc:
        raise HTTPException(400, str(exc))


def _parse_uri_r(value: str) -> OriginalUri:
    try:
        return OriginalUri(value)
    except ValueError as exc:
        raise HTTPException(400, str(exc))


def _parse_datetime(value: str, *, end_of_day: bool) -> MementoDatetime:
    text = value.strip()
    if len(text) == 14 and text.isdigit():
        try:
            return MementoDatetime.from_timestamp14(text)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
    if len(text) == 10 and text[4] == "-" and text[7] == "-":
        digits = text.replace("-", "")
        suffix = "235959" if end_of_day else "000000"
        try:
            return MementoDatetime.from_timestamp14(digits + suffix)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
    raise HTTPException(400, f"dates must be YYYYMMDDhhmmss or YYYY-MM-DD: {value!r}")


def create_app(config: ServiceConfig | None = None, deps: PipelineDeps | None = None) -> FastAPI:
    config = config or ServiceConfig()
    deps = deps or default_deps(config)
    jobs = JobStore(ttl_seconds=config.job_ttl_seconds)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        app.state.executor.shutdown(wait=False, cancel_futures=True)

    app = FastAPI(title="mementoviz", lifespan=lifespan)
    app.state.config = config
    app.state.deps = deps
    app.state.jobs = jobs
    app.state.executor = ThreadPoolExecutor(max_workers=8, thread_name_prefix="summary")

    try:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
        )
    except ImportError:
        pass

    @app.exception_handler(RequestValidationError)
    async def invalid_params(request: Request, exc: RequestValidationError):
        # Bad query/body parameters are client errors, plain and simple.
        return JSONResponse({"detail": exc.errors()}, status_code=400)

    # ------------------------------------------------------------- phase 1

    @app.get("/api/timemap")
    def get_timemap(
        uri_r: list[str] = Query(...),
        archive: str = Query("ia"),
        collection: str = Query("all"),
    ):
        source = _parse_archive(archive, collection)
        uris = [_parse_uri_r(u) for u in uri_r]
        all_datetimes: list[MementoDatetime] = []
        for uri in uris:
            key = cache_key_for(source, uri)
            datetimes: list[MementoDatetime] | None = None
            try:
                datetimes = list(deps.store.load_histogram(key).datetimes)
            except CacheMiss:
                pass
            except CacheCorrupt as exc:
                logger.warning("treating corrupt histogram cache as a miss: %s", exc)
            if datetimes is None:
                try:
                    tm = deps.client.fetch_timemap(source, uri)
                except EmptyTimeMap:
                    continue
                except ArchiveUnreachable as exc:
                    raise HTTPException(502, str(exc))
                except ArchiveError as exc:
                    raise HTTPException(502, str(exc))
                datetimes = tm.datetimes()
                deps.store.store_histogram(key, HistogramCache.fresh(datetimes))
            all_datetimes.extend(datetimes)
        if not all_datetimes:
            raise HTTPException(404, "no mementos found")
        all_datetimes.sort()
        histogram = build_histogram_from_datetimes(all_datetimes)
        return {
            "memento_count": len(all_datetimes),
            "histogram": [{"month": m, "count": c} for m, c in histogram.bins],
            "date_range": {
                "start": all_datetimes[0].timestamp14,
                "end": all_datetimes[-1].timestamp14,
            },
            "small_timemap": len(all_datetimes) < 12,
        }

    # ------------------------------------------------------------- phase 2

    @app.post("/api/summarize")
    def summarize(body: SummarizeRequest):
        if not body.uri_rs:
            raise HTTPException(400, "at least one uri_r is required")
        source = _parse_archive(body.archive, body.collection)
        uris = [_parse_uri_r(u) for u in body.uri_rs]
        date_range = None
        if body.date_range is not None:
            start = _parse_datetime(body.date_range.start, end_of_day=False)
            end = _parse_datetime(body.date_range.end, end_of_day=True)
            if start > end:
                raise HTTPException(400, "inverted date range")
            date_range = (start, end)
        job = jobs.create(uris, source, date_range)
        app.state.executor.submit(run_summary, job, deps)
        return {"job_id": job.id}

    def _job_or_404(job_id: str) -> SummaryJob:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        return job

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        job = _job_or_404(job_id)
        menu = None
        three = None
        if job.menu is not None:
            menu = [
                {"count": o.count, "threshold": o.threshold, "indices": list(o.indices)}
                for o in job.menu.options
            ]
            if job.menu.three_option is not None:
                three = list(job.menu.three_option)
        # menu indices point into this working list; the timeline view also
        # needs it to draw non-representative mementos
        mementos = [
            {
                "uri_m": r.uri_m,
                "datetime": r.datetime.timestamp14,
                "source_uri_r": str(r.source_uri_r),
            }
            for r in job.working
        ]
        return {
            "id": job.id,
            "state": job.state.value,
            "uri_rs": [str(u) for u in job.uri_rs],
            "memento_count": len(job.working),
            "small_timemap": job.small_timemap,
            "mementos": mementos,
            "menu": menu,
            "three_option": three,
            "selection": job.selection,
            "error": job.error,
        }

    @app.get("/api/jobs/{job_id}/events")
    def job_events(job_id: str):
        job = _job_or_404(job_id)

        def stream():
            last = 0
            while True:
                events = job.wait_events(last, timeout=SSE_KEEPALIVE_SECONDS)
                if not events:
                    if job.is_settled(last):
                        return
                    yield ": keepalive\n\n"
                    continue
                for event in events:
                    last = event.seq
                    yield f"id: {event.seq}\ndata: {json.dumps(event.payload())}\n\n"
                if job.is_settled(last):
                    return

        return StreamingResponse(
            stream(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    # ------------------------------------------------------------- phase 3

    def _thumbnail_payload(job: SummaryJob, thumb: Thumbnail) -> dict:
        image_url = (
            f"/api/jobs/{job.id}/thumbnails/{quote(thumb.uri_m, safe='')}"
            f"/image?attempt={thumb.attempt}"
        )
        return {
            "uri_m": thumb.uri_m,
            "datetime": thumb.datetime.timestamp14,
            "source_uri_r": str(thumb.source_uri_r),
            "image_url": image_url,
            "status": thumb.status,
            "attempt": thumb.attempt,
            "width": thumb.width,
            "height": thumb.height,
        }

    @app.post("/api/jobs/{job_id}/thumbnails")
    def generate_thumbnails(job_id: str, body: ThumbnailsRequest):
        job = _job_or_404(job_id)
        if job.state not in (JobState.MENU_READY, JobState.DONE):
            raise HTTPException(409, f"job is {job.state.value}, not ready for thumbnails")
        assert job.menu is not None
        selection = body.selection
        if selection == "all":
            if not job.small_timemap:
                raise HTTPException(
                    400, "'all' is only available for TimeMaps with fewer than 12 mementos"
                )
            indices = list(range(len(job.working)))
        elif isinstance(selection, bool):
            raise HTTPException(400, "selection must be a count, 'all', or a list of indices")
        elif isinstance(selection, int):
            option = job.menu.option_for_count(selection)
            if option is not None:
                indices = list(option.indices)
            elif selection == 3 and job.menu.three_option is not None:
                indices = list(job.menu.three_option)
            else:
                raise HTTPException(400, f"count {selection} is not in the menu")
        elif isinstance(selection, list):
            if not selection:
                raise HTTPException(400, "explicit index selection must be non-empty")
            bad = [i for i in selection if not (0 <= i < len(job.working))]
            if bad:
                raise HTTPException(400, f"indices out of range: {bad}")
            indices = sorted(set(selection))
        else:
            raise HTTPException(400, "selection must be a count, 'all', or a list of indices")
        thumbs = render_selection(job, deps, indices)
        return {"thumbnails": [_thumbnail_payload(job, t) for t in thumbs]}

    @app.post("/api/jobs/{job_id}/thumbnails/{uri_m:path}/refresh")
    def refresh_thumbnail(job_id: str, uri_m: str):
        job = _job_or_404(job_id)
        if uri_m not in job.thumbnails:
            raise HTTPException(404, f"no thumbnail for {uri_m!r} in this job")
        thumb = refresh_thumbnail_in_job(job, deps, uri_m)
        return _thumbnail_payload(job, thumb)

    @app.get("/api/jobs/{job_id}/thumbnails/{uri_m:path}/image")
    def thumbnail_image(job_id: str, uri_m: str):
        job = _job_or_404(job_id)
        thumb = job.thumbnails.get(uri_m)
        if thumb is None:
            raise HTTPException(404, f"no thumbnail for {uri_m!r} in this job")
        return Response(thumb.image, media_type="image/png")

    def _selected_thumbnails(
        job: SummaryJob, include: list[str] | None
    ) -> list[Thumbnail]:
        if job.selection is None:
            raise HTTPException(409, "no thumbnail selection has been generated yet")
        records = [job.working[i] for i in job.selection]
        thumbs = [job.thumbnails[r.uri_m] for r in records if r.uri_m in job.thumbnails]
        if include is not None:
            wanted = set(include)
            thumbs = [t for t in thumbs if t.uri_m in wanted]
        return thumbs

    @app.get("/api/jobs/{job_id}/urims")
    def urim_list(job_id: str, include: list[str] | None = Query(None)):
        job = _job_or_404(job_id)
        thumbs = _selected_thumbnails(job, include)
        body = "".join(t.uri_m + "\n" for t in thumbs)
        return Response(body, media_type="text/plain; charset=utf-8")

    @app.get("/api/jobs/{job_id}/gif")
    def animated_gif(
        job_id: str,
        interval: float = Query(1.0),
        timestamp: int = Query(0),
        uristamp: int = Query(0),
        include: list[str] | None = Query(None),
    ):
        job = _job_or_404(job_id)
        thumbs = _selected_thumbnails(job, include)
        try:
            spec = GifSpec(
                frame_interval=interval,
                timestamp_watermark=bool(timestamp),
                uri_stamp=bool(uristamp),
            )
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        try:
            data = assemble_gif(thumbs, spec)
        except NoRenderableFrames as exc:
            raise HTTPException(409, str(exc))
        return Response(
            data,
            media_type="image/gif",
            headers={"Content-Disposition": 'attachment; filename="summary.gif"'},
        )

    @app.post("/api/jobs/{job_id}/embed")
    def embed_code(job_id: str, body: EmbedRequest, request: Request):
        job = _job_or_404(job_id)
        if body.kind not in EMBED_KINDS:
            raise HTTPException(400, f"kind must be one of {EMBED_KINDS}")
        if job.selection is None:
            raise HTTPException(409, "no thumbnail selection has been generated yet")
        known = set(job.thumbnails)
        unknown = [u for u in body.included_uri_ms if u not in known]
        if unknown:
            raise HTTPException(400, f"unknown uri_ms: {unknown}")
        base = config.public_base_url or str(request.base_url)
        if not base.endswith("/"):
            base += "/"
        query = urlencode([("include", u) for u in body.included_uri_ms], quote_via=quote)
        src = f"{base}embed/{body.kind}/{job.id}?{query}"
        width, height = (820, 640) if body.kind == "grid" else (520, 420)
        snippet = (
            f'<iframe src="{html_mod.escape(src)}" width="{width}" height="{height}" '
            f'frameborder="0" loading="lazy" title="webpage change summary"></iframe>'
        )
        return {"html": snippet, "src": src}

    @app.get("/embed/{kind}/{job_id}")
    def embed_page(kind: str, job_id: str, include: list[str] | None = Query(None)):
        if kind not in EMBED_KINDS:
            raise HTTPException(400, f"kind must be one of {EMBED_KINDS}")
        job = _job_or_404(job_id)
        thumbs = _selected_thumbnails(job, include)
        if not thumbs:
            raise HTTPException(404, "no thumbnails to embed")
        items = [_thumbnail_payload(job, t) for t in thumbs]
        multi_origin = len({t.source_uri_r for t in thumbs}) > 1
        page = _render_embed_html(kind, items, multi_origin)
        return HTMLResponse(page)

    @app.get("/")
    def root():
        if config.frontend_dir is not None:
            return RedirectResponse("/ui/")
        return JSONResponse(
            {
                "service": "mementoviz",
                "endpoints": [
                    "/api/timemap",
                    "/api/summarize",
                    "/api/jobs/{id}",
                    "/api/jobs/{id}/events",
                    "/api/jobs/{id}/thumbnails",
                    "/api/jobs/{id}/urims",
                    "/api/jobs/{id}/gif",
                    "/api/jobs/{id}/embed",
                ],
            }
        )

    if config.frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.frontend_dir, html=True), name="ui")

    return app


def _render_embed_html(kind: str, items: list[dict], multi_origin: bool) -> str:
    """Self-contained read-only page for iframes: no remove/refresh controls."""
    payload = json.dumps(items)
    if kind == "grid":
        body = """
<div id="grid"></div>
<script>
const items = __ITEMS__;
const grid = document.getElementById("grid");
for (const it of items) {
  const fig = document.createElement("figure");
  const a = document.createElement("a");
  a.href = it.uri_m; a.target = "_blank"; a.rel = "noopener";
  const img = document.createElement("img");
  img.src = it.image_url; img.alt = it.datetime; img.width = it.width; img.height = it.height;
  a.appendChild(img); fig.appendChild(a);
  const cap = document.createElement("figcaption");
  cap.textContent = __MULTI__ ? it.datetime + " \\u2014 " + it.source_uri_r : it.datetime;
  fig.appendChild(cap); grid.appendChild(fig);
}
</script>"""
    else:
        body = """
<div id="slider"><a id="link" target="_blank" rel="noopener"><img id="view"></a>
<div id="caption"></div></div>
<script>
const items = __ITEMS__;
let index = 0;
const view = document.getElementById("view");
const link = document.getElementById("link");
const caption = document.getElementById("caption");
function show(i) {
  index = Math.max(0, Math.min(items.length - 1, i));
  const it = items[index];
  view.src = it.image_url; link.href = it.uri_m;
  caption.textContent = (index + 1) + " / " + items.length + " \\u2014 " + it.datetime +
    (__MULTI__ ? " \\u2014 " + it.source_uri_r : "");
}
view.addEventListener("mousemove", (ev) => {
  const rect = view.getBoundingClientRect();
  show(Math.floor((ev.clientX - rect.left) / rect.width * items.length));
});
show(0);
</script>"""
    body = body.replace("__ITEMS__", payload).replace("__MULTI__", "true" if multi_origin else "false")
    return f"""<!doctype html>
<html><head><meta charset="utf-8"><title>webpage change summary</title>
<style>
body {{ margin: 8px; font: 13px/1.4 system-ui, sans-serif; background: #fafafa; }}
#grid {{ display: flex; flex-wrap: wrap; gap: 8px; }}
figure {{ margin: 0; }}
figcaption, #caption {{ color: #444; font-size: 11px; margin-top: 2px; }}
img {{ display: block; border: 1px solid #ccc; }}
</style></head>
<body>{body}</body></html>"""
