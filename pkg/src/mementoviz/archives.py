"""HTTP client for web archives: TimeMap and memento fetching.

Only the Internet Archive and Archive-It ship; the endpoint templates are
configurable so tests (and any drift in the live services) can point at
other hosts without code changes.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

import requests

from .linkformat import MalformedLinkFormat, parse_link_format
from .timemap import ArchiveKind, ArchiveSource, OriginalUri, TimeMap

logger = logging.getLogger(__name__)

DEFAULT_USER_AGENT = "mementoviz/0.1 (webpage-change summarizer)"
DEFAULT_TIMEOUT = 30.0
MAX_REDIRECTS = 5

IA_TIMEMAP_TEMPLATE = "http://web.archive.org/web/timemap/link/{uri_r}"
AIT_TIMEMAP_TEMPLATE = "https://wayback.archive-it.org/{collection}/timemap/link/{uri_r}"


class ArchiveUnreachable(ConnectionError):
    """Could not reach the archive at all (connect failure or timeout)."""


class ArchiveError(Exception):
    """The archive answered, but not with a usable TimeMap."""

    def __init__(self, status: int, message: str = ""):
        super().__init__(message or f"archive returned HTTP {status}")
        self.status = status


class EmptyTimeMap(Exception):
    """The archive answered 2xx but the TimeMap holds no mementos.

    Distinct from ArchiveError so callers can say "no mementos found"
    instead of reporting a failure.
    """


class MementoUnreachable(ConnectionError):
    """Could not fetch a memento (connect failure or timeout)."""


class MementoGone(Exception):
    """The memento URL answered 4xx/5xx; treat it as currently unavailable."""

    def __init__(self, status: int):
        super().__init__(f"memento returned HTTP {status}")
        self.status = status


@dataclass(frozen=True, slots=True)
class ArchiveEndpoints:
    """TimeMap URL templates per archive; override for fixture servers."""

    ia_timemap: str = IA_TIMEMAP_TEMPLATE
    ait_timemap: str = AIT_TIMEMAP_TEMPLATE


def build_timemap_uri(
    archive: ArchiveSource,
    uri_r: OriginalUri,
    endpoints: ArchiveEndpoints = ArchiveEndpoints(),
) -> str:
    """TimeMap address for a URI-R at the given archive. The raw URI-R is
    appended unencoded, matching how the archives address TimeMaps."""
    if archive.kind is ArchiveKind.INTERNET_ARCHIVE:
        return endpoints.ia_timemap.format(uri_r=uri_r)
    return endpoints.ait_timemap.format(collection=archive.collection, uri_r=uri_r)


_WAYBACK_TS_SEGMENT = re.compile(r"/(\d{14})/")


def raw_mode_uri(uri_m: str) -> str:
    """Rewrite a wayback-style URI-M to its raw (``id_``) form, which skips
    the archive's replay banner when rendering. Returns the input unchanged
    when no 14-digit path segment is present."""
    return _WAYBACK_TS_SEGMENT.sub(r"/\1id_/", uri_m, count=1)


class ArchiveClient:
    """Blocking HTTP client with a fixed user agent and bounded redirects.

    Instances are safe to share across threads; requests.Session handles
    per-connection state internally.
    """

    def __init__(
        self,
        endpoints: ArchiveEndpoints = ArchiveEndpoints(),
        user_agent: str = DEFAULT_USER_AGENT,
        timeout: float = DEFAULT_TIMEOUT,
        max_redirects: int = MAX_REDIRECTS,
    ):
        self.endpoints = endpoints
        self.timeout = timeout
        self._session = requests.Session()
        self._session.max_redirects = max_redirects
        self._session.headers["User-Agent"] = user_agent

    def fetch_timemap(self, archive: ArchiveSource, uri_r: OriginalUri) -> TimeMap:
        """Fetch and parse the TimeMap for uri_r, following redirects.

        Raises ArchiveUnreachable, ArchiveError, or EmptyTimeMap. Per-record
        parse warnings are logged, not raised.
        """
        uri_t = build_timemap_uri(archive, uri_r, self.endpoints)
        try:
            response = self._session.get(uri_t, timeout=self.timeout, allow_redirects=True)
        except (requests.Timeout, requests.ConnectionError, requests.TooManyRedirects) as exc:
            raise ArchiveUnreachable(f"cannot reach {uri_t}: {exc}") from exc
        if not 200 <= response.status_code < 300:
            raise ArchiveError(response.status_code, f"{uri_t} returned {response.status_code}")
        try:
            parsed = parse_link_format(response.content, uri_r)
        except MalformedLinkFormat as exc:
            raise ArchiveError(response.status_code, f"unparseable TimeMap from {uri_t}: {exc}")
        for warning in parsed.warnings:
            logger.warning("%s: %s", uri_t, warning)
        if not parsed.timemap.mementos:
            raise EmptyTimeMap(f"no mementos found for {uri_r}")
        return parsed.timemap

    def fetch_memento_html(self, uri_m: str, timeout: float | None = None) -> bytes:
        """GET a memento's HTML. 4xx/5xx means the memento is currently
        unavailable (MementoGone); the body may legitimately be empty."""
        try:
            response = self._session.get(
                uri_m, timeout=timeout if timeout is not None else self.timeout,
                allow_redirects=True,
            )
        except (requests.Timeout, requests.ConnectionError, requests.TooManyRedirects) as exc:
            raise MementoUnreachable(f"cannot fetch {uri_m}: {exc}") from exc
        if response.status_code >= 400:
            raise MementoGone(response.status_code)
        return response.content
