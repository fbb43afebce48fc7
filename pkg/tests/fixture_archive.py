"""In-process web archive test double.

Serves link-format TimeMaps at wayback-style paths plus the memento HTML
pages they point to, all over real HTTP on a loopback port. Failure modes
(status codes, slow responses) are injectable per path, and every request
is recorded so tests can assert cache effectiveness.
"""

from __future__ import annotations

import sys
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from email.utils import format_datetime
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


@dataclass
class _Response:
    status: int = 200
    body: bytes = b""
    content_type: str = "text/html; charset=utf-8"
    delay: float = 0.0
    location: str | None = None


def http_date_of(ts14: str) -> str:
    parsed = datetime.strptime(ts14, "%Y%m%d%H%M%S").replace(tzinfo=timezone.utc)
    return format_datetime(parsed, usegmt=True)


class FixtureArchive:
    def __init__(self):
        self._responses: dict[str, _Response] = {}
        self._hits: list[str] = []
        self._lock = threading.Lock()

        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):  # noqa: N802 (http.server API)
                with outer._lock:
                    outer._hits.append(self.path)
                    response = outer._responses.get(self.path)
                if response is None:
                    self.send_error(404)
                    return
                if response.delay:
                    time.sleep(response.delay)
                self.send_response(response.status)
                self.send_header("Content-Type", response.content_type)
                if response.location is not None:
                    self.send_header("Location", response.location)
                self.send_header("Content-Length", str(len(response.body)))
                self.end_headers()
                self.wfile.write(response.body)

            def log_message(self, *args):
                pass

        class Server(ThreadingHTTPServer):
            def handle_error(self, request, client_address):
                # clients time out and hang up mid-response on purpose in
                # the slow-archive tests; that's not worth a traceback
                exc = sys.exc_info()[1]
                if isinstance(exc, (BrokenPipeError, ConnectionResetError)):
                    return
                super().handle_error(request, client_address)

        self._server = Server(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._stopped = False

    def start(self) -> "FixtureArchive":
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._stopped:
            return
        self._stopped = True
        self._server.shutdown()
        self._server.server_close()

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    @property
    def ia_template(self) -> str:
        return self.base_url + "/timemap/link/{uri_r}"

    @property
    def ait_template(self) -> str:
        return self.base_url + "/{collection}/timemap/link/{uri_r}"

    # ------------------------------------------------------------- priming

    def set_response(
        self,
        path: str,
        body: bytes = b"",
        status: int = 200,
        content_type: str = "text/html; charset=utf-8",
        delay: float = 0.0,
    ) -> None:
        with self._lock:
            self._responses[path] = _Response(status, body, content_type, delay)

    def set_redirect(self, path: str, location: str) -> None:
        with self._lock:
            self._responses[path] = _Response(status=302, location=location)

    def memento_uri(self, ts14: str, uri_r: str) -> str:
        return f"{self.base_url}/web/{ts14}/{uri_r}"

    def add_site(
        self,
        uri_r: str,
        captures: list[tuple[str, bytes]],
        collections: tuple[str, ...] = (),
    ) -> list[str]:
        """Register a site with (14-digit timestamp, html) captures.

        Serves the TimeMap at the wayback-style path (and under each given
        Archive-It collection path) and each memento page. Returns the
        memento URIs in capture order.
        """
        uri_ms = []
        entries = []
        for ts14, page in captures:
            uri_m = self.memento_uri(ts14, uri_r)
            uri_ms.append(uri_m)
            entries.append((uri_m, http_date_of(ts14)))
            self.set_response(f"/web/{ts14}/{uri_r}", page)
        body = self.link_format_body(uri_r, entries)
        self.set_timemap_body(uri_r, body, collections)
        return uri_ms

    def set_timemap_body(
        self, uri_r: str, body: bytes, collections: tuple[str, ...] = ()
    ) -> None:
        self.set_response(
            f"/timemap/link/{uri_r}", body, content_type="application/link-format"
        )
        for collection in collections:
            self.set_response(
                f"/{collection}/timemap/link/{uri_r}",
                body,
                content_type="application/link-format",
            )

    def link_format_body(self, uri_r: str, mementos: list[tuple[str, str]]) -> bytes:
        """Hand-assembled link-format, shaped like real archive output."""
        lines = [
            f'<{uri_r}>; rel="original"',
            f'<{self.base_url}/timemap/link/{uri_r}>; rel="self"; '
            'type="application/link-format"',
        ]
        last = len(mementos) - 1
        for i, (uri_m, http_date) in enumerate(mementos):
            rel = "memento"
            if i == 0 and i == last:
                rel = "first last memento"
            elif i == 0:
                rel = "first memento"
            elif i == last:
                rel = "last memento"
            lines.append(f'<{uri_m}>; rel="{rel}"; datetime="{http_date}"')
        return (",\n".join(lines) + "\n").encode("utf-8")

    # ------------------------------------------------------------ queries

    def hits(self, prefix: str = "") -> list[str]:
        with self._lock:
            return [h for h in self._hits if h.startswith(prefix)]

    def reset_hits(self) -> None:
        with self._lock:
            self._hits.clear()
