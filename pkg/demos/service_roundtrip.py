"""Drive the HTTP service end to end on localhost: a miniature archive
server stands in for the Internet Archive, the stub backend stands in for
a browser, and plain requests calls walk the three phases.

Run:  python3 demos/service_roundtrip.py
"""

import json
import threading
import time
from datetime import datetime, timezone
from email.utils import format_datetime
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import requests
import uvicorn

from mementoviz.archives import ArchiveClient, ArchiveEndpoints
from mementoviz.cache import CacheStore, ThumbnailCache
from mementoviz.render import StubRenderBackend
from mementoviz.service.app import create_app
from mementoviz.service.config import ServiceConfig
from mementoviz.service.jobs import PipelineDeps

SITE = "http://demo.example/"
OUT = Path(__file__).parent / "output"


def mini_archive() -> tuple[ThreadingHTTPServer, str]:
    """A few captures of one page, served in link-format + HTML."""
    pages = {}
    entries = []
    for i in range(8):
        ts = f"2015{1 + i:02d}01120000"
        when = datetime.strptime(ts, "%Y%m%d%H%M%S").replace(tzinfo=timezone.utc)
        html = f"<html><body><h1>edition {i // 3}</h1><p>news {i}</p></body></html>"
        pages[f"/web/{ts}/{SITE}"] = html.encode()
        entries.append((ts, format_datetime(when, usegmt=True)))

    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):
            if self.path.startswith("/timemap/link/"):
                host = f"http://{self.server.server_address[0]}:{self.server.server_address[1]}"
                lines = [f'<{SITE}>; rel="original"']
                lines += [
                    f'<{host}/web/{ts}/{SITE}>; rel="memento"; datetime="{hd}"'
                    for ts, hd in entries
                ]
                body = (",\n".join(lines)).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/link-format")
            elif self.path in pages:
                body = pages[self.path]
                self.send_response(200)
                self.send_header("Content-Type", "text/html")
            else:
                self.send_error(404)
                return
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *_):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    host, port = server.server_address
    return server, f"http://{host}:{port}"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    archive, archive_base = mini_archive()
    cache_dir = OUT / "cache"
    deps = PipelineDeps(
        client=ArchiveClient(
            endpoints=ArchiveEndpoints(ia_timemap=archive_base + "/timemap/link/{uri_r}")
        ),
        store=CacheStore(cache_dir),
        thumbnails=ThumbnailCache(cache_dir / "thumbnails"),
        backend=StubRenderBackend(),
        base_settle_wait=0.0,
    )
    app = create_app(ServiceConfig(cache_dir=cache_dir), deps)
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning"))
    threading.Thread(target=server.run, daemon=True).start()
    while not server.started:
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    base = f"http://127.0.0.1:{port}"
    print("service at", base, "— archive double at", archive_base)

    info = requests.get(f"{base}/api/timemap", params={"uri_r": SITE}).json()
    print(f"\nphase 1: {info['memento_count']} mementos,",
          f"small_timemap={info['small_timemap']}, bins={len(info['histogram'])}")

    job_id = requests.post(
        f"{base}/api/summarize", json={"uri_rs": [SITE], "archive": "ia"}
    ).json()["job_id"]
    print("\nphase 2: job", job_id)
    with requests.get(f"{base}/api/jobs/{job_id}/events", stream=True) as stream:
        for line in stream.iter_lines(decode_unicode=True):
            if line and line.startswith("data:"):
                event = json.loads(line[5:])
                print(f"  [{event['fraction']:.2f}] {event['stage']}: {event['detail']}")
                if event["stage"] in ("menu_ready", "failed"):
                    break

    status = requests.get(f"{base}/api/jobs/{job_id}").json()
    print("  menu:", [(o["count"], o["threshold"]) for o in status["menu"]])

    print("\nphase 3: generating all thumbnails (small TimeMap)")
    thumbs = requests.post(
        f"{base}/api/jobs/{job_id}/thumbnails", json={"selection": "all"}
    ).json()["thumbnails"]
    print(f"  rendered {len(thumbs)} thumbnails")

    urims = requests.get(f"{base}/api/jobs/{job_id}/urims").text
    (OUT / "urims.txt").write_text(urims)
    gif = requests.get(f"{base}/api/jobs/{job_id}/gif", params={"interval": 1.0, "timestamp": 1})
    (OUT / "service_summary.gif").write_bytes(gif.content)
    embed = requests.post(
        f"{base}/api/jobs/{job_id}/embed",
        json={"kind": "grid", "included_uri_ms": [t["uri_m"] for t in thumbs]},
    ).json()
    (OUT / "embed_snippet.html").write_text(embed["html"] + "\n")
    print("\nwrote", OUT / "urims.txt")
    print("wrote", OUT / "service_summary.gif", f"({len(gif.content)} bytes)")
    print("wrote", OUT / "embed_snippet.html")

    server.should_exit = True
    archive.shutdown()


if __name__ == "__main__":
    main()
