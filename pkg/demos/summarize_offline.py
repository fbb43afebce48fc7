"""Library walkthrough, no network: synthesize an archive's worth of page
captures, fingerprint them, sweep the distance thresholds, and render the
chosen representatives into thumbnails and an animated GIF.

Run:  python3 demos/summarize_offline.py
Outputs land in demos/output/.
"""

from datetime import datetime, timedelta, timezone
from pathlib import Path

from mementoviz import (
    FingerprintedMemento,
    MementoDatetime,
    MementoRecord,
    OriginalUri,
    TimeMap,
    build_histogram,
    enumerate_menu,
    fingerprint_html,
    hamming_distance,
)
from mementoviz.gif import GifSpec, assemble_gif
from mementoviz.render import StubRenderBackend, capture_thumbnail

OUT = Path(__file__).parent / "output"
SITE = OriginalUri("http://demo.example/")


def synthetic_captures() -> list[tuple[MementoRecord, bytes]]:
    """A page that mostly stays the same, with three real redesigns."""
    designs = [
        "<html><body class='v1'><h1>Welcome</h1><p>spring catalog {}</p></body></html>",
        "<html><body class='v2'><h1>New look!</h1><nav>home news</nav><p>issue {}</p></body></html>",
        "<html><body class='v3'><h1>Portal</h1><table><tr><td>feed {}</td></tr></table></body></html>",
    ]
    captures = []
    start = datetime(2014, 1, 1, tzinfo=timezone.utc)
    for i in range(36):
        design = designs[min(i // 12, 2)]
        html = design.format(i).encode()
        when = MementoDatetime(start + timedelta(days=30 * i))
        uri_m = f"http://archive.demo/web/{when.timestamp14}/{SITE}"
        captures.append((MementoRecord(uri_m, when, SITE), html))
    return captures


def main() -> None:
    OUT.mkdir(exist_ok=True)
    captures = synthetic_captures()
    tm = TimeMap.build([SITE], [record for record, _ in captures])
    print(f"TimeMap: {len(tm)} mementos, {tm.date_range()[0]} .. {tm.date_range()[1]}")
    print("histogram:", dict(build_histogram(tm).bins[:6]), "...")

    html_by_uri = {record.uri_m: html for record, html in captures}
    fps = [
        FingerprintedMemento(m, fingerprint_html(html_by_uri[m.uri_m]))
        for m in tm.mementos
    ]
    print("\nconsecutive fingerprint distances:")
    print(" ", [hamming_distance(a.simhash, b.simhash) for a, b in zip(fps, fps[1:])])

    menu = enumerate_menu(fps)
    print("\nsummary menu (count @ threshold):")
    for option in menu.options:
        print(f"  {option.count:3d} thumbnails @ distance >= {option.threshold}")
    if menu.three_option:
        print("  plus the quick first/central/last triple:", menu.three_option)

    chosen = min(menu.options, key=lambda o: abs(o.count - 5))
    print(f"\nrendering the {chosen.count}-thumbnail summary with the stub backend")
    backend = StubRenderBackend()
    thumbnails = [
        capture_thumbnail(backend, fps[i].record.uri_m, fps[i].record.datetime, SITE)
        for i in chosen.indices
    ]
    for thumb in thumbnails:
        path = OUT / f"thumb_{thumb.datetime.timestamp14}.png"
        path.write_bytes(thumb.image)
        print("  wrote", path)

    gif = assemble_gif(thumbnails, GifSpec(frame_interval=0.8, timestamp_watermark=True))
    gif_path = OUT / "summary.gif"
    gif_path.write_bytes(gif)
    print(f"\nwrote {gif_path} ({len(gif)} bytes, {len(thumbnails)} frames)")


if __name__ == "__main__":
    main()
