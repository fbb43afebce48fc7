"""RFC 7089 application/link-format parsing and serialization.

A TimeMap body is a comma-separated sequence of links::

    <http://a.example.org/>; rel="original",
    <http://archive.example.net/web/20000620180259/http://a.example.org/>
      ; rel="first memento"; datetime="Tue, 20 Jun 2000 18:02:59 GMT"

Commas appear inside quoted datetime values, so parsing scans characters
rather than splitting on commas. Links whose rel set includes ``memento``
become records; ``original`` links name the URI-R; ``self``/``timegate``
links are structural and produce nothing. A ``memento`` link missing a
parseable datetime is skipped and tallied as a warning instead of failing
the whole document: archives emit occasional junk entries.
"""

from __future__ import annotations

from typing import NamedTuple

from .timemap import MementoDatetime, MementoRecord, OriginalUri, TimeMap


class MalformedLinkFormat(ValueError):
    """The document does not parse as application/link-format at all."""


class ParsedTimeMap(NamedTuple):
    timemap: TimeMap
    warnings: list[str]


class _RawLink(NamedTuple):
    target: str
    params: list[tuple[str, str]]


class _Scanner:
    """Character scanner over a link-format document."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos]

    def skip_ws(self) -> None:
        while not self.eof() and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def expect(self, ch: str) -> None:
        if self.eof() or self.text[self.pos] != ch:
            raise MalformedLinkFormat(
                f"expected {ch!r} at offset {self.pos} in link-format document"
            )
        self.pos += 1

    def read_until(self, ch: str) -> str:
        end = self.text.find(ch, self.pos)
        if end < 0:
            raise MalformedLinkFormat(f"unterminated {ch!r} started near offset {self.pos}")
        out = self.text[self.pos : end]
        self.pos = end + 1
        return out

    def read_token(self) -> str:
        start = self.pos
        while not self.eof() and self.text[self.pos] not in ';,=" \t\r\n':
            self.pos += 1
        if self.pos == start:
            raise MalformedLinkFormat(f"expected a token at offset {start}")
        return self.text[start : self.pos]

    def read_quoted(self) -> str:
        self.expect('"')
        out: list[str] = []
        while True:
            if self.eof():
                raise MalformedLinkFormat("unterminated quoted string")
            ch = self.text[self.pos]
            self.pos += 1
            if ch == '"':
                return "".join(out)
            if ch == "\\":
                if self.eof():
                    raise MalformedLinkFormat("dangling escape in quoted string")
                out.append(self.text[self.pos])
                self.pos += 1
            else:
                out.append(ch)


def _scan_links(text: str) -> list[_RawLink]:
    scanner = _Scanner(text)
    links: list[_RawLink] = []
    scanner.skip_ws()
    while not scanner.eof():
        scanner.expect("<")
        target = scanner.read_until(">").strip()
        params: list[tuple[str, str]] = []
        scanner.skip_ws()
        while not scanner.eof() and scanner.peek() == ";":
            scanner.pos += 1
            scanner.skip_ws()
            name = scanner.read_token().lower()
            scanner.skip_ws()
            value = ""
            if not scanner.eof() and scanner.peek() == "=":
                scanner.pos += 1
                scanner.skip_ws()
                if scanner.eof():
                    raise MalformedLinkFormat("parameter value missing at end of document")
                value = scanner.read_quoted() if scanner.peek() == '"' else scanner.read_token()
            params.append((name, value))
            scanner.skip_ws()
        links.append(_RawLink(target, params))
        scanner.skip_ws()
        if scanner.eof():
            break
        scanner.expect(",")
        scanner.skip_ws()
    return links


def _param(link: _RawLink, name: str) -> str | None:
    for key, value in link.params:
        if key == name:
            return value
    return None


def parse_link_format(body: bytes, default_uri_r: OriginalUri) -> ParsedTimeMap:
    """Parse a TimeMap document into a TimeMap plus per-record warnings.

    Raises MalformedLinkFormat when the link syntax itself is broken; a
    record with a bad or missing datetime is skipped and reported in the
    warnings list instead.
    """
    text = body.decode("utf-8", errors="replace")
    links = _scan_links(text)

    warnings: list[str] = []
    originals: list[OriginalUri] = []
    for link in links:
        rels = set((_param(link, "rel") or "").lower().split())
        if "original" not in rels:
            continue
        try:
            uri = OriginalUri(link.target)
        except ValueError:
            warnings.append(f"ignoring non-http original link: {link.target!r}")
        else:
            if uri not in originals:
                originals.append(uri)
    document_source = originals[0] if originals else default_uri_r

    records: list[MementoRecord] = []
    for link in links:
        rels = set((_param(link, "rel") or "").lower().split())
        if "memento" not in rels:
            continue
        raw_datetime = _param(link, "datetime")
        if raw_datetime is None:
            warnings.append(f"memento link without datetime skipped: {link.target!r}")
            continue
        try:
            captured = MementoDatetime.from_http_date(raw_datetime)
        except ValueError:
            warnings.append(
                f"memento link with malformed datetime skipped: {link.target!r} ({raw_datetime!r})"
            )
            continue
        source = document_source
        anchor = _param(link, "anchor")
        if anchor is not None:
            try:
                source = OriginalUri(anchor)
            except ValueError:
                warnings.append(f"memento link with malformed anchor skipped: {link.target!r}")
                continue
        records.append(MementoRecord(link.target, captured, source))

    uri_rs = originals or [default_uri_r]
    return ParsedTimeMap(TimeMap.build(uri_rs, records), warnings)


def _quote(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def serialize_link_format(tm: TimeMap) -> bytes:
    """Render a TimeMap back to application/link-format.

    Single-origin TimeMaps serialize to the plain archive wire form. A
    merged TimeMap carries several originals; each memento link then gets
    an ``anchor`` parameter naming its own original, so source attribution
    survives a round trip.
    """
    lines: list[str] = []
    for uri_r in tm.uri_rs:
        lines.append(f'<{uri_r}>; rel="original"')
    multi_origin = len(tm.uri_rs) > 1
    for i, record in enumerate(tm.mementos):
        rel = "memento"
        if i == 0:
            rel = "first memento"
        elif i == len(tm.mementos) - 1:
            rel = "last memento"
        parts = [f"<{record.uri_m}>", f'rel="{rel}"', f"datetime={_quote(record.datetime.http_date)}"]
        if multi_origin:
            parts.append(f"anchor={_quote(str(record.source_uri_r))}")
        lines.append("; ".join(parts))
    return (",\n".join(lines) + "\n").encode("utf-8")
