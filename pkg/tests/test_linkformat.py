from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import EXAMPLE_URI, at, timemap
from mementoviz.linkformat import (
    MalformedLinkFormat,
    parse_link_format,
    serialize_link_format,
)
from mementoviz.timemap import MementoDatetime, MementoRecord, OriginalUri, TimeMap

THREE_LINK_FIXTURE = b"""\
<http://example.com/>; rel="original",
<http://archive.test/web/20160503120000/http://example.com/>
  ; rel="first memento"; datetime="Tue, 03 May 2016 12:00:00 GMT",
<http://archive.test/web/20160101080000/http://example.com/>; rel="memento"; datetime="Fri, 01 Jan 2016 08:00:00 GMT"
"""


class TestParse:
    def test_three_link_fixture(self):
        # Expected values from an independent hand parse of the fixture:
        # two memento links, the January capture sorting first.
        parsed = parse_link_format(THREE_LINK_FIXTURE, EXAMPLE_URI)
        tm = parsed.timemap
        assert parsed.warnings == []
        assert tm.uri_rs == (EXAMPLE_URI,)
        assert [m.datetime.timestamp14 for m in tm.mementos] == [
            "20160101080000",
            "20160503120000",
        ]
        assert tm.mementos[0].uri_m == "http://archive.test/web/20160101080000/http://example.com/"
        assert all(m.source_uri_r == EXAMPLE_URI for m in tm.mementos)

    def test_original_only_yields_zero_mementos(self):
        body = b'<http://example.com/>; rel="original"'
        parsed = parse_link_format(body, EXAMPLE_URI)
        assert len(parsed.timemap) == 0
        assert parsed.timemap.uri_rs == (EXAMPLE_URI,)

    def test_duplicate_uri_m_deduplicated(self):
        body = (
            b'<http://a.test/m>; rel="memento"; datetime="Fri, 01 Jan 2016 08:00:00 GMT",\n'
            b'<http://a.test/m>; rel="memento"; datetime="Sat, 02 Jan 2016 08:00:00 GMT"'
        )
        parsed = parse_link_format(body, EXAMPLE_URI)
        assert len(parsed.timemap) == 1
        assert parsed.timemap.mementos[0].datetime.timestamp14 == "20160101080000"

    def test_self_and_timegate_links_produce_no_records(self):
        body = (
            b'<http://archive.test/timemap/link/http://example.com/>; rel="self",\n'
            b'<http://archive.test/timegate/http://example.com/>; rel="timegate"'
        )
        parsed = parse_link_format(body, EXAMPLE_URI)
        assert len(parsed.timemap) == 0

    def test_malformed_datetime_skips_record_with_warning(self):
        body = (
            b'<http://a.test/good>; rel="memento"; datetime="Fri, 01 Jan 2016 08:00:00 GMT",\n'
            b'<http://a.test/bad>; rel="memento"; datetime="yesterday-ish"'
        )
        parsed = parse_link_format(body, EXAMPLE_URI)
        assert len(parsed.timemap) == 1
        assert len(parsed.warnings) == 1
        assert "bad" in parsed.warnings[0]

    def test_memento_without_datetime_warns(self):
        parsed = parse_link_format(b'<http://a.test/m>; rel="memento"', EXAMPLE_URI)
        assert len(parsed.timemap) == 0
        assert len(parsed.warnings) == 1

    @pytest.mark.parametrize(
        "body",
        [
            b"http://no-angle-brackets.test/; rel=x",
            b"<http://unterminated.test/",
            b'<http://a.test/>; rel="unterminated quote',
            b'<http://a.test/>; rel="x" <http://b.test/>',  # missing comma
            b"<http://a.test/>; =novalue",
        ],
    )
    def test_broken_syntax_rejects_whole_document(self, body):
        with pytest.raises(MalformedLinkFormat):
            parse_link_format(body, EXAMPLE_URI)

    def test_commas_inside_quoted_datetimes_do_not_split_links(self):
        # RFC 1123 dates contain a comma; naive comma-splitting would break.
        body = b'<http://a.test/m>; rel="memento"; datetime="Fri, 01 Jan 2016 08:00:00 GMT"'
        parsed = parse_link_format(body, EXAMPLE_URI)
        assert len(parsed.timemap) == 1

    def test_compound_rels_count_as_memento(self):
        body = (
            b'<http://a.test/only>; rel="first last memento"; '
            b'datetime="Fri, 01 Jan 2016 08:00:00 GMT"'
        )
        parsed = parse_link_format(body, EXAMPLE_URI)
        assert len(parsed.timemap) == 1

    def test_document_original_wins_over_default(self):
        body = (
            b'<http://actual.org/>; rel="original",\n'
            b'<http://a.test/m>; rel="memento"; datetime="Fri, 01 Jan 2016 08:00:00 GMT"'
        )
        parsed = parse_link_format(body, OriginalUri("http://fallback.org/"))
        assert parsed.timemap.uri_rs == (OriginalUri("http://actual.org/"),)
        assert parsed.timemap.mementos[0].source_uri_r == OriginalUri("http://actual.org/")


def _multi_origin_timemap() -> TimeMap:
    other = OriginalUri("http://other.org/")
    records = [
        MementoRecord("http://a.test/1", at(day=1), EXAMPLE_URI),
        MementoRecord("http://a.test/2", at(day=2), other),
        MementoRecord("http://a.test/3", at(day=3), EXAMPLE_URI),
    ]
    return TimeMap.build([EXAMPLE_URI, other], records)


class TestSerialize:
    def test_single_origin_roundtrip(self):
        tm = timemap([at(day=1), at(day=5), at(day=9)])
        parsed = parse_link_format(serialize_link_format(tm), EXAMPLE_URI)
        assert parsed.timemap == tm
        assert parsed.warnings == []

    def test_multi_origin_roundtrip_keeps_source_attribution(self):
        tm = _multi_origin_timemap()
        body = serialize_link_format(tm)
        assert b"anchor=" in body
        parsed = parse_link_format(body, EXAMPLE_URI)
        assert parsed.timemap == tm

    def test_single_origin_output_stays_vanilla(self):
        tm = timemap([at(day=1), at(day=2)])
        assert b"anchor=" not in serialize_link_format(tm)

    @given(
        st.lists(
            st.datetimes(min_value=datetime(2000, 1, 1), max_value=datetime(2024, 1, 1)),
            max_size=30,
        )
    )
    def test_parse_serialize_identity_property(self, naive_datetimes):
        datetimes = [
            MementoDatetime(d.replace(microsecond=0, tzinfo=timezone.utc))
            for d in naive_datetimes
        ]
        tm = timemap(datetimes)
        parsed = parse_link_format(serialize_link_format(tm), EXAMPLE_URI)
        assert parsed.timemap == tm
