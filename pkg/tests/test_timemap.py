from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import EXAMPLE_URI, at, dt, record, timemap
from mementoviz.timemap import (
    ArchiveKind,
    ArchiveSource,
    InvertedRange,
    MementoDatetime,
    MementoRecord,
    OriginalUri,
    TimeMap,
    build_histogram,
    filter_by_date_range,
    merge_timemaps,
)

utc_datetimes = st.datetimes(
    min_value=datetime(1996, 1, 1),
    max_value=datetime(2030, 12, 31),
).map(lambda naive: MementoDatetime(naive.replace(microsecond=0, tzinfo=timezone.utc)))


class TestOriginalUri:
    def test_accepts_http_and_https(self):
        OriginalUri("http://example.com/")
        OriginalUri("https://example.com/a/b?c=d")

    @pytest.mark.parametrize("bad", ["", "ftp://x.com/", "example.com", "http://", "not a uri"])
    def test_rejects_non_absolute_http(self, bad):
        with pytest.raises(ValueError):
            OriginalUri(bad)


class TestArchiveSource:
    def test_defaults_to_all_collections(self):
        assert ArchiveSource(ArchiveKind.ARCHIVE_IT).collection == "all"

    def test_numeric_collection_ok(self):
        assert ArchiveSource(ArchiveKind.ARCHIVE_IT, "1068").collection == "1068"

    @pytest.mark.parametrize("bad", ["", "abc", "10a", "١٠"])
    def test_rejects_non_decimal_collections(self, bad):
        with pytest.raises(ValueError):
            ArchiveSource(ArchiveKind.ARCHIVE_IT, bad)


class TestMementoDatetime:
    def test_compact_and_http_forms(self):
        value = dt("19941106084937")
        assert value.timestamp14 == "19941106084937"
        assert value.http_date == "Sun, 06 Nov 1994 08:49:37 GMT"

    @given(utc_datetimes)
    def test_roundtrip_is_lossless_both_ways(self, value):
        assert MementoDatetime.from_timestamp14(value.timestamp14) == value
        assert MementoDatetime.from_http_date(value.http_date) == value

    def test_rejects_naive_and_subsecond(self):
        with pytest.raises(ValueError):
            MementoDatetime(datetime(2016, 1, 1))
        with pytest.raises(ValueError):
            MementoDatetime(datetime(2016, 1, 1, microsecond=5, tzinfo=timezone.utc))

    def test_rejects_malformed_strings(self):
        with pytest.raises(ValueError):
            MementoDatetime.from_timestamp14("2016")
        with pytest.raises(ValueError):
            MementoDatetime.from_http_date("not a date")


class TestTimeMapInvariants:
    def test_build_sorts_and_dedups_keeping_first(self):
        a, b = at(day=2), at(day=1)
        first = MementoRecord("http://a.test/x", a, EXAMPLE_URI)
        dup = MementoRecord("http://a.test/x", b, EXAMPLE_URI)
        other = MementoRecord("http://a.test/y", b, EXAMPLE_URI)
        tm = TimeMap.build([EXAMPLE_URI], [first, dup, other])
        assert [m.uri_m for m in tm.mementos] == ["http://a.test/y", "http://a.test/x"]
        assert tm.mementos[1].datetime == a  # first occurrence won the dedup

    def test_constructor_rejects_unsorted(self):
        with pytest.raises(ValueError):
            TimeMap((EXAMPLE_URI,), (record(at(day=2)), record(at(day=1))))

    def test_ties_broken_by_uri_m(self):
        when = at(day=1)
        r1 = MementoRecord("http://a.test/b", when, EXAMPLE_URI)
        r2 = MementoRecord("http://a.test/a", when, EXAMPLE_URI)
        tm = TimeMap.build([EXAMPLE_URI], [r1, r2])
        assert [m.uri_m for m in tm.mementos] == ["http://a.test/a", "http://a.test/b"]


class TestMerge:
    def test_empty_timemap_is_identity(self):
        empty = TimeMap((EXAMPLE_URI,), ())
        tm = timemap([at(day=1), at(day=2)])
        assert merge_timemaps([empty, tm]) == tm

    def test_interleaved_dates_end_up_in_global_order(self):
        other = OriginalUri("http://other.com/")
        t1 = timemap([at(day=1), at(day=3)])
        t2 = timemap([at(day=2), at(day=4)], uri_r=other)
        merged = merge_timemaps([t1, t2])
        assert len(merged) == 4
        # sort oracle: plain sorted() over all records
        expected = sorted(t1.mementos + t2.mementos, key=lambda m: m.sort_key)
        assert list(merged.mementos) == expected
        assert merged.uri_rs == (EXAMPLE_URI, other)

    def test_shared_uri_m_deduplicated_keeping_earliest_listed(self):
        shared = MementoRecord("http://a.test/shared", at(day=5), EXAMPLE_URI)
        other_uri = OriginalUri("http://other.com/")
        shadow = MementoRecord("http://a.test/shared", at(day=5), other_uri)
        t1 = TimeMap.build([EXAMPLE_URI], [shared, record(at(day=1))])
        t2 = TimeMap.build([other_uri], [shadow, record(at(day=2), other_uri)])
        merged = merge_timemaps([t1, t2])
        assert len(merged) == 2 + 2 - 1
        kept = [m for m in merged.mementos if m.uri_m == "http://a.test/shared"]
        assert kept[0].source_uri_r == EXAMPLE_URI

    def test_records_keep_their_source(self):
        other = OriginalUri("http://other.com/")
        merged = merge_timemaps(
            [timemap([at(day=1)]), timemap([at(day=2)], uri_r=other)]
        )
        assert {m.source_uri_r for m in merged.mementos} == {EXAMPLE_URI, other}

    @given(st.permutations(range(4)))
    def test_merge_is_order_insensitive_without_duplicates(self, order):
        maps = [
            timemap([at(day=1)]),
            timemap([at(day=2)], uri_r=OriginalUri("http://b.com/")),
            timemap([at(day=3)], uri_r=OriginalUri("http://c.com/")),
            timemap([at(day=4)], uri_r=OriginalUri("http://d.com/")),
        ]
        baseline = merge_timemaps(maps).mementos
        shuffled = merge_timemaps([maps[i] for i in order]).mementos
        assert shuffled == baseline

    def test_rejects_empty_list(self):
        with pytest.raises(ValueError):
            merge_timemaps([])


class TestDateRangeFilter:
    def test_whole_range_is_identity(self):
        tm = timemap([at(day=1), at(day=15), at(day=28)])
        lo, hi = tm.date_range()
        assert filter_by_date_range(tm, lo, hi) == tm

    def test_range_between_mementos_is_empty(self):
        tm = timemap([at(day=1), at(day=10)])
        out = filter_by_date_range(tm, at(day=3), at(day=5))
        assert len(out) == 0

    def test_bounds_are_inclusive(self):
        tm = timemap([at(day=1), at(day=5), at(day=9)])
        out = filter_by_date_range(tm, at(day=1), at(day=9))
        assert len(out) == 3

    def test_inverted_range_rejected(self):
        tm = timemap([at(day=1)])
        with pytest.raises(InvertedRange):
            filter_by_date_range(tm, at(day=9), at(day=1))


class TestHistogram:
    def test_single_month(self):
        tm = timemap([at(2016, 5, 3), at(2016, 5, 10), at(2016, 5, 30)])
        assert build_histogram(tm).bins == (("2016-05", 3),)

    def test_gap_months_materialized_with_zero(self):
        tm = timemap([at(2016, 1, 5), at(2016, 3, 5)])
        assert build_histogram(tm).bins == (
            ("2016-01", 1),
            ("2016-02", 0),
            ("2016-03", 1),
        )

    def test_spans_year_boundary(self):
        tm = timemap([at(2015, 11, 1), at(2016, 2, 1)])
        labels = [label for label, _ in build_histogram(tm).bins]
        assert labels == ["2015-11", "2015-12", "2016-01", "2016-02"]

    def test_empty_timemap_gives_empty_bins(self):
        assert build_histogram(TimeMap((EXAMPLE_URI,), ())).bins == ()

    @given(st.lists(utc_datetimes, max_size=60))
    def test_counts_always_sum_to_length(self, datetimes):
        tm = timemap(datetimes)
        assert build_histogram(tm).total() == len(tm)
