"""Summarize how an archived webpage changed over time.

The pipeline: fetch a TimeMap of archived captures, fingerprint each
capture's HTML, pick the captures whose fingerprints diverge enough to be
worth looking at, render those to thumbnails, and serve four interactive
visualizations over HTTP.
"""

from .archives import (
    ArchiveClient,
    ArchiveEndpoints,
    ArchiveError,
    ArchiveUnreachable,
    EmptyTimeMap,
    MementoGone,
    MementoUnreachable,
    build_timemap_uri,
)
from .linkformat import MalformedLinkFormat, parse_link_format, serialize_link_format
from .sampling import SamplingConfig, sample_timemap
from .selection import (
    EmptyInput,
    FingerprintedMemento,
    SummaryMenu,
    ThresholdSummary,
    TooFewRepresentatives,
    enumerate_menu,
    pick_three,
    select_representatives,
)
from .simhash import (
    FINGERPRINT_VERSION,
    SimHashValue,
    fingerprint_html,
    hamming_distance,
    simhash,
    tokenize_html,
)
from .timemap import (
    ArchiveKind,
    ArchiveSource,
    Histogram,
    InvertedRange,
    MementoDatetime,
    MementoRecord,
    OriginalUri,
    TimeMap,
    build_histogram,
    filter_by_date_range,
    merge_timemaps,
)

__version__ = "0.1.0"

__all__ = [
    "ArchiveClient",
    "ArchiveEndpoints",
    "ArchiveError",
    "ArchiveKind",
    "ArchiveSource",
    "ArchiveUnreachable",
    "EmptyInput",
    "EmptyTimeMap",
    "FINGERPRINT_VERSION",
    "FingerprintedMemento",
    "Histogram",
    "InvertedRange",
    "MalformedLinkFormat",
    "MementoDatetime",
    "MementoGone",
    "MementoRecord",
    "MementoUnreachable",
    "OriginalUri",
    "SamplingConfig",
    "SimHashValue",
    "SummaryMenu",
    "ThresholdSummary",
    "TimeMap",
    "TooFewRepresentatives",
    "build_histogram",
    "build_timemap_uri",
    "enumerate_menu",
    "filter_by_date_range",
    "fingerprint_html",
    "hamming_distance",
    "merge_timemaps",
    "parse_link_format",
    "pick_three",
    "sample_timemap",
    "select_representatives",
    "serialize_link_format",
    "simhash",
    "tokenize_html",
]
