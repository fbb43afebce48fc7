"""Choosing representative mementos by fingerprint distance.

The scan walks a fingerprinted TimeMap in date order, always keeping the
first memento, and keeps each later one whose distance from the most
recently kept memento reaches the threshold. Sweeping every threshold in
1..32 yields the menu of distinct representative counts offered to the
user; when even the tightest summary still has more than 9 entries, a
quick first/central/last triple is offered as well.
"""

from __future__ import annotations

from dataclasses import dataclass

from .simhash import SimHashValue, hamming_distance
from .timemap import MementoRecord

MIN_THRESHOLD = 1
MAX_THRESHOLD = 32

THREE_OPTION_MIN_COUNT = 10  # offered only when the smallest menu count is > 9


class EmptyInput(ValueError):
    """Selection needs at least one fingerprinted memento."""


class TooFewRepresentatives(ValueError):
    """The first/central/last option needs more than 9 representatives."""


@dataclass(frozen=True, slots=True)
class FingerprintedMemento:
    record: MementoRecord
    simhash: SimHashValue


@dataclass(frozen=True, slots=True)
class ThresholdSummary:
    """Representative positions selected at one distance threshold."""

    threshold: int
    indices: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, slots=True)
class SummaryMenu:
    """The user-facing menu: one summary per distinct representative count,
    sorted by count descending, plus the optional 3-memento shortcut."""

    options: tuple[ThresholdSummary, ...]
    three_option: tuple[int, int, int] | None

    def counts(self) -> list[int]:
        return [o.count for o in self.options]

    def option_for_count(self, count: int) -> ThresholdSummary | None:
        for option in self.options:
            if option.count == count:
                return option
        return None

    def smallest(self) -> ThresholdSummary:
        return self.options[-1]


def select_representatives(
    fps: list[FingerprintedMemento], threshold: int
) -> ThresholdSummary:
    """Greedy scan: keep index 0, then keep each index whose distance from
    the last kept index is >= threshold (the kept one becomes the new
    baseline)."""
    if not (MIN_THRESHOLD <= threshold <= MAX_THRESHOLD):
        raise ValueError(f"threshold must be in [{MIN_THRESHOLD}, {MAX_THRESHOLD}]: {threshold}")
    if not fps:
        raise EmptyInput("no fingerprinted mementos to select from")
    indices = [0]
    baseline = fps[0].simhash
    for i in range(1, len(fps)):
        if hamming_distance(baseline, fps[i].simhash) >= threshold:
            indices.append(i)
            baseline = fps[i].simhash
    return ThresholdSummary(threshold, tuple(indices))


def enumerate_menu(fps: list[FingerprintedMemento]) -> SummaryMenu:
    """Sweep all thresholds and group by representative count.

    Several thresholds often produce the same count; the smallest such
    threshold's summary is kept, so the earliest-diverging mementos win.
    """
    if not fps:
        raise EmptyInput("no fingerprinted mementos to summarize")
    by_count: dict[int, ThresholdSummary] = {}
    for threshold in range(MIN_THRESHOLD, MAX_THRESHOLD + 1):
        summary = select_representatives(fps, threshold)
        by_count.setdefault(summary.count, summary)
    options = tuple(by_count[c] for c in sorted(by_count, reverse=True))
    smallest = options[-1]
    three = pick_three(smallest) if smallest.count >= THREE_OPTION_MIN_COUNT else None
    return SummaryMenu(options, three)


def pick_three(summary: ThresholdSummary) -> tuple[int, int, int]:
    """First, central, and last representative of a summary; for an even
    count the central one is the lower of the two middle positions."""
    length = summary.count
    if length < THREE_OPTION_MIN_COUNT:
        raise TooFewRepresentatives(
            f"3-memento option needs more than {THREE_OPTION_MIN_COUNT - 1} representatives, got {length}"
        )
    indices = summary.indices
    return (indices[0], indices[(length - 1) // 2], indices[-1])
