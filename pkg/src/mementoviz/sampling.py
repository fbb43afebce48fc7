"""Distribution-preserving reduction of large TimeMaps.

TimeMaps beyond the sample budget are cut into contiguous partitions of
near-equal size. Each partition contributes up to a fixed quota of
mementos, starting unconditionally with its first one; picks after that
must be at least the minimum spacing later than the previous pick, and a
partition's unused quota carries over to the next. Because partitions are
index-contiguous, busy stretches of the TimeMap stay busy in the sample
and sparse stretches stay sparse.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta

from .timemap import TimeMap


@dataclass(frozen=True, slots=True)
class SamplingConfig:
    max_sample: int = 1000
    partitions: int = 250
    quota_per_partition: int = 4
    min_spacing: timedelta = timedelta(days=3)

    def __post_init__(self) -> None:
        if min(self.max_sample, self.partitions, self.quota_per_partition) < 1:
            raise ValueError("all sampling counts must be >= 1")
        if self.min_spacing < timedelta(0):
            raise ValueError("min_spacing must be non-negative")
        if self.partitions * self.quota_per_partition != self.max_sample:
            raise ValueError(
                "partitions * quota_per_partition must equal max_sample "
                f"({self.partitions} * {self.quota_per_partition} != {self.max_sample})"
            )


def sample_timemap(tm: TimeMap, config: SamplingConfig = SamplingConfig()) -> TimeMap:
    """Return tm unchanged when it fits the budget, else a subsequence of
    at most config.max_sample mementos.

    Partition i spans indices [floor(i*n/P), floor((i+1)*n/P)). The spacing
    baseline resets at every partition head: the head is always selected,
    then scanning resumes under the quota and spacing rules.
    """
    n = len(tm)
    if n <= config.max_sample:
        return tm

    mementos = tm.mementos
    picks = []
    quota = 0
    for i in range(config.partitions):
        lo = i * n // config.partitions
        hi = (i + 1) * n // config.partitions
        quota += config.quota_per_partition
        if lo >= hi:
            continue  # empty partition: its quota carries forward
        baseline = None
        for j in range(lo, hi):
            if quota == 0:
                break
            record = mementos[j]
            if j == lo:
                selected = True  # partition head overrides spacing
            else:
                selected = (
                    record.datetime.instant - baseline.instant >= config.min_spacing
                )
            if selected:
                picks.append(record)
                baseline = record.datetime
                quota -= 1
    return TimeMap(tm.uri_rs, tuple(picks))
