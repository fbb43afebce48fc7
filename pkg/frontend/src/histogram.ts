/**
 * Pure geometry for the month histogram and its brush: pixel spans map to
 * month-bin ranges and back, so dragging and typing stay in lockstep.
 */

import type { DateRange14, HistogramBin } from "./model.js";

const DAYS_IN_MONTH = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

function daysInMonth(year: number, month: number): number {
    if (month === 2 && (year % 4 === 0 && (year % 100 !== 0 || year % 400 === 0))) return 29;
    return DAYS_IN_MONTH[month - 1];
}

/** "2016-05" -> first second of the month as a 14-digit timestamp. */
export function monthStart14(label: string): string {
    const [year, month] = label.split("-");
    return `${year}${month}01000000`;
}

/** "2016-05" -> last second of the month as a 14-digit timestamp. */
export function monthEnd14(label: string): string {
    const [year, month] = label.split("-");
    const last = daysInMonth(Number(year), Number(month));
    return `${year}${month}${String(last).padStart(2, "0")}235959`;
}

/** Which bin a pixel x lands in, clamped to the histogram. */
export function binAt(x: number, width: number, binCount: number): number {
    if (binCount === 0 || width <= 0) return 0;
    const index = Math.floor((x / width) * binCount);
    return Math.max(0, Math.min(binCount - 1, index));
}

/** Inclusive date range covered by bins [first..last]. */
export function rangeForBins(
    bins: HistogramBin[], first: number, last: number,
): DateRange14 {
    const lo = Math.min(first, last);
    const hi = Math.max(first, last);
    return { start: monthStart14(bins[lo].month), end: monthEnd14(bins[hi].month) };
}

/** A drag from pixel xA to xB (either direction) selects whole months. */
export function dragToRange(
    bins: HistogramBin[], xA: number, xB: number, width: number,
): DateRange14 {
    return rangeForBins(bins, binAt(xA, width, bins.length), binAt(xB, width, bins.length));
}

/**
 * Where the brush overlay sits for a stored range: the pixel span of every
 * bin the range touches. Null when the range misses the histogram.
 */
export function overlaySpan(
    bins: HistogramBin[], range: DateRange14, width: number,
): { x0: number; x1: number } | null {
    let first = -1;
    let last = -1;
    for (let i = 0; i < bins.length; i++) {
        const binStart = monthStart14(bins[i].month);
        const binEnd = monthEnd14(bins[i].month);
        if (binEnd >= range.start && binStart <= range.end) {
            if (first === -1) first = i;
            last = i;
        }
    }
    if (first === -1) return null;
    const step = width / bins.length;
    return { x0: first * step, x1: (last + 1) * step };
}
