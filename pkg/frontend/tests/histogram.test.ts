import { describe, expect, it } from "vitest";

import {
    binAt,
    dragToRange,
    monthEnd14,
    monthStart14,
    overlaySpan,
    rangeForBins,
} from "../src/histogram.js";
import type { HistogramBin } from "../src/model.js";

const BINS: HistogramBin[] = [
    { month: "2016-01", count: 3 },
    { month: "2016-02", count: 0 },
    { month: "2016-03", count: 7 },
    { month: "2016-04", count: 2 },
];

describe("month boundaries", () => {
    it("covers whole months inclusively", () => {
        expect(monthStart14("2016-03")).toBe("20160301000000");
        expect(monthEnd14("2016-03")).toBe("20160331235959");
        expect(monthEnd14("2016-04")).toBe("20160430235959");
    });

    it("knows about leap Februaries", () => {
        expect(monthEnd14("2016-02")).toBe("20160229235959");
        expect(monthEnd14("2015-02")).toBe("20150228235959");
        expect(monthEnd14("2000-02")).toBe("20000229235959");
        expect(monthEnd14("1900-02")).toBe("19000228235959");
    });
});

describe("pixel-to-bin mapping", () => {
    it("splits the width evenly and clamps the edges", () => {
        expect(binAt(0, 400, 4)).toBe(0);
        expect(binAt(399, 400, 4)).toBe(3);
        expect(binAt(150, 400, 4)).toBe(1);
        expect(binAt(-20, 400, 4)).toBe(0);
        expect(binAt(4000, 400, 4)).toBe(3);
    });

    it("drags select whole months regardless of direction", () => {
        const forward = dragToRange(BINS, 10, 390, 400);
        const backward = dragToRange(BINS, 390, 10, 400);
        expect(forward).toEqual({ start: "20160101000000", end: "20160430235959" });
        expect(backward).toEqual(forward);
    });

    it("a click inside one bar selects that month", () => {
        expect(dragToRange(BINS, 250, 250, 400)).toEqual({
            start: "20160301000000",
            end: "20160331235959",
        });
    });
});

describe("overlay placement", () => {
    it("covers exactly the bins the range touches", () => {
        const range = rangeForBins(BINS, 1, 2);
        expect(overlaySpan(BINS, range, 400)).toEqual({ x0: 100, x1: 300 });
    });

    it("partial-month ranges still highlight their months", () => {
        const span = overlaySpan(BINS, { start: "20160215000000", end: "20160310000000" }, 400);
        expect(span).toEqual({ x0: 100, x1: 300 });
    });

    it("returns null when the range misses the histogram", () => {
        expect(overlaySpan(BINS, { start: "20300101000000", end: "20300202000000" }, 400)).toBeNull();
    });
});
