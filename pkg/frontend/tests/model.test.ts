import { describe, expect, it } from "vitest";

import {
    SessionModel,
    dayText,
    parseDayText,
    splitUriInput,
    validateUriInput,
} from "../src/model.js";
import type { JobSnapshot, ThumbnailInfo } from "../src/model.js";

function thumb(n: number, source = "http://example.com/"): ThumbnailInfo {
    const datetime = `2016${String(n).padStart(2, "0")}01120000`;
    return {
        uri_m: `http://archive.test/web/${datetime}/${source}`,
        datetime,
        source_uri_r: source,
        image_url: `/api/jobs/j/thumbnails/t${n}/image`,
        status: "ok",
        attempt: 1,
        width: 240,
        height: 180,
    };
}

function snapshot(partial: Partial<JobSnapshot> = {}): JobSnapshot {
    return {
        id: "j",
        state: "menu_ready",
        memento_count: 8,
        small_timemap: true,
        mementos: [],
        menu: [{ count: 8, threshold: 1, indices: [0, 1, 2, 3, 4, 5, 6, 7] }],
        three_option: null,
        error: null,
        ...partial,
    };
}

function renderedModel(n: number): SessionModel {
    const model = new SessionModel();
    model.setUriInput("http://example.com/");
    model.timemapLoaded({
        memento_count: n,
        histogram: [{ month: "2016-01", count: n }],
        date_range: { start: "20160101120000", end: `2016${String(n).padStart(2, "0")}01120000` },
        small_timemap: n < 12,
    });
    model.jobCreated("j");
    const thumbs = Array.from({ length: n }, (_, i) => thumb(i + 1));
    model.jobSnapshotLoaded(
        snapshot({
            memento_count: n,
            mementos: thumbs.map(({ uri_m, datetime, source_uri_r }) => ({ uri_m, datetime, source_uri_r })),
            menu: [{ count: n, threshold: 1, indices: thumbs.map((_, i) => i) }],
        }),
    );
    model.selectCount(n);
    model.thumbnailsRendered(thumbs);
    return model;
}

describe("input splitting and validation", () => {
    it("splits comma-separated URI-Rs", () => {
        expect(splitUriInput(" http://a.org/ , http://b.org/x ,")).toEqual([
            "http://a.org/",
            "http://b.org/x",
        ]);
    });

    it("rejects empty and non-http input", () => {
        expect(validateUriInput("")).not.toBeNull();
        expect(validateUriInput("ftp://x.org/")).not.toBeNull();
        expect(validateUriInput("http://a.org/, nonsense")).not.toBeNull();
        expect(validateUriInput("https://ok.org/")).toBeNull();
    });
});

describe("exclusions keep every tab coherent", () => {
    it("marking 3 and Update drops them from all four tabs", () => {
        const n = 8;
        const model = renderedModel(n);
        const victims = model.thumbnails.slice(0, 3).map((t) => t.uri_m);
        for (const uri of victims) model.toggleMark(uri);
        // marks alone hide nothing yet
        expect(model.gridItems()).toHaveLength(n);
        expect(model.markedCount()).toBe(3);

        model.applyUpdate();
        expect(model.gridItems()).toHaveLength(n - 3);
        expect(model.sliderItems()).toHaveLength(n - 3);
        expect(model.timelineItems()).toHaveLength(n - 3);
        expect(model.gifItems()).toHaveLength(n - 3);
        for (const uri of victims) {
            expect(model.includedUriMs()).not.toContain(uri);
        }
    });

    it("Revert restores the original n everywhere", () => {
        const n = 6;
        const model = renderedModel(n);
        for (const t of model.thumbnails.slice(0, 2)) model.toggleMark(t.uri_m);
        model.applyUpdate();
        expect(model.gridItems()).toHaveLength(n - 2);
        model.revert();
        expect(model.gridItems()).toHaveLength(n);
        expect(model.sliderItems()).toHaveLength(n);
        expect(model.timelineItems()).toHaveLength(n);
        expect(model.gifItems()).toHaveLength(n);
        expect(model.markedCount()).toBe(0);
    });

    it("marking and unmarking before Update changes nothing", () => {
        const model = renderedModel(5);
        const uri = model.thumbnails[0].uri_m;
        model.toggleMark(uri);
        model.toggleMark(uri);
        model.applyUpdate();
        expect(model.gridItems()).toHaveLength(5);
    });

    it("embed payload lists exactly the included uri_ms", () => {
        const model = renderedModel(5);
        model.toggleMark(model.thumbnails[1].uri_m);
        model.toggleMark(model.thumbnails[3].uri_m);
        model.applyUpdate();
        const payload = model.embedPayload("grid");
        expect(payload.kind).toBe("grid");
        expect(payload.included_uri_ms).toEqual(
            [model.thumbnails[0], model.thumbnails[2], model.thumbnails[4]].map((t) => t.uri_m),
        );
    });

    it("urims/gif inclusion query is null until something is excluded", () => {
        const model = renderedModel(4);
        expect(model.inclusionQuery()).toBeNull();
        model.toggleMark(model.thumbnails[0].uri_m);
        model.applyUpdate();
        expect(model.inclusionQuery()).toHaveLength(3);
    });
});

describe("brush and text boxes are two views of one range", () => {
    function withTimemap(): SessionModel {
        const model = new SessionModel();
        model.timemapLoaded({
            memento_count: 10,
            histogram: [
                { month: "2016-01", count: 4 },
                { month: "2016-02", count: 0 },
                { month: "2016-03", count: 6 },
            ],
            date_range: { start: "20160105000000", end: "20160320000000" },
            small_timemap: true,
        });
        return model;
    }

    it("a brush drag updates the text boxes", () => {
        const model = withTimemap();
        model.setRangeFromBrush({ start: "20160101000000", end: "20160229235959" });
        expect(model.rangeTexts()).toEqual({ start: "2016-01-01", end: "2016-02-29" });
    });

    it("typed dates update the stored range (and thus the brush)", () => {
        const model = withTimemap();
        const error = model.setRangeFromText("2016-02-01", "2016-03-15");
        expect(error).toBeNull();
        expect(model.range).toEqual({ start: "20160201000000", end: "20160315235959" });
    });

    it("an inverted typed range is rejected without touching state", () => {
        const model = withTimemap();
        model.setRangeFromText("2016-01-01", "2016-02-01");
        const before = model.range;
        const error = model.setRangeFromText("2016-03-01", "2016-01-01");
        expect(error).not.toBeNull();
        expect(model.range).toEqual(before);
    });

    it("garbage dates are rejected with a message", () => {
        const model = withTimemap();
        expect(model.setRangeFromText("soonish", "2016-01-01")).not.toBeNull();
        expect(model.setRangeFromText("2016-13-01", "2016-14-01")).not.toBeNull();
    });

    it("boxes default to the whole TimeMap before any brushing", () => {
        const model = withTimemap();
        expect(model.rangeTexts()).toEqual({ start: "2016-01-05", end: "2016-03-20" });
    });
});

describe("phase gating", () => {
    it("no summarize request is possible before a TimeMap is shown", () => {
        const model = new SessionModel();
        expect(model.canCalculateUnique()).toBe(false);
        model.setUriInput("http://example.com/");
        expect(model.canViewTimemap()).toBe(true);
        expect(model.canCalculateUnique()).toBe(false);
    });

    it("no thumbnail request is possible before menu_ready", () => {
        const model = new SessionModel();
        model.setUriInput("http://example.com/");
        model.timemapLoaded({
            memento_count: 5,
            histogram: [{ month: "2016-01", count: 5 }],
            date_range: { start: "20160101000000", end: "20160105000000" },
            small_timemap: true,
        });
        expect(model.canGenerateThumbnails()).toBe(false);
        expect(model.canGenerateAll()).toBe(false);

        model.jobCreated("j");
        expect(model.phase()).toBe("summarizing");
        expect(model.canGenerateThumbnails()).toBe(false);
        expect(model.canGenerateAll()).toBe(false);
        expect(model.canUseArtifacts()).toBe(false);

        model.applyEvent({ seq: 1, stage: "fetching", detail: "", fraction: 0 });
        model.applyEvent({ seq: 2, stage: "menu_ready", detail: "", fraction: 0.9 });
        model.jobSnapshotLoaded(snapshot({ memento_count: 5, small_timemap: true }));
        expect(model.canGenerateAll()).toBe(true);
        expect(model.canGenerateThumbnails()).toBe(false); // nothing picked yet
        model.selectCount(8);
        expect(model.canGenerateThumbnails()).toBe(true);
        expect(model.canUseArtifacts()).toBe(false); // still nothing rendered
    });

    it("artifacts unlock only after thumbnails render", () => {
        const model = renderedModel(4);
        expect(model.phase()).toBe("rendered");
        expect(model.canUseArtifacts()).toBe(true);
    });

    it("a failed job gates everything off", () => {
        const model = new SessionModel();
        model.setUriInput("http://example.com/");
        model.jobCreated("j");
        model.applyEvent({ seq: 1, stage: "failed", detail: "empty range", fraction: 1 });
        expect(model.phase()).toBe("failed");
        expect(model.canGenerateThumbnails()).toBe(false);
        expect(model.jobError).toBe("empty range");
    });

    it("collection field only participates for Archive-It", () => {
        const model = new SessionModel();
        model.setUriInput("http://example.com/");
        model.setCollection("not-a-number");
        expect(model.canViewTimemap()).toBe(true); // ia ignores collection
        expect(model.collectionVisible()).toBe(false);
        model.setArchive("ait");
        expect(model.collectionVisible()).toBe(true);
        expect(model.canViewTimemap()).toBe(false);
        model.setCollection("1068");
        expect(model.canViewTimemap()).toBe(true);
    });
});

describe("event stream handling", () => {
    it("drops duplicate and out-of-order events", () => {
        const model = new SessionModel();
        model.jobCreated("j");
        model.applyEvent({ seq: 1, stage: "fetching", detail: "a", fraction: 0 });
        model.applyEvent({ seq: 3, stage: "hashing", detail: "b", fraction: 0.4 });
        model.applyEvent({ seq: 2, stage: "fetching", detail: "late", fraction: 0.1 });
        model.applyEvent({ seq: 3, stage: "hashing", detail: "dup", fraction: 0.4 });
        expect(model.events.map((e) => e.seq)).toEqual([1, 3]);
        expect(model.latestEvent()?.detail).toBe("b");
    });
});

describe("menu handling", () => {
    it("appends the 3-option with its marker", () => {
        const model = new SessionModel();
        model.jobCreated("j");
        model.jobSnapshotLoaded(
            snapshot({
                menu: [
                    { count: 20, threshold: 1, indices: Array.from({ length: 20 }, (_, i) => i) },
                    { count: 12, threshold: 9, indices: Array.from({ length: 12 }, (_, i) => i) },
                ],
                three_option: [0, 9, 19],
            }),
        );
        const three = model.menu.find((o) => o.isThreeOption);
        expect(three?.count).toBe(3);
        expect(three?.indices).toEqual([0, 9, 19]);
        model.selectCount(3);
        expect(model.selectedCount).toBe(3);
    });

    it("ignores counts that are not offered", () => {
        const model = new SessionModel();
        model.jobCreated("j");
        model.jobSnapshotLoaded(snapshot());
        model.selectCount(999);
        expect(model.selectedCount).toBeNull();
    });
});

describe("timeline stripes", () => {
    it("marks representatives yellow and points gray stripes at predecessors", () => {
        const model = renderedModel(4);
        // exclude one thumbnail so its stripe turns gray
        const excluded = model.thumbnails[2];
        model.toggleMark(excluded.uri_m);
        model.applyUpdate();
        const stripes = model.timelineStripes();
        expect(stripes).toHaveLength(4);
        expect(stripes.filter((s) => s.unique)).toHaveLength(3);
        const gray = stripes[2];
        expect(gray.unique).toBe(false);
        expect(gray.similarTo?.uri_m).toBe(model.thumbnails[1].uri_m);
    });

    it("a leading non-unique stripe has no predecessor", () => {
        const model = renderedModel(3);
        model.toggleMark(model.thumbnails[0].uri_m);
        model.applyUpdate();
        const stripes = model.timelineStripes();
        expect(stripes[0].unique).toBe(false);
        expect(stripes[0].similarTo).toBeNull();
    });
});

describe("date helpers", () => {
    it("round-trips day text", () => {
        expect(parseDayText("2016-05-03", false)).toBe("20160503000000");
        expect(parseDayText("2016-05-03", true)).toBe("20160503235959");
        expect(dayText("20160503120000")).toBe("2016-05-03");
        expect(parseDayText("2016/05/03", false)).toBeNull();
    });
});
