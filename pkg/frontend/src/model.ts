/**
 * Session state for the summarization workflow, kept free of DOM concerns
 * so every rule is unit-testable.
 *
 * The big invariants live here:
 *  - all four visualization tabs are views over one included-thumbnail
 *    list (thumbnails minus committed exclusions), so their item counts
 *    can never disagree;
 *  - the histogram brush and the date text boxes are two projections of
 *    one range value, so they cannot drift apart;
 *  - every server request is gated on the phase that makes it legal.
 */

export type ArchiveChoice = "ia" | "ait";
export type Tab = "grid" | "slider" | "timeline" | "gif";

export type Phase =
    | "input"            // nothing loaded yet
    | "timemap_ready"    // histogram shown, range selectable
    | "summarizing"      // job running up to the menu
    | "menu_ready"       // counts offered, none rendered yet
    | "rendering"
    | "rendered"         // thumbnails on screen, artifacts available
    | "failed";

export interface HistogramBin { month: string; count: number }

export interface TimemapInfo {
    memento_count: number;
    histogram: HistogramBin[];
    date_range: { start: string; end: string };
    small_timemap: boolean;
}

export interface MenuOption {
    count: number;
    threshold: number;
    indices: number[];
    isThreeOption?: boolean;
}

export interface MementoInfo {
    uri_m: string;
    datetime: string;       // 14-digit timestamp
    source_uri_r: string;
}

export interface ThumbnailInfo extends MementoInfo {
    image_url: string;
    status: "ok" | "failed";
    attempt: number;
    width: number;
    height: number;
}

export interface ProgressEventInfo {
    seq: number;
    stage: string;
    detail: string;
    fraction: number;
}

export interface JobSnapshot {
    id: string;
    state: string;
    memento_count: number;
    small_timemap: boolean;
    mementos: MementoInfo[];
    menu: { count: number; threshold: number; indices: number[] }[] | null;
    three_option: number[] | null;
    error: string | null;
}

export interface DateRange14 { start: string; end: string }

export interface TimelineStripe {
    uri_m: string;
    datetime: string;
    unique: boolean;
    /** for gray stripes: the preceding unique memento this one resembles */
    similarTo: ThumbnailInfo | null;
}

export interface GifSettings { interval: number; timestamp: boolean; uristamp: boolean }

const URI_PATTERN = /^https?:\/\/\S+$/i;

/** Split the comma-separated input box into candidate URI-Rs. */
export function splitUriInput(text: string): string[] {
    return text.split(",").map((part) => part.trim()).filter((part) => part.length > 0);
}

export function validateUriInput(text: string): string | null {
    const uris = splitUriInput(text);
    if (uris.length === 0) return "enter at least one http(s) URL";
    for (const uri of uris) {
        if (!URI_PATTERN.test(uri)) return `not an http(s) URL: ${uri}`;
    }
    return null;
}

export class SessionModel {
    uriInput = "";
    archive: ArchiveChoice = "ia";
    collection = "";

    timemap: TimemapInfo | null = null;
    range: DateRange14 | null = null;  // null means "whole TimeMap"

    jobId: string | null = null;
    jobState: string | null = null;
    jobError: string | null = null;
    events: ProgressEventInfo[] = [];
    menu: MenuOption[] = [];
    mementos: MementoInfo[] = [];
    smallTimemap = false;
    selectedCount: number | null = null;

    thumbnails: ThumbnailInfo[] = [];
    private marked = new Set<string>();     // X-ed, not yet committed
    private committed = new Set<string>();  // excluded from every tab
    activeTab: Tab = "grid";
    gif: GifSettings = { interval: 1.0, timestamp: false, uristamp: false };

    private listeners: Array<() => void> = [];

    subscribe(listener: () => void): () => void {
        this.listeners.push(listener);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== listener);
        };
    }

    notify(): void {
        for (const listener of this.listeners) listener();
    }

    // ------------------------------------------------------------ phase

    phase(): Phase {
        if (this.jobState === "failed") return "failed";
        if (this.thumbnails.length > 0 && this.jobState !== "rendering") return "rendered";
        if (this.jobState === "rendering") return "rendering";
        if (this.jobState === "menu_ready" || this.jobState === "done") return "menu_ready";
        if (this.jobId !== null) return "summarizing";
        if (this.timemap !== null) return "timemap_ready";
        return "input";
    }

    /** "View TimeMap" is legal whenever the input parses. */
    canViewTimemap(): boolean {
        if (validateUriInput(this.uriInput) !== null) return false;
        if (this.archive === "ait" && this.collection !== "" && !/^\d+$/.test(this.collection)) {
            return false;
        }
        return true;
    }

    /** "Calculate Unique" needs a TimeMap on screen first. */
    canCalculateUnique(): boolean {
        const phase = this.phase();
        return this.timemap !== null && phase !== "summarizing" && phase !== "rendering";
    }

    /** "Generate Thumbnails" needs the menu and a chosen count. */
    canGenerateThumbnails(): boolean {
        const phase = this.phase();
        if (phase !== "menu_ready" && phase !== "rendered") return false;
        return this.selectedCount !== null;
    }

    /** "Generate All Thumbnails" is only offered for small TimeMaps. */
    canGenerateAll(): boolean {
        const phase = this.phase();
        if (phase !== "menu_ready" && phase !== "rendered") return false;
        return this.smallTimemap;
    }

    /** URI-M list, GIF download, and embed codes need rendered thumbnails. */
    canUseArtifacts(): boolean {
        return this.phase() === "rendered";
    }

    collectionVisible(): boolean {
        return this.archive === "ait";
    }

    // ------------------------------------------------------- input phase

    setUriInput(text: string): void {
        this.uriInput = text;
        this.notify();
    }

    setArchive(archive: ArchiveChoice): void {
        this.archive = archive;
        this.notify();
    }

    setCollection(collection: string): void {
        this.collection = collection;
        this.notify();
    }

    timemapLoaded(info: TimemapInfo): void {
        this.timemap = info;
        this.range = null;
        this.resetJob();
        this.notify();
    }

    private resetJob(): void {
        this.jobId = null;
        this.jobState = null;
        this.jobError = null;
        this.events = [];
        this.menu = [];
        this.mementos = [];
        this.selectedCount = null;
        this.thumbnails = [];
        this.marked.clear();
        this.committed.clear();
    }

    // ------------------------------------------- brush / text-box range

    /** Brush drags land here; the text boxes re-render from rangeTexts(). */
    setRangeFromBrush(range: DateRange14): void {
        this.range = range;
        this.notify();
    }

    /**
     * Typed dates land here; the brush overlay re-renders from the same
     * stored range. Returns an error message (and changes nothing) for
     * unparseable or inverted input.
     */
    setRangeFromText(startText: string, endText: string): string | null {
        const start = parseDayText(startText, false);
        const end = parseDayText(endText, true);
        if (start === null || end === null) return "dates must look like 2016-05-03";
        if (start > end) return "start date is after end date";
        this.range = { start, end };
        this.notify();
        return null;
    }

    clearRange(): void {
        this.range = null;
        this.notify();
    }

    /** What the two text boxes should display right now. */
    rangeTexts(): { start: string; end: string } {
        if (this.range !== null) {
            return { start: dayText(this.range.start), end: dayText(this.range.end) };
        }
        if (this.timemap !== null) {
            return {
                start: dayText(this.timemap.date_range.start),
                end: dayText(this.timemap.date_range.end),
            };
        }
        return { start: "", end: "" };
    }

    // -------------------------------------------------------- job phase

    jobCreated(jobId: string): void {
        this.resetJob();
        this.jobId = jobId;
        this.jobState = "created";
        this.notify();
    }

    /** SSE events arrive here; stale or replayed duplicates are dropped. */
    applyEvent(event: ProgressEventInfo): void {
        const last = this.events[this.events.length - 1];
        if (last !== undefined && event.seq <= last.seq) return;
        this.events.push(event);
        this.jobState = event.stage;
        if (event.stage === "failed") this.jobError = event.detail;
        this.notify();
    }

    latestEvent(): ProgressEventInfo | null {
        return this.events[this.events.length - 1] ?? null;
    }

    jobSnapshotLoaded(snapshot: JobSnapshot): void {
        this.jobState = snapshot.state;
        this.jobError = snapshot.error;
        this.mementos = snapshot.mementos;
        this.smallTimemap = snapshot.small_timemap;
        const options: MenuOption[] = (snapshot.menu ?? []).map((option) => ({ ...option }));
        if (snapshot.three_option !== null) {
            options.push({
                count: 3,
                threshold: 0,
                indices: snapshot.three_option,
                isThreeOption: true,
            });
        }
        this.menu = options;
        this.notify();
    }

    selectCount(count: number): void {
        if (this.menu.some((option) => option.count === count)) {
            this.selectedCount = count;
            this.notify();
        }
    }

    // ------------------------------------------------- thumbnails phase

    thumbnailsRendered(thumbnails: ThumbnailInfo[]): void {
        this.thumbnails = [...thumbnails].sort((a, b) =>
            a.datetime === b.datetime
                ? a.uri_m.localeCompare(b.uri_m)
                : a.datetime.localeCompare(b.datetime),
        );
        this.jobState = "done";
        this.marked.clear();
        this.committed.clear();
        this.notify();
    }

    thumbnailRefreshed(thumbnail: ThumbnailInfo): void {
        this.thumbnails = this.thumbnails.map((t) =>
            t.uri_m === thumbnail.uri_m ? thumbnail : t,
        );
        this.notify();
    }

    // --------------------------------------------- exclusions (X/Update)

    toggleMark(uri_m: string): void {
        if (this.marked.has(uri_m)) this.marked.delete(uri_m);
        else this.marked.add(uri_m);
        this.notify();
    }

    isMarked(uri_m: string): boolean {
        return this.marked.has(uri_m);
    }

    markedCount(): number {
        return this.marked.size;
    }

    /** Commit the gray-outs: every tab drops them at once. */
    applyUpdate(): void {
        for (const uri of this.marked) this.committed.add(uri);
        this.marked.clear();
        this.notify();
    }

    /** Back to the original set: exclusions and marks both vanish. */
    revert(): void {
        this.marked.clear();
        this.committed.clear();
        this.notify();
    }

    hasExclusions(): boolean {
        return this.committed.size > 0;
    }

    /** The one list every visualization derives from. */
    includedThumbnails(): ThumbnailInfo[] {
        return this.thumbnails.filter((t) => !this.committed.has(t.uri_m));
    }

    gridItems(): ThumbnailInfo[] {
        return this.includedThumbnails();
    }

    sliderItems(): ThumbnailInfo[] {
        return this.includedThumbnails();
    }

    timelineItems(): ThumbnailInfo[] {
        return this.includedThumbnails();
    }

    gifItems(): ThumbnailInfo[] {
        return this.includedThumbnails();
    }

    /** URI stamps are mandatory on the grid when several URI-Rs merged. */
    multiOrigin(): boolean {
        return new Set(this.thumbnails.map((t) => t.source_uri_r)).size > 1;
    }

    includedUriMs(): string[] {
        return this.includedThumbnails().map((t) => t.uri_m);
    }

    embedPayload(kind: "grid" | "slider"): { kind: string; included_uri_ms: string[] } {
        return { kind, included_uri_ms: this.includedUriMs() };
    }

    /** include= query values for urims/gif requests; empty means "all". */
    inclusionQuery(): string[] | null {
        return this.hasExclusions() ? this.includedUriMs() : null;
    }

    // --------------------------------------------------------- timeline

    /**
     * One stripe per working memento: yellow for the ones with a
     * thumbnail, gray for the rest, which point at the preceding unique
     * memento they resemble.
     */
    timelineStripes(): TimelineStripe[] {
        const included = this.includedThumbnails();
        const byUri = new Map(included.map((t) => [t.uri_m, t]));
        const stripes: TimelineStripe[] = [];
        let lastUnique: ThumbnailInfo | null = null;
        for (const memento of this.mementos) {
            const thumb = byUri.get(memento.uri_m);
            if (thumb !== undefined) {
                lastUnique = thumb;
                stripes.push({ ...memento, unique: true, similarTo: null });
            } else {
                stripes.push({ ...memento, unique: false, similarTo: lastUnique });
            }
        }
        return stripes;
    }

    // -------------------------------------------------------------- gif

    setGifSettings(settings: Partial<GifSettings>): void {
        this.gif = { ...this.gif, ...settings };
        this.notify();
    }

    setActiveTab(tab: Tab): void {
        this.activeTab = tab;
        this.notify();
    }
}

// ------------------------------------------------------- date plumbing

/** "2016-05-03" -> "20160503000000" (or end-of-day), null if malformed. */
export function parseDayText(text: string, endOfDay: boolean): string | null {
    const match = /^(\d{4})-(\d{2})-(\d{2})$/.exec(text.trim());
    if (match === null) return null;
    const [, year, month, day] = match;
    const monthNum = Number(month);
    const dayNum = Number(day);
    if (monthNum < 1 || monthNum > 12 || dayNum < 1 || dayNum > 31) return null;
    return `${year}${month}${day}` + (endOfDay ? "235959" : "000000");
}

/** 14-digit timestamp -> "YYYY-MM-DD". */
export function dayText(ts14: string): string {
    return `${ts14.slice(0, 4)}-${ts14.slice(4, 6)}-${ts14.slice(6, 8)}`;
}

/** 14-digit timestamp -> epoch milliseconds (UTC). */
export function ts14ToMillis(ts14: string): number {
    return Date.UTC(
        Number(ts14.slice(0, 4)),
        Number(ts14.slice(4, 6)) - 1,
        Number(ts14.slice(6, 8)),
        Number(ts14.slice(8, 10)),
        Number(ts14.slice(10, 12)),
        Number(ts14.slice(12, 14)),
    );
}
