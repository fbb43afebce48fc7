/** Typed client for the summarizer's HTTP API. */

import type {
    JobSnapshot,
    ProgressEventInfo,
    ThumbnailInfo,
    TimemapInfo,
} from "./model.js";

export class ApiError extends Error {
    constructor(readonly status: number, detail: string) {
        super(detail);
    }
}

async function asJson<T>(response: Response): Promise<T> {
    if (!response.ok) {
        let detail = response.statusText;
        try {
            const body = await response.json();
            if (typeof body.detail === "string") detail = body.detail;
            else if (body.detail !== undefined) detail = JSON.stringify(body.detail);
        } catch {
            // non-JSON error body; keep the status text
        }
        throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
}

export interface SummarizeArgs {
    uri_rs: string[];
    archive: string;
    collection?: string;
    date_range?: { start: string; end: string };
}

export class ApiClient {
    constructor(readonly base: string = "") {}

    async fetchTimemap(uriRs: string[], archive: string, collection: string): Promise<TimemapInfo> {
        const params = new URLSearchParams();
        for (const uri of uriRs) params.append("uri_r", uri);
        params.set("archive", archive);
        if (collection !== "") params.set("collection", collection);
        return asJson(await fetch(`${this.base}/api/timemap?${params}`));
    }

    async summarize(args: SummarizeArgs): Promise<string> {
        const response = await fetch(`${this.base}/api/summarize`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(args),
        });
        const body = await asJson<{ job_id: string }>(response);
        return body.job_id;
    }

    async jobSnapshot(jobId: string): Promise<JobSnapshot> {
        return asJson(await fetch(`${this.base}/api/jobs/${jobId}`));
    }

    /**
     * Subscribe to the job's progress stream. Returns an unsubscribe
     * function; the stream closes itself after the terminal event.
     */
    subscribeEvents(
        jobId: string,
        onEvent: (event: ProgressEventInfo) => void,
        onClose: () => void,
    ): () => void {
        const source = new EventSource(`${this.base}/api/jobs/${jobId}/events`);
        source.onmessage = (message) => {
            onEvent(JSON.parse(message.data) as ProgressEventInfo);
        };
        source.onerror = () => {
            // the server closes the stream after done/failed
            source.close();
            onClose();
        };
        return () => source.close();
    }

    async generateThumbnails(
        jobId: string, selection: number | "all" | number[],
    ): Promise<ThumbnailInfo[]> {
        const response = await fetch(`${this.base}/api/jobs/${jobId}/thumbnails`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ selection }),
        });
        const body = await asJson<{ thumbnails: ThumbnailInfo[] }>(response);
        return body.thumbnails;
    }

    async refreshThumbnail(jobId: string, uriM: string): Promise<ThumbnailInfo> {
        const response = await fetch(
            `${this.base}/api/jobs/${jobId}/thumbnails/${encodeURIComponent(uriM)}/refresh`,
            { method: "POST" },
        );
        return asJson(response);
    }

    urimsUrl(jobId: string, include: string[] | null): string {
        const params = new URLSearchParams();
        for (const uri of include ?? []) params.append("include", uri);
        const query = params.toString();
        return `${this.base}/api/jobs/${jobId}/urims${query ? "?" + query : ""}`;
    }

    gifUrl(
        jobId: string,
        settings: { interval: number; timestamp: boolean; uristamp: boolean },
        include: string[] | null,
        cacheBust = false,
    ): string {
        const params = new URLSearchParams();
        params.set("interval", String(settings.interval));
        params.set("timestamp", settings.timestamp ? "1" : "0");
        params.set("uristamp", settings.uristamp ? "1" : "0");
        for (const uri of include ?? []) params.append("include", uri);
        if (cacheBust) params.set("_", String(Date.now()));
        return `${this.base}/api/jobs/${jobId}/gif?${params}`;
    }

    async embedCode(
        jobId: string, payload: { kind: string; included_uri_ms: string[] },
    ): Promise<{ html: string; src: string }> {
        const response = await fetch(`${this.base}/api/jobs/${jobId}/embed`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(payload),
        });
        return asJson(response);
    }
}
