/** Wires the session model, the API client, and the DOM together. */

import { ApiClient, ApiError } from "./api.js";
import { SessionModel, splitUriInput } from "./model.js";
import { bindBrush, bindRangeInputs, renderInput } from "./views_input.js";
import type { InputElements } from "./views_input.js";
import { initialTabViewState, renderTabs } from "./views_tabs.js";
import type { TabActions, TabElements } from "./views_tabs.js";

function byId<T extends HTMLElement>(id: string): T {
    const element = document.getElementById(id);
    if (element === null) throw new Error(`missing element #${id}`);
    return element as T;
}

const model = new SessionModel();
const api = new ApiClient("");
const tabView = initialTabViewState();
let appliedGifUrl: string | null = null;
let unsubscribeEvents: (() => void) | null = null;

const input: InputElements = {
    uriInput: byId("uri-input"),
    archiveSelect: byId("archive-select"),
    collectionField: byId("collection-field"),
    collectionInput: byId("collection-input"),
    viewTimemapButton: byId("view-timemap"),
    timemapSection: byId("timemap-section"),
    timemapSummary: byId("timemap-summary"),
    histogram: byId("histogram"),
    brush: byId("brush"),
    startInput: byId("range-start"),
    endInput: byId("range-end"),
    rangeError: byId("range-error"),
    calculateButton: byId("calculate-unique"),
    generateAllButton: byId("generate-all"),
    progressSection: byId("progress-section"),
    progressBar: byId("progress-bar"),
    progressDetail: byId("progress-detail"),
    menuSection: byId("menu-section"),
    menuOptions: byId("menu-options"),
    generateButton: byId("generate-thumbnails"),
};

const tabs: TabElements = {
    section: byId("tabs-section"),
    tabBar: byId("tab-bar"),
    panels: {
        grid: byId("panel-grid"),
        slider: byId("panel-slider"),
        timeline: byId("panel-timeline"),
        gif: byId("panel-gif"),
    },
};

const statusLine = byId<HTMLElement>("status-line");
const embedOutput = byId<HTMLTextAreaElement>("embed-output");

function reportError(error: unknown): void {
    const message = error instanceof ApiError
        ? `${error.status}: ${error.message}`
        : String(error);
    statusLine.textContent = message;
    statusLine.classList.add("error");
}

function clearError(): void {
    statusLine.textContent = "";
    statusLine.classList.remove("error");
}

const actions: TabActions = {
    onToggleMark: (uriM) => model.toggleMark(uriM),
    onUpdate: () => {
        model.applyUpdate();
        appliedGifUrl = gifUrlForCurrentState(false);
    },
    onRevert: () => {
        model.revert();
        appliedGifUrl = gifUrlForCurrentState(false);
    },
    onRefresh: async (uriM) => {
        if (model.jobId === null) return;
        clearError();
        try {
            model.thumbnailRefreshed(await api.refreshThumbnail(model.jobId, uriM));
        } catch (error) {
            reportError(error);
        }
    },
    onDownloadUrims: () => {
        if (model.jobId === null) return;
        window.open(api.urimsUrl(model.jobId, model.inclusionQuery()), "_blank");
    },
    onEmbed: async (kind) => {
        if (model.jobId === null) return;
        clearError();
        try {
            const embed = await api.embedCode(model.jobId, model.embedPayload(kind));
            embedOutput.hidden = false;
            embedOutput.value = embed.html;
            embedOutput.select();
        } catch (error) {
            reportError(error);
        }
    },
    onUpdateGif: () => {
        appliedGifUrl = gifUrlForCurrentState(true);
        model.notify();
    },
    onDownloadGif: () => {
        const url = appliedGifUrl ?? gifUrlForCurrentState(false);
        if (url !== null) window.open(url, "_blank");
    },
    gifPreviewUrl: () => appliedGifUrl,
};

function gifUrlForCurrentState(cacheBust: boolean): string | null {
    if (model.jobId === null || model.phase() !== "rendered") return null;
    return api.gifUrl(model.jobId, model.gif, model.inclusionQuery(), cacheBust);
}

// ------------------------------------------------------------ handlers

input.uriInput.addEventListener("input", () => model.setUriInput(input.uriInput.value));
input.archiveSelect.addEventListener("change", () =>
    model.setArchive(input.archiveSelect.value === "ait" ? "ait" : "ia"),
);
input.collectionInput.addEventListener("input", () =>
    model.setCollection(input.collectionInput.value),
);

input.viewTimemapButton.addEventListener("click", async () => {
    clearError();
    try {
        const info = await api.fetchTimemap(
            splitUriInput(model.uriInput), model.archive, model.collection,
        );
        model.timemapLoaded(info);
    } catch (error) {
        reportError(error);
    }
});

input.calculateButton.addEventListener("click", async () => {
    clearError();
    try {
        const jobId = await api.summarize({
            uri_rs: splitUriInput(model.uriInput),
            archive: model.archive,
            collection: model.collection === "" ? undefined : model.collection,
            date_range: model.range ?? undefined,
        });
        model.jobCreated(jobId);
        watchJob(jobId);
    } catch (error) {
        reportError(error);
    }
});

function watchJob(jobId: string): void {
    unsubscribeEvents?.();
    unsubscribeEvents = api.subscribeEvents(
        jobId,
        (event) => {
            model.applyEvent(event);
            if (event.stage === "menu_ready") void refreshSnapshot(jobId);
        },
        () => void refreshSnapshot(jobId),
    );
}

async function refreshSnapshot(jobId: string): Promise<void> {
    try {
        model.jobSnapshotLoaded(await api.jobSnapshot(jobId));
    } catch (error) {
        reportError(error);
    }
}

async function generate(selection: number | "all" | number[]): Promise<void> {
    if (model.jobId === null) return;
    clearError();
    try {
        const thumbnails = await api.generateThumbnails(model.jobId, selection);
        model.thumbnailsRendered(thumbnails);
        appliedGifUrl = gifUrlForCurrentState(false);
    } catch (error) {
        reportError(error);
    }
}

input.generateButton.addEventListener("click", () => {
    if (model.selectedCount !== null) void generate(model.selectedCount);
});
input.generateAllButton.addEventListener("click", () => void generate("all"));

bindBrush(model, input);
bindRangeInputs(model, input);

model.subscribe(() => {
    renderInput(model, input);
    renderTabs(model, tabs, actions, tabView);
});
model.notify();
