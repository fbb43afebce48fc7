/**
 * Phase 1 and 2 views: the input form, the brushable month histogram,
 * the progress window, and the representative-count menu.
 */

import { dragToRange, overlaySpan } from "./histogram.js";
import type { SessionModel } from "./model.js";

export interface InputElements {
    uriInput: HTMLInputElement;
    archiveSelect: HTMLSelectElement;
    collectionField: HTMLElement;
    collectionInput: HTMLInputElement;
    viewTimemapButton: HTMLButtonElement;
    timemapSection: HTMLElement;
    timemapSummary: HTMLElement;
    histogram: HTMLElement;
    brush: HTMLElement;
    startInput: HTMLInputElement;
    endInput: HTMLInputElement;
    rangeError: HTMLElement;
    calculateButton: HTMLButtonElement;
    generateAllButton: HTMLButtonElement;
    progressSection: HTMLElement;
    progressBar: HTMLElement;
    progressDetail: HTMLElement;
    menuSection: HTMLElement;
    menuOptions: HTMLElement;
    generateButton: HTMLButtonElement;
}

export function renderInput(model: SessionModel, el: InputElements): void {
    el.collectionField.hidden = !model.collectionVisible();
    el.viewTimemapButton.disabled = !model.canViewTimemap();
    el.calculateButton.disabled = !model.canCalculateUnique();

    const timemap = model.timemap;
    el.timemapSection.hidden = timemap === null;
    if (timemap !== null) {
        el.timemapSummary.textContent =
            `${timemap.memento_count} mementos, ` +
            `${timemap.date_range.start.slice(0, 4)}-${timemap.date_range.start.slice(4, 6)}` +
            ` to ${timemap.date_range.end.slice(0, 4)}-${timemap.date_range.end.slice(4, 6)}`;
        renderHistogramBars(model, el);
        const texts = model.rangeTexts();
        if (document.activeElement !== el.startInput) el.startInput.value = texts.start;
        if (document.activeElement !== el.endInput) el.endInput.value = texts.end;
    }

    renderProgress(model, el);
    renderMenu(model, el);
}

function renderHistogramBars(model: SessionModel, el: InputElements): void {
    const bins = model.timemap?.histogram ?? [];
    el.histogram.querySelectorAll(".bar").forEach((bar) => bar.remove());
    const maxCount = Math.max(1, ...bins.map((bin) => bin.count));
    for (const bin of bins) {
        const bar = document.createElement("div");
        bar.className = "bar";
        bar.style.height = `${Math.round((bin.count / maxCount) * 100)}%`;
        bar.title = `${bin.month}: ${bin.count}`;
        el.histogram.appendChild(bar);
    }
    const range = model.range;
    if (range !== null && bins.length > 0) {
        const span = overlaySpan(bins, range, el.histogram.clientWidth);
        if (span !== null) {
            el.brush.hidden = false;
            el.brush.style.left = `${span.x0}px`;
            el.brush.style.width = `${span.x1 - span.x0}px`;
            return;
        }
    }
    el.brush.hidden = true;
}

/** Click-and-drag over the histogram selects whole months. */
export function bindBrush(model: SessionModel, el: InputElements): void {
    let dragStartX: number | null = null;

    const localX = (event: MouseEvent): number => {
        const rect = el.histogram.getBoundingClientRect();
        return event.clientX - rect.left;
    };

    el.histogram.addEventListener("mousedown", (event) => {
        if (model.timemap === null) return;
        dragStartX = localX(event);
        event.preventDefault();
    });
    window.addEventListener("mousemove", (event) => {
        if (dragStartX === null || model.timemap === null) return;
        const bins = model.timemap.histogram;
        model.setRangeFromBrush(
            dragToRange(bins, dragStartX, localX(event), el.histogram.clientWidth),
        );
    });
    window.addEventListener("mouseup", () => {
        dragStartX = null;
    });
}

/** Typing a range repositions the brush (the model is the middleman). */
export function bindRangeInputs(model: SessionModel, el: InputElements): void {
    const apply = () => {
        const error = model.setRangeFromText(el.startInput.value, el.endInput.value);
        el.rangeError.textContent = error ?? "";
    };
    el.startInput.addEventListener("change", apply);
    el.endInput.addEventListener("change", apply);
}

function renderProgress(model: SessionModel, el: InputElements): void {
    const phase = model.phase();
    const active = phase === "summarizing" || phase === "rendering" || phase === "failed";
    el.progressSection.hidden = !active && model.events.length === 0;
    const latest = model.latestEvent();
    if (latest !== null) {
        el.progressBar.style.width = `${Math.round(latest.fraction * 100)}%`;
        el.progressDetail.textContent = `${latest.stage}: ${latest.detail}`;
        el.progressDetail.classList.toggle("error", latest.stage === "failed");
    }
}

function renderMenu(model: SessionModel, el: InputElements): void {
    const phase = model.phase();
    const show = phase === "menu_ready" || phase === "rendering" || phase === "rendered";
    el.menuSection.hidden = !show;
    el.generateButton.disabled = !model.canGenerateThumbnails();
    el.generateAllButton.hidden = !model.smallTimemap;
    el.generateAllButton.disabled = !model.canGenerateAll();
    if (!show) return;

    el.menuOptions.textContent = "";
    for (const option of model.menu) {
        const button = document.createElement("button");
        button.type = "button";
        button.className = "menu-option";
        button.textContent = option.isThreeOption
            ? "3 (first, central, last)"
            : String(option.count);
        button.title = option.isThreeOption
            ? "quick summary from the tightest selection"
            : `distance threshold ${option.threshold}`;
        button.classList.toggle("selected", model.selectedCount === option.count);
        button.addEventListener("click", () => model.selectCount(option.count));
        el.menuOptions.appendChild(button);
    }
}
