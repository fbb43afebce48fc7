/**
 * Phase 3 views: the four visualization tabs. Each renders from the same
 * included-thumbnail list on the model, so their contents always agree.
 */

import { dayText, ts14ToMillis } from "./model.js";
import type { SessionModel, Tab, ThumbnailInfo } from "./model.js";

const TABS: Tab[] = ["grid", "slider", "timeline", "gif"];

export interface TabElements {
    section: HTMLElement;
    tabBar: HTMLElement;
    panels: Record<Tab, HTMLElement>;
}

export interface TabActions {
    onToggleMark(uriM: string): void;
    onRefresh(uriM: string): void;
    onUpdate(): void;
    onRevert(): void;
    onDownloadUrims(): void;
    onEmbed(kind: "grid" | "slider"): void;
    onUpdateGif(): void;
    onDownloadGif(): void;
    gifPreviewUrl(): string | null;
}

/** View-local state that shouldn't live in the shared session model. */
export interface TabViewState {
    sliderIndex: number;
    timelineZoom: number;
    timelineSelected: number;
}

export function initialTabViewState(): TabViewState {
    return { sliderIndex: 0, timelineZoom: 1, timelineSelected: 0 };
}

export function renderTabs(
    model: SessionModel, el: TabElements, actions: TabActions, view: TabViewState,
): void {
    const visible = model.phase() === "rendered" || model.phase() === "rendering";
    el.section.hidden = !visible;
    if (!visible) return;

    el.tabBar.textContent = "";
    for (const tab of TABS) {
        const button = document.createElement("button");
        button.type = "button";
        button.textContent = tab === "gif" ? "Animated GIF" : tab[0].toUpperCase() + tab.slice(1);
        button.classList.toggle("active", model.activeTab === tab);
        button.addEventListener("click", () => model.setActiveTab(tab));
        el.tabBar.appendChild(button);
    }
    for (const tab of TABS) {
        el.panels[tab].hidden = tab !== model.activeTab;
    }
    switch (model.activeTab) {
        case "grid":
            renderGrid(model, el.panels.grid, actions);
            break;
        case "slider":
            renderSlider(model, el.panels.slider, view);
            break;
        case "timeline":
            renderTimeline(model, el.panels.timeline, view);
            break;
        case "gif":
            renderGifTab(model, el.panels.gif, actions);
            break;
    }
}

// ----------------------------------------------------------------- grid

function thumbnailCaption(model: SessionModel, thumb: ThumbnailInfo): HTMLElement {
    const caption = document.createElement("figcaption");
    const when = document.createElement("span");
    when.textContent = dayText(thumb.datetime) + " " +
        `${thumb.datetime.slice(8, 10)}:${thumb.datetime.slice(10, 12)}`;
    caption.appendChild(when);
    if (model.multiOrigin()) {
        // URI stamps are not optional on the grid in multi-URL mode
        const stamp = document.createElement("span");
        stamp.className = "uri-stamp";
        stamp.textContent = thumb.source_uri_r;
        caption.appendChild(stamp);
    }
    return caption;
}

function renderGrid(model: SessionModel, panel: HTMLElement, actions: TabActions): void {
    panel.textContent = "";

    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    const update = toolbarButton("Update", actions.onUpdate);
    update.disabled = model.markedCount() === 0;
    const revert = toolbarButton("Revert", actions.onRevert);
    revert.disabled = !model.hasExclusions() && model.markedCount() === 0;
    toolbar.append(
        update,
        revert,
        toolbarButton("Download URI-M List", actions.onDownloadUrims),
        toolbarButton("Embed Image Grid", () => actions.onEmbed("grid")),
        toolbarButton("Embed Image Slider", () => actions.onEmbed("slider")),
    );
    panel.appendChild(toolbar);

    const grid = document.createElement("div");
    grid.className = "thumb-grid";
    for (const thumb of model.gridItems()) {
        const card = document.createElement("figure");
        card.className = "thumb-card";
        card.classList.toggle("marked", model.isMarked(thumb.uri_m));

        const controls = document.createElement("div");
        controls.className = "thumb-controls";
        const refresh = document.createElement("button");
        refresh.type = "button";
        refresh.textContent = "↻";
        refresh.title = "retake this screenshot (waits longer each time)";
        refresh.addEventListener("click", () => actions.onRefresh(thumb.uri_m));
        const remove = document.createElement("button");
        remove.type = "button";
        remove.textContent = "×";
        remove.title = "mark for removal (apply with Update)";
        remove.addEventListener("click", () => actions.onToggleMark(thumb.uri_m));
        controls.append(refresh, remove);
        card.appendChild(controls);

        const link = document.createElement("a");
        link.href = thumb.uri_m;
        link.target = "_blank";
        link.rel = "noopener";
        const img = document.createElement("img");
        img.src = thumb.image_url;
        img.width = thumb.width;
        img.height = thumb.height;
        img.alt = thumb.datetime;
        if (thumb.status === "failed") card.classList.add("failed");
        link.appendChild(img);
        card.appendChild(link);
        card.appendChild(thumbnailCaption(model, thumb));
        grid.appendChild(card);
    }
    panel.appendChild(grid);
}

function toolbarButton(label: string, onClick: () => void): HTMLButtonElement {
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = label;
    button.addEventListener("click", onClick);
    return button;
}

// --------------------------------------------------------------- slider

function renderSlider(model: SessionModel, panel: HTMLElement, view: TabViewState): void {
    panel.textContent = "";
    const items = model.sliderItems();
    if (items.length === 0) return;
    view.sliderIndex = Math.max(0, Math.min(items.length - 1, view.sliderIndex));

    const stage = document.createElement("div");
    stage.className = "slider-stage";

    const arrowLeft = sliderArrow("←", () => {
        view.sliderIndex = (view.sliderIndex - 1 + items.length) % items.length;
        renderSlider(model, panel, view);
    });
    const arrowRight = sliderArrow("→", () => {
        view.sliderIndex = (view.sliderIndex + 1) % items.length;
        renderSlider(model, panel, view);
    });

    const current = items[view.sliderIndex];
    const link = document.createElement("a");
    link.href = current.uri_m;
    link.target = "_blank";
    link.rel = "noopener";
    const img = document.createElement("img");
    img.className = "slider-image";
    img.src = current.image_url;
    img.alt = current.datetime;
    link.appendChild(img);

    // moving the cursor across the image scrubs through the thumbnails
    img.addEventListener("mousemove", (event) => {
        const rect = img.getBoundingClientRect();
        const fraction = (event.clientX - rect.left) / rect.width;
        const index = Math.max(0, Math.min(items.length - 1, Math.floor(fraction * items.length)));
        if (index !== view.sliderIndex) {
            view.sliderIndex = index;
            renderSlider(model, panel, view);
        }
    });

    stage.append(arrowLeft, link, arrowRight);
    panel.appendChild(stage);

    const caption = document.createElement("div");
    caption.className = "slider-caption";
    caption.textContent = `${view.sliderIndex + 1} / ${items.length} — ${dayText(current.datetime)}`;
    panel.appendChild(caption);
}

function sliderArrow(label: string, onClick: () => void): HTMLButtonElement {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "slider-arrow";
    button.textContent = label;
    button.addEventListener("click", onClick);
    return button;
}

// ------------------------------------------------------------- timeline

function renderTimeline(model: SessionModel, panel: HTMLElement, view: TabViewState): void {
    panel.textContent = "";
    const stripes = model.timelineStripes();
    if (stripes.length === 0) return;
    view.timelineSelected = Math.max(0, Math.min(stripes.length - 1, view.timelineSelected));

    const controls = document.createElement("div");
    controls.className = "toolbar";
    const move = (step: (from: number) => number) => () => {
        view.timelineSelected = step(view.timelineSelected);
        renderTimeline(model, panel, view);
    };
    const nextMatching = (from: number, direction: 1 | -1, uniqueOnly: boolean): number => {
        let i = from;
        while (true) {
            i += direction;
            if (i < 0 || i >= stripes.length) return from;
            if (!uniqueOnly || stripes[i].unique) return i;
        }
    };
    controls.append(
        toolbarButton("zoom +", () => {
            view.timelineZoom = Math.min(16, view.timelineZoom * 2);
            renderTimeline(model, panel, view);
        }),
        toolbarButton("zoom −", () => {
            view.timelineZoom = Math.max(1, view.timelineZoom / 2);
            renderTimeline(model, panel, view);
        }),
        toolbarButton("previous", move((i) => nextMatching(i, -1, false))),
        toolbarButton("next", move((i) => nextMatching(i, 1, false))),
        toolbarButton("previous unique", move((i) => nextMatching(i, -1, true))),
        toolbarButton("next unique", move((i) => nextMatching(i, 1, true))),
    );
    panel.appendChild(controls);

    const track = document.createElement("div");
    track.className = "timeline-track";
    track.style.width = `${Math.round(view.timelineZoom * 100)}%`;
    const t0 = ts14ToMillis(stripes[0].datetime);
    const t1 = ts14ToMillis(stripes[stripes.length - 1].datetime);
    const span = Math.max(1, t1 - t0);
    stripes.forEach((stripe, index) => {
        const mark = document.createElement("button");
        mark.type = "button";
        mark.className = stripe.unique ? "stripe unique" : "stripe";
        mark.classList.toggle("selected", index === view.timelineSelected);
        mark.style.left = `${((ts14ToMillis(stripe.datetime) - t0) / span) * 100}%`;
        mark.title = dayText(stripe.datetime);
        mark.addEventListener("click", () => {
            view.timelineSelected = index;
            renderTimeline(model, panel, view);
        });
        track.appendChild(mark);
    });
    const scroller = document.createElement("div");
    scroller.className = "timeline-scroller";
    scroller.appendChild(track);
    panel.appendChild(scroller);

    const selected = stripes[view.timelineSelected];
    const detail = document.createElement("div");
    detail.className = "timeline-detail";
    const shown = selected.unique
        ? model.includedThumbnails().find((t) => t.uri_m === selected.uri_m) ?? null
        : selected.similarTo;
    if (shown !== null) {
        const img = document.createElement("img");
        img.src = shown.image_url;
        img.alt = shown.datetime;
        detail.appendChild(img);
    }
    const label = document.createElement("div");
    label.textContent = selected.unique
        ? `${dayText(selected.datetime)} — representative memento`
        : selected.similarTo !== null
            ? `${dayText(selected.datetime)} — similar to ${dayText(selected.similarTo.datetime)}`
            : `${dayText(selected.datetime)} — no earlier representative`;
    detail.appendChild(label);
    panel.appendChild(detail);
}

// ------------------------------------------------------------------ gif

function renderGifTab(model: SessionModel, panel: HTMLElement, actions: TabActions): void {
    panel.textContent = "";

    const controls = document.createElement("div");
    controls.className = "toolbar";

    const intervalLabel = document.createElement("label");
    intervalLabel.textContent = "seconds per frame ";
    const interval = document.createElement("input");
    interval.type = "number";
    interval.min = "0.1";
    interval.step = "0.1";
    interval.value = String(model.gif.interval);
    interval.addEventListener("change", () => {
        const value = Number(interval.value);
        if (Number.isFinite(value) && value > 0) model.setGifSettings({ interval: value });
    });
    intervalLabel.appendChild(interval);

    const timestamp = checkbox("timestamp watermark", model.gif.timestamp, (checked) =>
        model.setGifSettings({ timestamp: checked }),
    );
    controls.append(intervalLabel, timestamp);
    if (model.multiOrigin()) {
        // the URI stamp is optional on the GIF (unlike the grid)
        controls.append(
            checkbox("URI stamp", model.gif.uristamp, (checked) =>
                model.setGifSettings({ uristamp: checked }),
            ),
        );
    }
    controls.append(
        toolbarButton("Update GIF", actions.onUpdateGif),
        toolbarButton("Download GIF", actions.onDownloadGif),
    );
    panel.appendChild(controls);

    const url = actions.gifPreviewUrl();
    if (url !== null) {
        const img = document.createElement("img");
        img.className = "gif-preview";
        img.src = url;
        img.alt = "animated summary";
        panel.appendChild(img);
    } else {
        const hint = document.createElement("p");
        hint.textContent = "Press “Update GIF” to build the animation.";
        panel.appendChild(hint);
    }
}

function checkbox(text: string, checked: boolean, onChange: (checked: boolean) => void): HTMLLabelElement {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = checked;
    box.addEventListener("change", () => onChange(box.checked));
    label.append(box, document.createTextNode(" " + text));
    return label;
}
