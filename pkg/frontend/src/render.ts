// Full-page render: pure function of the latest state document.

import type { ChartHandlers } from "./charts.js";
import { renderChart } from "./charts.js";
import type { WidgetHandlers } from "./widgets.js";
import { renderWidget } from "./widgets.js";
import type { StateDoc, WidgetDoc } from "./types.js";

export interface RenderHandlers extends ChartHandlers, WidgetHandlers {
  onChat(text: string): void;
  onRemoveFilter(selection: string): void;
  onDismissViz(vizId: string): void;
  onDownload(entity: string): void;
}

export function renderState(root: HTMLElement, state: StateDoc, handlers: RenderHandlers): void {
  root.textContent = "";
  root.appendChild(renderChatPanel(state, handlers));
  root.appendChild(renderDashboardPanel(state, handlers));
}

function renderChatPanel(state: StateDoc, handlers: RenderHandlers): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "chat-panel";

  const entries = document.createElement("div");
  entries.className = "entries";
  const widgetById = new Map<string, WidgetDoc>(state.widgets.map((w) => [w.id, w]));
  for (const entry of state.entries) {
    if (entry.kind === "widget") {
      const widget = widgetById.get(entry.widget_id ?? "");
      if (widget) entries.appendChild(renderWidget(widget, state, handlers));
      continue; // dismissed widgets render as nothing
    }
    const bubble = document.createElement("div");
    bubble.className = `entry entry-${entry.kind}`;
    bubble.textContent = entry.text ?? "";
    entries.appendChild(bubble);
  }
  panel.appendChild(entries);

  const form = document.createElement("form");
  form.className = "chat-input";
  const input = document.createElement("input");
  input.type = "text";
  input.placeholder = "Ask about the data…";
  const button = document.createElement("button");
  button.type = "submit";
  button.textContent = "Send";
  form.append(input, button);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const text = input.value.trim();
    if (text) {
      input.value = "";
      handlers.onChat(text);
    }
  });
  panel.appendChild(form);
  return panel;
}

function renderDashboardPanel(state: StateDoc, handlers: RenderHandlers): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "dashboard-panel";
  panel.appendChild(renderToolbar(state, handlers));

  const charts = document.createElement("div");
  charts.className = "charts";
  if (state.dashboard.length === 0) {
    const empty = document.createElement("div");
    empty.className = "empty-dashboard";
    empty.textContent = "No visualizations yet. Ask a question to get started.";
    charts.appendChild(empty);
  }
  for (const item of state.dashboard) {
    const card = renderChart(item, state, handlers);
    const header = document.createElement("div");
    header.className = "chart-header";
    const title = document.createElement("span");
    title.textContent = `${item.viz_id} · ${item.spec.source[0].entity}`;
    const dismiss = document.createElement("button");
    dismiss.className = "dismiss";
    dismiss.textContent = "×";
    dismiss.title = "Dismiss chart";
    dismiss.addEventListener("click", () => handlers.onDismissViz(item.viz_id));
    header.append(title, dismiss);
    card.prepend(header);
    charts.appendChild(card);
  }
  panel.appendChild(charts);
  return panel;
}

function renderToolbar(state: StateDoc, handlers: RenderHandlers): HTMLElement {
  const bar = document.createElement("div");
  bar.className = "toolbar";

  const status = document.createElement("span");
  status.className = "status-bar";
  for (const [entity, count] of Object.entries(state.counts)) {
    const chip = document.createElement("span");
    chip.className = "count";
    chip.dataset.entity = entity;
    chip.textContent = `${entity}: ${count}`;
    status.appendChild(chip);
  }
  bar.appendChild(status);

  const filters = document.createElement("span");
  filters.className = "filter-bar";
  for (const chip of state.chips) {
    const el = document.createElement("span");
    el.className = "chip";
    el.dataset.selection = chip.selection;
    const text = document.createElement("span");
    text.textContent = chip.summary;
    const remove = document.createElement("button");
    remove.className = "chip-remove";
    remove.textContent = "×";
    remove.title = "Reset this filter";
    remove.addEventListener("click", () => handlers.onRemoveFilter(chip.selection));
    el.append(text, remove);
    filters.appendChild(el);
  }
  bar.appendChild(filters);

  const download = document.createElement("span");
  download.className = "download-controls";
  const select = document.createElement("select");
  select.className = "download-entity";
  for (const entity of Object.keys(state.counts)) {
    const option = document.createElement("option");
    option.value = entity;
    option.textContent = entity;
    select.appendChild(option);
  }
  const button = document.createElement("button");
  button.className = "download-button";
  button.textContent = "Download";
  button.addEventListener("click", () => handlers.onDownload(select.value));
  download.append(select, button);
  bar.appendChild(download);
  return bar;
}
