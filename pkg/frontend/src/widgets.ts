// Adjustment widgets: the chat-side disclosure of filters and charts.
// Filter widgets render the live registry payload (range sliders for
// intervals, checkbox lists for point selections, "(null)" included);
// viz widgets render one dropdown per swappable encoding slot.

import type {
  Cell,
  FilterWidgetDoc,
  Interval,
  StateDoc,
  VizWidgetDoc,
  WidgetDoc,
} from "./types.js";
import { NULL_LABEL, cellLabel } from "./types.js";

export interface WidgetHandlers {
  onFilterIntervals(selection: string, intervals: Record<string, Interval>): void;
  onFilterValues(selection: string, values: Cell[][]): void;
  onFieldSwap(vizId: string, channel: string, field: string): void;
}

export function renderWidget(
  widget: WidgetDoc,
  _state: StateDoc,
  handlers: WidgetHandlers,
): HTMLElement {
  return widget.kind === "filter_adjust"
    ? renderFilterWidget(widget, handlers)
    : renderVizWidget(widget, handlers);
}

// --------------------------------------------------------------------------
// filter widgets
// --------------------------------------------------------------------------

function renderFilterWidget(widget: FilterWidgetDoc, handlers: WidgetHandlers): HTMLElement {
  const card = document.createElement("div");
  card.className = "widget filter-widget";
  card.dataset.widget = widget.id;
  card.dataset.selection = widget.selection;
  const title = document.createElement("div");
  title.className = "widget-title";
  title.textContent = `Filtering ${widget.entity} ${widget.fields.join(", ")}`;
  card.appendChild(title);
  if (widget.selection_kind === "interval") {
    card.appendChild(renderIntervalControls(widget, handlers));
  } else {
    card.appendChild(renderPointControls(widget, handlers));
  }
  return card;
}

function sentinelLabel(value: number | null, side: "min" | "max"): string {
  return value === null ? side : cellLabel(value);
}

function renderIntervalControls(widget: FilterWidgetDoc, handlers: WidgetHandlers): HTMLElement {
  const wrap = document.createElement("div");
  const intervals = widget.payload.intervals ?? {};

  const commit = () => {
    const out: Record<string, Interval> = {};
    for (const field of widget.fields) {
      const lo = wrap.querySelector<HTMLInputElement>(`input[data-field="${field}"][data-side="lo"]`);
      const hi = wrap.querySelector<HTMLInputElement>(`input[data-field="${field}"][data-side="hi"]`);
      out[field] = [
        lo && lo.value !== "" ? Number(lo.value) : null,
        hi && hi.value !== "" ? Number(hi.value) : null,
      ];
    }
    handlers.onFilterIntervals(widget.selection, out);
  };

  for (const field of widget.fields) {
    const [lo, hi] = intervals[field] ?? [null, null];
    const domain = widget.domain[field] ?? {};
    const row = document.createElement("div");
    row.className = "interval-row";
    row.dataset.field = field;

    const label = document.createElement("span");
    label.className = "interval-label";
    label.textContent = `${field}: ${sentinelLabel(lo, "min")} to ${sentinelLabel(hi, "max")}`;
    row.appendChild(label);

    for (const [side, value] of [["lo", lo], ["hi", hi]] as const) {
      const input = document.createElement("input");
      input.type = "number";
      input.step = "any";
      input.dataset.field = field;
      input.dataset.side = side;
      input.value = value === null ? "" : String(value);
      input.placeholder = side === "lo" ? `min ${cellLabel(domain.min ?? null)}`
                                        : `max ${cellLabel(domain.max ?? null)}`;
      input.addEventListener("change", commit);
      row.appendChild(input);
    }

    if (domain.min !== undefined && domain.max !== undefined) {
      for (const [side, value] of [["lo", lo], ["hi", hi]] as const) {
        const slider = document.createElement("input");
        slider.type = "range";
        slider.min = String(domain.min);
        slider.max = String(domain.max);
        slider.step = String((domain.max - domain.min) / 200 || 1);
        slider.value = String(value ?? (side === "lo" ? domain.min : domain.max));
        slider.dataset.field = field;
        slider.dataset.slider = side;
        slider.addEventListener("input", () => {
          const box = row.querySelector<HTMLInputElement>(
            `input[data-field="${field}"][data-side="${side}"]`);
          if (box) box.value = slider.value;
          commit();
        });
        row.appendChild(slider);
      }
    }
    wrap.appendChild(row);
  }
  return wrap;
}

function renderPointControls(widget: FilterWidgetDoc, handlers: WidgetHandlers): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "point-controls";
  const selected = new Set((widget.payload.values ?? []).map((t) => JSON.stringify(t)));

  // checkbox per combination of the per-field domains, capped to stay usable
  let combos: Cell[][] = [[]];
  for (const field of widget.fields) {
    const categories = widget.domain[field]?.categories ?? [];
    combos = combos.flatMap((prefix) => categories.map((c) => [...prefix, c]));
    if (combos.length > 64) break;
  }
  if (combos.length > 64) {
    combos = (widget.payload.values ?? []).slice(0, 64);
  }

  for (const tuple of combos) {
    const key = JSON.stringify(tuple);
    const label = document.createElement("label");
    label.className = "point-option";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = selected.has(key);
    box.dataset.tuple = key;
    box.addEventListener("change", () => {
      const next = new Set(selected);
      if (box.checked) next.add(key);
      else next.delete(key);
      handlers.onFilterValues(widget.selection,
                              [...next].map((k) => JSON.parse(k) as Cell[]));
    });
    const text = document.createElement("span");
    text.textContent = tuple.map((v) => (v === null ? NULL_LABEL : cellLabel(v))).join(" / ");
    label.append(box, text);
    wrap.appendChild(label);
  }
  return wrap;
}

// --------------------------------------------------------------------------
// viz widgets
// --------------------------------------------------------------------------

function renderVizWidget(widget: VizWidgetDoc, handlers: WidgetHandlers): HTMLElement {
  const card = document.createElement("div");
  card.className = "widget viz-widget";
  card.dataset.widget = widget.id;
  card.dataset.viz = widget.viz_id;
  const title = document.createElement("div");
  title.className = "widget-title";
  title.textContent = `Visualization ${widget.viz_id}`;
  card.appendChild(title);
  if (widget.slots.length === 0) {
    const note = document.createElement("div");
    note.className = "widget-note";
    note.textContent = "No adjustable fields.";
    card.appendChild(note);
    return card;
  }
  for (const slot of widget.slots) {
    const row = document.createElement("label");
    row.className = "slot-row";
    const name = document.createElement("span");
    name.textContent = slot.channel;
    const select = document.createElement("select");
    select.dataset.channel = slot.channel;
    for (const candidate of slot.candidates) {
      const option = document.createElement("option");
      option.value = candidate;
      option.textContent = candidate;
      option.selected = candidate === slot.field;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      handlers.onFieldSwap(widget.viz_id, slot.channel, select.value);
    });
    row.append(name, select);
    card.appendChild(row);
  }
  return card;
}
