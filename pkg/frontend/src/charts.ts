// SVG chart rendering straight from server ResultTables. No data ever gets
// filtered or aggregated here; brushing just reports data-space extents back.

import type {
  Cell,
  DashboardItem,
  EncodingDoc,
  FilterWidgetDoc,
  Interval,
  StateDoc,
} from "./types.js";
import { cellLabel } from "./types.js";

export interface ChartHandlers {
  onIntervalBrush(vizId: string, intervals: Record<string, Interval>): void;
  onPointToggle(vizId: string, values: Cell[][]): void;
  onClearBrush(vizId: string): void;
}

export const CHART_WIDTH = 420;
export const CHART_HEIGHT = 240;
export const MARGIN = { top: 12, right: 14, bottom: 34, left: 104 };
const PLOT = {
  x0: MARGIN.left,
  y0: MARGIN.top,
  x1: CHART_WIDTH - MARGIN.right,
  y1: CHART_HEIGHT - MARGIN.bottom,
};

const PALETTE = ["#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
                 "#b279a2", "#9d755d", "#eeca3b"];

const SVG_NS = "http://www.w3.org/2000/svg";

export interface LinearScale {
  min: number;
  max: number;
  r0: number;
  r1: number;
  apply(value: number): number;
  invert(px: number): number;
}

export function linearScale(min: number, max: number, r0: number, r1: number): LinearScale {
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const k = (r1 - r0) / (max - min);
  return {
    min, max, r0, r1,
    apply: (v) => r0 + (v - min) * k,
    invert: (px) => min + (px - r0) / k,
  };
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

function columnIndex(item: DashboardItem, field: string): number {
  const i = item.table.columns.findIndex((c) => c.name === field);
  if (i < 0) throw new Error(`column ${field} missing from result table`);
  return i;
}

function encodings(item: DashboardItem): EncodingDoc[] {
  return item.spec.representation?.mapping ?? [];
}

function byChannel(item: DashboardItem, channel: string): EncodingDoc | undefined {
  return encodings(item).find((e) => e.channel === channel);
}

/** Live brush payload: the mirrored filter widget is the source of truth. */
export function brushPayload(state: StateDoc, item: DashboardItem): FilterWidgetDoc | null {
  if (!item.binding) return null;
  const selection = item.binding.selection;
  const widget = state.widgets.find(
    (w) => w.kind === "filter_adjust" && w.selection === selection,
  );
  return (widget as FilterWidgetDoc) ?? null;
}

export function renderChart(
  item: DashboardItem,
  state: StateDoc,
  handlers: ChartHandlers,
): HTMLElement {
  const card = document.createElement("div");
  card.className = "chart-card";
  card.dataset.viz = item.viz_id;
  const mark = item.spec.representation?.mark ?? "row";
  try {
    if (mark === "row") {
      card.appendChild(renderTable(item));
    } else if (mark === "bar") {
      card.appendChild(renderBar(item, state, handlers));
    } else if (mark === "point" || mark === "line") {
      card.appendChild(renderXY(item, state, handlers, mark));
    } else {
      card.appendChild(fallbackCard(item, `unknown mark "${mark}"`));
    }
  } catch (err) {
    card.appendChild(fallbackCard(item, String(err)));
  }
  return card;
}

function fallbackCard(item: DashboardItem, reason: string): HTMLElement {
  const div = document.createElement("div");
  div.className = "chart-fallback";
  const note = document.createElement("p");
  note.textContent = `Cannot render this chart (${reason}); raw spec:`;
  const pre = document.createElement("pre");
  pre.textContent = JSON.stringify(item.spec, null, 2);
  div.append(note, pre);
  return div;
}

// --------------------------------------------------------------------------
// tabular
// --------------------------------------------------------------------------

const TABLE_ROW_CAP = 30;

function renderTable(item: DashboardItem): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "table-wrap";
  const table = document.createElement("table");
  const head = table.createTHead().insertRow();
  for (const col of item.table.columns) {
    const th = document.createElement("th");
    th.textContent = col.name;
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const row of item.table.rows.slice(0, TABLE_ROW_CAP)) {
    const tr = body.insertRow();
    for (const cell of row) tr.insertCell().textContent = cellLabel(cell);
  }
  wrap.appendChild(table);
  const note = document.createElement("div");
  note.className = "table-note";
  note.textContent = item.table.rows.length > TABLE_ROW_CAP
    ? `showing ${TABLE_ROW_CAP} of ${item.table.rows.length} rows`
    : `${item.table.rows.length} rows`;
  wrap.appendChild(note);
  return wrap;
}

// --------------------------------------------------------------------------
// bars (grouped/stacked/normalized) with point selection on marks
// --------------------------------------------------------------------------

function renderBar(item: DashboardItem, state: StateDoc, handlers: ChartHandlers): SVGSVGElement {
  const x = byChannel(item, "x");
  const y = byChannel(item, "y");
  if (!x && !y) throw new Error("bar needs a positional encoding");
  const catEnc = [y, x].find((e) => e && e.field_kind !== "quantitative");
  const quantEnc = [x, y].find((e) => e && e.field_kind === "quantitative");
  if (!catEnc || !quantEnc) throw new Error("bar needs one categorical and one quantitative axis");
  const horizontal = catEnc.channel === "y";
  const colorEnc = byChannel(item, "color");
  const stack = colorEnc ? (colorEnc.options?.stack ?? "stacked") : "none";

  const ci = columnIndex(item, catEnc.field);
  const vi = columnIndex(item, quantEnc.field);
  const gi = colorEnc ? columnIndex(item, colorEnc.field) : -1;

  const categories: Cell[] = [];
  const colorValues: Cell[] = [];
  const cells = new Map<string, { color: Cell; value: number }[]>();
  for (const row of item.table.rows) {
    const cat = row[ci];
    const key = cellLabel(cat);
    if (!cells.has(key)) {
      cells.set(key, []);
      categories.push(cat);
    }
    const color = colorEnc ? row[gi] : null;
    if (colorEnc && !colorValues.some((v) => v === color)) colorValues.push(color);
    cells.get(key)!.push({ color, value: Number(row[vi] ?? 0) });
  }

  const totals = categories.map((cat) =>
    cells.get(cellLabel(cat))!.reduce((acc, seg) => acc + seg.value, 0));
  const maxValue = stack === "normalized" ? 1
    : stack === "stacked" ? Math.max(1e-9, ...totals)
    : Math.max(1e-9, ...item.table.rows.map((r) => Number(r[vi] ?? 0)));

  const svg = svgEl("svg", { width: CHART_WIDTH, height: CHART_HEIGHT, class: "chart" });
  svg.dataset.mark = "bar";
  const valueScale = horizontal
    ? linearScale(0, maxValue, PLOT.x0, PLOT.x1)
    : linearScale(0, maxValue, PLOT.y1, PLOT.y0);
  const bandExtent = horizontal ? [PLOT.y0, PLOT.y1] : [PLOT.x0, PLOT.x1];
  const step = (bandExtent[1] - bandExtent[0]) / Math.max(1, categories.length);
  const bandwidth = step * 0.8;

  const geometry = item.binding?.geometry;
  const pointGeometry = geometry?.kind === "point" ? geometry : null;
  const widget = brushPayload(state, item);
  const selected = widget?.payload.values
    ? new Set(widget.payload.values.map((t) => JSON.stringify(t)))
    : null; // null = neutral: everything selected

  categories.forEach((cat, n) => {
    const segs = cells.get(cellLabel(cat))!;
    const total = totals[n] || 1;
    let running = 0;
    segs.forEach((seg, s) => {
      const value = stack === "normalized" ? seg.value / total : seg.value;
      let b0 = bandExtent[0] + n * step + (step - bandwidth) / 2;
      let width = bandwidth;
      if (stack === "none" && colorEnc) {
        width = bandwidth / segs.length;
        b0 += s * width;
      }
      const v0 = stack === "none" ? 0 : running;
      const v1 = v0 + value;
      if (stack !== "none") running = v1;

      const colorKey = colorEnc ? colorValues.findIndex((v) => v === seg.color) : 0;
      const rect = svgEl("rect", {
        fill: PALETTE[Math.max(0, colorKey) % PALETTE.length],
        "data-cat": cellLabel(cat),
        ...(colorEnc ? { "data-color": cellLabel(seg.color) } : {}),
      });
      if (horizontal) {
        const px0 = valueScale.apply(v0);
        rect.setAttribute("x", String(Math.min(px0, valueScale.apply(v1))));
        rect.setAttribute("width", String(Math.abs(valueScale.apply(v1) - px0)));
        rect.setAttribute("y", String(b0));
        rect.setAttribute("height", String(width));
      } else {
        const py0 = valueScale.apply(v0);
        rect.setAttribute("y", String(Math.min(py0, valueScale.apply(v1))));
        rect.setAttribute("height", String(Math.abs(valueScale.apply(v1) - py0)));
        rect.setAttribute("x", String(b0));
        rect.setAttribute("width", String(width));
      }

      if (pointGeometry) {
        const tuple = pointGeometry.fields.map((f) =>
          f === catEnc.field ? cat : f === colorEnc?.field ? seg.color : null);
        const key = JSON.stringify(tuple);
        const isSelected = selected === null || selected.has(key);
        rect.setAttribute("opacity", isSelected ? "1" : "0.3");
        rect.setAttribute("class", "selectable");
        rect.addEventListener("click", () => {
          const visible = new Set<string>();
          for (const c of categories) {
            for (const s2 of cells.get(cellLabel(c))!) {
              visible.add(JSON.stringify(pointGeometry.fields.map((f) =>
                f === catEnc.field ? c : f === colorEnc?.field ? s2.color : null)));
            }
          }
          const current = selected === null ? new Set(visible) : new Set(selected);
          if (current.has(key)) current.delete(key);
          else current.add(key);
          handlers.onPointToggle(item.viz_id, [...current].map(
            (k) => JSON.parse(k) as Cell[]));
        });
      }
      svg.appendChild(rect);
    });
    const label = svgEl("text", {
      class: "axis-label",
      ...(horizontal
        ? { x: PLOT.x0 - 6, y: bandExtent[0] + n * step + step / 2 + 4,
            "text-anchor": "end" }
        : { x: bandExtent[0] + n * step + step / 2, y: PLOT.y1 + 14,
            "text-anchor": "middle" }),
    });
    label.textContent = cellLabel(cat).slice(0, 14);
    svg.appendChild(label);
  });

  drawQuantAxis(svg, valueScale, horizontal ? "x" : "y");
  drawFrame(svg);
  if (geometry && geometry.kind !== "point") {
    attachIntervalBrush(svg, item, state, handlers, {
      x: horizontal ? valueScale : null,
      y: horizontal ? null : valueScale,
      xField: horizontal ? quantEnc.field : "",
      yField: horizontal ? "" : quantEnc.field,
    });
  }
  return svg;
}

// --------------------------------------------------------------------------
// scatter / line
// --------------------------------------------------------------------------

function renderXY(
  item: DashboardItem,
  state: StateDoc,
  handlers: ChartHandlers,
  mark: "point" | "line",
): SVGSVGElement {
  const xEnc = byChannel(item, "x");
  const yEnc = byChannel(item, "y");
  if (!xEnc || !yEnc) throw new Error(`${mark} needs x and y encodings`);
  const xi = columnIndex(item, xEnc.field);
  const yi = columnIndex(item, yEnc.field);
  const colorEnc = byChannel(item, "color");
  const gi = colorEnc ? columnIndex(item, colorEnc.field) : -1;

  const xs = item.table.rows.map((r) => r[xi]).filter((v): v is number => typeof v === "number");
  const ys = item.table.rows.map((r) => r[yi]).filter((v): v is number => typeof v === "number");
  const sx = linearScale(Math.min(...xs), Math.max(...xs), PLOT.x0, PLOT.x1);
  const sy = linearScale(Math.min(...ys), Math.max(...ys), PLOT.y1, PLOT.y0);

  const svg = svgEl("svg", { width: CHART_WIDTH, height: CHART_HEIGHT, class: "chart" });
  svg.dataset.mark = mark;

  const colorOf = (row: Cell[]): string => {
    if (!colorEnc) return PALETTE[0];
    const groups: Cell[] = [];
    for (const r of item.table.rows) {
      if (!groups.some((g) => g === r[gi])) groups.push(r[gi]);
    }
    return PALETTE[Math.max(0, groups.findIndex((g) => g === row[gi])) % PALETTE.length];
  };

  if (mark === "line") {
    const groups = new Map<string, Cell[][]>();
    for (const row of item.table.rows) {
      if (row[xi] === null || row[yi] === null) continue;
      const key = colorEnc ? cellLabel(row[gi]) : "";
      if (!groups.has(key)) groups.set(key, []);
      groups.get(key)!.push(row);
    }
    for (const [, rows] of groups) {
      const points = rows
        .map((r) => `${sx.apply(Number(r[xi]))},${sy.apply(Number(r[yi]))}`)
        .join(" ");
      svg.appendChild(svgEl("polyline", {
        points, fill: "none", stroke: colorOf(rows[0]), "stroke-width": 1.6,
      }));
    }
  } else {
    for (const row of item.table.rows) {
      if (row[xi] === null || row[yi] === null) continue;
      svg.appendChild(svgEl("circle", {
        cx: sx.apply(Number(row[xi])),
        cy: sy.apply(Number(row[yi])),
        r: 2.6,
        fill: colorOf(row),
        opacity: 0.75,
      }));
    }
  }

  drawQuantAxis(svg, sx, "x");
  drawQuantAxis(svg, sy, "y");
  drawFrame(svg);

  const geometry = item.binding?.geometry;
  if (geometry && geometry.kind !== "point") {
    attachIntervalBrush(svg, item, state, handlers, {
      x: geometry.kind !== "y-interval" ? sx : null,
      y: geometry.kind !== "x-interval" ? sy : null,
      xField: xEnc.field,
      yField: yEnc.field,
    });
  }
  return svg;
}

// --------------------------------------------------------------------------
// axes, frame, interval brushing
// --------------------------------------------------------------------------

function drawQuantAxis(svg: SVGSVGElement, scale: LinearScale, axis: "x" | "y"): void {
  const ticks = 4;
  for (let i = 0; i <= ticks; i++) {
    const value = scale.min + ((scale.max - scale.min) * i) / ticks;
    const px = scale.apply(value);
    const label = svgEl("text", {
      class: "axis-label",
      ...(axis === "x"
        ? { x: px, y: PLOT.y1 + 14, "text-anchor": "middle" }
        : { x: PLOT.x0 - 6, y: px + 4, "text-anchor": "end" }),
    });
    label.textContent = cellLabel(Number(value.toPrecision(3)));
    svg.appendChild(label);
  }
}

function drawFrame(svg: SVGSVGElement): void {
  svg.appendChild(svgEl("rect", {
    x: PLOT.x0, y: PLOT.y0,
    width: PLOT.x1 - PLOT.x0, height: PLOT.y1 - PLOT.y0,
    fill: "none", stroke: "#999", "stroke-width": 0.6,
  }));
}

interface BrushScales {
  x: LinearScale | null;
  y: LinearScale | null;
  xField: string;
  yField: string;
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.max(lo, Math.min(hi, v));
}

function attachIntervalBrush(
  svg: SVGSVGElement,
  item: DashboardItem,
  state: StateDoc,
  handlers: ChartHandlers,
  scales: BrushScales,
): void {
  // current extent from the mirrored widget: brush and widget share a payload
  const widget = brushPayload(state, item);
  const intervals = widget?.payload.intervals ?? {};
  const shown = svgEl("rect", { class: "brush-rect", fill: "#4c78a8",
                                opacity: 0.18, stroke: "#4c78a8" });
  const extent = {
    x0: PLOT.x0, x1: PLOT.x1, y0: PLOT.y0, y1: PLOT.y1,
  };
  let visible = false;
  if (scales.x) {
    const [lo, hi] = intervals[scales.xField] ?? [null, null];
    if (lo !== null || hi !== null) {
      extent.x0 = scales.x.apply(lo ?? scales.x.min);
      extent.x1 = scales.x.apply(hi ?? scales.x.max);
      visible = true;
    }
  }
  if (scales.y) {
    const [lo, hi] = intervals[scales.yField] ?? [null, null];
    if (lo !== null || hi !== null) {
      extent.y0 = scales.y.apply(hi ?? scales.y.max);
      extent.y1 = scales.y.apply(lo ?? scales.y.min);
      visible = true;
    }
  }
  if (visible) {
    shown.setAttribute("x", String(Math.min(extent.x0, extent.x1)));
    shown.setAttribute("width", String(Math.abs(extent.x1 - extent.x0)));
    shown.setAttribute("y", String(Math.min(extent.y0, extent.y1)));
    shown.setAttribute("height", String(Math.abs(extent.y1 - extent.y0)));
    svg.appendChild(shown);
  }

  const overlay = svgEl("rect", {
    class: "brush-overlay",
    x: PLOT.x0, y: PLOT.y0,
    width: PLOT.x1 - PLOT.x0, height: PLOT.y1 - PLOT.y0,
    fill: "transparent", cursor: "crosshair",
  });
  svg.appendChild(overlay);

  let dragStart: { px: number; py: number } | null = null;

  const toIntervals = (px: number, py: number): Record<string, Interval> => {
    const out: Record<string, Interval> = {};
    if (scales.x && dragStart) {
      const a = scales.x.invert(clamp(dragStart.px, PLOT.x0, PLOT.x1));
      const b = scales.x.invert(clamp(px, PLOT.x0, PLOT.x1));
      out[scales.xField] = [round2(Math.min(a, b)), round2(Math.max(a, b))];
    }
    if (scales.y && dragStart) {
      const a = scales.y.invert(clamp(dragStart.py, PLOT.y0, PLOT.y1));
      const b = scales.y.invert(clamp(py, PLOT.y0, PLOT.y1));
      out[scales.yField] = [round2(Math.min(a, b)), round2(Math.max(a, b))];
    }
    return out;
  };

  const position = (ev: MouseEvent): { px: number; py: number } => {
    const rect = svg.getBoundingClientRect();
    return { px: ev.clientX - rect.left, py: ev.clientY - rect.top };
  };

  overlay.addEventListener("mousedown", (ev) => {
    dragStart = position(ev as MouseEvent);
  });
  overlay.addEventListener("mousemove", (ev) => {
    if (!dragStart) return;
    const { px, py } = position(ev as MouseEvent);
    handlers.onIntervalBrush(item.viz_id, toIntervals(px, py));
  });
  overlay.addEventListener("mouseup", (ev) => {
    if (!dragStart) return;
    const { px, py } = position(ev as MouseEvent);
    const payload = toIntervals(px, py);
    dragStart = null;
    handlers.onIntervalBrush(item.viz_id, payload);
  });
  overlay.addEventListener("dblclick", () => handlers.onClearBrush(item.viz_id));
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}
