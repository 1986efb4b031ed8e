// Wire types mirroring the service's GET /state document.

export type Cell = string | number | null;

export type FieldKind = "quantitative" | "nominal" | "ordinal" | "identifier";

export interface ColumnInfo {
  name: string;
  kind: FieldKind;
}

export interface ResultTable {
  columns: ColumnInfo[];
  rows: Cell[][];
  provenance: Cell[][] | null;
}

export interface EncodingDoc {
  channel: "x" | "y" | "color";
  field: string;
  field_kind: "quantitative" | "nominal" | "ordinal";
  options?: { stack?: "none" | "stacked" | "normalized" };
}

export interface RepresentationDoc {
  mark: string;
  mapping?: EncodingDoc[];
}

export interface VizSpecDoc {
  source: { alias: string; entity: string }[];
  transformation?: Record<string, unknown>[];
  representation?: RepresentationDoc;
  selections?: Record<string, unknown>[];
}

export interface BrushGeometry {
  kind: "x-interval" | "y-interval" | "2d-interval" | "point";
  fields: string[];
}

export interface BrushBinding {
  viz_id: string;
  selection: string;
  geometry: BrushGeometry;
}

export interface DashboardItem {
  viz_id: string;
  spec: VizSpecDoc;
  binding: BrushBinding | null;
  table: ResultTable;
}

export type Interval = [number | null, number | null];

export interface FilterWidgetDoc {
  id: string;
  kind: "filter_adjust";
  selection: string;
  entity: string;
  fields: string[];
  selection_kind: "point" | "interval";
  payload: { values?: Cell[][]; intervals?: Record<string, Interval> };
  domain: Record<string, { min?: number; max?: number; categories?: Cell[] }>;
  brush_viz: string | null;
}

export interface VizWidgetDoc {
  id: string;
  kind: "viz_adjust";
  viz_id: string;
  slots: { channel: string; field: string; candidates: string[] }[];
}

export type WidgetDoc = FilterWidgetDoc | VizWidgetDoc;

export interface EntryDoc {
  kind: "user" | "reply" | "widget";
  text?: string | null;
  widget_id?: string;
}

export interface ChipDoc {
  selection: string;
  entity: string;
  fields: string[];
  summary: string;
}

export interface StateDoc {
  id: string;
  version: number;
  package: string;
  entries: EntryDoc[];
  widgets: WidgetDoc[];
  dashboard: DashboardItem[];
  counts: Record<string, number>;
  chips: ChipDoc[];
}

export interface MutationResponse {
  events: { kind: string; [key: string]: unknown }[];
  version: number;
  reply?: string;
}

export const NULL_LABEL = "(null)";

export function cellLabel(value: Cell): string {
  if (value === null) return NULL_LABEL;
  if (typeof value === "number" && !Number.isInteger(value)) {
    return value.toFixed(2).replace(/\.?0+$/, "");
  }
  return String(value);
}
