// End-to-end: spawn the Python service on the penguins package with the
// scripted backend, drive the real client through the DOM (chat submit,
// 2D brush via mouse events), and check the brush/widget mirror and the
// download/status-bar count agreement over live HTTP.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import { Client } from "../src/api.js";
import { CHART_WIDTH, CHART_HEIGHT, MARGIN, linearScale } from "../src/charts.js";
import type { FilterWidgetDoc } from "../src/types.js";

const REPO = resolve(__dirname, "..", "..");
const PORT = 8361;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const r = await fetch(`${BASE}/openapi.json`);
      if (r.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn("linkboard", [
    "serve",
    "--package", join(REPO, "data", "penguins"),
    "--backend", `scripted:${join(REPO, "fixtures", "scripts", "penguins_script.json")}`,
    "--snapshot-dir", mkdtempSync(join(tmpdir(), "lb-e2e-")),
    "--port", String(PORT),
  ], { stdio: "ignore" });
  await waitForServer();
});

afterAll(() => {
  server.kill();
});

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function settled(app: App): Promise<void> {
  // wait out the brush debounce plus the refetch round-trip
  await sleep(400);
  await app.refresh();
}

describe("browser client against the live service", () => {
  it("chats, brushes the scatter, mirrors the widget, and downloads", async () => {
    document.body.innerHTML = "<div id='app'></div>";
    const root = document.getElementById("app")!;
    const client = new Client(BASE, fetch);
    const downloads: string[] = [];
    const app = new App(root, client, (url) => downloads.push(url));

    await app.start("penguins");
    expect(root.querySelector(".empty-dashboard")).toBeTruthy();
    expect(root.querySelector(".count[data-entity='penguins']")!.textContent)
      .toBe("penguins: 344");

    // one scripted prompt -> scatter with a 2D brush
    const input = root.querySelector<HTMLInputElement>(".chat-input input")!;
    input.value = "Can you show the distribution of bill length and depth?";
    root.querySelector("form")!.dispatchEvent(new Event("submit", { bubbles: true }));
    await settled(app);

    const svg = root.querySelector<SVGSVGElement>(".chart-card[data-viz='viz-1'] svg")!;
    expect(svg).toBeTruthy();
    expect(svg.dataset.mark).toBe("point");
    expect(svg.querySelectorAll("circle").length).toBeGreaterThan(300);

    // 2D-brush: drag across the plot area (jsdom rects sit at 0,0 so
    // clientX/Y are svg-local pixels)
    const overlay = svg.querySelector(".brush-overlay")!;
    const [x0, y0, x1, y1] = [180, 60, 300, 160];
    overlay.dispatchEvent(new MouseEvent("mousedown", { clientX: x0, clientY: y0, bubbles: true }));
    overlay.dispatchEvent(new MouseEvent("mousemove", { clientX: 240, clientY: 120, bubbles: true }));
    overlay.dispatchEvent(new MouseEvent("mouseup", { clientX: x1, clientY: y1, bubbles: true }));
    await settled(app);

    // compute the expected data-space extent with the same scales the
    // chart used (domains are the table's column extents)
    const table = app.state!.dashboard[0].table;
    const xi = table.columns.findIndex((c) => c.name === "bill_length_mm");
    const yi = table.columns.findIndex((c) => c.name === "bill_depth_mm");
    const xs = table.rows.map((r) => r[xi]).filter((v): v is number => typeof v === "number");
    const ys = table.rows.map((r) => r[yi]).filter((v): v is number => typeof v === "number");
    const sx = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, CHART_WIDTH - MARGIN.right);
    const sy = linearScale(Math.min(...ys), Math.max(...ys), CHART_HEIGHT - MARGIN.bottom, MARGIN.top);
    const round2 = (v: number) => Math.round(v * 100) / 100;
    const expected = {
      bill_length_mm: [round2(sx.invert(x0)), round2(sx.invert(x1))],
      bill_depth_mm: [round2(sy.invert(y1)), round2(sy.invert(y0))],
    };

    // the mirrored widget shows exactly the brush extent
    const widget = app.state!.widgets.find(
      (w) => w.kind === "filter_adjust" && w.brush_viz === "viz-1") as FilterWidgetDoc;
    expect(widget).toBeTruthy();
    expect(widget.payload.intervals).toEqual(expected);

    const widgetEl = root.querySelector(`[data-selection='${widget.selection}']`)!;
    const lo = widgetEl.querySelector<HTMLInputElement>(
      "input[data-field='bill_length_mm'][data-side='lo']")!;
    expect(Number(lo.value)).toBe(expected.bill_length_mm[0]);

    // the drawn brush rectangle matches the widget payload (visual agreement)
    const rect = svg.ownerDocument
      .querySelector(".chart-card[data-viz='viz-1'] .brush-rect")!;
    expect(Number(rect.getAttribute("x")))
      .toBeCloseTo(sx.apply(expected.bill_length_mm[0]), 1);

    // filtered counts shrink; downloaded CSV rows equal the status-bar count
    const shown = root.querySelector(".count[data-entity='penguins']")!.textContent!;
    const count = Number(shown.split(":")[1]);
    expect(count).toBeGreaterThan(0);
    expect(count).toBeLessThan(344);

    const csv = await client.downloadCsv(app.sessionId, "penguins");
    const rows = csv.trim().split("\n").length - 1;
    expect(rows).toBe(count);

    // the download button points at the same endpoint the bytes came from
    (root.querySelector(".download-button") as HTMLButtonElement).click();
    expect(downloads[0]).toBe(client.downloadUrl(app.sessionId, "penguins"));
  }, 60000);

  it("adjusting the widget moves the brush (mirror, widget side)", async () => {
    document.body.innerHTML = "<div id='app'></div>";
    const root = document.getElementById("app")!;
    const client = new Client(BASE, fetch);
    const app = new App(root, client, () => undefined);
    await app.start();

    const input = root.querySelector<HTMLInputElement>(".chat-input input")!;
    input.value = "Can you show the distribution of bill length and depth?";
    root.querySelector("form")!.dispatchEvent(new Event("submit", { bubbles: true }));
    await settled(app);

    // brush once so the mirrored widget exists
    const overlay = root.querySelector(".brush-overlay")!;
    overlay.dispatchEvent(new MouseEvent("mousedown", { clientX: 150, clientY: 50, bubbles: true }));
    overlay.dispatchEvent(new MouseEvent("mouseup", { clientX: 350, clientY: 180, bubbles: true }));
    await settled(app);

    const widget = app.state!.widgets.find(
      (w) => w.kind === "filter_adjust") as FilterWidgetDoc;
    const before = root.querySelector(".brush-rect")!.getAttribute("x");

    const lo = root.querySelector<HTMLInputElement>(
      `[data-selection='${widget.selection}'] input[data-field='bill_length_mm'][data-side='lo']`)!;
    lo.value = String(Number(lo.value) + 2);
    lo.dispatchEvent(new Event("change"));
    await settled(app);

    const after = root.querySelector(".brush-rect")!.getAttribute("x");
    expect(after).not.toBe(before);
    const refreshed = app.state!.widgets.find(
      (w) => w.kind === "filter_adjust") as FilterWidgetDoc;
    expect(refreshed.payload.intervals!.bill_length_mm[0])
      .toBe(Number(lo.value));
  }, 60000);

  it("replays a stale local edit after refetching", async () => {
    document.body.innerHTML = "<div id='app'></div>";
    const root = document.getElementById("app")!;
    const client = new Client(BASE, fetch);
    const app = new App(root, client, () => undefined);
    await app.start();

    const input = root.querySelector<HTMLInputElement>(".chat-input input")!;
    input.value = "Can you remove Gentooo?".replace("Gentooo", "Gentoo");
    root.querySelector("form")!.dispatchEvent(new Event("submit", { bubbles: true }));
    await settled(app);

    // another client moves the session forward; our App still holds the
    // old version, so its next edit must refetch and replay
    await client.chat(app.sessionId, "How many are there for each sex?");

    const sel = root.querySelector<HTMLInputElement>(
      ".point-controls input[data-tuple='[\"Adelie\"]']")!;
    sel.checked = false;
    sel.dispatchEvent(new Event("change"));
    await settled(app);

    const shown = root.querySelector(".count[data-entity='penguins']")!.textContent!;
    expect(shown).toBe("penguins: 68"); // only Chinstrap remains
  }, 60000);
});
