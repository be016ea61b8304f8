/**
 * SVG builders for the five widget visual forms:
 * TIME_SERIES → line chart, bigNumber → large numeral, pie → pie chart,
 * topList → ranked bar list, slo2 → target-vs-actual gauge.
 *
 * Pure DOM construction — no fetching, no state. Each builder returns an
 * element tagged with a stable data-role so tests and styles can address
 * the form without caring about markup details.
 */

import type { MetricData, MetricGroup, WidgetDocument } from "../types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948"];

export const NO_DATA_TEXT = "no data in window";

function svgElement(width: number, height: number, role: string): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("role", "img");
  svg.dataset.role = role;
  return svg;
}

function formatValue(value: number): string {
  if (Number.isInteger(value)) {
    return String(value);
  }
  return value.toFixed(2);
}

/** Placeholder shown when the preview window holds no data. */
export function buildNoDataPlaceholder(): HTMLElement {
  const div = document.createElement("div");
  div.className = "no-data";
  div.dataset.role = "no-data";
  div.textContent = NO_DATA_TEXT;
  return div;
}

/** Line chart over [timestamp, value] pairs; one polyline vertex per point. */
export function buildLineChart(points: [number, number][]): SVGSVGElement {
  const width = 400;
  const height = 160;
  const pad = 8;
  const svg = svgElement(width, height, "line-chart");
  const values = points.map((p) => p[1]);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const step = points.length > 1 ? (width - 2 * pad) / (points.length - 1) : 0;
  const coords = points.map((point, i) => {
    const x = pad + i * step;
    const y = height - pad - ((point[1] - lo) / span) * (height - 2 * pad);
    return `${x.toFixed(2)},${y.toFixed(2)}`;
  });
  const polyline = document.createElementNS(SVG_NS, "polyline");
  polyline.setAttribute("points", coords.join(" "));
  polyline.setAttribute("fill", "none");
  polyline.setAttribute("stroke", PALETTE[0] ?? "#4e79a7");
  polyline.setAttribute("stroke-width", "2");
  svg.appendChild(polyline);
  svg.dataset.pointCount = String(points.length);
  return svg;
}

/** Large numeral for a scalar rollup. */
export function buildBigNumber(value: number): HTMLElement {
  const div = document.createElement("div");
  div.className = "big-number";
  div.dataset.role = "big-number";
  div.textContent = formatValue(value);
  return div;
}

function arcPath(cx: number, cy: number, r: number, start: number, end: number): string {
  const sx = cx + r * Math.cos(start);
  const sy = cy + r * Math.sin(start);
  const ex = cx + r * Math.cos(end);
  const ey = cy + r * Math.sin(end);
  const large = end - start > Math.PI ? 1 : 0;
  return `M ${cx} ${cy} L ${sx.toFixed(3)} ${sy.toFixed(3)} A ${r} ${r} 0 ${large} 1 ${ex.toFixed(3)} ${ey.toFixed(3)} Z`;
}

/**
 * Pie chart: one slice per group. Ungrouped data (a bare scalar) renders
 * as a single full circle so the form survives a groupless data source.
 */
export function buildPieChart(groups: MetricGroup[]): SVGSVGElement {
  const size = 180;
  const cx = size / 2;
  const cy = size / 2;
  const r = size / 2 - 6;
  const svg = svgElement(size, size, "pie-chart");
  if (groups.length === 1) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(cx));
    circle.setAttribute("cy", String(cy));
    circle.setAttribute("r", String(r));
    circle.setAttribute("fill", PALETTE[0] ?? "#4e79a7");
    circle.setAttribute("class", "pie-slice");
    circle.dataset.name = groups[0]?.name ?? "";
    svg.appendChild(circle);
    return svg;
  }
  const total = groups.reduce((sum, g) => sum + Math.max(g.value, 0), 0) || 1;
  let angle = -Math.PI / 2;
  groups.forEach((group, i) => {
    const sweep = (Math.max(group.value, 0) / total) * 2 * Math.PI;
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", arcPath(cx, cy, r, angle, angle + sweep));
    path.setAttribute("fill", PALETTE[i % PALETTE.length] ?? "#4e79a7");
    path.setAttribute("class", "pie-slice");
    path.dataset.name = group.name;
    svg.appendChild(path);
    angle += sweep;
  });
  return svg;
}

/** Ranked bar list: one row per group, bar width proportional to value. */
export function buildTopList(groups: MetricGroup[]): HTMLElement {
  const list = document.createElement("ol");
  list.className = "top-list";
  list.dataset.role = "top-list";
  const max = Math.max(...groups.map((g) => Math.abs(g.value)), 1e-9);
  for (const group of groups) {
    const item = document.createElement("li");
    item.className = "top-list-row";
    item.dataset.name = group.name;

    const name = document.createElement("span");
    name.className = "top-list-name";
    name.textContent = group.name;

    const bar = document.createElement("div");
    bar.className = "top-list-bar";
    bar.style.width = `${((Math.abs(group.value) / max) * 100).toFixed(1)}%`;

    const value = document.createElement("span");
    value.className = "top-list-value";
    value.textContent = formatValue(group.value);

    item.append(name, bar, value);
    list.appendChild(item);
  }
  return list;
}

/**
 * Target-vs-actual gauge for an SLO, labeled with the SLO's name. The
 * service returns no series for SLO widgets, so the needle shows the
 * rollup value when one exists and parks at rest otherwise.
 */
export function buildSloGauge(sloName: string, actual: number | null): SVGSVGElement {
  const width = 220;
  const height = 140;
  const cx = width / 2;
  const cy = 110;
  const r = 80;
  const svg = svgElement(width, height, "slo-gauge");

  const track = document.createElementNS(SVG_NS, "path");
  const startX = cx - r;
  const endX = cx + r;
  track.setAttribute("d", `M ${startX} ${cy} A ${r} ${r} 0 0 1 ${endX} ${cy}`);
  track.setAttribute("fill", "none");
  track.setAttribute("stroke", "#d8d8d8");
  track.setAttribute("stroke-width", "12");
  track.setAttribute("class", "gauge-track");
  svg.appendChild(track);

  // Target marker: a tick near the top of scale the actual is judged against.
  const targetAngle = Math.PI * (1 - 0.95);
  const tick = document.createElementNS(SVG_NS, "line");
  tick.setAttribute("x1", String(cx + (r - 12) * Math.cos(targetAngle)));
  tick.setAttribute("y1", String(cy - (r - 12) * Math.sin(targetAngle)));
  tick.setAttribute("x2", String(cx + (r + 8) * Math.cos(targetAngle)));
  tick.setAttribute("y2", String(cy - (r + 8) * Math.sin(targetAngle)));
  tick.setAttribute("stroke", "#e15759");
  tick.setAttribute("stroke-width", "3");
  tick.setAttribute("class", "gauge-target");
  svg.appendChild(tick);

  const fraction = actual === null ? 0 : Math.min(Math.max(actual / 100, 0), 1);
  const needleAngle = Math.PI * (1 - fraction);
  const needle = document.createElementNS(SVG_NS, "line");
  needle.setAttribute("x1", String(cx));
  needle.setAttribute("y1", String(cy));
  needle.setAttribute("x2", String(cx + (r - 18) * Math.cos(needleAngle)));
  needle.setAttribute("y2", String(cy - (r - 18) * Math.sin(needleAngle)));
  needle.setAttribute("stroke", "#333");
  needle.setAttribute("stroke-width", "3");
  needle.setAttribute("class", "gauge-needle");
  svg.appendChild(needle);

  const label = document.createElementNS(SVG_NS, "text");
  label.setAttribute("x", String(cx));
  label.setAttribute("y", String(height - 6));
  label.setAttribute("text-anchor", "middle");
  label.setAttribute("class", "gauge-label");
  label.dataset.role = "gauge-slo-name";
  label.textContent = sloName;
  svg.appendChild(label);

  const reading = document.createElementNS(SVG_NS, "text");
  reading.setAttribute("x", String(cx));
  reading.setAttribute("y", String(cy - 18));
  reading.setAttribute("text-anchor", "middle");
  reading.setAttribute("class", "gauge-reading");
  reading.dataset.role = "gauge-reading";
  reading.textContent = actual === null ? "—" : `${formatValue(actual)}%`;
  svg.appendChild(reading);

  return svg;
}

/** The SLO name a slo2 widget document is configured with. */
export function sloNameOf(widget: WidgetDocument): string {
  const name = (widget.config as { name?: unknown }).name;
  return typeof name === "string" ? name : widget.title;
}

/**
 * Dispatch a widget document plus its data to the visual form designated
 * for its type. Everything except an SLO gauge needs data; without any,
 * the "no data in window" placeholder stands in.
 */
export function buildVisual(widget: WidgetDocument, data: MetricData | null): Element {
  if (widget.type === "slo2") {
    return buildSloGauge(sloNameOf(widget), typeof data?.value === "number" ? data.value : null);
  }
  if (widget.type === "TIME_SERIES") {
    if (!data?.points?.length) {
      return buildNoDataPlaceholder();
    }
    return buildLineChart(data.points);
  }
  if (widget.type === "bigNumber") {
    if (typeof data?.value !== "number") {
      return buildNoDataPlaceholder();
    }
    return buildBigNumber(data.value);
  }
  if (widget.type === "pie") {
    if (data?.groups?.length) {
      return buildPieChart(data.groups);
    }
    if (typeof data?.value === "number") {
      return buildPieChart([{ name: "total", value: data.value }]);
    }
    return buildNoDataPlaceholder();
  }
  if (!data?.groups?.length) {
    return buildNoDataPlaceholder();
  }
  return buildTopList(data.groups);
}
