/**
 * Deterministic SVG chart builder: one curve per decoder symbol size,
 * channel parameter on x, error rate on y (log scale by default), with
 * confidence-interval bars where available.
 */

import { SimRow } from "./csv";

export interface ChartOptions {
  metric: "fer" | "ber";
  logY: boolean;
  title?: string;
}

interface Point {
  x: number;
  y: number;
  lo?: number;
  hi?: number;
}

interface Series {
  m: number;
  label: string;
  points: Point[];
}

const WIDTH = 860;
const HEIGHT = 540;
const MARGIN = { left: 78, right: 170, top: 46, bottom: 58 };
const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

export function seriesLabel(m: number): string {
  return m === 1 ? "SC" : `SDSC-${m}`;
}

function fmt(v: number): string {
  // fixed-precision coordinates keep the output byte-stable
  return v.toFixed(2).replace(/^-0\.00$/, "0.00");
}

function sciLabel(exp: number): string {
  return `1e${exp}`;
}

/** Group rows into one series per decoder_M, points ordered by parameter. */
export function buildSeries(rows: SimRow[], metric: "fer" | "ber"): Series[] {
  const byM = new Map<number, SimRow[]>();
  for (const r of rows) {
    const bucket = byM.get(r.decoderM) ?? [];
    bucket.push(r);
    byM.set(r.decoderM, bucket);
  }
  const out: Series[] = [];
  for (const m of [...byM.keys()].sort((a, b) => a - b)) {
    const pts = byM
      .get(m)!
      .slice()
      .sort((a, b) => a.param - b.param)
      .map((r) => ({
        x: r.param,
        y: metric === "fer" ? r.fer : r.ber,
        lo: metric === "fer" ? r.ferCiLow : undefined,
        hi: metric === "fer" ? r.ferCiHigh : undefined,
      }));
    out.push({ m, label: seriesLabel(m), points: pts });
  }
  return out;
}

export class ChartError extends Error {}

/** Render the series to a standalone SVG document. */
export function renderSvg(rows: SimRow[], opts: ChartOptions): string {
  const all = buildSeries(rows, opts.metric);
  // log scale cannot place zero rates; drop those points, series that empty
  // out vanish, and an entirely empty chart is an error
  const series = all
    .map((s) => ({
      ...s,
      points: s.points.filter((p) => (opts.logY ? p.y > 0 : true)),
    }))
    .filter((s) => s.points.length > 0);
  if (series.length === 0) {
    throw new ChartError(
      opts.logY
        ? "no plottable points: every rate is zero or the CSV has no rows (try --linear-y)"
        : "no plottable points: the CSV has no rows",
    );
  }

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) =>
    s.points.flatMap((p) => [p.y, ...(p.lo && p.lo > 0 ? [p.lo] : []), ...(p.hi ? [p.hi] : [])]),
  );
  let x0 = Math.min(...xs);
  let x1 = Math.max(...xs);
  if (x0 === x1) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - x0) / (x1 - x0)) * plotW;

  let sy: (y: number) => number;
  let yTicks: { pos: number; label: string }[];
  if (opts.logY) {
    const ymin = Math.min(...ys.filter((y) => y > 0));
    const ymax = Math.max(...ys);
    let e0 = Math.floor(Math.log10(ymin));
    let e1 = Math.ceil(Math.log10(ymax));
    if (e0 === e1) e0 -= 1;
    sy = (y: number) =>
      MARGIN.top + plotH - ((Math.log10(Math.max(y, 10 ** e0)) - e0) / (e1 - e0)) * plotH;
    yTicks = [];
    for (let e = e0; e <= e1; e++) {
      yTicks.push({ pos: sy(10 ** e), label: sciLabel(e) });
    }
  } else {
    const ymax = Math.max(...ys, 1e-12);
    sy = (y: number) => MARGIN.top + plotH - (y / ymax) * plotH;
    yTicks = [0, 0.25, 0.5, 0.75, 1.0].map((f) => ({
      pos: sy(f * ymax),
      label: (f * ymax).toPrecision(3),
    }));
  }

  const xTickVals = [...new Set(xs)].sort((a, b) => a - b);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  if (opts.title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="26" text-anchor="middle" font-size="16">${opts.title}</text>`,
    );
  }
  // frame and gridlines
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#222" stroke-width="1"/>`,
  );
  for (const t of yTicks) {
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(t.pos)}" x2="${MARGIN.left + plotW}" ` +
        `y2="${fmt(t.pos)}" stroke="#ddd" stroke-width="0.6"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(t.pos + 4)}" text-anchor="end" font-size="12">${t.label}</text>`,
    );
  }
  for (const xv of xTickVals) {
    const px = sx(xv);
    parts.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top + plotH}" x2="${fmt(px)}" ` +
        `y2="${MARGIN.top + plotH + 5}" stroke="#222" stroke-width="1"/>`,
      `<text x="${fmt(px)}" y="${MARGIN.top + plotH + 22}" text-anchor="middle" font-size="12">${xv}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">channel parameter</text>`,
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${opts.metric.toUpperCase()}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    // confidence bars first so the curve draws on top
    for (const p of s.points) {
      if (p.lo === undefined || p.hi === undefined) continue;
      const px = sx(p.x);
      const yLo = opts.logY && p.lo <= 0 ? MARGIN.top + plotH : sy(p.lo);
      const yHi = sy(p.hi);
      parts.push(
        `<line x1="${fmt(px)}" y1="${fmt(yLo)}" x2="${fmt(px)}" y2="${fmt(yHi)}" ` +
          `stroke="${color}" stroke-width="1.2" class="ci-bar"/>`,
        `<line x1="${fmt(px - 4)}" y1="${fmt(yHi)}" x2="${fmt(px + 4)}" y2="${fmt(yHi)}" ` +
          `stroke="${color}" stroke-width="1.2"/>`,
        `<line x1="${fmt(px - 4)}" y1="${fmt(yLo)}" x2="${fmt(px + 4)}" y2="${fmt(yLo)}" ` +
          `stroke="${color}" stroke-width="1.2"/>`,
      );
    }
    const coords = s.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
    parts.push(
      `<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.8" class="series"/>`,
    );
    for (const p of s.points) {
      parts.push(
        `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="3" fill="${color}" class="pt"/>`,
      );
    }
    // legend entry
    const ly = MARGIN.top + 10 + i * 20;
    const lx = MARGIN.left + plotW + 14;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" stroke="${color}" stroke-width="2"/>`,
      `<circle cx="${lx + 13}" cy="${ly}" r="3" fill="${color}"/>`,
      `<text x="${lx + 32}" y="${ly + 4}" font-size="13">${s.label}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
