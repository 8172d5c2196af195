/**
 * Learnability-figure construction.
 *
 * One figure per experiment CSV: a panel per dataset label, train-set size P
 * on a log axis, learnability on a linear axis. Within each panel and feature
 * degree:
 *
 *   - dots mark every (P, L_xq) row,
 *   - stars mark every (P, L_emp) row when that column has a value,
 *   - a dashed line joins the per-P medians of the bound column,
 *   - a shaded vertical band spans the medians of the two Pstar_* columns.
 *
 * Aggregation across seeds uses the lower median (the middle element of the
 * sorted values, taking the lower one when the count is even), so every
 * plotted coordinate is some input cell verbatim — nothing is recomputed
 * from theory on this side of the CSV boundary.
 */

import type { LearnabilityRow, LearnabilityTable } from "./csv.js";
import {
  type Box,
  type Primitive,
  type Scale,
  type Scene,
  clipPolyline,
  linearScale,
  logScale,
} from "./scene.js";

export interface FigureSpec {
  inputCsv: string;
  /** Restrict to these feature degrees; null keeps every degree in the CSV. */
  featureDegrees: number[] | null;
  /** Epsilon pair naming the Pstar_* columns that edge the shaded band. */
  epsBand: [number, number];
  outputPath: string;
  format: "svg" | "png";
}

export const DEFAULT_EPS_BAND: [number, number] = [0, 0.7];

export interface PanelLayout {
  dataset: string;
  box: Box;
  x: Scale;
  y: Scale;
  colorByDegree: Map<number, string>;
}

export interface BuiltFigure {
  scene: Scene;
  panels: PanelLayout[];
}

const PALETTE = [
  "#2563eb",
  "#d81b1b",
  "#188a42",
  "#8623c9",
  "#e07b00",
  "#0d8ea3",
];

const WIDTH = 720;
const MARGIN_LEFT = 64;
const MARGIN_RIGHT = 24;
const PAD_TOP = 10;
const PANEL_TITLE_H = 22;
const PLOT_HEIGHT = 250;
const AXIS_H = 40;
const PANEL_GAP = 14;
const FOOTER_H = 26;

const TEXT_COLOR = "#1f2430";
const GRID_COLOR = "#c9ced8";

/** Lower median: always an element of `values`, deterministic. */
export function medianCell(values: number[]): number {
  if (values.length === 0) {
    throw new Error("median of an empty list");
  }
  const sorted = [...values].sort((a, b) => a - b);
  return sorted[Math.floor((sorted.length - 1) / 2)]!;
}

function starPoints(
  cx: number,
  cy: number,
  outer: number,
  inner: number,
): Array<[number, number]> {
  const points: Array<[number, number]> = [];
  for (let i = 0; i < 10; i++) {
    const radius = i % 2 === 0 ? outer : inner;
    const angle = -Math.PI / 2 + (i * Math.PI) / 5;
    points.push([cx + radius * Math.cos(angle), cy + radius * Math.sin(angle)]);
  }
  return points;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (
    let exp = Math.ceil(Math.log10(lo) - 1e-9);
    exp <= Math.floor(Math.log10(hi) + 1e-9);
    exp++
  ) {
    ticks.push(10 ** exp);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

function formatTick(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return String(Number(value.toPrecision(3)));
}

interface DegreeGroup {
  degree: number;
  color: string;
  rows: LearnabilityRow[];
}

function groupByDegree(
  rows: LearnabilityRow[],
  colorByDegree: Map<number, string>,
): DegreeGroup[] {
  const byDegree = new Map<number, LearnabilityRow[]>();
  for (const row of rows) {
    const bucket = byDegree.get(row.featureDegree) ?? [];
    bucket.push(row);
    byDegree.set(row.featureDegree, bucket);
  }
  return [...byDegree.keys()].sort((a, b) => a - b).map((degree) => ({
    degree,
    color: colorByDegree.get(degree)!,
    rows: byDegree.get(degree)!,
  }));
}

function buildPanel(
  panel: PanelLayout,
  rows: LearnabilityRow[],
  primitives: Primitive[],
): void {
  const { box, x, y } = panel;
  const groups = groupByDegree(rows, panel.colorByDegree);

  // Shaded threshold bands first, so data marks draw on top of them.
  for (const group of groups) {
    const edgeA = medianCell(group.rows.map((r) => r.pstarLow));
    const edgeB = medianCell(group.rows.map((r) => r.pstarHigh));
    const lo = Math.min(edgeA, edgeB);
    const hi = Math.max(edgeA, edgeB);
    if (hi <= 0) continue; // thresholds outside a log axis cannot be drawn
    const xLo = Math.max(box.x0, x(Math.max(lo, Number.MIN_VALUE)));
    const xHi = Math.min(box.x1, x(hi));
    if (xHi <= xLo) continue; // band lies entirely off-panel
    primitives.push({
      kind: "rect",
      x: xLo,
      y: box.y0,
      width: xHi - xLo,
      height: box.y1 - box.y0,
      fill: group.color,
      opacity: 0.15,
    });
  }

  // Dashed per-P median of the bound column, clipped to the plot box.
  for (const group of groups) {
    const byP = new Map<number, number[]>();
    for (const row of group.rows) {
      const bucket = byP.get(row.nTrain) ?? [];
      bucket.push(row.bound);
      byP.set(row.nTrain, bucket);
    }
    const points = [...byP.keys()]
      .sort((a, b) => a - b)
      .map((p): [number, number] => [x(p), y(medianCell(byP.get(p)!))]);
    for (const piece of clipPolyline(points, box)) {
      primitives.push({
        kind: "polyline",
        points: piece,
        stroke: group.color,
        width: 1.5,
        dash: [6, 4],
      });
    }
  }

  // Raw data marks: one dot per row, one star per row with an L_emp cell.
  for (const group of groups) {
    for (const row of group.rows) {
      primitives.push({
        kind: "circle",
        x: x(row.nTrain),
        y: y(row.measuredLearnability),
        radius: 3,
        fill: group.color,
      });
      if (row.empiricalLoss !== null) {
        primitives.push({
          kind: "polygon",
          points: starPoints(x(row.nTrain), y(row.empiricalLoss), 4.5, 1.9),
          fill: group.color,
        });
      }
    }
  }

  // In-panel legend, top right.
  let legendY = box.y0 + 14;
  for (const group of groups) {
    primitives.push({
      kind: "text",
      x: box.x1 - 8,
      y: legendY,
      text: `degree ${formatTick(group.degree)}`,
      size: 11,
      fill: group.color,
      anchor: "end",
    });
    legendY += 14;
  }
}

function buildAxes(
  panel: PanelLayout,
  title: string,
  xDomain: [number, number],
  primitives: Primitive[],
): void {
  const { box, x, y } = panel;

  primitives.push({
    kind: "text",
    x: (box.x0 + box.x1) / 2,
    y: box.y0 - 8,
    text: title,
    size: 13,
    fill: TEXT_COLOR,
    anchor: "middle",
  });

  const yTicks = [0, 0.25, 0.5, 0.75, 1.0];
  for (const tick of yTicks) {
    const py = y(tick);
    if (py < box.y0 - 1e-9 || py > box.y1 + 1e-9) continue;
    primitives.push({
      kind: "polyline",
      points: [
        [box.x0, py],
        [box.x1, py],
      ],
      stroke: GRID_COLOR,
      width: 0.5,
      dash: null,
    });
    primitives.push({
      kind: "text",
      x: box.x0 - 6,
      y: py + 4,
      text: formatTick(tick),
      size: 11,
      fill: TEXT_COLOR,
      anchor: "end",
    });
  }

  for (const tick of decadeTicks(xDomain[0], xDomain[1])) {
    const px = x(tick);
    primitives.push({
      kind: "polyline",
      points: [
        [px, box.y1],
        [px, box.y1 + 5],
      ],
      stroke: TEXT_COLOR,
      width: 1,
      dash: null,
    });
    primitives.push({
      kind: "text",
      x: px,
      y: box.y1 + 18,
      text: formatTick(tick),
      size: 11,
      fill: TEXT_COLOR,
      anchor: "middle",
    });
  }

  primitives.push({
    kind: "text",
    x: (box.x0 + box.x1) / 2,
    y: box.y1 + 34,
    text: "P (train set size, log scale)",
    size: 12,
    fill: TEXT_COLOR,
    anchor: "middle",
  });
  primitives.push({
    kind: "text",
    x: 6,
    y: box.y0 - 8,
    text: "learnability",
    size: 11,
    fill: TEXT_COLOR,
    anchor: "start",
  });

  // Plot frame on top of the gridlines.
  primitives.push({
    kind: "polyline",
    points: [
      [box.x0, box.y0],
      [box.x1, box.y0],
      [box.x1, box.y1],
      [box.x0, box.y1],
      [box.x0, box.y0],
    ],
    stroke: TEXT_COLOR,
    width: 1,
    dash: null,
  });
}

export interface BuildOptions {
  featureDegrees?: number[] | null;
  epsBand?: [number, number];
}

export function buildFigure(
  table: LearnabilityTable,
  options: BuildOptions = {},
): BuiltFigure {
  const wanted = options.featureDegrees ?? null;
  const epsBand = options.epsBand ?? DEFAULT_EPS_BAND;
  const rows =
    wanted === null
      ? table.rows
      : table.rows.filter((row) => wanted.includes(row.featureDegree));
  if (rows.length === 0) {
    throw new Error(
      `no rows left to plot (feature degree filter: ${JSON.stringify(wanted)})`,
    );
  }

  const datasets = [...new Set(rows.map((row) => row.dataset))].sort();
  const degrees = [...new Set(rows.map((row) => row.featureDegree))].sort(
    (a, b) => a - b,
  );
  const colorByDegree = new Map<number, string>(
    degrees.map((degree, index) => [degree, PALETTE[index % PALETTE.length]!]),
  );

  // Shared log-x domain across panels, padded by a few percent in log space.
  const pValues = rows.map((row) => row.nTrain);
  const pLo = Math.min(...pValues);
  const pHi = Math.max(...pValues);
  if (pLo <= 0) {
    throw new Error(`column 'P' must be positive for a log axis, got ${pLo}`);
  }
  const pad = pHi > pLo ? 0.04 * Math.log10(pHi / pLo) : 0.1;
  const xDomain: [number, number] = [
    10 ** (Math.log10(pLo) - pad),
    10 ** (Math.log10(pHi) + pad),
  ];

  const panelStride = PANEL_TITLE_H + PLOT_HEIGHT + AXIS_H + PANEL_GAP;
  const height =
    PAD_TOP + datasets.length * panelStride - PANEL_GAP + FOOTER_H;
  const primitives: Primitive[] = [];
  const panels: PanelLayout[] = [];

  datasets.forEach((dataset, index) => {
    const top = PAD_TOP + index * panelStride + PANEL_TITLE_H;
    const box: Box = {
      x0: MARGIN_LEFT,
      y0: top,
      x1: WIDTH - MARGIN_RIGHT,
      y1: top + PLOT_HEIGHT,
    };
    const panelRows = rows.filter((row) => row.dataset === dataset);

    // y domain from measured values only; the bound is clipped, not fitted.
    const measured = panelRows.flatMap((row) =>
      row.empiricalLoss === null
        ? [row.measuredLearnability]
        : [row.measuredLearnability, row.empiricalLoss],
    );
    const yLo = Math.min(0, ...measured);
    const yHi = Math.max(1, ...measured);
    const yPad = 0.04 * (yHi - yLo);
    const panel: PanelLayout = {
      dataset,
      box,
      x: logScale(xDomain, [box.x0, box.x1]),
      y: linearScale([yLo - yPad, yHi + yPad], [box.y1, box.y0]),
      colorByDegree,
    };
    panels.push(panel);

    buildAxes(panel, dataset, xDomain, primitives);
    buildPanel(panel, panelRows, primitives);
  });

  const [epsA, epsB] = epsBand;
  primitives.push({
    kind: "text",
    x: MARGIN_LEFT,
    y: height - 8,
    text:
      "dots: L_xq   stars: L_emp   dashed: bound (median per P)   " +
      `shaded: P* band (eps ${epsA} to ${epsB}, medians)`,
    size: 11,
    fill: TEXT_COLOR,
    anchor: "start",
  });

  return {
    scene: {
      width: WIDTH,
      height,
      background: "#ffffff",
      primitives,
    },
    panels,
  };
}
