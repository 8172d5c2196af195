/**
 * Render-format-independent scene graph.
 *
 * Figures are built as a flat list of primitives in pixel coordinates;
 * the SVG serializer and the PNG rasterizer both consume this structure,
 * so tests can check plotted positions once, independent of format.
 */

export interface RectMark {
  kind: "rect";
  x: number;
  y: number;
  width: number;
  height: number;
  fill: string;
  opacity: number;
}

export interface CircleMark {
  kind: "circle";
  x: number;
  y: number;
  radius: number;
  fill: string;
}

export interface PolygonMark {
  kind: "polygon";
  points: Array<[number, number]>;
  fill: string;
}

export interface PolylineMark {
  kind: "polyline";
  points: Array<[number, number]>;
  stroke: string;
  width: number;
  /** [dash length, gap length] in pixels, or null for a solid line. */
  dash: [number, number] | null;
}

export interface TextMark {
  kind: "text";
  x: number;
  y: number; // baseline
  text: string;
  size: number;
  fill: string;
  anchor: "start" | "middle" | "end";
}

export type Primitive =
  | RectMark
  | CircleMark
  | PolygonMark
  | PolylineMark
  | TextMark;

export interface Scene {
  width: number;
  height: number;
  background: string;
  primitives: Primitive[];
}

export type Scale = (value: number) => number;

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  return (value) => r0 + ((value - d0) / span) * (r1 - r0);
}

/** Base-10 logarithmic scale; the domain must be strictly positive. */
export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const inner = linearScale([Math.log10(d0), Math.log10(d1)], range);
  return (value) => inner(Math.log10(value));
}

export interface Box {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

function clipSegment(
  a: [number, number],
  b: [number, number],
  box: Box,
): [[number, number], [number, number]] | null {
  // Liang-Barsky parametric clip of the segment a->b against the box.
  let t0 = 0;
  let t1 = 1;
  const dx = b[0] - a[0];
  const dy = b[1] - a[1];
  const checks: Array<[number, number]> = [
    [-dx, a[0] - box.x0],
    [dx, box.x1 - a[0]],
    [-dy, a[1] - box.y0],
    [dy, box.y1 - a[1]],
  ];
  for (const [p, q] of checks) {
    if (p === 0) {
      if (q < 0) return null; // parallel and fully outside
      continue;
    }
    const r = q / p;
    if (p < 0) {
      if (r > t1) return null;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return null;
      if (r < t1) t1 = r;
    }
  }
  return [
    [a[0] + t0 * dx, a[1] + t0 * dy],
    [a[0] + t1 * dx, a[1] + t1 * dy],
  ];
}

/**
 * Clip a polyline to a box, splitting it where it leaves the box.
 * Returns zero or more polylines that lie entirely inside.
 */
export function clipPolyline(
  points: Array<[number, number]>,
  box: Box,
): Array<Array<[number, number]>> {
  const pieces: Array<Array<[number, number]>> = [];
  let current: Array<[number, number]> = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const clipped = clipSegment(points[i]!, points[i + 1]!, box);
    if (clipped === null) {
      if (current.length > 1) pieces.push(current);
      current = [];
      continue;
    }
    const [start, end] = clipped;
    const last = current[current.length - 1];
    if (last === undefined || last[0] !== start[0] || last[1] !== start[1]) {
      if (current.length > 1) pieces.push(current);
      current = [start];
    }
    current.push(end);
  }
  if (current.length > 1) pieces.push(current);
  return pieces;
}
