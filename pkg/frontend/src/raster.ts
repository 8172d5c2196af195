/**
 * Software rasterizer: scene -> RGBA pixel buffer.
 *
 * Keeps the PNG path free of native dependencies. Shapes get cheap coverage
 * antialiasing (distance-based for circles and strokes, 2x2 supersampling
 * for polygons); text uses the built-in 5x7 bitmap font.
 */

import {
  GLYPH_ADVANCE,
  GLYPH_HEIGHT,
  GLYPH_WIDTH,
  glyphFor,
  textWidth,
} from "./font.js";
import type {
  CircleMark,
  PolygonMark,
  PolylineMark,
  RectMark,
  Scene,
  TextMark,
} from "./scene.js";

export interface Raster {
  width: number;
  height: number;
  /** RGBA, row-major, 4 bytes per pixel. */
  pixels: Uint8ClampedArray;
}

type Rgb = [number, number, number];

export function parseColor(color: string): Rgb {
  const match = /^#([0-9a-fA-F]{6})$/.exec(color);
  if (match === null) {
    throw new Error(`unsupported color '${color}' (expected #rrggbb)`);
  }
  const value = parseInt(match[1]!, 16);
  return [(value >> 16) & 0xff, (value >> 8) & 0xff, value & 0xff];
}

function blend(raster: Raster, x: number, y: number, rgb: Rgb, alpha: number): void {
  if (alpha <= 0 || x < 0 || y < 0 || x >= raster.width || y >= raster.height) {
    return;
  }
  const i = (y * raster.width + x) * 4;
  const a = Math.min(1, alpha);
  const px = raster.pixels;
  px[i] = rgb[0] * a + px[i]! * (1 - a);
  px[i + 1] = rgb[1] * a + px[i + 1]! * (1 - a);
  px[i + 2] = rgb[2] * a + px[i + 2]! * (1 - a);
  px[i + 3] = 255;
}

function fillRect(raster: Raster, mark: RectMark): void {
  const rgb = parseColor(mark.fill);
  const x0 = Math.max(0, Math.round(mark.x));
  const y0 = Math.max(0, Math.round(mark.y));
  const x1 = Math.min(raster.width, Math.round(mark.x + mark.width));
  const y1 = Math.min(raster.height, Math.round(mark.y + mark.height));
  for (let y = y0; y < y1; y++) {
    for (let x = x0; x < x1; x++) {
      blend(raster, x, y, rgb, mark.opacity);
    }
  }
}

function fillCircle(raster: Raster, mark: CircleMark): void {
  const rgb = parseColor(mark.fill);
  const r = mark.radius;
  const x0 = Math.floor(mark.x - r - 1);
  const x1 = Math.ceil(mark.x + r + 1);
  const y0 = Math.floor(mark.y - r - 1);
  const y1 = Math.ceil(mark.y + r + 1);
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      const dist = Math.hypot(x + 0.5 - mark.x, y + 0.5 - mark.y);
      const coverage = Math.min(1, Math.max(0, r + 0.5 - dist));
      blend(raster, x, y, rgb, coverage);
    }
  }
}

function insidePolygon(points: Array<[number, number]>, x: number, y: number): boolean {
  // Even-odd rule.
  let inside = false;
  for (let i = 0, j = points.length - 1; i < points.length; j = i++) {
    const [xi, yi] = points[i]!;
    const [xj, yj] = points[j]!;
    if (yi > y !== yj > y && x < ((xj - xi) * (y - yi)) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

function fillPolygon(raster: Raster, mark: PolygonMark): void {
  const rgb = parseColor(mark.fill);
  const xs = mark.points.map((p) => p[0]);
  const ys = mark.points.map((p) => p[1]);
  const x0 = Math.floor(Math.min(...xs));
  const x1 = Math.ceil(Math.max(...xs));
  const y0 = Math.floor(Math.min(...ys));
  const y1 = Math.ceil(Math.max(...ys));
  const offsets = [0.25, 0.75];
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      let hits = 0;
      for (const dy of offsets) {
        for (const dx of offsets) {
          if (insidePolygon(mark.points, x + dx, y + dy)) hits++;
        }
      }
      if (hits > 0) blend(raster, x, y, rgb, hits / 4);
    }
  }
}

function strokeSegment(
  raster: Raster,
  ax: number,
  ay: number,
  bx: number,
  by: number,
  rgb: Rgb,
  width: number,
  dash: [number, number] | null,
): void {
  const half = width / 2;
  const dx = bx - ax;
  const dy = by - ay;
  const length = Math.hypot(dx, dy);
  if (length === 0) return;
  const x0 = Math.floor(Math.min(ax, bx) - half - 1);
  const x1 = Math.ceil(Math.max(ax, bx) + half + 1);
  const y0 = Math.floor(Math.min(ay, by) - half - 1);
  const y1 = Math.ceil(Math.max(ay, by) + half + 1);
  const period = dash === null ? 0 : dash[0] + dash[1];
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      const px = x + 0.5 - ax;
      const py = y + 0.5 - ay;
      let t = (px * dx + py * dy) / (length * length);
      t = Math.max(0, Math.min(1, t));
      const dist = Math.hypot(px - t * dx, py - t * dy);
      const coverage = Math.min(1, Math.max(0, half + 0.5 - dist));
      if (coverage <= 0) continue;
      if (dash !== null) {
        const along = t * length;
        if (along % period >= dash[0]) continue;
      }
      blend(raster, x, y, rgb, coverage);
    }
  }
}

function strokePolyline(raster: Raster, mark: PolylineMark): void {
  const rgb = parseColor(mark.stroke);
  for (let i = 0; i + 1 < mark.points.length; i++) {
    const [ax, ay] = mark.points[i]!;
    const [bx, by] = mark.points[i + 1]!;
    strokeSegment(raster, ax, ay, bx, by, rgb, mark.width, mark.dash);
  }
}

function drawText(raster: Raster, mark: TextMark): void {
  const rgb = parseColor(mark.fill);
  const cell = Math.max(1, Math.round(mark.size / 9));
  const width = textWidth(mark.text, cell);
  let x =
    mark.anchor === "start"
      ? mark.x
      : mark.anchor === "middle"
        ? mark.x - width / 2
        : mark.x - width;
  const top = mark.y - GLYPH_HEIGHT * cell + cell;
  for (const char of mark.text) {
    const rows = glyphFor(char);
    for (let row = 0; row < GLYPH_HEIGHT; row++) {
      for (let col = 0; col < GLYPH_WIDTH; col++) {
        if (rows[row]![col] !== "#") continue;
        for (let dy = 0; dy < cell; dy++) {
          for (let dx = 0; dx < cell; dx++) {
            blend(
              raster,
              Math.round(x) + col * cell + dx,
              Math.round(top) + row * cell + dy,
              rgb,
              1,
            );
          }
        }
      }
    }
    x += GLYPH_ADVANCE * cell;
  }
}

export function rasterizeScene(scene: Scene): Raster {
  const raster: Raster = {
    width: Math.round(scene.width),
    height: Math.round(scene.height),
    pixels: new Uint8ClampedArray(
      Math.round(scene.width) * Math.round(scene.height) * 4,
    ),
  };
  const bg = parseColor(scene.background);
  for (let i = 0; i < raster.pixels.length; i += 4) {
    raster.pixels[i] = bg[0];
    raster.pixels[i + 1] = bg[1];
    raster.pixels[i + 2] = bg[2];
    raster.pixels[i + 3] = 255;
  }
  for (const primitive of scene.primitives) {
    switch (primitive.kind) {
      case "rect":
        fillRect(raster, primitive);
        break;
      case "circle":
        fillCircle(raster, primitive);
        break;
      case "polygon":
        fillPolygon(raster, primitive);
        break;
      case "polyline":
        strokePolyline(raster, primitive);
        break;
      case "text":
        drawText(raster, primitive);
        break;
    }
  }
  return raster;
}
