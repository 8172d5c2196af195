/** Serialize a scene to a standalone SVG document. */

import type { Primitive, Scene } from "./scene.js";

function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function num(value: number): string {
  // Fixed precision keeps the output stable across platforms.
  return String(Number(value.toFixed(3)));
}

function pointsAttr(points: Array<[number, number]>): string {
  return points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
}

function serialize(p: Primitive): string {
  switch (p.kind) {
    case "rect":
      return (
        `<rect x="${num(p.x)}" y="${num(p.y)}" width="${num(p.width)}" ` +
        `height="${num(p.height)}" fill="${p.fill}" fill-opacity="${p.opacity}"/>`
      );
    case "circle":
      return (
        `<circle cx="${num(p.x)}" cy="${num(p.y)}" r="${num(p.radius)}" ` +
        `fill="${p.fill}"/>`
      );
    case "polygon":
      return `<polygon points="${pointsAttr(p.points)}" fill="${p.fill}"/>`;
    case "polyline": {
      const dash =
        p.dash === null
          ? ""
          : ` stroke-dasharray="${num(p.dash[0])} ${num(p.dash[1])}"`;
      return (
        `<polyline points="${pointsAttr(p.points)}" fill="none" ` +
        `stroke="${p.stroke}" stroke-width="${num(p.width)}"${dash}/>`
      );
    }
    case "text":
      return (
        `<text x="${num(p.x)}" y="${num(p.y)}" font-size="${num(p.size)}" ` +
        `font-family="Helvetica, Arial, sans-serif" fill="${p.fill}" ` +
        `text-anchor="${p.anchor}">${escapeText(p.text)}</text>`
      );
  }
}

export function sceneToSvg(scene: Scene): string {
  const lines = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" ` +
      `height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
    `<rect x="0" y="0" width="${scene.width}" height="${scene.height}" ` +
      `fill="${scene.background}" fill-opacity="1"/>`,
    ...scene.primitives.map(serialize),
    "</svg>",
  ];
  return lines.join("\n") + "\n";
}
