import { describe, expect, it } from "vitest";

import { buildFigure } from "../src/figure";
import { rasterToPng } from "../src/png";
import { parseColor, rasterizeScene } from "../src/raster";
import type { Scene } from "../src/scene";
import type { LearnabilityTable } from "../src/csv";

const PNG_SIGNATURE = [137, 80, 78, 71, 13, 10, 26, 10];

function pixelAt(
  raster: { width: number; pixels: Uint8ClampedArray },
  x: number,
  y: number,
): [number, number, number, number] {
  const i = (y * raster.width + x) * 4;
  return [
    raster.pixels[i]!,
    raster.pixels[i + 1]!,
    raster.pixels[i + 2]!,
    raster.pixels[i + 3]!,
  ];
}

function smallTable(): LearnabilityTable {
  return {
    rows: [
      {
        dataset: "synthetic-sphere",
        featureDegree: 1,
        featureSeed: 0,
        nTrain: 10,
        measuredLearnability: 0.4,
        empiricalLoss: 0.38,
        bound: 0.9,
        pstarLow: 60,
        pstarHigh: 18,
      },
      {
        dataset: "synthetic-sphere",
        featureDegree: 1,
        featureSeed: 1,
        nTrain: 100,
        measuredLearnability: 0.7,
        empiricalLoss: 0.69,
        bound: 0.6,
        pstarLow: 62,
        pstarHigh: 20,
      },
    ],
    pstarColumns: ["Pstar_eps0", "Pstar_eps0p7"],
    hasEmpiricalLoss: true,
  };
}

describe("parseColor", () => {
  it("decodes #rrggbb", () => {
    expect(parseColor("#2563eb")).toEqual([0x25, 0x63, 0xeb]);
  });

  it("rejects anything else", () => {
    expect(() => parseColor("blue")).toThrowError(/unsupported color/);
  });
});

describe("rasterizeScene", () => {
  it("paints the background everywhere it draws nothing", () => {
    const scene: Scene = {
      width: 8,
      height: 4,
      background: "#ffffff",
      primitives: [],
    };
    const raster = rasterizeScene(scene);
    expect(raster.pixels).toHaveLength(8 * 4 * 4);
    expect(pixelAt(raster, 3, 2)).toEqual([255, 255, 255, 255]);
  });

  it("alpha-blends translucent band rectangles over the background", () => {
    const scene: Scene = {
      width: 20,
      height: 20,
      background: "#ffffff",
      primitives: [
        {
          kind: "rect",
          x: 4,
          y: 4,
          width: 10,
          height: 10,
          fill: "#2563eb",
          opacity: 0.15,
        },
      ],
    };
    const raster = rasterizeScene(scene);
    const [r, g, b] = pixelAt(raster, 8, 8);
    // 0.15 of the fill over white: 255 + 0.15 * (channel - 255).
    expect(Math.abs(r - (255 + 0.15 * (0x25 - 255)))).toBeLessThanOrEqual(1);
    expect(Math.abs(g - (255 + 0.15 * (0x63 - 255)))).toBeLessThanOrEqual(1);
    expect(Math.abs(b - (255 + 0.15 * (0xeb - 255)))).toBeLessThanOrEqual(1);
    expect(pixelAt(raster, 1, 1)).toEqual([255, 255, 255, 255]);
  });

  it("fills circles solidly at their centers", () => {
    const scene: Scene = {
      width: 20,
      height: 20,
      background: "#ffffff",
      primitives: [
        { kind: "circle", x: 10, y: 10, radius: 3, fill: "#000000" },
      ],
    };
    const raster = rasterizeScene(scene);
    expect(pixelAt(raster, 10, 10).slice(0, 3)).toEqual([0, 0, 0]);
    expect(pixelAt(raster, 1, 1)).toEqual([255, 255, 255, 255]);
  });

  it("leaves gaps along dashed strokes but not solid ones", () => {
    const base: Scene = {
      width: 60,
      height: 5,
      background: "#ffffff",
      primitives: [],
    };
    const solid = rasterizeScene({
      ...base,
      primitives: [
        {
          kind: "polyline",
          points: [
            [0, 2.5],
            [60, 2.5],
          ],
          stroke: "#000000",
          width: 2,
          dash: null,
        },
      ],
    });
    const dashed = rasterizeScene({
      ...base,
      primitives: [
        {
          kind: "polyline",
          points: [
            [0, 2.5],
            [60, 2.5],
          ],
          stroke: "#000000",
          width: 2,
          dash: [6, 4],
        },
      ],
    });
    const darkCount = (raster: { width: number; pixels: Uint8ClampedArray }) => {
      let count = 0;
      for (let x = 0; x < 60; x++) {
        if (pixelAt(raster, x, 2)[0]! < 128) count++;
      }
      return count;
    };
    expect(darkCount(solid)).toBe(60);
    expect(darkCount(dashed)).toBeGreaterThan(20);
    expect(darkCount(dashed)).toBeLessThan(50);
  });

  it("renders text as dark pixels", () => {
    const scene: Scene = {
      width: 30,
      height: 12,
      background: "#ffffff",
      primitives: [
        {
          kind: "text",
          x: 2,
          y: 10,
          text: "10",
          size: 11,
          fill: "#000000",
          anchor: "start",
        },
      ],
    };
    const raster = rasterizeScene(scene);
    let dark = 0;
    for (let y = 0; y < 12; y++) {
      for (let x = 0; x < 30; x++) {
        if (pixelAt(raster, x, y)[0]! < 128) dark++;
      }
    }
    expect(dark).toBeGreaterThan(8);
  });
});

describe("rasterToPng", () => {
  it("writes the PNG signature and correct IHDR dimensions", () => {
    const built = buildFigure(smallTable());
    const png = rasterToPng(rasterizeScene(built.scene));
    expect([...png.subarray(0, 8)]).toEqual(PNG_SIGNATURE);
    expect(png.subarray(12, 16).toString("ascii")).toBe("IHDR");
    expect(png.readUInt32BE(16)).toBe(built.scene.width);
    expect(png.readUInt32BE(20)).toBe(built.scene.height);
    // Final chunk: 4-byte zero length, then "IEND", then its CRC.
    expect(png.readUInt32BE(png.length - 12)).toBe(0);
    expect(png.subarray(png.length - 8, png.length - 4).toString("ascii")).toBe(
      "IEND",
    );
  });

  it("is deterministic: same scene, same bytes", () => {
    const a = rasterToPng(rasterizeScene(buildFigure(smallTable()).scene));
    const b = rasterToPng(rasterizeScene(buildFigure(smallTable()).scene));
    expect(a.equals(b)).toBe(true);
  });
});
