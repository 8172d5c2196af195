/** Render one figure spec to a file: CSV -> scene -> SVG or PNG. */

import { writeFileSync } from "node:fs";
import { readLearnabilityCsv } from "./csv.js";
import { type FigureSpec, buildFigure } from "./figure.js";
import { rasterToPng } from "./png.js";
import { rasterizeScene } from "./raster.js";
import { sceneToSvg } from "./svg.js";

export function renderFigureFile(spec: FigureSpec): void {
  const table = readLearnabilityCsv(spec.inputCsv, spec.epsBand);
  const { scene } = buildFigure(table, {
    featureDegrees: spec.featureDegrees,
    epsBand: spec.epsBand,
  });
  if (spec.format === "svg") {
    writeFileSync(spec.outputPath, sceneToSvg(scene), "utf8");
  } else {
    writeFileSync(spec.outputPath, rasterToPng(rasterizeScene(scene)));
  }
}
