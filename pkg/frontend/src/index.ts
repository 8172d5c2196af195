export {
  CsvFormatError,
  readLearnabilityCsv,
  pstarColumnName,
  type LearnabilityRow,
  type LearnabilityTable,
} from "./csv.js";
export {
  DEFAULT_EPS_BAND,
  buildFigure,
  medianCell,
  type BuiltFigure,
  type FigureSpec,
  type PanelLayout,
} from "./figure.js";
export { renderFigureFile } from "./render.js";
export { sceneToSvg } from "./svg.js";
export { rasterizeScene, type Raster } from "./raster.js";
export { rasterToPng } from "./png.js";
export { clipPolyline, linearScale, logScale, type Scene } from "./scene.js";
export { main, parseArgs, UsageError } from "./cli.js";
