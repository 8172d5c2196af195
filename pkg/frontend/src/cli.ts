#!/usr/bin/env node
/**
 * Command line entry: render one figure per experiment CSV.
 *
 * Usage:
 *   spectralbias-figures [--out-dir DIR] [--format svg|png]
 *                        [--degrees 1,2,4] experiment.csv [...]
 *
 * Output files take the CSV's basename with the format's extension. Inputs
 * are only ever read; any malformed or incomplete CSV aborts with a nonzero
 * exit code and a message naming the problem.
 */

import { basename, dirname, extname, join } from "node:path";
import { pathToFileURL } from "node:url";
import { CsvFormatError } from "./csv.js";
import { DEFAULT_EPS_BAND, type FigureSpec } from "./figure.js";
import { renderFigureFile } from "./render.js";

const USAGE =
  "usage: spectralbias-figures [--out-dir DIR] [--format svg|png] " +
  "[--degrees 1,2,4] experiment.csv [...]";

interface CliOptions {
  outDir: string | null;
  format: "svg" | "png";
  featureDegrees: number[] | null;
  csvPaths: string[];
}

export class UsageError extends Error {}

export function parseArgs(argv: string[]): CliOptions {
  const options: CliOptions = {
    outDir: null,
    format: "svg",
    featureDegrees: null,
    csvPaths: [],
  };
  let i = 0;
  const takeValue = (flag: string): string => {
    const value = argv[i + 1];
    if (value === undefined) {
      throw new UsageError(`${flag} needs a value`);
    }
    i += 2;
    return value;
  };
  while (i < argv.length) {
    const arg = argv[i]!;
    if (arg === "--out-dir") {
      options.outDir = takeValue(arg);
    } else if (arg === "--format") {
      const value = takeValue(arg);
      if (value !== "svg" && value !== "png") {
        throw new UsageError(`--format must be svg or png, got '${value}'`);
      }
      options.format = value;
    } else if (arg === "--degrees") {
      const value = takeValue(arg);
      const degrees = value.split(",").map((part) => Number(part));
      if (degrees.length === 0 || degrees.some((d) => !Number.isFinite(d))) {
        throw new UsageError(`--degrees must be a comma-separated number list, got '${value}'`);
      }
      options.featureDegrees = degrees;
    } else if (arg === "--help" || arg === "-h") {
      throw new UsageError(USAGE);
    } else if (arg.startsWith("--")) {
      throw new UsageError(`unknown option '${arg}'`);
    } else {
      options.csvPaths.push(arg);
      i += 1;
    }
  }
  if (options.csvPaths.length === 0) {
    throw new UsageError(USAGE);
  }
  return options;
}

export function main(argv: string[]): number {
  let options: CliOptions;
  try {
    options = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`${err.message}\n${USAGE}\n`);
      return 1;
    }
    throw err;
  }

  for (const csvPath of options.csvPaths) {
    const stem = basename(csvPath, extname(csvPath));
    const outDir = options.outDir ?? dirname(csvPath);
    const spec: FigureSpec = {
      inputCsv: csvPath,
      featureDegrees: options.featureDegrees,
      epsBand: DEFAULT_EPS_BAND,
      outputPath: join(outDir, `${stem}.${options.format}`),
      format: options.format,
    };
    try {
      renderFigureFile(spec);
    } catch (err) {
      if (err instanceof CsvFormatError || err instanceof Error) {
        process.stderr.write(`error: ${err.message}\n`);
        return 2;
      }
      throw err;
    }
    process.stdout.write(`${csvPath}: ${spec.outputPath}\n`);
  }
  return 0;
}

// Invoked as a script (bin entry or `node dist/cli.js`): render and exit.
const entryPath = process.argv[1];
if (entryPath !== undefined && import.meta.url === pathToFileURL(entryPath).href) {
  process.exit(main(process.argv.slice(2)));
}
