/**
 * Reader for learnability-experiment CSVs.
 *
 * Every plotted number comes straight out of one of these cells; nothing is
 * recomputed downstream, so validation is strict: a missing column, an empty
 * file, or a non-numeric cell is a hard error that names the offender.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class CsvFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvFormatError";
  }
}

export interface LearnabilityRow {
  dataset: string;
  featureDegree: number;
  featureSeed: number;
  nTrain: number;
  measuredLearnability: number;
  /** Held-out empirical loss ratio; null when the column or cell is absent. */
  empiricalLoss: number | null;
  bound: number;
  /** Threshold sample sizes keyed by the Pstar_* column they came from. */
  pstarLow: number;
  pstarHigh: number;
}

export interface LearnabilityTable {
  rows: LearnabilityRow[];
  /** Column names holding the band edges, in (low eps, high eps) order. */
  pstarColumns: [string, string];
  hasEmpiricalLoss: boolean;
}

export function pstarColumnName(eps: number): string {
  return `Pstar_eps${String(eps).replace(".", "p")}`;
}

const BASE_COLUMNS = [
  "dataset",
  "feature_degree",
  "feature_seed",
  "P",
  "L_xq",
  "bound",
] as const;

function parseCell(
  raw: string | undefined,
  column: string,
  rowNumber: number,
  path: string,
): number {
  if (raw === undefined || raw.trim() === "") {
    throw new CsvFormatError(
      `${path}: row ${rowNumber}: empty value in column '${column}'`,
    );
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new CsvFormatError(
      `${path}: row ${rowNumber}: non-numeric value '${raw}' in column '${column}'`,
    );
  }
  return value;
}

/**
 * Parse one experiment CSV into typed rows.
 *
 * `epsBand` selects which pair of threshold columns feeds the shaded band;
 * the default [0, 0.7] matches the columns the experiment runner writes.
 */
export function readLearnabilityCsv(
  path: string,
  epsBand: [number, number] = [0, 0.7],
): LearnabilityTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvFormatError(`${path}: cannot read file: ${String(err)}`);
  }
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    const where = first.row === undefined ? "" : ` (row ${first.row + 2})`;
    throw new CsvFormatError(`${path}: malformed CSV${where}: ${first.message}`);
  }

  const columns = parsed.meta.fields ?? [];
  const pstarColumns: [string, string] = [
    pstarColumnName(epsBand[0]),
    pstarColumnName(epsBand[1]),
  ];
  const required = [...BASE_COLUMNS, ...pstarColumns];
  const missing = required.filter((name) => !columns.includes(name));
  if (missing.length > 0) {
    throw new CsvFormatError(
      `${path}: missing required column(s): ${missing.join(", ")}`,
    );
  }
  if (parsed.data.length === 0) {
    throw new CsvFormatError(`${path}: no data rows`);
  }

  const hasEmpiricalLoss = columns.includes("L_emp");
  const rows = parsed.data.map((record, index): LearnabilityRow => {
    const rowNumber = index + 2; // 1-based, counting the header line
    const cell = (column: string): number =>
      parseCell(record[column], column, rowNumber, path);
    const dataset = record["dataset"];
    if (dataset === undefined || dataset === "") {
      throw new CsvFormatError(
        `${path}: row ${rowNumber}: empty value in column 'dataset'`,
      );
    }
    const rawEmp = record["L_emp"];
    const empiricalLoss =
      !hasEmpiricalLoss || rawEmp === undefined || rawEmp.trim() === ""
        ? null
        : parseCell(rawEmp, "L_emp", rowNumber, path);
    return {
      dataset,
      featureDegree: cell("feature_degree"),
      featureSeed: cell("feature_seed"),
      nTrain: cell("P"),
      measuredLearnability: cell("L_xq"),
      empiricalLoss,
      bound: cell("bound"),
      pstarLow: cell(pstarColumns[0]),
      pstarHigh: cell(pstarColumns[1]),
    };
  });

  return { rows, pstarColumns, hasEmpiricalLoss };
}
