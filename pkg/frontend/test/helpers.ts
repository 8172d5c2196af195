/** Shared fixture builders: write experiment-shaped CSVs for tests. */

import { writeFileSync } from "node:fs";

/** Full column set the experiment runner writes; the renderer needs a subset. */
export const FULL_HEADER = [
  "dataset",
  "kernel",
  "feature_degree",
  "feature_seed",
  "P",
  "sigma2",
  "L_emp",
  "L_xq",
  "bound",
  "Pstar_eps0",
  "Pstar_eps0p7",
  "E_D_phi2",
  "E_D_y2",
  "overlap",
  "stderr_Lxq",
];

export interface FixtureRow {
  dataset?: string;
  kernel?: string;
  feature_degree?: number;
  feature_seed?: number;
  P?: number;
  sigma2?: number;
  L_emp?: number | "";
  L_xq?: number;
  bound?: number;
  Pstar_eps0?: number;
  Pstar_eps0p7?: number;
}

export function fixtureRow(overrides: FixtureRow = {}): Record<string, string> {
  const defaults: Required<FixtureRow> = {
    dataset: "synthetic-sphere",
    kernel: "arccos-nngp-1layer",
    feature_degree: 1,
    feature_seed: 0,
    P: 16,
    sigma2: 0.1,
    L_emp: 0.42,
    L_xq: 0.45,
    bound: 0.8,
    Pstar_eps0: 40.0,
    Pstar_eps0p7: 12.0,
  };
  const merged = { ...defaults, ...overrides };
  return {
    dataset: merged.dataset,
    kernel: merged.kernel,
    feature_degree: String(merged.feature_degree),
    feature_seed: String(merged.feature_seed),
    P: String(merged.P),
    sigma2: String(merged.sigma2),
    L_emp: merged.L_emp === "" ? "" : String(merged.L_emp),
    L_xq: String(merged.L_xq),
    bound: String(merged.bound),
    Pstar_eps0: String(merged.Pstar_eps0),
    Pstar_eps0p7: String(merged.Pstar_eps0p7),
    E_D_phi2: "1.0",
    E_D_y2: "1.0",
    overlap: "0.9",
    stderr_Lxq: "0.01",
  };
}

export function writeCsv(
  path: string,
  rows: Array<Record<string, string>>,
  header: string[] = FULL_HEADER,
): void {
  const lines = [header.join(",")];
  for (const row of rows) {
    lines.push(header.map((column) => row[column] ?? "").join(","));
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

/** A plausible small experiment: 2 degrees x 3 P values x 3 seeds. */
export function standardRows(dataset = "synthetic-sphere"): Array<Record<string, string>> {
  const rows: Array<Record<string, string>> = [];
  const pstar: Record<number, [number, number]> = {
    1: [40, 12],
    2: [240, 72],
  };
  for (const degree of [1, 2]) {
    for (const P of [10, 100, 1000]) {
      for (const seed of [0, 1, 2]) {
        const spread = 0.02 * (seed - 1);
        const level = degree === 1 ? 0.7 : 0.3;
        const [eps0, eps0p7] = pstar[degree]!;
        rows.push(
          fixtureRow({
            dataset,
            feature_degree: degree,
            feature_seed: seed,
            P,
            L_xq: level + spread + Math.log10(P) / 20,
            L_emp: level + spread * 1.5 + Math.log10(P) / 20,
            bound: (level + spread) * (1 + 400 / P),
            Pstar_eps0: eps0 + seed,
            Pstar_eps0p7: eps0p7 + seed,
          }),
        );
      }
    }
  }
  return rows;
}
