import { createHash } from "node:crypto";
import { existsSync, mkdirSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, describe, expect, it, vi } from "vitest";

import { UsageError, main, parseArgs } from "../src/cli";
import { FULL_HEADER, fixtureRow, standardRows, writeCsv } from "./helpers";

function sha256(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

function captureStreams(): { stderr: string[]; stdout: string[] } {
  const captured = { stderr: [] as string[], stdout: [] as string[] };
  vi.spyOn(process.stderr, "write").mockImplementation((chunk) => {
    captured.stderr.push(String(chunk));
    return true;
  });
  vi.spyOn(process.stdout, "write").mockImplementation((chunk) => {
    captured.stdout.push(String(chunk));
    return true;
  });
  return captured;
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("parseArgs", () => {
  it("collects CSV paths and options", () => {
    const options = parseArgs([
      "--out-dir",
      "/tmp/figs",
      "--format",
      "png",
      "--degrees",
      "1,2,4",
      "a.csv",
      "b.csv",
    ]);
    expect(options.outDir).toBe("/tmp/figs");
    expect(options.format).toBe("png");
    expect(options.featureDegrees).toEqual([1, 2, 4]);
    expect(options.csvPaths).toEqual(["a.csv", "b.csv"]);
  });

  it("defaults to SVG next to the input with all degrees", () => {
    const options = parseArgs(["run.csv"]);
    expect(options.outDir).toBeNull();
    expect(options.format).toBe("svg");
    expect(options.featureDegrees).toBeNull();
  });

  it("rejects unknown formats, bad degree lists, stray flags, and no inputs", () => {
    expect(() => parseArgs(["--format", "gif", "a.csv"])).toThrowError(
      UsageError,
    );
    expect(() => parseArgs(["--degrees", "1,x", "a.csv"])).toThrowError(
      UsageError,
    );
    expect(() => parseArgs(["--frmat", "svg", "a.csv"])).toThrowError(
      UsageError,
    );
    expect(() => parseArgs([])).toThrowError(UsageError);
    expect(() => parseArgs(["--out-dir"])).toThrowError(UsageError);
  });
});

describe("main", () => {
  it("renders one figure per CSV without touching the inputs", () => {
    const dir = mkdtempSync(join(tmpdir(), "figcli-"));
    const outDir = join(dir, "figs");
    mkdirSync(outDir);
    const inputs = [
      join(dir, "learnability-synthetic.csv"),
      join(dir, "learnability-real.csv"),
      join(dir, "learnability-whitened.csv"),
    ];
    writeCsv(inputs[0]!, standardRows("synthetic-sphere"));
    writeCsv(inputs[1]!, standardRows("mnist-pca6-sphere"));
    writeCsv(inputs[2]!, [
      ...standardRows("mnist-pca6-sphere"),
      ...standardRows("mnist-pca6-sphere-white"),
    ]);
    const hashesBefore = inputs.map(sha256);

    const captured = captureStreams();
    const code = main([...inputs, "--out-dir", outDir]);
    expect(code).toBe(0);

    for (const input of inputs) {
      const name = input.split("/").pop()!.replace(/\.csv$/, ".svg");
      const outPath = join(outDir, name);
      expect(existsSync(outPath)).toBe(true);
      expect(readFileSync(outPath, "utf8")).toContain("<svg");
    }
    // Rendering is read-only: input bytes are untouched.
    expect(inputs.map(sha256)).toEqual(hashesBefore);
    expect(captured.stdout.join("")).toContain("learnability-real.csv");
  });

  it("renders PNG when asked", () => {
    const dir = mkdtempSync(join(tmpdir(), "figcli-"));
    const input = join(dir, "run.csv");
    writeCsv(input, standardRows());
    captureStreams();
    const code = main([input, "--format", "png"]);
    expect(code).toBe(0);
    const png = readFileSync(join(dir, "run.png"));
    expect([...png.subarray(0, 8)]).toEqual([137, 80, 78, 71, 13, 10, 26, 10]);
  });

  it("fails with a clear message when a required column is missing", () => {
    const dir = mkdtempSync(join(tmpdir(), "figcli-"));
    const input = join(dir, "broken.csv");
    writeCsv(input, [fixtureRow()], FULL_HEADER.filter((c) => c !== "L_xq"));
    const captured = captureStreams();
    const code = main([input]);
    expect(code).toBe(2);
    const message = captured.stderr.join("");
    expect(message).toContain("missing required column(s): L_xq");
    expect(existsSync(join(dir, "broken.svg"))).toBe(false);
  });

  it("fails on an empty CSV", () => {
    const dir = mkdtempSync(join(tmpdir(), "figcli-"));
    const input = join(dir, "empty.csv");
    writeCsv(input, []);
    const captured = captureStreams();
    expect(main([input])).toBe(2);
    expect(captured.stderr.join("")).toContain("no data rows");
  });

  it("fails with usage text when called without inputs", () => {
    const captured = captureStreams();
    expect(main([])).toBe(1);
    expect(captured.stderr.join("")).toContain("usage:");
  });

  it("applies the degree filter end to end", () => {
    const dir = mkdtempSync(join(tmpdir(), "figcli-"));
    const input = join(dir, "run.csv");
    writeCsv(input, standardRows());
    captureStreams();
    expect(main([input, "--degrees", "1"])).toBe(0);
    const svg = readFileSync(join(dir, "run.svg"), "utf8");
    expect(svg).toContain(">degree 1</text>");
    expect(svg).not.toContain(">degree 2</text>");
  });
});
