import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { CsvError, parseTable, readTable } from "../src/csv";
import { parseSpec, render, SpecError } from "../src/render";

let tmp: string;

beforeEach(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "rdlab-plots-"));
});

afterEach(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

function write(name: string, text: string): string {
  const p = path.join(tmp, name);
  fs.writeFileSync(p, text);
  return p;
}

const EIGS =
  "# config=abc123\nre,im\n0.5,0.25\n-0.3,0.1\n0.0,-0.9\n0.7,0.7\n";

describe("csv parsing", () => {
  it("reads the config hash and rows", () => {
    const t = parseTable(EIGS);
    expect(t.configHash).toBe("abc123");
    expect(t.columns).toEqual(["re", "im"]);
    expect(t.rows).toHaveLength(4);
    expect(t.rows[1]).toEqual([-0.3, 0.1]);
  });

  it("accepts inf sentinels", () => {
    const t = parseTable("a\n-inf\ninf\n");
    expect(t.rows[0][0]).toBe(-Infinity);
    expect(t.rows[1][0]).toBe(Infinity);
  });

  it("rejects ragged rows", () => {
    expect(() => parseTable("a,b\n1,2\n3\n")).toThrow(CsvError);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseTable("a\nhello\n")).toThrow(CsvError);
  });

  it("rejects a schema mismatch", () => {
    const p = write("w.csv", "x,y\n1,2\n");
    expect(() => readTable(p, ["re", "im"])).toThrow(/schema mismatch/);
  });
});

describe("spec validation", () => {
  it("rejects unknown kinds", () => {
    expect(() =>
      parseSpec({ input_csv: "a", kind: "pie", output_image: "b" })
    ).toThrow(SpecError);
  });

  it("rejects bins < 1", () => {
    expect(() =>
      parseSpec({ input_csv: "a", kind: "radial_hist", output_image: "b", bins: 0 })
    ).toThrow(SpecError);
  });

  it("accepts a full scatter spec", () => {
    const spec = parseSpec({
      input_csv: "a.csv",
      kind: "scatter",
      output_image: "a.svg",
      reference_radius: 1,
    });
    expect(spec.reference_radius).toBe(1);
  });
});

describe("render", () => {
  it("errors on an empty eigenvalue CSV and writes nothing", () => {
    const input = write("empty.csv", "# config=x\nre,im\n");
    const out = path.join(tmp, "out.svg");
    expect(() =>
      render({ input_csv: input, kind: "scatter", output_image: out })
    ).toThrow(/no data rows/);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("is byte-identical on identical inputs", () => {
    const input = write("eigs.csv", EIGS);
    const outA = path.join(tmp, "a.svg");
    const outB = path.join(tmp, "b.svg");
    const spec = { kind: "scatter" as const, reference_radius: 1 };
    render({ ...spec, input_csv: input, output_image: outA });
    render({ ...spec, input_csv: input, output_image: outB });
    expect(fs.readFileSync(outA)).toEqual(fs.readFileSync(outB));
  });

  it("draws the reference circle on scatter plots", () => {
    const input = write("eigs.csv", EIGS);
    const out = path.join(tmp, "out.svg");
    render({
      input_csv: input,
      kind: "scatter",
      output_image: out,
      reference_radius: 1,
    });
    const svg = fs.readFileSync(out, "utf8");
    expect(svg).toMatch(/<circle [^>]*stroke="crimson"/);
    // four data dots on top of the circle overlay
    expect(svg.match(/fill="black"/g)).toHaveLength(4);
  });

  it("overlays the reference curve on radial histograms", () => {
    const input = write(
      "hist.csv",
      "# config=x\nr_mid,density\n0.25,0.30\n0.75,0.33\n"
    );
    const ref = write(
      "ref.csv",
      "# config=x\nr,density\n0.0,0.318\n0.5,0.318\n1.0,0.318\n"
    );
    const out = path.join(tmp, "hist.svg");
    render({
      input_csv: input,
      kind: "radial_hist",
      output_image: out,
      reference_csv: ref,
      bins: 2,
    });
    const svg = fs.readFileSync(out, "utf8");
    expect(svg.match(/<rect [^>]*fill="steelblue"/g)).toHaveLength(2);
    expect(svg).toMatch(/<polyline [^>]*stroke="crimson"/);
  });

  it("rejects a bin-count mismatch", () => {
    const input = write("hist.csv", "r_mid,density\n0.25,0.3\n0.75,0.3\n");
    expect(() =>
      render({
        input_csv: input,
        kind: "radial_hist",
        output_image: path.join(tmp, "x.svg"),
        bins: 5,
      })
    ).toThrow(/expected 5 bins/);
  });

  it("renders tail and ratio curves", () => {
    for (const [kind, header] of [
      ["tail_curve", "t,prob"],
      ["wegner", "i,ratio"],
    ] as const) {
      const input = write(`${kind}.csv`, `${header}\n1,0.1\n2,0.2\n3,0.15\n`);
      const out = path.join(tmp, `${kind}.svg`);
      render({ input_csv: input, kind, output_image: out });
      expect(fs.readFileSync(out, "utf8")).toMatch(/<polyline /);
    }
  });

  it("rejects the wrong table for the kind", () => {
    const input = write("eigs.csv", EIGS);
    expect(() =>
      render({
        input_csv: input,
        kind: "wegner",
        output_image: path.join(tmp, "x.svg"),
      })
    ).toThrow(/schema mismatch/);
  });
});
