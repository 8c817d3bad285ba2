/**
 * Figure renderer for the harness CSV artifacts.
 *
 * The renderer is math-free: it never computes densities, spectra or
 * normalizations. Reference curves arrive as a companion CSV produced
 * by the primary component, and the reference circle radius arrives as
 * a plain number in the plot spec. Rendering only rescales data into
 * pixel coordinates, so identical inputs yield byte-identical SVGs.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { CsvError, readTable, Table } from "./csv";
import {
  HEIGHT,
  MARGIN,
  WIDTH,
  axes,
  bar,
  circle,
  closeSvg,
  dot,
  fmt,
  openSvg,
  polyline,
  scale,
} from "./svg";

export type PlotKind = "scatter" | "radial_hist" | "tail_curve" | "wegner";

export interface PlotSpec {
  input_csv: string;
  kind: PlotKind;
  /** Radius of the reference circle overlay (scatter only). */
  reference_radius?: number;
  /** Companion CSV with columns r,density (radial_hist only). */
  reference_csv?: string;
  output_image: string;
  /** Expected number of histogram bins; validated against the CSV. */
  bins?: number;
}

export class SpecError extends Error {}

const KINDS: PlotKind[] = ["scatter", "radial_hist", "tail_curve", "wegner"];

export function parseSpec(raw: unknown): PlotSpec {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SpecError("plot spec must be a JSON object");
  }
  const o = raw as Record<string, unknown>;
  if (typeof o.input_csv !== "string" || o.input_csv.length === 0) {
    throw new SpecError("input_csv must be a non-empty string");
  }
  if (typeof o.kind !== "string" || !KINDS.includes(o.kind as PlotKind)) {
    throw new SpecError(`kind must be one of ${KINDS.join(", ")}`);
  }
  if (typeof o.output_image !== "string" || o.output_image.length === 0) {
    throw new SpecError("output_image must be a non-empty string");
  }
  const spec: PlotSpec = {
    input_csv: o.input_csv,
    kind: o.kind as PlotKind,
    output_image: o.output_image,
  };
  if (o.reference_radius !== undefined) {
    if (typeof o.reference_radius !== "number" || !(o.reference_radius > 0)) {
      throw new SpecError("reference_radius must be a positive number");
    }
    spec.reference_radius = o.reference_radius;
  }
  if (o.reference_csv !== undefined) {
    if (typeof o.reference_csv !== "string") {
      throw new SpecError("reference_csv must be a string");
    }
    spec.reference_csv = o.reference_csv;
  }
  if (o.bins !== undefined) {
    if (!Number.isInteger(o.bins) || (o.bins as number) < 1) {
      throw new SpecError("bins must be an integer >= 1");
    }
    spec.bins = o.bins as number;
  }
  return spec;
}

function renderScatter(table: Table, spec: PlotSpec): string {
  // Square data window centered at the origin, wide enough for every
  // point and for the reference circle.
  let extent = spec.reference_radius ?? 0;
  for (const [re, im] of table.rows) {
    extent = Math.max(extent, Math.abs(re), Math.abs(im));
  }
  const lim = extent * 1.05 || 1;
  const sx = scale(-lim, lim, MARGIN, WIDTH - MARGIN);
  const sy = scale(-lim, lim, HEIGHT - MARGIN, MARGIN);
  const parts = openSvg("spectrum scatter");
  axes(parts);
  for (const [re, im] of table.rows) {
    dot(parts, sx(re), sy(im));
  }
  if (spec.reference_radius !== undefined) {
    const rPix = sx(spec.reference_radius) - sx(0);
    circle(parts, sx(0), sy(0), rPix, "crimson");
  }
  return closeSvg(parts);
}

function renderRadialHist(table: Table, spec: PlotSpec): string {
  if (spec.bins !== undefined && table.rows.length !== spec.bins) {
    throw new SpecError(
      `expected ${spec.bins} bins, CSV has ${table.rows.length}`
    );
  }
  let reference: Table | null = null;
  if (spec.reference_csv !== undefined) {
    reference = readTable(spec.reference_csv, ["r", "density"]);
  }
  const mids = table.rows.map((row) => row[0]);
  const dens = table.rows.map((row) => row[1]);
  const refDens = reference ? reference.rows.map((row) => row[1]) : [];
  const width = mids.length > 1 ? mids[1] - mids[0] : mids[0] * 2 || 1;
  const rMax = Math.max(
    mids[mids.length - 1] + width / 2,
    reference ? reference.rows[reference.rows.length - 1][0] : 0
  );
  const dMax = Math.max(...dens, ...refDens) || 1;
  const sx = scale(0, rMax, MARGIN, WIDTH - MARGIN);
  const sy = scale(0, dMax * 1.05, HEIGHT - MARGIN, MARGIN);
  const parts = openSvg("radial density histogram");
  axes(parts);
  for (let i = 0; i < mids.length; i++) {
    const x0 = sx(mids[i] - width / 2);
    const x1 = sx(mids[i] + width / 2);
    bar(parts, x0, sy(dens[i]), x1 - x0, sy(0) - sy(dens[i]));
  }
  if (reference) {
    polyline(
      parts,
      reference.rows.map(([r, d]) => [sx(r), sy(d)] as [number, number]),
      "crimson"
    );
  }
  return closeSvg(parts);
}

function renderCurve(table: Table, title: string): string {
  const xs = table.rows.map((row) => row[0]);
  const ys = table.rows.map((row) => row[1]);
  const sx = scale(Math.min(...xs), Math.max(...xs), MARGIN, WIDTH - MARGIN);
  const sy = scale(
    Math.min(0, ...ys),
    Math.max(...ys) * 1.05 || 1,
    HEIGHT - MARGIN,
    MARGIN
  );
  const parts = openSvg(title);
  axes(parts);
  polyline(
    parts,
    table.rows.map(([x, y]) => [sx(x), sy(y)] as [number, number]),
    "steelblue"
  );
  for (const [x, y] of table.rows) {
    parts.push(
      `<circle cx="${fmt(sx(x))}" cy="${fmt(sy(y))}" r="2" fill="steelblue"/>`
    );
  }
  return closeSvg(parts);
}

const SCHEMAS: Record<PlotKind, string[]> = {
  scatter: ["re", "im"],
  radial_hist: ["r_mid", "density"],
  tail_curve: ["t", "prob"],
  wegner: ["i", "ratio"],
};

/**
 * Render the figure described by the spec and write it to
 * spec.output_image. Nothing is written if validation fails.
 */
export function render(spec: PlotSpec): void {
  const table = readTable(spec.input_csv, SCHEMAS[spec.kind]);
  let svg: string;
  switch (spec.kind) {
    case "scatter":
      svg = renderScatter(table, spec);
      break;
    case "radial_hist":
      svg = renderRadialHist(table, spec);
      break;
    case "tail_curve":
      svg = renderCurve(table, "smallest singular value tail");
      break;
    case "wegner":
      svg = renderCurve(table, "small singular value ratio profile");
      break;
  }
  fs.mkdirSync(path.dirname(path.resolve(spec.output_image)), {
    recursive: true,
  });
  fs.writeFileSync(spec.output_image, svg, "utf8");
}

export { CsvError };
