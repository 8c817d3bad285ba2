/**
 * Reader for the harness CSV artifacts.
 *
 * Layout: an optional leading `# config=<hash>` comment, one header row
 * naming the columns, then numeric rows. The reader is strict: the
 * header must match the schema expected for the plot kind, every row
 * must have the right arity, and every cell must parse as a finite
 * number (the `inf`/`-inf` sentinels of the log-potential table are
 * accepted and passed through).
 */

import * as fs from "node:fs";

export interface Table {
  columns: string[];
  rows: number[][];
  configHash: string | null;
}

export class CsvError extends Error {}

function parseCell(cell: string): number {
  const t = cell.trim();
  if (t === "inf") return Infinity;
  if (t === "-inf") return -Infinity;
  if (t === "") throw new CsvError("empty cell");
  const v = Number(t);
  if (Number.isNaN(v)) throw new CsvError(`non-numeric cell: ${JSON.stringify(t)}`);
  return v;
}

export function parseTable(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  let configHash: string | null = null;
  let start = 0;
  if (lines.length > 0 && lines[0].startsWith("#")) {
    const m = lines[0].match(/^#\s*config=(\S+)/);
    configHash = m ? m[1] : null;
    start = 1;
  }
  if (lines.length <= start) {
    throw new CsvError("missing header row");
  }
  const columns = lines[start].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (const line of lines.slice(start + 1)) {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `row has ${cells.length} cells, expected ${columns.length}: ${line}`
      );
    }
    rows.push(cells.map(parseCell));
  }
  return { columns, rows, configHash };
}

export function readTable(path: string, expectedColumns: string[]): Table {
  if (!fs.existsSync(path)) {
    throw new CsvError(`input CSV not found: ${path}`);
  }
  const table = parseTable(fs.readFileSync(path, "utf8"));
  if (
    table.columns.length !== expectedColumns.length ||
    table.columns.some((c, i) => c !== expectedColumns[i])
  ) {
    throw new CsvError(
      `schema mismatch: expected columns [${expectedColumns.join(",")}], ` +
        `got [${table.columns.join(",")}]`
    );
  }
  if (table.rows.length === 0) {
    throw new CsvError("CSV contains no data rows");
  }
  return table;
}
