#!/usr/bin/env node
/** CLI entry point: `plot --spec <json-file>`. */

import * as fs from "node:fs";

import { CsvError, parseSpec, render, SpecError } from "./render";

export function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx === -1 || idx + 1 >= argv.length) {
    process.stderr.write("usage: plot --spec <spec.json>\n");
    return 2;
  }
  const specPath = argv[idx + 1];
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(specPath, "utf8"));
  } catch (err) {
    process.stderr.write(`cannot read spec: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const spec = parseSpec(raw);
    render(spec);
    process.stdout.write(`${spec.output_image}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SpecError || err instanceof CsvError) {
      process.stderr.write(`${(err as Error).message}\n`);
      return 2;
    }
    process.stderr.write(`render failed: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
