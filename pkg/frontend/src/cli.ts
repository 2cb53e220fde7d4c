#!/usr/bin/env node
/** CLI: `blocklens-report render --spec <figure-spec.json>` */

import { render } from "./render.js";
import { loadSpec, SpecError } from "./spec.js";
import { SchemaMismatch } from "./schemas.js";

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "render") {
    process.stderr.write("usage: blocklens-report render --spec <file> [--spec <file> ...]\n");
    return command === undefined || command === "--help" ? 0 : 1;
  }
  const specPaths: string[] = [];
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === "--spec" && rest[i + 1]) {
      specPaths.push(rest[++i]);
    } else {
      process.stderr.write(`unknown argument '${rest[i]}'\n`);
      return 1;
    }
  }
  if (specPaths.length === 0) {
    process.stderr.write("render needs at least one --spec\n");
    return 1;
  }
  try {
    for (const path of specPaths) {
      const paths = render(loadSpec(path));
      process.stdout.write(`${paths.output}\n`);
    }
  } catch (err) {
    if (err instanceof SpecError || err instanceof SchemaMismatch) {
      process.stderr.write(`${err.message}\n`);
      return 1;
    }
    if (err instanceof Error && "code" in err && (err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`${err.message}\n`);
      return 1;
    }
    throw err;
  }
  return 0;
}

const isDirectRun = process.argv[1]?.endsWith("cli.js");
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
