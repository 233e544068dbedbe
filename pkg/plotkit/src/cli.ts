#!/usr/bin/env node
/**
 * plotkit — render run traces as a two-panel SVG figure.
 *
 * Usage:
 *   plotkit --static trace.csv --out fig.svg
 *   plotkit --static run1.csv --dynamic run2.csv --out fig.svg [--log-x]
 *
 * Each input CSV becomes one figure row (prices panel + excess panel).
 */
import { readFileSync, writeFileSync } from "fs";
import { basename } from "path";
import { parseTrace } from "./csv.js";
import { buildFigure, FigureRow } from "./figure.js";

interface CliArgs {
  staticPath?: string;
  dynamicPath?: string;
  out?: string;
  logX: boolean;
}

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { logX: false };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      i++;
      if (i >= argv.length) throw new Error(`missing value for ${flag}`);
      return argv[i];
    };
    switch (flag) {
      case "--static":
        args.staticPath = next();
        break;
      case "--dynamic":
        args.dynamicPath = next();
        break;
      case "--out":
        args.out = next();
        break;
      case "--log-x":
        args.logX = true;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!args.staticPath && !args.dynamicPath) {
    throw new Error("need at least one input (--static and/or --dynamic)");
  }
  if (!args.out) throw new Error("--out is required");
  if (!args.out.endsWith(".svg")) {
    throw new Error(`--out must be an .svg path, got ${args.out}`);
  }
  return args;
}

export function run(argv: string[]): void {
  const args = parseArgs(argv);
  const rows: FigureRow[] = [];
  for (const [label, path] of [
    ["static", args.staticPath],
    ["dynamic", args.dynamicPath],
  ] as const) {
    if (!path) continue;
    let text: string;
    try {
      text = readFileSync(path, "utf-8");
    } catch {
      throw new Error(`cannot read ${path}`);
    }
    let table;
    try {
      table = parseTrace(text);
    } catch (err) {
      throw new Error(`${path}: ${(err as Error).message}`);
    }
    rows.push({ title: `${label} (${basename(path, ".csv")})`, table });
  }
  const svg = buildFigure(rows, { logX: args.logX });
  writeFileSync(args.out!, svg);
  console.log(`figure with ${rows.length} row(s) -> ${args.out}`);
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;

if (invokedDirectly) {
  try {
    run(process.argv.slice(2));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  }
}
