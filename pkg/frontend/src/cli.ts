/**
 * Plot FER/BER waterfall curves from a simulator results CSV.
 *
 * Usage: plot --in results.csv --metric fer --out fig.png [--linear-y]
 */

import { CsvError } from "./csv";
import { ChartError } from "./chart";
import { render, RenderSpec } from "./render";

export function parseArgs(argv: string[]): RenderSpec {
  let input: string | undefined;
  let output: string | undefined;
  let metric = "fer";
  let logY = true;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    switch (a) {
      case "--in":
        input = argv[++i];
        break;
      case "--out":
        output = argv[++i];
        break;
      case "--metric":
        metric = argv[++i];
        break;
      case "--linear-y":
        logY = false;
        break;
      case "--help":
      case "-h":
        throw new UsageError(USAGE, 0);
      default:
        throw new UsageError(`unknown argument: ${a}\n${USAGE}`);
    }
  }
  if (!input || !output) throw new UsageError(`--in and --out are required\n${USAGE}`);
  if (metric !== "fer" && metric !== "ber") {
    throw new UsageError(`--metric must be fer or ber, got ${metric}`);
  }
  return { input, output, metric, logY };
}

const USAGE = "usage: plot --in results.csv --metric fer|ber --out fig.png|fig.svg [--linear-y]";

export class UsageError extends Error {
  constructor(message: string, public readonly code: number = 2) {
    super(message);
  }
}

export function main(argv: string[]): number {
  let spec: RenderSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      (err.code === 0 ? console.log : console.error)(err.message);
      return err.code;
    }
    throw err;
  }
  try {
    render(spec);
  } catch (err) {
    if (err instanceof CsvError || err instanceof ChartError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: cannot read ${spec.input}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${spec.output}`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
