#!/usr/bin/env node
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import { BackendError, DEFAULT_MODEL } from "./backends.js";
import { ExportError, runExport } from "./exporter.js";
import { FormatError } from "./formats.js";

const USAGE = `usage: embed-export export --in <txt> [--model <id>] --out <path>
                          [--format text|binary] [--batch <n>]

Embed one phrase per input line and write a vector file.

  --in      input phrase list, one phrase per line, UTF-8
  --model   embedding model id (default ${DEFAULT_MODEL});
            "hash:<dim>" selects the offline deterministic backend
  --out     output vector file path
  --format  output format: text (default) or binary
  --batch   inference batch size (default 32)
`;

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        model: { type: "string", default: DEFAULT_MODEL },
        out: { type: "string" },
        format: { type: "string", default: "text" },
        batch: { type: "string", default: "32" },
        help: { type: "boolean", short: "h", default: false },
      },
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }

  if (parsed.values.help) {
    console.log(USAGE);
    return 0;
  }
  if (parsed.positionals.length !== 1 || parsed.positionals[0] !== "export") {
    console.error("error: expected the single subcommand 'export'");
    console.error(USAGE);
    return 2;
  }
  const { in: input, model, out, format, batch } = parsed.values;
  if (!input || !out) {
    console.error("error: --in and --out are required");
    console.error(USAGE);
    return 2;
  }
  if (format !== "text" && format !== "binary") {
    console.error(`error: --format must be text or binary, got ${format}`);
    return 2;
  }
  const batchSize = Number(batch);
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    console.error(`error: --batch must be a positive integer, got ${batch}`);
    return 2;
  }

  try {
    const summary = await runExport({
      input,
      model: model!,
      out,
      format,
      batch: batchSize,
    });
    console.error(
      `exported ${summary.count} records (dim ${summary.dim}, ` +
        `${summary.duplicates} duplicate lines dropped) to ${out}`,
    );
    console.error(`model ${model} revision ${summary.revision}`);
    return 0;
  } catch (err) {
    if (err instanceof ExportError || err instanceof FormatError || err instanceof BackendError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
