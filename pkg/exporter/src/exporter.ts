import { readFileSync, renameSync, writeFileSync } from "node:fs";

import { makeBackend } from "./backends.js";
import { formatBinary, formatText, type VectorRecord } from "./formats.js";
import { normalizeKey } from "./normalize.js";

export class ExportError extends Error {}

export interface ExportJob {
  input: string;
  model: string;
  out: string;
  format: "text" | "binary";
  batch: number;
}

export interface ExportSummary {
  count: number;
  dim: number;
  duplicates: number;
  revision: string;
}

export interface PhraseList {
  unique: string[];
  duplicates: number;
}

/** Read one phrase per line; blank lines skipped, duplicates (after
 * normalization) collapsed to the first occurrence. */
export function readPhraseList(path: string): PhraseList {
  const seen = new Set<string>();
  const unique: string[] = [];
  let duplicates = 0;
  for (const line of readFileSync(path, "utf-8").split(/\r?\n/)) {
    const key = normalizeKey(line);
    if (!key) {
      continue;
    }
    if (seen.has(key)) {
      duplicates++;
      continue;
    }
    seen.add(key);
    unique.push(key);
  }
  return { unique, duplicates };
}

export async function runExport(job: ExportJob): Promise<ExportSummary> {
  if (!Number.isInteger(job.batch) || job.batch < 1) {
    throw new ExportError(`batch size must be a positive integer, got ${job.batch}`);
  }
  if (job.format !== "text" && job.format !== "binary") {
    throw new ExportError(`unknown output format ${job.format}`);
  }
  const { unique, duplicates } = readPhraseList(job.input);
  if (unique.length === 0) {
    throw new ExportError(`input list ${job.input} has no phrases`);
  }

  const backend = makeBackend(job.model);
  const records: VectorRecord[] = [];
  let dim = -1;
  for (let start = 0; start < unique.length; start += job.batch) {
    const chunk = unique.slice(start, start + job.batch);
    const vectors = await backend.embed(chunk);
    if (vectors.length !== chunk.length) {
      throw new ExportError(
        `backend returned ${vectors.length} vectors for a batch of ${chunk.length}`,
      );
    }
    for (let i = 0; i < chunk.length; i++) {
      const vector = vectors[i]!;
      if (dim === -1) {
        dim = vector.length;
      }
      if (vector.length !== dim) {
        throw new ExportError(
          `embedding dimension drifted from ${dim} to ${vector.length} at "${chunk[i]}"`,
        );
      }
      records.push({ id: chunk[i]!, vector: Float32Array.from(vector) });
    }
  }

  const payload =
    job.format === "binary"
      ? formatBinary(records, dim)
      : Buffer.from(
          formatText(records, `model=${job.model} revision=${backend.revision} dim=${dim}`),
          "utf-8",
        );
  // write-then-rename: the output path never holds a partial file
  const tmp = `${job.out}.tmp-${process.pid}`;
  writeFileSync(tmp, payload);
  renameSync(tmp, job.out);
  return { count: records.length, dim, duplicates, revision: backend.revision };
}
