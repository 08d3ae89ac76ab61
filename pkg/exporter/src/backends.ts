/**
 * Embedding backends.
 *
 * The default is a published sentence-embedding transformer (768-dim, loaded
 * through `@xenova/transformers` at runtime).  A deterministic sha256-based
 * backend (`hash:<dim>`) exists for offline use and for exercising the export
 * pipeline in tests without downloading model weights; its vectors carry no
 * meaning beyond being stable, well-distributed and exactly reproducible.
 */

import { createHash } from "node:crypto";

export const DEFAULT_MODEL = "dwulff/mpnet-personality";

export class BackendError extends Error {}

export interface EmbedBackend {
  /** Recorded in the output header for provenance. */
  readonly revision: string;
  embed(texts: string[]): Promise<number[][]>;
}

export class HashBackend implements EmbedBackend {
  readonly revision = "deterministic-sha256-v1";

  constructor(readonly dim: number) {
    if (!Number.isInteger(dim) || dim < 1 || dim > 0xffff) {
      throw new BackendError(`hash backend dimension out of range: ${dim}`);
    }
  }

  async embed(texts: string[]): Promise<number[][]> {
    return texts.map((text) => this.one(text));
  }

  private one(text: string): number[] {
    // counter-mode expansion of sha256(text || 0x00 || counter) into
    // float32 values in [-1, 1)
    const out = new Array<number>(this.dim);
    let block = Buffer.alloc(0);
    let counter = 0;
    let used = 0;
    for (let i = 0; i < this.dim; i++) {
      if (used + 4 > block.length) {
        block = createHash("sha256")
          .update(text, "utf-8")
          .update(Buffer.from([0]))
          .update(String(counter++))
          .digest();
        used = 0;
      }
      out[i] = Math.fround((block.readUInt32LE(used) / 2 ** 32) * 2 - 1);
      used += 4;
    }
    return out;
  }
}

type FeaturePipeline = (
  text: string,
  options: { pooling: "mean"; normalize: boolean },
) => Promise<{ data: Float32Array | number[] }>;

export class TransformerBackend implements EmbedBackend {
  private pipePromise: Promise<FeaturePipeline> | null = null;

  constructor(readonly model: string) {}

  // The published model's revision is unpinned; record that honestly rather
  // than inventing one.
  readonly revision = "main (unpinned)";

  private load(): Promise<FeaturePipeline> {
    if (this.pipePromise === null) {
      this.pipePromise = (async () => {
        let pipeline: (typeof import("@xenova/transformers"))["pipeline"];
        try {
          ({ pipeline } = await import("@xenova/transformers"));
        } catch {
          throw new BackendError(
            "transformer models need the optional dependency @xenova/transformers " +
              "(npm install @xenova/transformers); for an offline deterministic " +
              "export use --model hash:<dim>",
          );
        }
        return (await pipeline("feature-extraction", this.model)) as FeaturePipeline;
      })();
    }
    return this.pipePromise;
  }

  async embed(texts: string[]): Promise<number[][]> {
    const pipe = await this.load();
    const out: number[][] = [];
    for (const text of texts) {
      // raw vectors: any normalization policy belongs to the consumer
      const result = await pipe(text, { pooling: "mean", normalize: false });
      out.push(Array.from(result.data));
    }
    return out;
  }
}

export function makeBackend(model: string): EmbedBackend {
  const hashSpec = /^hash(?::(\d+))?$/.exec(model);
  if (hashSpec) {
    return new HashBackend(hashSpec[1] === undefined ? 768 : Number(hashSpec[1]));
  }
  return new TransformerBackend(model);
}
