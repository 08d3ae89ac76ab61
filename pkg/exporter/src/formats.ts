/**
 * Vector-file formats shared with the consumer package:
 *
 * - text: one record per line, `id<TAB>c1 c2 ... cD`; `#` lines are comments.
 * - binary: magic "EMBV" + version byte 0x01, little-endian u32 count and
 *   dim, then per record a u16 id byte-length, the UTF-8 id, and dim float32s.
 *
 * Values are 32-bit floats in both formats; text serialization prints the
 * exact double value of each float32, so text and binary round-trip to
 * identical numbers.
 */

const MAGIC = Buffer.from("EMBV", "ascii");
const VERSION = 1;

export class FormatError extends Error {}

export interface VectorRecord {
  id: string;
  vector: Float32Array;
}

export interface VectorFile {
  records: VectorRecord[];
  dim: number;
}

export function formatText(records: VectorRecord[], header?: string): string {
  const lines: string[] = [];
  if (header) {
    lines.push(`# ${header}`);
  }
  for (const { id, vector } of records) {
    lines.push(`${id}\t${Array.from(vector).join(" ")}`);
  }
  return lines.join("\n") + "\n";
}

export function formatBinary(records: VectorRecord[], dim: number): Buffer {
  const head = Buffer.alloc(13);
  MAGIC.copy(head, 0);
  head.writeUInt8(VERSION, 4);
  head.writeUInt32LE(records.length, 5);
  head.writeUInt32LE(dim, 9);
  const parts = [head];
  for (const { id, vector } of records) {
    const idBytes = Buffer.from(id, "utf-8");
    if (idBytes.length > 0xffff) {
      throw new FormatError(`id too long for the binary format: ${id.slice(0, 40)}…`);
    }
    const rec = Buffer.alloc(2 + idBytes.length + 4 * dim);
    rec.writeUInt16LE(idBytes.length, 0);
    idBytes.copy(rec, 2);
    for (let i = 0; i < dim; i++) {
      rec.writeFloatLE(vector[i]!, 2 + idBytes.length + 4 * i);
    }
    parts.push(rec);
  }
  return Buffer.concat(parts);
}

/** Parse either format, auto-detected from the magic bytes. */
export function parseVectors(data: Buffer): VectorFile {
  if (data.length >= 5 && data.subarray(0, 4).equals(MAGIC)) {
    return parseBinary(data);
  }
  return parseText(data.toString("utf-8"));
}

function finishRecords(records: VectorRecord[]): VectorFile {
  if (records.length === 0) {
    throw new FormatError("no vector records");
  }
  const dim = records[0]!.vector.length;
  const seen = new Set<string>();
  for (const { id, vector } of records) {
    if (vector.length !== dim) {
      throw new FormatError(`record ${id} has dim ${vector.length}, expected ${dim}`);
    }
    if (seen.has(id)) {
      throw new FormatError(`duplicate id ${id}`);
    }
    seen.add(id);
    for (const value of vector) {
      if (!Number.isFinite(value)) {
        throw new FormatError(`non-finite value in record ${id}`);
      }
    }
  }
  return { records, dim };
}

function parseText(text: string): VectorFile {
  const records: VectorRecord[] = [];
  const lines = text.split("\n");
  for (let lineno = 1; lineno <= lines.length; lineno++) {
    const line = lines[lineno - 1]!;
    if (!line.trim() || line.startsWith("#")) {
      continue;
    }
    const tab = line.indexOf("\t");
    if (tab < 0) {
      throw new FormatError(`line ${lineno}: missing tab separator`);
    }
    const coords = line
      .slice(tab + 1)
      .split(/\s+/)
      .filter((tok) => tok.length > 0)
      .map((tok) => {
        const value = Number(tok);
        if (Number.isNaN(value) && tok !== "nan") {
          throw new FormatError(`line ${lineno}: bad coordinate ${tok}`);
        }
        return value;
      });
    if (coords.length === 0) {
      throw new FormatError(`line ${lineno}: record has no coordinates`);
    }
    records.push({ id: line.slice(0, tab), vector: Float32Array.from(coords) });
  }
  return finishRecords(records);
}

function parseBinary(data: Buffer): VectorFile {
  if (data.readUInt8(4) !== VERSION) {
    throw new FormatError(`unsupported binary version ${data.readUInt8(4)}`);
  }
  const count = data.readUInt32LE(5);
  const dim = data.readUInt32LE(9);
  let off = 13;
  const records: VectorRecord[] = [];
  for (let r = 0; r < count; r++) {
    if (off + 2 > data.length) {
      throw new FormatError(`truncated record ${r}`);
    }
    const idLen = data.readUInt16LE(off);
    off += 2;
    if (off + idLen + 4 * dim > data.length) {
      throw new FormatError(`truncated record ${r}`);
    }
    const id = data.subarray(off, off + idLen).toString("utf-8");
    off += idLen;
    const vector = new Float32Array(dim);
    for (let i = 0; i < dim; i++) {
      vector[i] = data.readFloatLE(off + 4 * i);
    }
    off += 4 * dim;
    records.push({ id, vector });
  }
  if (off !== data.length) {
    throw new FormatError(`${data.length - off} trailing bytes`);
  }
  return finishRecords(records);
}
