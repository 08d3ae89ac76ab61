import { describe, expect, it } from "vitest";

import {
  FormatError,
  formatBinary,
  formatText,
  parseVectors,
  type VectorRecord,
} from "../src/formats";

function sample(): VectorRecord[] {
  return [
    { id: "kind", vector: Float32Array.from([0.25, -1.5, 3.125]) },
    { id: "well-adjusted", vector: Float32Array.from([1e-7, 42.0, -0.0625]) },
    { id: "café", vector: Float32Array.from([0.1, 0.2, 0.3]) },
  ];
}

describe("binary format", () => {
  it("round-trips ids and values bit-exactly", () => {
    const records = sample();
    const parsed = parseVectors(formatBinary(records, 3));
    expect(parsed.dim).toBe(3);
    expect(parsed.records.map((r) => r.id)).toEqual(records.map((r) => r.id));
    for (let i = 0; i < records.length; i++) {
      expect(Array.from(parsed.records[i]!.vector)).toEqual(
        Array.from(records[i]!.vector),
      );
    }
  });

  it("lays out the declared header", () => {
    const buf = formatBinary(sample(), 3);
    expect(buf.subarray(0, 4).toString("ascii")).toBe("EMBV");
    expect(buf.readUInt8(4)).toBe(1);
    expect(buf.readUInt32LE(5)).toBe(3); // count
    expect(buf.readUInt32LE(9)).toBe(3); // dim
    // first record: idlen 4 ("kind"), then 3 float32s
    expect(buf.readUInt16LE(13)).toBe(4);
    expect(buf.subarray(15, 19).toString("utf-8")).toBe("kind");
    expect(buf.readFloatLE(19)).toBe(0.25);
  });

  it("handles multi-byte ids and long ids", () => {
    const long = "x".repeat(300);
    const records: VectorRecord[] = [
      { id: "naïve", vector: Float32Array.from([1]) },
      { id: long, vector: Float32Array.from([2]) },
    ];
    const parsed = parseVectors(formatBinary(records, 1));
    expect(parsed.records.map((r) => r.id)).toEqual(["naïve", long]);
  });

  it("rejects trailing bytes", () => {
    const buf = Buffer.concat([formatBinary(sample(), 3), Buffer.from([0])]);
    expect(() => parseVectors(buf)).toThrow(FormatError);
  });
});

describe("text format", () => {
  it("round-trips float32 values exactly through decimal strings", () => {
    const records = sample();
    const parsed = parseVectors(Buffer.from(formatText(records), "utf-8"));
    expect(parsed.dim).toBe(3);
    for (let i = 0; i < records.length; i++) {
      expect(Array.from(parsed.records[i]!.vector)).toEqual(
        Array.from(records[i]!.vector),
      );
    }
  });

  it("writes an optional header comment that parsers skip", () => {
    const text = formatText(sample(), "model=hash:3 revision=r1 dim=3");
    expect(text.startsWith("# model=hash:3 revision=r1 dim=3\n")).toBe(true);
    expect(parseVectors(Buffer.from(text, "utf-8")).records).toHaveLength(3);
  });

  it("rejects a record without a tab", () => {
    expect(() => parseVectors(Buffer.from("kind 1 2 3\n", "utf-8"))).toThrow(
      /missing tab/,
    );
  });

  it("rejects duplicate ids", () => {
    const text = "kind\t1 2\nkind\t3 4\n";
    expect(() => parseVectors(Buffer.from(text, "utf-8"))).toThrow(/duplicate/);
  });

  it("rejects mixed dimensions", () => {
    const text = "a\t1 2\nb\t1 2 3\n";
    expect(() => parseVectors(Buffer.from(text, "utf-8"))).toThrow(/dim/);
  });

  it("rejects an empty file", () => {
    expect(() => parseVectors(Buffer.from("# only a comment\n", "utf-8"))).toThrow(
      /no vector records/,
    );
  });
});
