/**
 * The consumer lowercases and NFC-normalizes every id at load time; producing
 * ids in that form up front keeps "one record per unique input line" aligned
 * with what the consumer will actually see.
 */
export function normalizeKey(text: string): string {
  return text.trim().toLowerCase().normalize("NFC");
}
