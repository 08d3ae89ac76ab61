// Minimal ambient typing for the optional transformer runtime; installed
// separately by users who export from real models.
declare module "@xenova/transformers" {
  export function pipeline(
    task: string,
    model?: string,
    options?: object,
  ): Promise<unknown>;
}
