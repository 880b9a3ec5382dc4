/* tslint:disable */
/* eslint-disable */

/**
 * `|μ̂(n)|` for `n = 1..=window` of a compressed self-similar measure.
 */
export function coefficient_moduli(base: number, digits: Uint32Array, probabilities: Float64Array, scale: number, window: number): Float64Array;

/**
 * `|⟨P_n x₂; y₁⟩|` for `n = 1..=horizon`, sparse set `{base^k}`.
 */
export function foguel_values(base: bigint, x2: string, y1: string, horizon: bigint): Float64Array;

/**
 * Wiener means `(2n+1)^{-1} Σ_{|ℓ|≤n} |μ̂(ℓ)|` for `n = 1..=window`.
 */
export function wiener_means(base: number, digits: Uint32Array, probabilities: Float64Array, scale: number, window: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly coefficient_moduli: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly foguel_values: (a: bigint, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number, number];
    readonly wiener_means: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
