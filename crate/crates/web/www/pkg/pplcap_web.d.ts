/* tslint:disable */
/* eslint-disable */

/**
 * Analytic lower bound on gamma together with the normalized integrand.
 */
export function analytic_bound(domain: string, continuous: boolean, n: number, alpha: number, points: number): string;

/**
 * Density of the peak statistic (|x| for real, |x|^2 for complex) over its
 * bulk, from the lower 1e-9 to the upper 1e-9 quantile. `alpha` is ignored
 * for discrete peaks.
 */
export function maxima_density(domain: string, continuous: boolean, n: number, alpha: number, points: number): string;

/**
 * Monte Carlo estimate of gamma with its convergence trace.
 */
export function monte_carlo(domain: string, n: number, oversample: number, n_sim: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analytic_bound: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly maxima_density: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly monte_carlo: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
