/* tslint:disable */
/* eslint-disable */

/**
 * Median risk gap and density bound per training size.
 */
export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    median_bounds(): Float64Array;
    median_gaps(): Float64Array;
    sizes(): Uint32Array;
}

/**
 * Cross-validated accuracy of each candidate subspace dimension.
 */
export class CvScores {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    accuracies(): Float64Array;
    chosen(): number;
    dims(): Uint32Array;
}

/**
 * Samples, fitted lines and the NSS label of every grid cell.
 */
export class DecisionMap {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Half-width of the square shown.
     */
    extent(): number;
    /**
     * Row-major class labels, row 0 at the top (`y = extent`).
     */
    grid(): Uint8Array;
    labels(): Uint32Array;
    /**
     * Per class: mean `x, y` then direction `x, y`.
     */
    lines(): Float64Array;
    /**
     * Interleaved `x, y` of every sample.
     */
    points(): Float64Array;
    resolution(): number;
}

/**
 * A small consistency study: three planes in R¹⁰ with orthogonal noise of
 * precision `alpha`.
 */
export function consistency_curve(alpha: number, trials: number, seed: bigint): Curve;

/**
 * `generator` is `subspace-paper`, `gaussian-paper` or `exp-subspace`.
 */
export function cv_scores(generator: string, samples: number, folds: number, seed: bigint): CvScores;

/**
 * Three noisy segments through nearby offsets, `spread_deg` degrees apart,
 * classified by NSS with one-dimensional subspaces.
 */
export function decision_map(spread_deg: number, sigma: number, per_class: number, seed: bigint, resolution: number): DecisionMap;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly __wbg_cvscores_free: (a: number, b: number) => void;
    readonly __wbg_decisionmap_free: (a: number, b: number) => void;
    readonly consistency_curve: (a: number, b: number, c: bigint) => [number, number, number];
    readonly curve_median_bounds: (a: number) => [number, number];
    readonly curve_median_gaps: (a: number) => [number, number];
    readonly curve_sizes: (a: number) => [number, number];
    readonly cv_scores: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly cvscores_accuracies: (a: number) => [number, number];
    readonly cvscores_chosen: (a: number) => number;
    readonly cvscores_dims: (a: number) => [number, number];
    readonly decision_map: (a: number, b: number, c: number, d: bigint, e: number) => [number, number, number];
    readonly decisionmap_extent: (a: number) => number;
    readonly decisionmap_grid: (a: number) => [number, number];
    readonly decisionmap_labels: (a: number) => [number, number];
    readonly decisionmap_lines: (a: number) => [number, number];
    readonly decisionmap_points: (a: number) => [number, number];
    readonly decisionmap_resolution: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
