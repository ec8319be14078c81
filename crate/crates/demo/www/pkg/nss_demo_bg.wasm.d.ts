/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curve_free: (a: number, b: number) => void;
export const __wbg_cvscores_free: (a: number, b: number) => void;
export const __wbg_decisionmap_free: (a: number, b: number) => void;
export const consistency_curve: (a: number, b: number, c: bigint) => [number, number, number];
export const curve_median_bounds: (a: number) => [number, number];
export const curve_median_gaps: (a: number) => [number, number];
export const curve_sizes: (a: number) => [number, number];
export const cv_scores: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const cvscores_accuracies: (a: number) => [number, number];
export const cvscores_chosen: (a: number) => number;
export const cvscores_dims: (a: number) => [number, number];
export const decision_map: (a: number, b: number, c: number, d: bigint, e: number) => [number, number, number];
export const decisionmap_extent: (a: number) => number;
export const decisionmap_grid: (a: number) => [number, number];
export const decisionmap_labels: (a: number) => [number, number];
export const decisionmap_lines: (a: number) => [number, number];
export const decisionmap_points: (a: number) => [number, number];
export const decisionmap_resolution: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
