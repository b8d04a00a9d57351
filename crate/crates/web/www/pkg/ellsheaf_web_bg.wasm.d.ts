/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const cohomology: (a: number, b: number, c: number, d: number) => [number, number];
export const cusp_matrix: (a: bigint, b: bigint, c: number, d: number, e: number, f: number) => [number, number];
export const stable_seq: (a: bigint, b: bigint) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
