/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_source_half_span: (a: number) => number;
export const __wbg_get_source_n: (a: number) => number;
export const __wbg_get_source_omega_p: (a: number) => number;
export const __wbg_get_source_sigma_p: (a: number) => number;
export const __wbg_get_source_t_a: (a: number) => number;
export const __wbg_get_source_t_b: (a: number) => number;
export const __wbg_jsaview_free: (a: number, b: number) => void;
export const __wbg_set_source_half_span: (a: number, b: number) => void;
export const __wbg_set_source_n: (a: number, b: number) => void;
export const __wbg_set_source_omega_p: (a: number, b: number) => void;
export const __wbg_set_source_sigma_p: (a: number, b: number) => void;
export const __wbg_set_source_t_a: (a: number, b: number) => void;
export const __wbg_set_source_t_b: (a: number, b: number) => void;
export const __wbg_source_free: (a: number, b: number) => void;
export const cycling_panel: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const hom_dip_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const jsa_view: (a: number, b: number, c: number) => [number, number, number];
export const jsaview_intensity: (a: number) => [number, number];
export const jsaview_kappa: (a: number) => number;
export const jsaview_omega_max: (a: number) => number;
export const jsaview_omega_min: (a: number) => number;
export const jsaview_weights: (a: number) => [number, number];
export const source_new: (a: number, b: number, c: number, d: number, e: number, f: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
