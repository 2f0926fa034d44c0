/* tslint:disable */
/* eslint-disable */

export class JsaView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * |Φ(ω_a, ω_b)|², row-major with rows along ω_a.
     */
    intensity(): Float64Array;
    /**
     * Leading Schmidt weights (at most 16).
     */
    weights(): Float64Array;
    readonly kappa: number;
    readonly omega_max: number;
    readonly omega_min: number;
}

/**
 * Pump and phase-matching settings shared by every view; the grid spans
 * ω_p/2 ± half_span on both channels.
 */
export class Source {
    free(): void;
    [Symbol.dispose](): void;
    constructor(omega_p: number, sigma_p: number, t_a: number, t_b: number, half_span: number, n: number);
    half_span: number;
    n: number;
    omega_p: number;
    sigma_p: number;
    t_a: number;
    t_b: number;
}

/**
 * One cycling panel (I_TPR, R_TPR, I_RP or R_RP) of the built-in
 * three-manifold system on the source grid, row-major along ω_a.
 */
export function cycling_panel(src: Source, target: string, paper_verbatim: boolean): Float64Array;

/**
 * Matter-free coincidence of Φ_θ behind a balanced splitter at
 * `samples` delays in [−t_max, t_max] fs.
 */
export function hom_dip_curve(src: Source, theta: number, t_max: number, samples: number): Float64Array;

/**
 * JSA intensity and Schmidt analysis; `symmetrized` false gives the bare φ.
 */
export function jsa_view(src: Source, theta: number, symmetrized: boolean): JsaView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_source_half_span: (a: number) => number;
    readonly __wbg_get_source_n: (a: number) => number;
    readonly __wbg_get_source_omega_p: (a: number) => number;
    readonly __wbg_get_source_sigma_p: (a: number) => number;
    readonly __wbg_get_source_t_a: (a: number) => number;
    readonly __wbg_get_source_t_b: (a: number) => number;
    readonly __wbg_jsaview_free: (a: number, b: number) => void;
    readonly __wbg_set_source_half_span: (a: number, b: number) => void;
    readonly __wbg_set_source_n: (a: number, b: number) => void;
    readonly __wbg_set_source_omega_p: (a: number, b: number) => void;
    readonly __wbg_set_source_sigma_p: (a: number, b: number) => void;
    readonly __wbg_set_source_t_a: (a: number, b: number) => void;
    readonly __wbg_set_source_t_b: (a: number, b: number) => void;
    readonly __wbg_source_free: (a: number, b: number) => void;
    readonly cycling_panel: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly hom_dip_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly jsa_view: (a: number, b: number, c: number) => [number, number, number];
    readonly jsaview_intensity: (a: number) => [number, number];
    readonly jsaview_kappa: (a: number) => number;
    readonly jsaview_omega_max: (a: number) => number;
    readonly jsaview_omega_min: (a: number) => number;
    readonly jsaview_weights: (a: number) => [number, number];
    readonly source_new: (a: number, b: number, c: number, d: number, e: number, f: number) => number;
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
