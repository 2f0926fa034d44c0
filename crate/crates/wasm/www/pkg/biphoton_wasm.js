/* @ts-self-types="./biphoton_wasm.d.ts" */

export class JsaView {
    static __wrap(ptr) {
        const obj = Object.create(JsaView.prototype);
        obj.__wbg_ptr = ptr;
        JsaViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        JsaViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_jsaview_free(ptr, 0);
    }
    /**
     * |Φ(ω_a, ω_b)|², row-major with rows along ω_a.
     * @returns {Float64Array}
     */
    intensity() {
        const ret = wasm.jsaview_intensity(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get kappa() {
        const ret = wasm.jsaview_kappa(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get omega_max() {
        const ret = wasm.jsaview_omega_max(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get omega_min() {
        const ret = wasm.jsaview_omega_min(this.__wbg_ptr);
        return ret;
    }
    /**
     * Leading Schmidt weights (at most 16).
     * @returns {Float64Array}
     */
    weights() {
        const ret = wasm.jsaview_weights(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) JsaView.prototype[Symbol.dispose] = JsaView.prototype.free;

/**
 * Pump and phase-matching settings shared by every view; the grid spans
 * ω_p/2 ± half_span on both channels.
 */
export class Source {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SourceFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_source_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get half_span() {
        const ret = wasm.__wbg_get_source_half_span(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get n() {
        const ret = wasm.__wbg_get_source_n(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get omega_p() {
        const ret = wasm.__wbg_get_source_omega_p(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get sigma_p() {
        const ret = wasm.__wbg_get_source_sigma_p(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get t_a() {
        const ret = wasm.__wbg_get_source_t_a(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get t_b() {
        const ret = wasm.__wbg_get_source_t_b(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set half_span(arg0) {
        wasm.__wbg_set_source_half_span(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set n(arg0) {
        wasm.__wbg_set_source_n(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set omega_p(arg0) {
        wasm.__wbg_set_source_omega_p(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set sigma_p(arg0) {
        wasm.__wbg_set_source_sigma_p(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set t_a(arg0) {
        wasm.__wbg_set_source_t_a(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set t_b(arg0) {
        wasm.__wbg_set_source_t_b(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} omega_p
     * @param {number} sigma_p
     * @param {number} t_a
     * @param {number} t_b
     * @param {number} half_span
     * @param {number} n
     */
    constructor(omega_p, sigma_p, t_a, t_b, half_span, n) {
        const ret = wasm.source_new(omega_p, sigma_p, t_a, t_b, half_span, n);
        this.__wbg_ptr = ret;
        SourceFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
}
if (Symbol.dispose) Source.prototype[Symbol.dispose] = Source.prototype.free;

/**
 * One cycling panel (I_TPR, R_TPR, I_RP or R_RP) of the built-in
 * three-manifold system on the source grid, row-major along ω_a.
 * @param {Source} src
 * @param {string} target
 * @param {boolean} paper_verbatim
 * @returns {Float64Array}
 */
export function cycling_panel(src, target, paper_verbatim) {
    _assertClass(src, Source);
    const ptr0 = passStringToWasm0(target, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.cycling_panel(src.__wbg_ptr, ptr0, len0, paper_verbatim);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v2 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v2;
}

/**
 * Matter-free coincidence of Φ_θ behind a balanced splitter at
 * `samples` delays in [−t_max, t_max] fs.
 * @param {Source} src
 * @param {number} theta
 * @param {number} t_max
 * @param {number} samples
 * @returns {Float64Array}
 */
export function hom_dip_curve(src, theta, t_max, samples) {
    _assertClass(src, Source);
    const ret = wasm.hom_dip_curve(src.__wbg_ptr, theta, t_max, samples);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}

/**
 * JSA intensity and Schmidt analysis; `symmetrized` false gives the bare φ.
 * @param {Source} src
 * @param {number} theta
 * @param {boolean} symmetrized
 * @returns {JsaView}
 */
export function jsa_view(src, theta, symmetrized) {
    _assertClass(src, Source);
    const ret = wasm.jsa_view(src.__wbg_ptr, theta, symmetrized);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return JsaView.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./biphoton_wasm_bg.js": import0,
    };
}

const JsaViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_jsaview_free(ptr, 1));
const SourceFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_source_free(ptr, 1));

function _assertClass(instance, klass) {
    if (!(instance instanceof klass)) {
        throw new Error(`expected instance of ${klass.name}`);
    }
}

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passStringToWasm0(arg, malloc, realloc) {
    if (realloc === undefined) {
        const buf = cachedTextEncoder.encode(arg);
        const ptr = malloc(buf.length, 1) >>> 0;
        getUint8ArrayMemory0().subarray(ptr, ptr + buf.length).set(buf);
        WASM_VECTOR_LEN = buf.length;
        return ptr;
    }

    let len = arg.length;
    let ptr = malloc(len, 1) >>> 0;

    const mem = getUint8ArrayMemory0();

    let offset = 0;

    for (; offset < len; offset++) {
        const code = arg.charCodeAt(offset);
        if (code > 0x7F) break;
        mem[ptr + offset] = code;
    }
    if (offset !== len) {
        if (offset !== 0) {
            arg = arg.slice(offset);
        }
        ptr = realloc(ptr, len, len = offset + arg.length * 3, 1) >>> 0;
        const view = getUint8ArrayMemory0().subarray(ptr + offset, ptr + len);
        const ret = cachedTextEncoder.encodeInto(arg, view);

        offset += ret.written;
        ptr = realloc(ptr, len, offset, 1) >>> 0;
    }

    WASM_VECTOR_LEN = offset;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

const cachedTextEncoder = new TextEncoder();

if (!('encodeInto' in cachedTextEncoder)) {
    cachedTextEncoder.encodeInto = function (arg, view) {
        const buf = cachedTextEncoder.encode(arg);
        view.set(buf);
        return {
            read: arg.length,
            written: buf.length
        };
    };
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('biphoton_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
