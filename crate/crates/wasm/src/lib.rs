//! Browser bindings: JSA and Schmidt number for an exchange phase, the
//! matter-free HOM dip, and one cycling panel of the built-in system.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use biphoton::diagrams::HomRotation;
use biphoton::exciton::SystemSpec;
use biphoton::photon_state::{
    build_jsa, normalize, schmidt_number, schmidt_weights, symmetrize, FrequencyGrid, Jsa, PhaseMatchParams, PumpParams,
};
use biphoton::signals::{hom_dip, run_cycling, Component, CyclingProtocol, ProtocolSet, SignalSource};
use wasm_bindgen::prelude::*;

fn js(e: biphoton::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Pump and phase-matching settings shared by every view; the grid spans
/// ω_p/2 ± half_span on both channels.
#[wasm_bindgen]
#[derive(Clone, Copy, Debug)]
pub struct Source {
    pub omega_p: f64,
    pub sigma_p: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub half_span: f64,
    pub n: usize,
}

#[wasm_bindgen]
impl Source {
    #[wasm_bindgen(constructor)]
    pub fn new(omega_p: f64, sigma_p: f64, t_a: f64, t_b: f64, half_span: f64, n: usize) -> Source {
        Source { omega_p, sigma_p, t_a, t_b, half_span, n }
    }
}

impl Source {
    fn grid(&self) -> Result<FrequencyGrid, JsError> {
        let c = self.omega_p / 2.0;
        FrequencyGrid::new(c - self.half_span, c + self.half_span, self.n).map_err(js)
    }

    fn phi(&self) -> Result<Jsa, JsError> {
        let g = self.grid()?;
        let pump = PumpParams::new(self.omega_p, self.sigma_p).map_err(js)?;
        let c = self.omega_p / 2.0;
        let pm = PhaseMatchParams::new(c, c, self.t_a, self.t_b).map_err(js)?;
        normalize(&build_jsa(g, g, &pump, &pm)).map_err(js)
    }

    fn state(&self, theta: Option<f64>) -> Result<Jsa, JsError> {
        let phi = self.phi()?;
        match theta {
            Some(t) => normalize(&symmetrize(&phi, t).map_err(js)?).map_err(js),
            None => Ok(phi),
        }
    }
}

#[wasm_bindgen]
pub struct JsaView {
    intensity: Vec<f64>,
    weights: Vec<f64>,
    kappa: f64,
    omega_min: f64,
    omega_max: f64,
}

#[wasm_bindgen]
impl JsaView {
    /// |Φ(ω_a, ω_b)|², row-major with rows along ω_a.
    pub fn intensity(&self) -> Vec<f64> {
        self.intensity.clone()
    }

    /// Leading Schmidt weights (at most 16).
    pub fn weights(&self) -> Vec<f64> {
        self.weights.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    #[wasm_bindgen(getter)]
    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    #[wasm_bindgen(getter)]
    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }
}

/// JSA intensity and Schmidt analysis; `symmetrized` false gives the bare φ.
#[wasm_bindgen]
pub fn jsa_view(src: &Source, theta: f64, symmetrized: bool) -> Result<JsaView, JsError> {
    let s = src.state(symmetrized.then_some(theta))?;
    let w = schmidt_weights(&s).map_err(js)?;
    let n = s.grid_a.n_points;
    let intensity = (0..n * n).map(|k| s.amplitude[(k / n, k % n)].norm_sqr()).collect();
    Ok(JsaView {
        intensity,
        kappa: schmidt_number(&w),
        weights: w.into_iter().take(16).collect(),
        omega_min: s.grid_a.omega_min,
        omega_max: s.grid_a.omega_max,
    })
}

/// Matter-free coincidence of Φ_θ behind a balanced splitter at
/// `samples` delays in [−t_max, t_max] fs.
#[wasm_bindgen]
pub fn hom_dip_curve(src: &Source, theta: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    if samples < 2 || !(t_max > 0.0) {
        return Err(JsError::new("need at least 2 samples and t_max > 0"));
    }
    let s = src.state(Some(theta))?;
    (0..samples)
        .map(|k| {
            let t = -t_max + 2.0 * t_max * k as f64 / (samples - 1) as f64;
            hom_dip(&s, &HomRotation::balanced(t)).map_err(js)
        })
        .collect()
}

/// One cycling panel (I_TPR, R_TPR, I_RP or R_RP) of the built-in
/// three-manifold system on the source grid, row-major along ω_a.
#[wasm_bindgen]
pub fn cycling_panel(src: &Source, target: &str, paper_verbatim: bool) -> Result<Vec<f64>, JsError> {
    let sys = SystemSpec::default_system().build().map_err(js)?;
    let phi = src.phi()?;
    let g = src.grid()?;
    let set = if paper_verbatim { ProtocolSet::PaperVerbatim } else { ProtocolSet::Default };
    let protocol = CyclingProtocol::builtin(Component::parse(target).map_err(js)?, set);
    let mut source = SignalSource::new(&sys, &phi, SignalSource::grid_points(&g, &g));
    run_cycling(&protocol, &mut source).map_err(js)
}
