//! Brute-force time-domain fourth-order perturbation theory for tiny systems.
//!
//! For every monochromatic input pair (ν₁, ν₂) on the residual quadrature,
//! the Dyson hierarchy of the joint field–matter ket is integrated in the
//! interaction picture with the trapezoidal rule. States are labelled by
//! matter level, the set of field events already applied and whether the
//! history went through the f manifold. The late-time rate of the final
//! (g1, two photons emitted) amplitude is the pathway value; its parents
//! split it into D1, D2 and D3. Coupling follows the same channel order as
//! the fast path (channel a is absorbed first).

use std::collections::HashMap;

use crate::diagrams::{HomRotation, ResidualQuadrature};
use crate::exciton::{ExcitonSystem, Manifold};
use crate::photon_state::Jsa;
use crate::{par, Error, Result, C64, HBAR};

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub const MAX_LEVELS: usize = 6;
pub const MAX_JSA: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn step(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    /// Checks step ≤ ħ/(10·scale) and t_max ≥ 3ħ/min(γ).
    pub fn validate(&self, system: &ExcitonSystem, scale: f64) -> Result<()> {
        if self.n_steps == 0 || !(self.t_max > 0.0) {
            return Err(Error::InvalidParameter("time grid needs t_max > 0 and n_steps > 0".into()));
        }
        if self.step() > HBAR / (10.0 * scale) {
            return Err(Error::Resolution(format!(
                "time step {:.3e} fs exceeds hbar/(10*{scale:.3e} eV)",
                self.step()
            )));
        }
        if self.t_max < 3.0 * HBAR / system.min_gamma() {
            return Err(Error::Resolution("t_max shorter than 3 hbar/min(gamma)".into()));
        }
        Ok(())
    }
}

/// Event bits.
const ABS_A: u8 = 1;
const ABS_B: u8 = 2;
const EMIT_A: u8 = 4;
const EMIT_B: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct State {
    level: usize,
    mask: u8,
    via_f: bool,
}

struct Link {
    parent: usize,
    coupling: C64,
    /// Detuning of the interaction-picture source, eV.
    detuning: f64,
}

struct Hierarchy {
    states: Vec<State>,
    links: Vec<Vec<Link>>,
    decay: Vec<f64>,
}

/// Field frequencies of the four slots.
#[derive(Clone, Copy, Debug)]
struct Fields {
    nu_a: f64,
    nu_b: f64,
    out_a: f64,
    out_b: f64,
}

impl Hierarchy {
    /// All histories of up to four events; channel b is only absorbed after
    /// channel a.
    fn build(system: &ExcitonSystem, f: Fields) -> Self {
        let mut index: HashMap<State, usize> = HashMap::new();
        let root = State { level: 0, mask: 0, via_f: false };
        let mut states = vec![root];
        let mut links: Vec<Vec<Link>> = vec![Vec::new()];
        index.insert(root, 0);
        let mut frontier = vec![0usize];
        for _order in 0..4 {
            let mut next = Vec::new();
            for &p in &frontier {
                let st = states[p];
                let lvl = system.levels()[st.level].manifold;
                for (bit, absorb, nu) in
                    [(ABS_A, true, f.nu_a), (ABS_B, true, f.nu_b), (EMIT_A, false, f.out_a), (EMIT_B, false, f.out_b)]
                {
                    if st.mask & bit != 0 || (bit == ABS_B && st.mask & ABS_A == 0) {
                        continue;
                    }
                    for k in 0..system.len() {
                        let km = system.levels()[k].manifold;
                        let (coupling, up) = if absorb {
                            (system.mu_abs(k, st.level), km.rank() == lvl.rank() + 1)
                        } else {
                            (system.mu(st.level, k), km.rank() + 1 == lvl.rank())
                        };
                        if !up || coupling == ZERO {
                            continue;
                        }
                        let gap = system.energy(k) - system.energy(st.level);
                        let detuning = if absorb { gap - nu } else { gap + nu };
                        let child = State { level: k, mask: st.mask | bit, via_f: st.via_f || km == Manifold::F };
                        let c = *index.entry(child).or_insert_with(|| {
                            states.push(child);
                            links.push(Vec::new());
                            next.push(states.len() - 1);
                            states.len() - 1
                        });
                        links[c].push(Link { parent: p, coupling, detuning });
                    }
                }
            }
            frontier = next;
        }
        let full = ABS_A | ABS_B | EMIT_A | EMIT_B;
        let decay = states
            .iter()
            .map(|s| if s.mask == 0 || (s.mask == full && s.level == 0) { 0.0 } else { system.gamma(s.level, 0) })
            .collect();
        Self { states, links, decay }
    }

    fn max_detuning(&self) -> f64 {
        self.links.iter().flatten().map(|l| l.detuning.abs()).fold(0.0, f64::max)
    }
}

/// Pre-HOM pathway values from the oracle at one detected assignment.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OracleAmplitudes {
    pub d1: C64,
    pub d2: C64,
    pub d3: C64,
    /// Rate of the full final amplitude, all histories together.
    pub total: C64,
}

impl std::ops::Add for OracleAmplitudes {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { d1: self.d1 + o.d1, d2: self.d2 + o.d2, d3: self.d3 + o.d3, total: self.total + o.total }
    }
}

impl std::ops::Mul<C64> for OracleAmplitudes {
    type Output = Self;
    fn mul(self, w: C64) -> Self {
        Self { d1: self.d1 * w, d2: self.d2 * w, d3: self.d3 * w, total: self.total * w }
    }
}

fn phase(detuning: f64, t: f64) -> C64 {
    C64::from_polar(1.0, detuning * t / HBAR)
}

/// Integrates the hierarchy for monochromatic inputs and returns the
/// late-time rate amplitudes ħ·dc_final/dt split by history class.
fn integrate(system: &ExcitonSystem, f: Fields, grid: &TimeGrid) -> OracleAmplitudes {
    let h = Hierarchy::build(system, f);
    let n = h.states.len();
    let dt = grid.step();
    let full = ABS_A | ABS_B | EMIT_A | EMIT_B;
    let mut c = vec![ZERO; n];
    c[0] = C64::new(1.0, 0.0);
    let source = |c: &[C64], k: usize, t: f64| -> C64 {
        h.links[k].iter().map(|l| l.coupling * phase(l.detuning, t) * c[l.parent]).sum::<C64>() * (-I / HBAR)
    };
    let mut prev_src: Vec<C64> = (0..n).map(|k| source(&c, k, 0.0)).collect();
    for step in 0..grid.n_steps {
        let t1 = (step + 1) as f64 * dt;
        for k in 1..n {
            if h.states[k].mask == full && h.states[k].level == 0 {
                continue;
            }
            let g = h.decay[k] / HBAR;
            // Parents precede children in `states`, so they are already at t1.
            let s1 = source(&c, k, t1);
            c[k] = (c[k] * (1.0 - 0.5 * dt * g) + (prev_src[k] + s1) * (0.5 * dt)) / (1.0 + 0.5 * dt * g);
            prev_src[k] = s1;
        }
    }
    let t_end = grid.n_steps as f64 * dt;
    let mut out = OracleAmplitudes::default();
    for k in 0..n {
        let st = h.states[k];
        if !(st.mask == full && st.level == 0) {
            continue;
        }
        for l in &h.links[k] {
            let rate = -I * l.coupling * phase(l.detuning, t_end) * c[l.parent];
            let pm = h.states[l.parent];
            out.total += rate;
            if pm.via_f {
                out.d1 += rate;
            } else if pm.mask & EMIT_A != 0 && pm.mask & ABS_B != 0 && first_emission_a(&h, l.parent) {
                out.d2 += rate;
            } else {
                out.d3 += rate;
            }
        }
    }
    out
}

/// Whether the Raman history ending in state `k` emitted channel a before
/// absorbing b (its g-manifold ancestor carries only ABS_A | EMIT_A).
fn first_emission_a(h: &Hierarchy, k: usize) -> bool {
    h.links[k].iter().any(|l| h.states[l.parent].mask == ABS_A | EMIT_A)
}

/// Oracle settings shared by every evaluation.
#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub quad: ResidualQuadrature,
    /// Multiples of ħ/min(γ) for the time window.
    pub window: f64,
    /// Steps per ħ/(max detuning).
    pub resolution: f64,
}

impl OracleConfig {
    pub fn new(jsa: &Jsa, system: &ExcitonSystem) -> Self {
        Self { quad: ResidualQuadrature::for_jsa(jsa, system), window: 12.0, resolution: 40.0 }
    }

    fn grid(&self, system: &ExcitonSystem, scale: f64) -> TimeGrid {
        let t_max = self.window * HBAR / system.min_gamma();
        let n_steps = (t_max * self.resolution * scale / HBAR).ceil().max(1.0) as usize;
        TimeGrid { t_max, n_steps }
    }
}

fn check_budget(system: &ExcitonSystem, jsa: &Jsa) -> Result<()> {
    if system.len() > MAX_LEVELS {
        return Err(Error::Size(format!("{} levels (limit {MAX_LEVELS})", system.len())));
    }
    if jsa.grid_a.n_points > MAX_JSA || jsa.grid_b.n_points > MAX_JSA {
        return Err(Error::Size(format!("JSA grid above {MAX_JSA}x{MAX_JSA}")));
    }
    Ok(())
}

/// Sum over the residual quadrature of the per-pair oracle, weighted by
/// the JSA, for detected photons ω_a (slot a) and ω_b (slot b).
pub fn fourth_order_amplitudes(
    system: &ExcitonSystem,
    jsa: &Jsa,
    wa: f64,
    wb: f64,
    cfg: &OracleConfig,
) -> Result<(OracleAmplitudes, TimeGrid)> {
    check_budget(system, jsa)?;
    let ws = wa + wb;
    let work: Vec<(f64, C64)> = cfg
        .quad
        .nodes
        .iter()
        .zip(&cfg.quad.weights)
        .map(|(&w1, &h)| (w1, jsa.interpolate(w1, ws - w1) * h))
        .filter(|(_, a)| *a != ZERO)
        .collect();
    let fields = |w1: f64| Fields { nu_a: w1, nu_b: ws - w1, out_a: wa, out_b: wb };
    let scale = work
        .iter()
        .map(|&(w1, _)| Hierarchy::build(system, fields(w1)).max_detuning())
        .fold(0.0, f64::max)
        .max(system.min_gamma());
    let grid = cfg.grid(system, scale);
    grid.validate(system, scale)?;
    let parts = par::map(&work, |&(w1, a)| integrate(system, fields(w1), &grid) * a);
    Ok((parts.into_iter().fold(OracleAmplitudes::default(), |x, y| x + y), grid))
}

/// Oracle coincidence signal and its pathway parts at (ω_a, ω_b) under `rot`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSignal {
    pub xi_tpr: C64,
    pub xi_rp: C64,
    pub signal: f64,
    pub grid: TimeGrid,
}

pub fn fourth_order_signal(
    system: &ExcitonSystem,
    jsa: &Jsa,
    wa: f64,
    wb: f64,
    rot: &HomRotation,
    cfg: &OracleConfig,
) -> Result<OracleSignal> {
    let (ab, grid) = fourth_order_amplitudes(system, jsa, wa, wb, cfg)?;
    let (ba, _) = fourth_order_amplitudes(system, jsa, wb, wa, cfg)?;
    let theta = C64::from_polar(1.0, jsa.exchange.phase());
    let (direct, crossed) = (rot.direct(wa, wb), rot.crossed(wa, wb));
    let xi_tpr = direct * ab.d1 + crossed * ba.d1;
    let xi_rp = direct * (ab.d2 + ab.d3) + crossed * theta * (ba.d2 + ba.d3);
    Ok(OracleSignal { xi_tpr, xi_rp, signal: (xi_tpr + xi_rp).im, grid })
}

/// Single-photon diagram S for detected ω_d at pair energy ω_s: the ket
/// history up to f is integrated forward, the final e′ interval backward in
/// time (advanced branch), and the steady coefficients are combined.
pub fn single_photon_amplitude(
    system: &ExcitonSystem,
    jsa: &Jsa,
    w_d: f64,
    ws: f64,
    cfg: &OracleConfig,
) -> Result<C64> {
    check_budget(system, jsa)?;
    let es = system.manifold(Manifold::E);
    let fs = system.manifold(Manifold::F);
    let w_u = ws - w_d;
    let t_max = cfg.window * HBAR / system.min_gamma();
    let mut scale: f64 = system.min_gamma();
    for &e in &es {
        scale = scale.max((system.omega(e) - w_u).abs());
        for &f in &fs {
            for &w1 in &cfg.quad.nodes {
                scale = scale
                    .max((system.omega(e) - w1).abs())
                    .max((system.energy(f) - system.energy(e) - (ws - w1)).abs());
            }
        }
    }
    let grid = cfg.grid(system, scale);
    grid.validate(system, scale)?;
    let dt = grid.step();
    let work: Vec<(f64, C64)> = cfg
        .quad
        .nodes
        .iter()
        .zip(&cfg.quad.weights)
        .map(|(&w1, &h)| (w1, jsa.interpolate(w1, ws - w1) * h))
        .filter(|(_, a)| *a != ZERO)
        .collect();
    // Forward ket: g → e (ν₁) → f (ν₂); steady coefficient of each f.
    let forward = par::map(&work, |&(w1, a)| {
        let nu2 = ws - w1;
        let mut ce = vec![ZERO; es.len()];
        let mut cf = vec![ZERO; fs.len()];
        let src_e = |k: usize, t: f64| -I / HBAR * system.mu_abs(es[k], 0) * phase(system.omega(es[k]) - w1, t);
        let src_f = |ce: &[C64], m: usize, t: f64| -> C64 {
            es.iter()
                .enumerate()
                .map(|(k, &e)| {
                    system.mu_abs(fs[m], e) * phase(system.energy(fs[m]) - system.energy(e) - nu2, t) * ce[k]
                })
                .sum::<C64>()
                * (-I / HBAR)
        };
        let mut pe: Vec<C64> = (0..es.len()).map(|k| src_e(k, 0.0)).collect();
        let mut pf: Vec<C64> = (0..fs.len()).map(|m| src_f(&ce, m, 0.0)).collect();
        for step in 0..grid.n_steps {
            let t1 = (step + 1) as f64 * dt;
            for k in 0..es.len() {
                let g = system.gamma(es[k], 0) / HBAR;
                let s1 = src_e(k, t1);
                ce[k] = (ce[k] * (1.0 - 0.5 * dt * g) + (pe[k] + s1) * (0.5 * dt)) / (1.0 + 0.5 * dt * g);
                pe[k] = s1;
            }
            for m in 0..fs.len() {
                let g = system.gamma(fs[m], 0) / HBAR;
                let s1 = src_f(&ce, m, t1);
                cf[m] = (cf[m] * (1.0 - 0.5 * dt * g) + (pf[m] + s1) * (0.5 * dt)) / (1.0 + 0.5 * dt * g);
                pf[m] = s1;
            }
        }
        let t_end = grid.n_steps as f64 * dt;
        (0..fs.len()).map(|m| a * cf[m] * phase(-(system.omega(fs[m]) - ws), t_end)).collect::<Vec<C64>>()
    });
    let mut amp_f = vec![ZERO; fs.len()];
    for v in forward {
        for (m, z) in v.into_iter().enumerate() {
            amp_f[m] += z;
        }
    }
    // Backward bra link for each e′: db/dt = (γ/ħ) b − (i/ħ) μ e^{i(ε−ν)t/ħ}, b(t_max) = 0.
    let backward: Vec<C64> = es
        .iter()
        .map(|&e| {
            let g = system.gamma(e, 0) / HBAR;
            let det = system.omega(e) - w_u;
            let src = |t: f64| -I / HBAR * system.mu(e, 0) * phase(det, t);
            let mut b = ZERO;
            let mut ps = src(t_max);
            let n_back = grid.n_steps;
            // March from t_max down to t_max - t_max (= 0); read at t = 0.
            for step in 0..n_back {
                let t0 = t_max - (step + 1) as f64 * dt;
                let s0 = src(t0);
                // Backward trapezoid: b(t-dt) = b(t) - dt/2 [f(t) + f(t-dt)], f = g b + s.
                b = (b * (1.0 - 0.5 * dt * g) - (ps + s0) * (0.5 * dt)) / (1.0 + 0.5 * dt * g);
                ps = s0;
            }
            b
        })
        .collect();
    let mut acc = ZERO;
    for (m, &f) in fs.iter().enumerate() {
        for (k, &e) in es.iter().enumerate() {
            acc += amp_f[m] * system.mu(f, e) * backward[k];
        }
    }
    Ok(-I * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{Detection, Diagram, Pathways};
    use crate::exciton::SystemSpec;
    use crate::photon_state::*;
    use crate::MEV;

    fn minimal() -> (ExcitonSystem, Jsa) {
        let sys = SystemSpec::minimal(2.0, 3.95, 20.0 * MEV).build().unwrap();
        let g = FrequencyGrid::new(1.85, 2.15, 8).unwrap();
        let pump = PumpParams::new(3.98, 0.15).unwrap();
        let pm = PhaseMatchParams::new(1.99, 2.0, 2.0, 8.0).unwrap();
        let jsa = symmetrize(&normalize(&build_jsa(g, g, &pump, &pm)).unwrap(), 0.6).unwrap();
        (sys, jsa)
    }

    fn coarse(jsa: &Jsa, sys: &ExcitonSystem) -> OracleConfig {
        OracleConfig {
            quad: ResidualQuadrature::uniform(jsa.grid_a.omega_min, jsa.grid_a.omega_max, 41),
            ..OracleConfig::new(jsa, sys)
        }
    }

    #[test]
    fn dark_system_gives_zero() {
        let (sys, jsa) = minimal();
        let dark = sys.with_dipoles_scaled(0.0);
        let cfg = coarse(&jsa, &dark);
        let (a, _) = fourth_order_amplitudes(&dark, &jsa, 2.0, 1.98, &cfg).unwrap();
        assert_eq!(a.total, ZERO);
    }

    #[test]
    fn budget_enforced() {
        let (sys, _) = minimal();
        let g = FrequencyGrid::new(1.85, 2.15, 20).unwrap();
        let pump = PumpParams::new(4.0, 0.15).unwrap();
        let pm = PhaseMatchParams::new(2.0, 2.0, 2.0, 8.0).unwrap();
        let big = normalize(&build_jsa(g, g, &pump, &pm)).unwrap();
        let cfg = coarse(&big, &sys);
        assert!(matches!(fourth_order_amplitudes(&sys, &big, 2.0, 2.0, &cfg), Err(Error::Size(_))));
    }

    #[test]
    fn bad_time_grid_rejected() {
        let (sys, _) = minimal();
        let g = TimeGrid { t_max: 10.0, n_steps: 1000 };
        assert!(g.validate(&sys, 1.0).is_err());
        let g = TimeGrid { t_max: 1000.0, n_steps: 10 };
        assert!(g.validate(&sys, 1.0).is_err());
    }

    #[test]
    fn matches_fast_path_and_is_complete() {
        let (sys, jsa) = minimal();
        let cfg = coarse(&jsa, &sys);
        let p = Pathways::with_quadrature(&sys, &jsa, cfg.quad.clone()).unwrap();
        let (wa, wb) = (2.02, 1.95);
        let (o, _) = fourth_order_amplitudes(&sys, &jsa, wa, wb, &cfg).unwrap();
        for (d, v) in [(Diagram::D1, o.d1), (Diagram::D2, o.d2), (Diagram::D3, o.d3)] {
            let fast = p.diagram(d, Detection::Coincidence, wa, wb).unwrap();
            assert!((v - fast).norm() < 1e-3 * fast.norm(), "{d:?}: {v} vs {fast}");
        }
        assert!((o.total - (o.d1 + o.d2 + o.d3)).norm() < 1e-12 * o.total.norm());
    }

    #[test]
    fn single_photon_matches_fast_path() {
        let (sys, jsa) = minimal();
        let cfg = coarse(&jsa, &sys);
        let p = Pathways::with_quadrature(&sys, &jsa, cfg.quad.clone()).unwrap();
        let v = single_photon_amplitude(&sys, &jsa, 2.01, 3.96, &cfg).unwrap();
        let fast = p.diagram(Diagram::S, Detection::Intensity, 2.01, 1.95).unwrap();
        assert!((v - fast).norm() < 1e-3 * fast.norm(), "{v} vs {fast}");
    }
}
