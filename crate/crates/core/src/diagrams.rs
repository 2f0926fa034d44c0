//! Fourth-order loop-diagram pathway amplitudes for a two-photon input and
//! the Hong-Ou-Mandel (HOM) detection transformation.
//!
//! Rules: every interval between interactions carries the state resolvent
//! 1/(ω − ε + iγ) at the cumulative field energy ω (absorbed minus emitted);
//! the long-time limit fixes ω₁ + ω₂ = ω_a + ω_b, leaving one convolution
//! over the JSA. Pathways absorb the channel-a photon first. The common
//! prefactor (−i)⁴ i³ = −i of the Dyson expansion is kept.

use std::str::FromStr;

use crate::exciton::{ExcitonSystem, Manifold, Target};
use crate::photon_state::Jsa;
use crate::{Error, Result, C64, HBAR};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Beam splitter with relative delay `delay` (fs) before it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomRotation {
    pub t: f64,
    pub r: f64,
    pub delay: f64,
}

impl HomRotation {
    pub fn new(t: f64, r: f64, delay: f64) -> Result<Self> {
        if (t * t + r * r - 1.0).abs() > 1e-12 || !delay.is_finite() {
            return Err(Error::InvalidParameter("HOM rotation needs t² + r² = 1".into()));
        }
        Ok(Self { t, r, delay })
    }

    pub fn balanced(delay: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { t: s, r: s, delay }
    }

    /// Delay that realises the relative phase η at the detected pair; zero
    /// on the degenerate diagonal.
    pub fn for_eta(eta: f64, omega_a: f64, omega_b: f64) -> Self {
        let d = omega_a - omega_b;
        Self::balanced(if d == 0.0 { 0.0 } else { eta * HBAR / d })
    }

    /// Product of the crossed matrix elements, −r² e^{i(ω_a−ω_b)T/ħ}.
    pub fn crossed(&self, omega_a: f64, omega_b: f64) -> C64 {
        let m1 = hom_transform(self, omega_a);
        let m2 = hom_transform(self, omega_b);
        m1[0][1] * m2[1][0]
    }

    /// Product of the direct matrix elements, t².
    pub fn direct(&self, omega_a: f64, omega_b: f64) -> C64 {
        hom_transform(self, omega_a)[0][0] * hom_transform(self, omega_b)[1][1]
    }
}

/// [[t, i r e^{iωT/ħ}], [i r e^{−iωT/ħ}, t]].
pub fn hom_transform(rot: &HomRotation, omega: f64) -> [[C64; 2]; 2] {
    let ph = omega * rot.delay / HBAR;
    [
        [C64::new(rot.t, 0.0), I * rot.r * C64::from_polar(1.0, ph)],
        [I * rot.r * C64::from_polar(1.0, -ph), C64::new(rot.t, 0.0)],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Diagram {
    /// Two absorptions then two emissions (two-photon resonance).
    D1,
    /// Absorb, emit ω_a, absorb, emit ω_b (Raman).
    D2,
    /// Absorb, emit ω_b, absorb, emit ω_a (Raman).
    D3,
    /// Single detected photon; the last interval runs on the bra.
    S,
}

impl Diagram {
    pub fn name(self) -> &'static str {
        match self {
            Diagram::D1 => "d1",
            Diagram::D2 => "d2",
            Diagram::D3 => "d3",
            Diagram::S => "s",
        }
    }
}

impl FromStr for Diagram {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d1" => Ok(Diagram::D1),
            "d2" => Ok(Diagram::D2),
            "d3" => Ok(Diagram::D3),
            "s" => Ok(Diagram::S),
            _ => Err(Error::InvalidParameter(format!("unknown diagram `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Ket,
    Bra,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Absorb,
    Emit,
}

/// Field slot an interaction acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    InputA,
    InputB,
    Detected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub branch: Branch,
    pub kind: Kind,
    pub slot: Slot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopDiagram {
    pub events: Vec<Event>,
}

impl LoopDiagram {
    pub fn of(d: Diagram) -> Self {
        use Branch::*;
        use Kind::*;
        use Slot::*;
        let ev = |branch, kind, slot| Event { branch, kind, slot };
        let events = match d {
            Diagram::D1 => {
                vec![ev(Ket, Absorb, InputA), ev(Ket, Absorb, InputB), ev(Ket, Emit, Detected), ev(Ket, Emit, Detected)]
            }
            Diagram::D2 | Diagram::D3 => {
                vec![ev(Ket, Absorb, InputA), ev(Ket, Emit, Detected), ev(Ket, Absorb, InputB), ev(Ket, Emit, Detected)]
            }
            Diagram::S => {
                vec![ev(Ket, Absorb, InputA), ev(Ket, Absorb, InputB), ev(Ket, Emit, Detected), ev(Bra, Absorb, InputB)]
            }
        };
        Self { events }
    }

    /// Photons left in the detected modes.
    pub fn emitted_photons(&self) -> usize {
        self.events.iter().filter(|e| e.kind == Kind::Emit && e.slot == Slot::Detected).count()
    }

    /// Each branch must move up or down one manifold per event and stay
    /// within g..f.
    pub fn respects_ladder(&self) -> bool {
        let (mut ket, mut bra) = (0i32, 0i32);
        for e in &self.events {
            let m = if e.branch == Branch::Ket { &mut ket } else { &mut bra };
            *m += if e.kind == Kind::Absorb { 1 } else { -1 };
            if !(0..=2).contains(m) {
                return false;
            }
        }
        true
    }
}

/// How the detected photons are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detection {
    /// Two-photon coincidence.
    Coincidence,
    /// Single-photon intensity.
    Intensity,
}

pub fn check_bookkeeping(d: Diagram, det: Detection) -> Result<()> {
    let n = LoopDiagram::of(d).emitted_photons();
    let want = match det {
        Detection::Coincidence => 2,
        Detection::Intensity => 1,
    };
    if d != Diagram::S && det == Detection::Intensity {
        // Two-photon histories also contribute to single-photon counts.
        return Ok(());
    }
    if n != want {
        return Err(Error::Bookkeeping(format!("diagram {d:?} leaves {n} photon(s); {det:?} detection needs {want}")));
    }
    Ok(())
}

/// Uniform nodes and trapezoid weights for the residual ω₁ integral.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ResidualQuadrature {
    /// Spans channel a of the JSA with spacing min(Δω_a, min(γ)/4).
    pub fn for_jsa(jsa: &Jsa, system: &ExcitonSystem) -> Self {
        let g = jsa.grid_a;
        let h_target = g.spacing().min(system.min_gamma() / 4.0);
        let span = g.omega_max - g.omega_min;
        let n = ((span / h_target).ceil() as usize).max(1) + 1;
        Self::uniform(g.omega_min, g.omega_max, n)
    }

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Self {
        let h = (hi - lo) / (n - 1) as f64;
        let nodes = (0..n).map(|k| lo + k as f64 * h).collect();
        let weights = (0..n).map(|k| if k == 0 || k + 1 == n { 0.5 * h } else { h }).collect();
        Self { nodes, weights }
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }
}

/// Warning text when the JSA grid is coarser than min(γ)/4.
pub fn resolution_warning(jsa: &Jsa, system: &ExcitonSystem) -> Option<String> {
    let need = system.min_gamma() / 4.0;
    (jsa.grid_a.spacing() > need).then(|| {
        format!(
            "JSA spacing {:.3e} eV exceeds min(gamma)/4 = {:.3e} eV; residual integral uses interpolated nodes",
            jsa.grid_a.spacing(),
            need
        )
    })
}

/// Pathway evaluator for one system and one (symmetrized) JSA.
pub struct Pathways<'a> {
    pub system: &'a ExcitonSystem,
    pub jsa: &'a Jsa,
    pub quad: ResidualQuadrature,
    e_levels: Vec<usize>,
    f_levels: Vec<usize>,
    g_levels: Vec<usize>,
    /// G_e(ω₁) at every node, per e level.
    g_e_nodes: Vec<Vec<C64>>,
}

/// The four pre-HOM functionals at one detected pair (ω_a, ω_b) and at the
/// swapped pair.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PathwayPoint {
    pub tpr_ab: C64,
    pub tpr_ba: C64,
    pub rp_ab: C64,
    pub rp_ba: C64,
}

impl PathwayPoint {
    /// Ξ_TPR: HOM-weighted sum over detector assignments.
    pub fn xi_tpr(&self, rot: &HomRotation, wa: f64, wb: f64) -> C64 {
        rot.direct(wa, wb) * self.tpr_ab + rot.crossed(wa, wb) * self.tpr_ba
    }

    /// Ξ_RP: the crossed assignment exchanges the absorbed photons and so
    /// carries the preparation phase e^{iθ}.
    pub fn xi_rp(&self, rot: &HomRotation, wa: f64, wb: f64, theta: f64) -> C64 {
        rot.direct(wa, wb) * self.rp_ab + rot.crossed(wa, wb) * C64::from_polar(1.0, theta) * self.rp_ba
    }
}

impl<'a> Pathways<'a> {
    pub fn new(system: &'a ExcitonSystem, jsa: &'a Jsa) -> Result<Self> {
        Self::with_quadrature(system, jsa, ResidualQuadrature::for_jsa(jsa, system))
    }

    pub fn with_quadrature(system: &'a ExcitonSystem, jsa: &'a Jsa, quad: ResidualQuadrature) -> Result<Self> {
        if system.min_gamma().is_infinite() || system.gamma_table().iter().any(|g| *g <= 0.0) {
            return Err(Error::InvalidParameter("pathway evaluation needs every dephasing rate > 0".into()));
        }
        let e_levels = system.manifold(Manifold::E);
        let g_e_nodes =
            e_levels.iter().map(|&e| quad.nodes.iter().map(|&w| resolvent(system, w, e)).collect()).collect();
        Ok(Self {
            system,
            jsa,
            e_levels,
            f_levels: system.manifold(Manifold::F),
            g_levels: system.manifold(Manifold::G),
            g_e_nodes,
            quad,
        })
    }

    pub fn theta(&self) -> f64 {
        self.jsa.exchange.phase()
    }

    /// Weighted JSA samples Φ(ω₁, ω_s − ω₁) along the nodes.
    fn slice(&self, ws: f64) -> Vec<C64> {
        self.quad.nodes.iter().zip(&self.quad.weights).map(|(&w1, &h)| self.jsa.interpolate(w1, ws - w1) * h).collect()
    }

    fn j_all(&self, slice: &[C64]) -> Vec<C64> {
        self.g_e_nodes.iter().map(|ge| slice.iter().zip(ge).map(|(a, b)| a * b).sum()).collect()
    }

    fn tpr_ordered(&self, j: &[C64], ws: f64, w_first: f64) -> C64 {
        let s = self.system;
        let mut acc = ZERO;
        for (ie, &e) in self.e_levels.iter().enumerate() {
            if j[ie] == ZERO {
                continue;
            }
            for &f in &self.f_levels {
                let up = s.mu_abs(e, 0) * s.mu_abs(f, e);
                if up == ZERO {
                    continue;
                }
                let gf = resolvent(s, ws, f);
                for &e2 in &self.e_levels {
                    let down = s.mu(f, e2) * s.mu(e2, 0);
                    acc += up * down * j[ie] * gf * resolvent(s, ws - w_first, e2);
                }
            }
        }
        -I * acc
    }

    fn s_ordered(&self, j: &[C64], ws: f64, w_det: f64) -> C64 {
        let s = self.system;
        let mut acc = ZERO;
        for (ie, &e) in self.e_levels.iter().enumerate() {
            for &f in &self.f_levels {
                let up = s.mu_abs(e, 0) * s.mu_abs(f, e);
                let gf = resolvent(s, ws, f);
                for &e2 in &self.e_levels {
                    let down = s.mu(f, e2) * s.mu(e2, 0);
                    acc += up * down * j[ie] * gf * resolvent(s, ws - w_det, e2).conj();
                }
            }
        }
        -I * acc
    }

    fn raman_ordered(&self, slice: &[C64], ws: f64, w_first: f64) -> C64 {
        let s = self.system;
        let mut acc = ZERO;
        for (ie, &e) in self.e_levels.iter().enumerate() {
            for &g2 in &self.g_levels {
                let pre = s.mu_abs(e, 0) * s.mu(e, g2);
                if pre == ZERO {
                    continue;
                }
                let (wg, gg) = s.resolvent_params(Target::Level(g2));
                let inner: C64 = slice
                    .iter()
                    .zip(&self.quad.nodes)
                    .zip(&self.g_e_nodes[ie])
                    .map(|((a, &w1), ge)| a * ge / C64::new(w1 - w_first - wg, gg))
                    .sum();
                for &e2 in &self.e_levels {
                    let post = s.mu_abs(e2, g2) * s.mu(e2, 0);
                    acc += pre * post * inner * resolvent(s, ws - w_first, e2);
                }
            }
        }
        -I * acc
    }

    /// One diagram at the detected pair (ω_a, ω_b). For S, ω_a is the
    /// detected photon and ω_a + ω_b the pair energy.
    pub fn diagram(&self, d: Diagram, det: Detection, wa: f64, wb: f64) -> Result<C64> {
        check_bookkeeping(d, det)?;
        let ws = wa + wb;
        let slice = self.slice(ws);
        Ok(match d {
            Diagram::D1 => {
                let j = self.j_all(&slice);
                self.tpr_ordered(&j, ws, wa) + self.tpr_ordered(&j, ws, wb)
            }
            Diagram::D2 => self.raman_ordered(&slice, ws, wa),
            Diagram::D3 => self.raman_ordered(&slice, ws, wb),
            Diagram::S => self.s_ordered(&self.j_all(&slice), ws, wa),
        })
    }

    /// D1 with only the ordering in which ω_d is emitted first.
    pub fn d1_single_ordering(&self, w_d: f64, ws: f64) -> C64 {
        let j = self.j_all(&self.slice(ws));
        self.tpr_ordered(&j, ws, w_d)
    }

    /// Single-photon TPR signal for detected ω_d at pair energy ω_s:
    /// forward D1 ordering plus S.
    pub fn intensity_tpr(&self, w_d: f64, ws: f64) -> C64 {
        let j = self.j_all(&self.slice(ws));
        self.tpr_ordered(&j, ws, w_d) + self.s_ordered(&j, ws, w_d)
    }

    /// TPR signal at pair energy ω_s integrated over the split
    /// (ω_s/2 + u, ω_s/2 − u) with the given u-quadrature. Coincidence mode
    /// is D1; intensity mode sums the forward D1 ordering and S over both
    /// detected photons.
    pub fn tpr_over_split(&self, ws: f64, split: &ResidualQuadrature, det: Detection) -> C64 {
        let j = self.j_all(&self.slice(ws));
        let mut acc = ZERO;
        for (&u, &h) in split.nodes.iter().zip(&split.weights) {
            let (wa, wb) = (ws / 2.0 + u, ws / 2.0 - u);
            let v = match det {
                Detection::Coincidence => self.tpr_ordered(&j, ws, wa) + self.tpr_ordered(&j, ws, wb),
                Detection::Intensity => {
                    self.tpr_ordered(&j, ws, wa)
                        + self.s_ordered(&j, ws, wa)
                        + self.tpr_ordered(&j, ws, wb)
                        + self.s_ordered(&j, ws, wb)
                }
            };
            acc += v * h;
        }
        acc
    }

    /// Pre-HOM functionals at (ω_a, ω_b) and the swapped pair.
    pub fn point(&self, wa: f64, wb: f64) -> PathwayPoint {
        let ws = wa + wb;
        let slice = self.slice(ws);
        let j = self.j_all(&slice);
        let tpr = self.tpr_ordered(&j, ws, wa) + self.tpr_ordered(&j, ws, wb);
        let d2 = self.raman_ordered(&slice, ws, wa);
        let d3 = self.raman_ordered(&slice, ws, wb);
        PathwayPoint { tpr_ab: tpr, tpr_ba: tpr, rp_ab: d2 + d3, rp_ba: d2 + d3 }
    }

    /// Ξ_TPR at (ω_a, ω_b) under `rot`.
    pub fn tpr_amplitude(&self, wa: f64, wb: f64, rot: &HomRotation) -> C64 {
        self.point(wa, wb).xi_tpr(rot, wa, wb)
    }

    /// Ξ_RP (D2 + D3) at (ω_a, ω_b) under `rot`.
    pub fn rp_amplitude(&self, wa: f64, wb: f64, rot: &HomRotation) -> C64 {
        self.point(wa, wb).xi_rp(rot, wa, wb, self.theta())
    }

    /// Diagram with all branch arrows reflected: every factor is replaced by
    /// its mirror image (advanced resolvents, conjugated couplings and JSA,
    /// +i prefactor).
    pub fn reflected(&self, d: Diagram, wa: f64, wb: f64) -> Result<C64> {
        let mirror_jsa = Jsa { amplitude: self.jsa.amplitude.map(|z| z.conj()), ..self.jsa.clone() };
        let mirror_sys = mirrored_system(self.system)?;
        let p = Pathways::with_quadrature(&mirror_sys, &mirror_jsa, self.quad.clone())?;
        Ok(p.diagram_mirror(d, wa, wb))
    }

    fn diagram_mirror(&self, d: Diagram, wa: f64, wb: f64) -> C64 {
        let s = self.system;
        let ws = wa + wb;
        let slice = self.slice(ws);
        let adv = |w: f64, k: usize| resolvent(s, w, k).conj();
        let j: Vec<C64> = self
            .e_levels
            .iter()
            .map(|&e| slice.iter().zip(&self.quad.nodes).map(|(a, &w1)| a * adv(w1, e)).sum())
            .collect();
        let mut acc = ZERO;
        match d {
            Diagram::D1 | Diagram::S => {
                for (ie, &e) in self.e_levels.iter().enumerate() {
                    for &f in &self.f_levels {
                        for &e2 in &self.e_levels {
                            let mu = s.mu_abs(e, 0) * s.mu_abs(f, e) * s.mu(f, e2) * s.mu(e2, 0);
                            let tail = match d {
                                Diagram::D1 => adv(ws - wa, e2) + adv(ws - wb, e2),
                                _ => adv(ws - wa, e2).conj(),
                            };
                            acc += mu * j[ie] * adv(ws, f) * tail;
                        }
                    }
                }
            }
            Diagram::D2 | Diagram::D3 => {
                let w_first = if d == Diagram::D2 { wa } else { wb };
                for &e in &self.e_levels {
                    for &g2 in &self.g_levels {
                        let (wg, gg) = s.resolvent_params(Target::Level(g2));
                        let inner: C64 = slice
                            .iter()
                            .zip(&self.quad.nodes)
                            .map(|(a, &w1)| a * adv(w1, e) / C64::new(w1 - w_first - wg, -gg))
                            .sum();
                        for &e2 in &self.e_levels {
                            let mu = s.mu_abs(e, 0) * s.mu(e, g2) * s.mu_abs(e2, g2) * s.mu(e2, 0);
                            acc += mu * inner * adv(ws - w_first, e2);
                        }
                    }
                }
            }
        }
        I * acc
    }
}

fn mirrored_system(s: &ExcitonSystem) -> Result<ExcitonSystem> {
    let dip: Vec<_> = s.dipole_list().into_iter().map(|(u, l, m)| (u, l, m.conj())).collect();
    ExcitonSystem::new(s.levels().to_vec(), &dip, s.gamma_table().clone())
}

/// State resolvent of level k relative to g1.
fn resolvent(s: &ExcitonSystem, w: f64, k: usize) -> C64 {
    let (wk, gk) = s.resolvent_params(Target::Level(k));
    C64::new(w - wk, gk).inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exciton::SystemSpec;
    use crate::photon_state::*;

    fn setup(theta: Option<f64>) -> (ExcitonSystem, Jsa) {
        let sys = SystemSpec::default_system().build().unwrap();
        let g = FrequencyGrid::new(1.7, 2.6, 61).unwrap();
        let pump = PumpParams::new(4.3, 0.3).unwrap();
        let pm = PhaseMatchParams::new(2.0, 2.0, 0.61, 23.0).unwrap();
        let phi = normalize(&build_jsa(g, g, &pump, &pm)).unwrap();
        let jsa = match theta {
            Some(t) => symmetrize(&phi, t).unwrap(),
            None => phi,
        };
        (sys, jsa)
    }

    #[test]
    fn split_integral_matches_pointwise_sum() {
        let (sys, jsa) = setup(Some(0.0));
        let p = Pathways::new(&sys, &jsa).unwrap();
        let split = ResidualQuadrature::uniform(-0.2, 0.2, 9);
        let ws = 4.02;
        let (mut coin, mut int) = (ZERO, ZERO);
        for (&u, &h) in split.nodes.iter().zip(&split.weights) {
            let (wa, wb) = (ws / 2.0 + u, ws / 2.0 - u);
            coin += p.diagram(Diagram::D1, Detection::Coincidence, wa, wb).unwrap() * h;
            int += (p.intensity_tpr(wa, ws) + p.intensity_tpr(wb, ws)) * h;
        }
        assert!((p.tpr_over_split(ws, &split, Detection::Coincidence) - coin).norm() < 1e-12 * coin.norm());
        assert!((p.tpr_over_split(ws, &split, Detection::Intensity) - int).norm() < 1e-12 * int.norm());
    }

    #[test]
    fn balanced_splitter_and_unitarity() {
        let m = hom_transform(&HomRotation::balanced(0.0), 2.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m[0][1] - I * s).norm() < 1e-15 && (m[0][0] - s).norm() < 1e-15);
        for &(w, t) in &[(1.3, 0.0), (2.1, 17.0), (4.4, -250.0)] {
            let m = hom_transform(&HomRotation::new(0.6, 0.8, t).unwrap(), w);
            for i in 0..2 {
                for k in 0..2 {
                    let v: C64 = (0..2).map(|j| m[i][j] * m[k][j].conj()).sum();
                    let want = if i == k { 1.0 } else { 0.0 };
                    assert!((v - want).norm() < 1e-14);
                }
            }
        }
        let t = std::f64::consts::PI * HBAR / 2.0;
        let m = hom_transform(&HomRotation::balanced(t), 2.0);
        assert!((m[0][1] + I * s).norm() < 1e-14);
    }

    #[test]
    fn eta_scales_linearly_with_delay() {
        let (wa, wb) = (2.1, 1.95);
        let r1 = HomRotation::balanced(13.0);
        let r2 = HomRotation::balanced(39.0);
        let eta1 = (r1.crossed(wa, wb) / -0.5).arg();
        let eta2 = (r2.crossed(wa, wb) / -0.5).arg();
        assert!((eta1 - (wa - wb) * 13.0 / HBAR).abs() < 1e-12);
        let wrapped = (eta2 - 3.0 * eta1).rem_euclid(2.0 * std::f64::consts::PI);
        assert!(wrapped.min(2.0 * std::f64::consts::PI - wrapped) < 1e-10);
    }

    #[test]
    fn bookkeeping() {
        assert!(matches!(check_bookkeeping(Diagram::S, Detection::Coincidence), Err(Error::Bookkeeping(_))));
        assert!(check_bookkeeping(Diagram::S, Detection::Intensity).is_ok());
        assert!(check_bookkeeping(Diagram::D1, Detection::Coincidence).is_ok());
        for d in [Diagram::D1, Diagram::D2, Diagram::D3, Diagram::S] {
            assert!(LoopDiagram::of(d).respects_ladder());
        }
        let (sys, jsa) = setup(Some(0.0));
        let p = Pathways::new(&sys, &jsa).unwrap();
        assert!(p.diagram(Diagram::S, Detection::Coincidence, 2.0, 2.0).is_err());
    }

    #[test]
    fn blocked_pathways_vanish() {
        let (_, jsa) = setup(Some(0.0));
        let mut spec = SystemSpec::default_system();
        for e in ["e1", "e2"] {
            for f in ["f1", "f2", "f3"] {
                spec.dipoles.push(crate::exciton::DipoleSpec { a: e.into(), b: f.into(), re: 0.0, im: 0.0 });
            }
        }
        let sys = spec.build().unwrap();
        let p = Pathways::new(&sys, &jsa).unwrap();
        assert_eq!(p.tpr_amplitude(2.0, 2.2, &HomRotation::balanced(0.0)), ZERO);
        assert_eq!(p.diagram(Diagram::S, Detection::Intensity, 2.0, 2.2).unwrap(), ZERO);
        let dark = SystemSpec::default_system().build().unwrap().with_dipoles_scaled(0.0);
        let p = Pathways::new(&dark, &jsa).unwrap();
        assert_eq!(p.rp_amplitude(2.0, 2.2, &HomRotation::balanced(3.0)), ZERO);
    }

    #[test]
    fn off_resonant_sum_is_suppressed() {
        let sys = SystemSpec::default_system().build().unwrap();
        let g = FrequencyGrid::new(1.9, 2.5, 121).unwrap();
        let pump = PumpParams::new(4.45, 0.01).unwrap();
        let pm = PhaseMatchParams::new(2.2, 2.25, 0.61, 23.0).unwrap();
        let jsa = symmetrize(&normalize(&build_jsa(g, g, &pump, &pm)).unwrap(), 0.0).unwrap();
        let p = Pathways::new(&sys, &jsa).unwrap();
        let on = p.point(2.2, 2.25).tpr_ab.norm();
        let off = p.point(2.05, 2.05).tpr_ab.norm();
        assert!(on > 100.0 * off, "{on} {off}");
    }

    #[test]
    fn raman_lines_peak_on_transitions() {
        let (sys, jsa) = setup(Some(0.0));
        let p = Pathways::new(&sys, &jsa).unwrap();
        let prof = |wb: f64| p.diagram(Diagram::D2, Detection::Coincidence, 2.15, wb).unwrap().norm();
        assert!(prof(2.0) > prof(1.98) && prof(2.0) > prof(2.02));
        assert!(prof(2.3) > prof(2.28) && prof(2.3) > prof(2.32));
    }

    #[test]
    fn reflection_conjugates() {
        let (sys, jsa) = setup(Some(0.4));
        let p = Pathways::new(&sys, &jsa).unwrap();
        for d in [Diagram::D1, Diagram::D2, Diagram::D3, Diagram::S] {
            let det = if d == Diagram::S { Detection::Intensity } else { Detection::Coincidence };
            let v = p.diagram(d, det, 2.05, 2.28).unwrap();
            let r = p.reflected(d, 2.05, 2.28).unwrap();
            assert!((v + r).im.abs() <= 1e-12 * v.norm().max(1e-300), "{d:?}");
            assert!((r - v.conj()).norm() <= 1e-12 * v.norm());
        }
    }

    #[test]
    fn zero_rate_rejected() {
        let (_, jsa) = setup(None);
        let mut spec = SystemSpec::default_system();
        spec.dephasing.push(crate::exciton::DephasingSpec { a: "g1".into(), b: "g1".into(), gamma: 0.0 });
        let sys = spec.build().unwrap();
        assert!(Pathways::new(&sys, &jsa).is_err());
    }
}
