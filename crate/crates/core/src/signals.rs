//! Detection-protocol signals: total coincidence versus (ω_p, T), dephasing
//! spectra, frequency-resolved coincidence C_θ(η), the HOM-Fourier
//! coefficient D_θ and exchange-phase cycling.

use std::f64::consts::PI;

use crate::diagrams::{Detection, HomRotation, PathwayPoint, Pathways, ResidualQuadrature};
use crate::exciton::{ExcitonSystem, Manifold, Target};
use crate::photon_state::{symmetrize, FrequencyGrid, Jsa};
use crate::{par, Error, Result, C64, HBAR};

/// Narrowband, exchange-symmetric total coincidence at pump ω_p and HOM
/// delay T (sum over states, up to a global constant).
pub fn total_coincidence(system: &ExcitonSystem, omega_p: f64, delay: f64) -> f64 {
    let x = omega_p / 2.0;
    let es = system.manifold(Manifold::E);
    let gs = system.manifold(Manifold::G);
    let mut acc = C64::new(0.0, 0.0);
    for &g2 in &gs {
        let (wg, gg) = system.resolvent_params(Target::Level(g2));
        let survive = if delay >= 0.0 {
            C64::new(1.0, 0.0) - C64::new(-gg * delay / HBAR, -wg * delay / HBAR).exp()
        } else {
            C64::new(1.0, 0.0)
        };
        for &e2 in &es {
            let (w2, y2) = system.resolvent_params(Target::Pair(e2, g2));
            let left = system.mu(e2, 0) * system.mu_abs(e2, g2) / C64::new(x - w2, -y2);
            for &e in &es {
                let (w1, y1) = system.resolvent_params(Target::Level(e));
                let right = system.mu(e, g2) * system.mu_abs(e, 0) / C64::new(x - w1, y1);
                acc += left * right * survive;
            }
        }
    }
    acc.re
}

/// Total coincidence on an (ω_p, T) product axis; row-major in ω_p.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayScan {
    pub omega_p: Vec<f64>,
    pub delay: Vec<f64>,
    pub values: Vec<f64>,
}

impl DelayScan {
    pub fn at(&self, ip: usize, it: usize) -> f64 {
        self.values[ip * self.delay.len() + it]
    }
}

pub fn scan_total_coincidence(system: &ExcitonSystem, omega_p: &[f64], delay: &[f64]) -> DelayScan {
    let nt = delay.len();
    let values = par::map_range(omega_p.len() * nt, |k| total_coincidence(system, omega_p[k / nt], delay[k % nt]));
    DelayScan { omega_p: omega_p.to_vec(), delay: delay.to_vec(), values }
}

/// Trapezoid weights with endpoint halving; a single sample has weight 1.
pub fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|k| {
            let left = if k > 0 { axis[k] - axis[k - 1] } else { 0.0 };
            let right = if k + 1 < n { axis[k + 1] - axis[k] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

fn require_uniform(axis: &[f64], name: &str) -> Result<()> {
    if axis.len() < 2 {
        return Ok(());
    }
    let h = axis[1] - axis[0];
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("{name} axis must be strictly increasing")));
    }
    for w in axis.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1e-300) {
            return Err(Error::InvalidParameter(format!("{name} axis must be uniform")));
        }
    }
    Ok(())
}

/// C_T = ∫dω_p/2π C(ω_p, T).
pub fn coincidence_vs_delay(scan: &DelayScan) -> Vec<f64> {
    let w = trapezoid_weights(&scan.omega_p);
    (0..scan.delay.len())
        .map(|it| (0..scan.omega_p.len()).map(|ip| w[ip] * scan.at(ip, it)).sum::<f64>() / (2.0 * PI))
        .collect()
}

/// S(τ; T) = ∫dω_p/2π C(ω_p, T) e^{iω_p τ/2ħ}, row-major in τ.
pub fn dephasing_spectrum(scan: &DelayScan, tau: &[f64]) -> Result<Vec<C64>> {
    require_uniform(&scan.omega_p, "omega_p")?;
    let w = trapezoid_weights(&scan.omega_p);
    let nt = scan.delay.len();
    Ok(par::map_range(tau.len() * nt, |k| {
        let (itau, it) = (k / nt, k % nt);
        let mut acc = C64::new(0.0, 0.0);
        for (ip, &wp) in scan.omega_p.iter().enumerate() {
            acc += C64::from_polar(w[ip] * scan.at(ip, it), wp * tau[itau] / (2.0 * HBAR));
        }
        acc / (2.0 * PI)
    }))
}

/// y ≈ offset − amplitude·e^{−rate·t/ħ}, rate in eV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpFit {
    pub offset: f64,
    pub amplitude: f64,
    pub rate: f64,
    pub rms: f64,
}

fn linear_fit(t: &[f64], y: &[f64], rate: f64) -> ExpFit {
    // Least squares for y = A + C·x with x = e^{−rate t/ħ}.
    let n = t.len() as f64;
    let x: Vec<f64> = t.iter().map(|&ti| (-rate * ti / HBAR).exp()).collect();
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let c = if det.abs() > 0.0 { (n * sxy - sx * sy) / det } else { 0.0 };
    let a = (sy - c * sx) / n;
    let rms = (x.iter().zip(y).map(|(xi, yi)| (a + c * xi - yi).powi(2)).sum::<f64>() / n).sqrt();
    ExpFit { offset: a, amplitude: -c, rate, rms }
}

/// Exponential-approach fit of a delay trace (variable projection: golden
/// section on log-rate, linear least squares for the rest).
pub fn fit_exponential(t: &[f64], y: &[f64]) -> Result<ExpFit> {
    if t.len() != y.len() || t.len() < 4 {
        return Err(Error::InvalidParameter("fit needs at least 4 matching samples".into()));
    }
    let span = t[t.len() - 1] - t[0];
    let dt = (t[1] - t[0]).abs();
    if !(span > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter("fit needs an increasing time axis".into()));
    }
    let (lo, hi) = ((0.01 * HBAR / span).ln(), (HBAR / dt).ln());
    let cost = |l: f64| linear_fit(t, y, l.exp()).rms;
    let n_coarse = 400;
    let mut best = (lo, cost(lo));
    for k in 1..=n_coarse {
        let l = lo + (hi - lo) * k as f64 / n_coarse as f64;
        let c = cost(l);
        if c < best.1 {
            best = (l, c);
        }
    }
    let step = (hi - lo) / n_coarse as f64;
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if cost(c) < cost(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(linear_fit(t, y, (0.5 * (a + b)).exp()))
}

/// C_θ(T) at one detected pair from precomputed pathway functionals.
pub fn coincidence_at_delay(pp: &PathwayPoint, theta: f64, rot: &HomRotation, wa: f64, wb: f64) -> f64 {
    (pp.xi_tpr(rot, wa, wb) + pp.xi_rp(rot, wa, wb, theta)).im
}

/// C_θ(η) for a balanced splitter with the crossed phase set to η directly
/// (η is held fixed on the degenerate diagonal as well).
pub fn coincidence_at_phase(pp: &PathwayPoint, theta: f64, eta: f64) -> f64 {
    let direct = C64::new(0.5, 0.0);
    let crossed = C64::from_polar(-0.5, eta);
    let tpr = direct * pp.tpr_ab + crossed * pp.tpr_ba;
    let rp = direct * pp.rp_ab + crossed * C64::from_polar(1.0, theta) * pp.rp_ba;
    (tpr + rp).im
}

/// Frequency-resolved coincidence for a symmetrized JSA at delay T.
pub fn frequency_resolved(system: &ExcitonSystem, jsa: &Jsa, wa: f64, wb: f64, delay: f64) -> Result<f64> {
    let p = Pathways::new(system, jsa)?;
    let rot = HomRotation::balanced(delay);
    Ok(coincidence_at_delay(&p.point(wa, wb), p.theta(), &rot, wa, wb))
}

/// D = (1/W)∫dT e^{−iΩT} C(T), Ω = (ω_a − ω_b)/ħ, trapezoidal.
pub fn hom_fourier(delay: &[f64], values: &[f64], wa: f64, wb: f64) -> Result<C64> {
    if delay.len() != values.len() || delay.len() < 2 {
        return Err(Error::InvalidParameter("hom_fourier needs matching axes of length >= 2".into()));
    }
    require_uniform(delay, "T")?;
    let omega = (wa - wb) / HBAR;
    let width = delay[delay.len() - 1] - delay[0];
    if omega != 0.0 {
        let period = 2.0 * PI / omega.abs();
        let per_period = period / (delay[1] - delay[0]);
        if per_period < 4.0 - 1e-9 {
            return Err(Error::Resolution(format!("T axis has {per_period:.2} samples per HOM period; need >= 4")));
        }
        if width < period * (1.0 - 1e-9) {
            return Err(Error::Resolution("T axis shorter than one HOM period".into()));
        }
    }
    let w = trapezoid_weights(delay);
    let acc: C64 = delay.iter().zip(values).zip(&w).map(|((&t, &c), &h)| C64::from_polar(h * c, -omega * t)).sum();
    Ok(acc / width)
}

/// Delay axis spanning `periods` whole HOM periods with `per_period`
/// intervals each; any short axis on the degenerate diagonal.
pub fn fourier_delays(wa: f64, wb: f64, periods: usize, per_period: usize) -> Vec<f64> {
    let n = periods * per_period;
    let period = if wa == wb { 1.0 } else { 2.0 * PI * HBAR / (wa - wb).abs() };
    (0..=n).map(|k| period * k as f64 / per_period as f64).collect()
}

/// Pathway components isolated by cycling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    ITpr,
    RTpr,
    IRp,
    RRp,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::ITpr, Component::RTpr, Component::IRp, Component::RRp];

    pub fn label(self) -> &'static str {
        match self {
            Component::ITpr => "I_TPR",
            Component::RTpr => "R_TPR",
            Component::IRp => "I_RP",
            Component::RRp => "R_RP",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Component::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown cycling target `{s}`")))
    }
}

/// How a term reads the signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Setting {
    /// C_θ(η).
    Phase(f64),
    /// D_θ.
    Fourier,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub theta: f64,
    pub setting: Setting,
    pub weight: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CyclingProtocol {
    pub target: Component,
    pub terms: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolSet {
    Default,
    PaperVerbatim,
}

impl ProtocolSet {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(ProtocolSet::Default),
            "paper-verbatim" => Ok(ProtocolSet::PaperVerbatim),
            _ => Err(Error::InvalidParameter(format!("unknown protocol set `{s}`"))),
        }
    }
}

fn c(theta: f64, eta: f64, w: f64) -> Term {
    Term { theta, setting: Setting::Phase(eta), weight: C64::new(w, 0.0) }
}

fn d(theta: f64, w: C64) -> Term {
    Term { theta, setting: Setting::Fourier, weight: w }
}

impl CyclingProtocol {
    pub fn builtin(target: Component, set: ProtocolSet) -> Self {
        let h = PI / 2.0;
        let one = C64::new(1.0, 0.0);
        let terms = match (target, set) {
            (Component::ITpr, _) => vec![c(PI, PI, 1.0)],
            (Component::RTpr, ProtocolSet::Default) => {
                let w = C64::new(0.0, -1.0);
                vec![d(0.0, w), d(PI, w), d(h, w), d(-h, w)]
            }
            (Component::RTpr, ProtocolSet::PaperVerbatim) => {
                vec![d(h, one), d(-h, -one), c(h, 0.0, -1.0), c(-h, 0.0, 1.0), c(h, h, 1.0), c(-h, h, -1.0)]
            }
            (Component::IRp, ProtocolSet::Default) => vec![c(h, 0.0, 1.0), c(-h, 0.0, 1.0)],
            (Component::IRp, ProtocolSet::PaperVerbatim) => vec![c(h, 0.0, 1.0), c(h, 0.0, 1.0)],
            (Component::RRp, ProtocolSet::Default) => vec![c(h, 0.0, 1.0), c(-h, 0.0, -1.0)],
            (Component::RRp, ProtocolSet::PaperVerbatim) => vec![c(h, 0.0, 1.0), c(h, 0.0, -1.0)],
        };
        Self { target, terms }
    }

    pub fn thetas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for t in &self.terms {
            if !out.contains(&t.theta) {
                out.push(t.theta);
            }
        }
        out
    }

    /// Term-wise sum of two protocols.
    pub fn combine(&self, other: &Self, wa: f64, wb: f64) -> Self {
        let mut terms: Vec<Term> = self.terms.iter().map(|t| Term { weight: t.weight * wa, ..*t }).collect();
        terms.extend(other.terms.iter().map(|t| Term { weight: t.weight * wb, ..*t }));
        Self { target: self.target, terms }
    }
}

/// Pathway functionals for a bare JSA φ and the detected points; supplies
/// C_θ(η) and D_θ for every θ a protocol asks for. Φ_θ is built from the
/// normalized φ without renormalizing, so every θ shares one constant.
pub struct SignalSource<'a> {
    pub system: &'a ExcitonSystem,
    pub phi: &'a Jsa,
    pub points: Vec<(f64, f64)>,
    quad: ResidualQuadrature,
    cache: Vec<(f64, Vec<PathwayPoint>)>,
    /// Fourier sampling: whole periods and intervals per period.
    pub periods: usize,
    pub per_period: usize,
}

impl<'a> SignalSource<'a> {
    pub fn new(system: &'a ExcitonSystem, phi: &'a Jsa, points: Vec<(f64, f64)>) -> Self {
        let quad = ResidualQuadrature::for_jsa(phi, system);
        Self { system, phi, points, quad, cache: Vec::new(), periods: 2, per_period: 8 }
    }

    pub fn grid_points(a: &FrequencyGrid, b: &FrequencyGrid) -> Vec<(f64, f64)> {
        let mut v = Vec::with_capacity(a.n_points * b.n_points);
        for i in 0..a.n_points {
            for j in 0..b.n_points {
                v.push((a.value(i), b.value(j)));
            }
        }
        v
    }

    fn evaluate(&self, jsa: &Jsa) -> Result<Vec<PathwayPoint>> {
        let p = Pathways::with_quadrature(self.system, jsa, self.quad.clone())?;
        Ok(par::map(&self.points, |&(wa, wb)| p.point(wa, wb)))
    }

    /// Functionals for Φ_θ (computed once per θ).
    pub fn kernels(&mut self, theta: f64) -> Result<&[PathwayPoint]> {
        if let Some(k) = self.cache.iter().position(|(t, _)| *t == theta) {
            return Ok(&self.cache[k].1);
        }
        let jsa = symmetrize(self.phi, theta)?;
        let v = self.evaluate(&jsa)?;
        self.cache.push((theta, v));
        Ok(&self.cache.last().expect("just pushed").1)
    }

    /// Functionals for the bare amplitude φ/√2.
    pub fn bare_kernels(&self) -> Result<Vec<PathwayPoint>> {
        self.evaluate(&self.phi.scaled(std::f64::consts::FRAC_1_SQRT_2))
    }

    /// D_θ at point `k` from a sampled delay trace.
    pub fn fourier_at(&self, pp: &PathwayPoint, theta: f64, wa: f64, wb: f64) -> Result<C64> {
        let delays = fourier_delays(wa, wb, self.periods, self.per_period);
        let trace: Vec<f64> =
            delays.iter().map(|&t| coincidence_at_delay(pp, theta, &HomRotation::balanced(t), wa, wb)).collect();
        hom_fourier(&delays, &trace, wa, wb)
    }
}

/// Σ_k weight_k · (C or D)_k, real part, at every source point.
pub fn run_cycling(protocol: &CyclingProtocol, source: &mut SignalSource) -> Result<Vec<f64>> {
    for th in protocol.thetas() {
        source.kernels(th)?;
    }
    let src: &SignalSource = source;
    let per_term: Vec<(Term, &[PathwayPoint])> = protocol
        .terms
        .iter()
        .map(|t| {
            let k = src.cache.iter().position(|(th, _)| *th == t.theta).expect("cached above");
            (*t, src.cache[k].1.as_slice())
        })
        .collect();
    let idx: Vec<usize> = (0..src.points.len()).collect();
    let out = par::map(&idx, |&k| -> Result<f64> {
        let (wa, wb) = src.points[k];
        let mut acc = C64::new(0.0, 0.0);
        for (t, pts) in &per_term {
            let v = match t.setting {
                Setting::Phase(eta) => C64::new(coincidence_at_phase(&pts[k], t.theta, eta), 0.0),
                Setting::Fourier => src.fourier_at(&pts[k], t.theta, wa, wb)?,
            };
            acc += t.weight * v;
        }
        Ok(acc.re)
    });
    out.into_iter().collect()
}

/// The component computed straight from the pathway functionals.
pub fn direct_component(target: Component, source: &mut SignalSource) -> Result<Vec<f64>> {
    Ok(match target {
        Component::ITpr => source.kernels(PI)?.iter().map(|p| p.tpr_ab.im).collect(),
        Component::RTpr => source.bare_kernels()?.iter().map(|p| p.tpr_ab.re).collect(),
        Component::IRp => source.kernels(0.0)?.iter().map(|p| p.rp_ab.im).collect(),
        Component::RRp => source.kernels(PI)?.iter().map(|p| -p.rp_ab.re).collect(),
    })
}

/// Max deviation relative to max |direct| over off-diagonal points (the
/// degenerate diagonal carries no HOM phase, so TPR is not separable there).
pub fn protocol_residual(source: &SignalSource, protocol: &[f64], direct: &[f64]) -> f64 {
    let mut scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for (k, &(wa, wb)) in source.points.iter().enumerate() {
        if wa == wb {
            continue;
        }
        scale = scale.max(direct[k].abs());
        worst = worst.max((protocol[k] - direct[k]).abs());
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

pub fn validate_protocol(protocol: &CyclingProtocol, source: &mut SignalSource, tol: f64) -> Result<f64> {
    let got = run_cycling(protocol, source)?;
    let want = direct_component(protocol.target, source)?;
    let residual = protocol_residual(source, &got, &want);
    if residual > tol {
        return Err(Error::ProtocolMismatch { target: protocol.target.label().into(), residual });
    }
    Ok(residual)
}

/// Matter-free HOM coincidence Σ|t²Φ(a,b) − r² e^{iη}Φ(b,a)|² Δω_aΔω_b.
pub fn hom_dip(jsa: &Jsa, rot: &HomRotation) -> Result<f64> {
    if jsa.grid_a != jsa.grid_b {
        return Err(Error::GridIncompatible("HOM interference needs a common grid".into()));
    }
    let g = jsa.grid_a;
    let mut acc = 0.0;
    for i in 0..g.n_points {
        for j in 0..g.n_points {
            let (wa, wb) = (g.value(i), g.value(j));
            let amp = rot.direct(wa, wb) * jsa.amplitude[(i, j)] + rot.crossed(wa, wb) * jsa.amplitude[(j, i)];
            acc += amp.norm_sqr();
        }
    }
    Ok(acc * jsa.cell_area())
}

/// Pair-energy profile P(ω_s) = ∫du TPR(ω_s/2 + u, ω_s/2 − u) over
/// |u| <= half_width, in coincidence (D1) or intensity (D1 forward + S) mode.
pub fn tpr_pair_profile(p: &Pathways, ws: &[f64], half_width: f64, n_u: usize, det: Detection) -> Vec<C64> {
    let split = ResidualQuadrature::uniform(-half_width, half_width, n_u);
    par::map(ws, |&s| p.tpr_over_split(s, &split, det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exciton::{DephasingSpec, SystemSpec};
    use crate::photon_state::*;
    use crate::MEV;

    fn system(gamma_g: f64) -> ExcitonSystem {
        let mut s = SystemSpec::default_system();
        s.dephasing.push(DephasingSpec { a: "g1".into(), b: "g1".into(), gamma: gamma_g });
        s.build().unwrap()
    }

    #[test]
    fn total_coincidence_vanishes_at_zero_delay() {
        let s = system(MEV);
        assert!(total_coincidence(&s, 4.0, 0.0).abs() < 1e-12);
        assert!(total_coincidence(&s, 4.0, 1e5) > 0.0);
    }

    #[test]
    fn single_ground_level_decays_exponentially() {
        let s = system(MEV);
        let far = total_coincidence(&s, 4.0, 1e7);
        let tau = HBAR / MEV;
        let v = total_coincidence(&s, 4.0, tau);
        assert!(((far - v) / far - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn detuned_pump_is_suppressed() {
        let s = system(MEV);
        let on = total_coincidence(&s, 4.0, 1e5).abs();
        let off = total_coincidence(&s, 3.0, 1e5).abs();
        assert!(on > 1e3 * off);
    }

    #[test]
    fn trace_over_pump_single_sample_is_scaled_copy() {
        let s = system(MEV);
        let scan = scan_total_coincidence(&s, &[4.0], &[0.0, 100.0, 200.0]);
        let ct = coincidence_vs_delay(&scan);
        for (k, v) in ct.iter().enumerate() {
            assert!((v * 2.0 * PI - scan.at(0, k)).abs() < 1e-14);
        }
    }

    #[test]
    fn dephasing_spectrum_of_constant_is_window_kernel() {
        let wp: Vec<f64> = (0..2001).map(|k| 3.9 + 0.0004 * k as f64).collect();
        let scan = DelayScan { omega_p: wp.clone(), delay: vec![0.0], values: vec![1.0; 2001] };
        let tau = [0.0, 10.0, 25.0];
        let s = dephasing_spectrum(&scan, &tau).unwrap();
        for (k, &t) in tau.iter().enumerate() {
            // ∫ e^{iω t/2ħ} dω/2π over [3.9, 4.7] in closed form.
            let a = t / (2.0 * HBAR);
            let exact = if a == 0.0 {
                C64::new(0.8, 0.0)
            } else {
                (C64::new(0.0, a * 4.7).exp() - C64::new(0.0, a * 3.9).exp()) / C64::new(0.0, a)
            } / (2.0 * PI);
            assert!((s[k] - exact).norm() < 1e-4 * exact.norm().max(1e-3), "{k}");
        }
        let bad = DelayScan { omega_p: vec![1.0, 2.0, 2.5], delay: vec![0.0], values: vec![1.0; 3] };
        assert!(dephasing_spectrum(&bad, &tau).is_err());
    }

    #[test]
    fn single_line_peaks_at_injected_frequency() {
        // C(ω_p) = cos(ω_p τ0/2ħ) transforms to a peak at τ = τ0 (and −τ0).
        let wp: Vec<f64> = (0..2001).map(|k| 3.0 + 0.001 * k as f64).collect();
        let tau0 = 80.0;
        let vals = wp.iter().map(|w| (w * tau0 / (2.0 * HBAR)).cos()).collect();
        let scan = DelayScan { omega_p: wp, delay: vec![0.0], values: vals };
        let tau: Vec<f64> = (0..161).map(|k| k as f64).collect();
        let s = dephasing_spectrum(&scan, &tau).unwrap();
        let best = (0..tau.len()).max_by(|&a, &b| s[a].norm().total_cmp(&s[b].norm())).unwrap();
        assert!((tau[best] - tau0).abs() <= 1.0);
    }

    #[test]
    fn tau_resolution_independent_of_delay_sampling() {
        let s = system(MEV);
        let wp: Vec<f64> = (0..101).map(|k| 3.9 + 0.008 * k as f64).collect();
        let coarse = scan_total_coincidence(&s, &wp, &[0.0, 500.0, 1000.0]);
        let fine_t: Vec<f64> = (0..11).map(|k| 100.0 * k as f64).collect();
        let fine = scan_total_coincidence(&s, &wp, &fine_t);
        let tau = [0.0, 40.0, 80.0];
        let a = dephasing_spectrum(&coarse, &tau).unwrap();
        let b = dephasing_spectrum(&fine, &tau).unwrap();
        for k in 0..3 {
            assert!((a[k * 3 + 1] - b[k * 11 + 5]).norm() < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_rate() {
        let t: Vec<f64> = (0..300).map(|k| 2.0 * k as f64).collect();
        let y: Vec<f64> = t.iter().map(|&x| 3.0 - 2.0 * (-0.0015 * x / HBAR).exp()).collect();
        let f = fit_exponential(&t, &y).unwrap();
        assert!((f.rate / 0.0015 - 1.0).abs() < 1e-6, "{f:?}");
        assert!((f.offset - 3.0).abs() < 1e-6);
    }

    #[test]
    fn hom_fourier_of_constant_and_cosine() {
        let (wa, wb) = (2.1, 2.0);
        let t = fourier_delays(wa, wb, 3, 16);
        let ones = vec![1.0; t.len()];
        assert!(hom_fourier(&t, &ones, wa, wb).unwrap().norm() < 1e-12);
        assert!((hom_fourier(&t, &ones, 2.0, 2.0).unwrap() - 1.0).norm() < 1e-12);
        let om = (wa - wb) / HBAR;
        let cosv: Vec<f64> = t.iter().map(|x| (om * x).cos()).collect();
        assert!((hom_fourier(&t, &cosv, wa, wb).unwrap() - 0.5).norm() < 1e-12);
        let coarse: Vec<f64> = t.iter().step_by(8).copied().collect();
        let vals = vec![1.0; coarse.len()];
        assert!(matches!(hom_fourier(&coarse, &vals, wa, wb), Err(Error::Resolution(_))));
    }

    #[test]
    fn cosine_scan_peaks_at_its_frequency() {
        // Scanning the analysis frequency over a cos(Ω0 T) trace.
        let om0 = 0.12 / HBAR;
        let t: Vec<f64> = (0..2000).map(|k| 0.5 * k as f64).collect();
        let v: Vec<f64> = t.iter().map(|x| (om0 * x).cos()).collect();
        let scan: Vec<f64> = (1..40).map(|k| 0.006 * k as f64).collect();
        let mags: Vec<f64> = scan.iter().map(|&d| hom_fourier(&t, &v, 2.0 + d, 2.0).unwrap().norm()).collect();
        let best = (0..mags.len()).max_by(|&a, &b| mags[a].total_cmp(&mags[b])).unwrap();
        assert!((scan[best] - 0.12).abs() <= 0.006);
    }

    #[test]
    fn verbatim_raman_real_part_cancels() {
        let p = CyclingProtocol::builtin(Component::RRp, ProtocolSet::PaperVerbatim);
        let s: C64 = p.terms.iter().map(|t| t.weight).sum();
        assert_eq!(s, C64::new(0.0, 0.0));
        assert_eq!(p.thetas().len(), 1);
    }

    #[test]
    fn hom_dip_zero_for_symmetric_pair() {
        let g = FrequencyGrid::new(1.8, 2.2, 41).unwrap();
        let pump = PumpParams::new(4.0, 0.05).unwrap();
        let pm = PhaseMatchParams::new(2.0, 2.0, 6.1, 23.0).unwrap();
        let phi = normalize(&build_jsa(g, g, &pump, &pm)).unwrap();
        let sym = normalize(&symmetrize(&phi, 0.0).unwrap()).unwrap();
        let at0 = hom_dip(&sym, &HomRotation::balanced(0.0)).unwrap();
        let far = hom_dip(&sym, &HomRotation::balanced(400.0)).unwrap();
        assert!(at0 <= 1e-10 * far, "{at0} {far}");
        let anti = normalize(&symmetrize(&phi, PI).unwrap()).unwrap();
        assert!((hom_dip(&anti, &HomRotation::balanced(0.0)).unwrap() - 1.0).abs() < 1e-10);
    }
}
