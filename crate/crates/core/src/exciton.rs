//! Three-manifold exciton model (ground g, single e, double f), its dipole
//! lowering operator and phenomenological Green's functions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64, HBAR, MEV};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Manifold {
    G,
    E,
    F,
}

impl Manifold {
    pub fn rank(self) -> i32 {
        match self {
            Manifold::G => 0,
            Manifold::E => 1,
            Manifold::F => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub label: String,
    pub manifold: Manifold,
    pub energy: f64,
}

/// Levels are stored g-manifold first; index 0 is the initial state g1.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitonSystem {
    levels: Vec<Level>,
    /// V[(lower, upper)] = μ_{upper,lower}.
    lowering: DMatrix<C64>,
    /// Symmetric dephasing table; γ[(i, i)] is the intraband rate of level i.
    gamma: DMatrix<f64>,
}

/// Resolvent target: a level (coherence with g1) or an explicit pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Level(usize),
    Pair(usize, usize),
}

impl ExcitonSystem {
    pub fn new(levels: Vec<Level>, dipoles: &[(usize, usize, C64)], gamma: DMatrix<f64>) -> Result<Self> {
        let n = levels.len();
        if n == 0 || levels[0].manifold != Manifold::G {
            return Err(Error::InvalidParameter("the first level must belong to the g manifold".into()));
        }
        for w in levels.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.manifold > b.manifold || (a.manifold == b.manifold && a.energy > b.energy) {
                return Err(Error::InvalidParameter(
                    "levels must be ordered by manifold and by energy within a manifold".into(),
                ));
            }
        }
        if levels.iter().any(|l| !l.energy.is_finite()) {
            return Err(Error::InvalidParameter("level energies must be finite".into()));
        }
        let max_g = levels.iter().filter(|l| l.manifold == Manifold::G).map(|l| l.energy).fold(f64::MIN, f64::max);
        if levels.iter().any(|l| l.manifold == Manifold::E && l.energy <= max_g) {
            return Err(Error::InvalidParameter("every e level must lie above every g level".into()));
        }
        if gamma.nrows() != n || gamma.ncols() != n {
            return Err(Error::InvalidParameter("dephasing table has the wrong shape".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let g = gamma[(i, j)];
                if !(g >= 0.0) || !g.is_finite() || g != gamma[(j, i)] {
                    return Err(Error::InvalidParameter(format!(
                        "dephasing rates must be finite, nonnegative and symmetric ({i},{j})"
                    )));
                }
            }
        }
        let mut lowering = DMatrix::zeros(n, n);
        for &(i, j, mu) in dipoles {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!("dipole index ({i},{j}) out of range")));
            }
            let (mi, mj) = (levels[i].manifold.rank(), levels[j].manifold.rank());
            if (mi - mj).abs() != 1 {
                if mu != C64::new(0.0, 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "dipole {}-{} couples non-adjacent manifolds",
                        levels[i].label, levels[j].label
                    )));
                }
                continue;
            }
            let (upper, lower) = if mi > mj { (i, j) } else { (j, i) };
            lowering[(lower, upper)] = mu;
        }
        Ok(Self { levels, lowering, gamma })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn manifold(&self, m: Manifold) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.levels[i].manifold == m).collect()
    }

    pub fn energy(&self, i: usize) -> f64 {
        self.levels[i].energy
    }

    /// Transition energy ω_{i g1}.
    pub fn omega(&self, i: usize) -> f64 {
        self.levels[i].energy - self.levels[0].energy
    }

    pub fn gamma(&self, i: usize, j: usize) -> f64 {
        self.gamma[(i, j)]
    }

    pub fn gamma_table(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    /// Emission matrix element ⟨lower|V|upper⟩ = μ_{upper,lower}.
    pub fn mu(&self, upper: usize, lower: usize) -> C64 {
        self.lowering[(lower, upper)]
    }

    /// Absorption matrix element ⟨upper|V†|lower⟩.
    pub fn mu_abs(&self, upper: usize, lower: usize) -> C64 {
        self.lowering[(lower, upper)].conj()
    }

    /// V = Σ_{i>j} μ_ij |j⟩⟨i|.
    pub fn lowering(&self) -> &DMatrix<C64> {
        &self.lowering
    }

    pub fn raising(&self) -> DMatrix<C64> {
        self.lowering.adjoint()
    }

    pub fn dipole_list(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for lower in 0..self.len() {
            for upper in 0..self.len() {
                let mu = self.lowering[(lower, upper)];
                if mu != C64::new(0.0, 0.0) {
                    out.push((upper, lower, mu));
                }
            }
        }
        out
    }

    /// Copy with every dipole multiplied by `s`.
    pub fn with_dipoles_scaled(&self, s: f64) -> Self {
        Self { lowering: self.lowering.map(|z| z * s), ..self.clone() }
    }

    /// (ω_target, γ_target) for a resolvent.
    pub fn resolvent_params(&self, target: Target) -> (f64, f64) {
        match target {
            Target::Level(i) => (self.omega(i), self.gamma[(i, 0)]),
            Target::Pair(i, j) => (self.levels[i].energy - self.levels[j].energy, self.gamma[(i, j)]),
        }
    }

    pub fn min_gamma(&self) -> f64 {
        self.gamma.iter().copied().filter(|g| *g > 0.0).fold(f64::INFINITY, f64::min)
    }
}

/// G(ω) = 1/(ω − ω_target + iγ_target).
pub fn green_frequency(system: &ExcitonSystem, omega: f64, target: Target) -> Result<C64> {
    let (w, g) = system.resolvent_params(target);
    let den = C64::new(omega - w, g);
    if den == C64::new(0.0, 0.0) {
        return Err(Error::Singularity(omega));
    }
    Ok(den.inv())
}

/// G(t) = −iθ(t) exp(−iω_target t/ħ − γ_target t/ħ), with θ(0) = 1.
pub fn green_time(system: &ExcitonSystem, t: f64, target: Target) -> C64 {
    if t < 0.0 {
        return C64::new(0.0, 0.0);
    }
    let (w, g) = system.resolvent_params(target);
    C64::new(0.0, -1.0) * C64::new(-g * t / HBAR, -w * t / HBAR).exp()
}

/// Maximum relative deviation between green_frequency and the trapezoidal
/// transform (1/ħ)∫dt e^{iωt/ħ} G(t) over ω_target ± band, using
/// `n_samples` time points with step ħ/(20(band + γ)).
pub fn fourier_check(system: &ExcitonSystem, target: Target, band: f64, n_samples: usize) -> Result<f64> {
    let (w0, g) = system.resolvent_params(target);
    if !(g > 0.0) {
        return Err(Error::InvalidParameter("fourier_check needs a positive dephasing rate".into()));
    }
    let dt = HBAR / (20.0 * (band + g));
    let gt: Vec<C64> = (0..n_samples).map(|k| green_time(system, k as f64 * dt, target)).collect();
    let mut worst: f64 = 0.0;
    let n_omega = 101;
    for m in 0..n_omega {
        let omega = w0 - band + 2.0 * band * m as f64 / (n_omega - 1) as f64;
        let step = C64::new(0.0, omega * dt / HBAR).exp();
        let mut phase = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for (k, z) in gt.iter().enumerate() {
            let wgt = if k == 0 || k + 1 == n_samples { 0.5 } else { 1.0 };
            acc += z * phase * wgt;
            phase *= step;
        }
        let numeric = acc * (dt / HBAR);
        let exact = green_frequency(system, omega, target)?;
        worst = worst.max((numeric - exact).norm() / exact.norm());
    }
    Ok(worst)
}

/// Config-facing description of a system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub levels: Vec<Level>,
    /// Coupling applied to every adjacent-manifold pair not listed in `dipoles`.
    #[serde(default)]
    pub dipole_default: f64,
    #[serde(default)]
    pub dipoles: Vec<DipoleSpec>,
    /// Rate (eV) for every pair not listed in `dephasing`.
    pub gamma_default: f64,
    #[serde(default)]
    pub dephasing: Vec<DephasingSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipoleSpec {
    pub a: String,
    pub b: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingSpec {
    pub a: String,
    pub b: String,
    pub gamma: f64,
}

impl SystemSpec {
    pub fn build(&self) -> Result<ExcitonSystem> {
        let mut levels = self.levels.clone();
        levels.sort_by(|x, y| x.manifold.cmp(&y.manifold).then(x.energy.total_cmp(&y.energy)));
        let n = levels.len();
        let find = |label: &str| {
            levels
                .iter()
                .position(|l| l.label == label)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown level `{label}`")))
        };
        let mut dip = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if (levels[i].manifold.rank() - levels[j].manifold.rank()).abs() == 1 {
                    dip[(i, j)] = C64::new(self.dipole_default, 0.0);
                }
            }
        }
        for d in &self.dipoles {
            let (i, j) = (find(&d.a)?, find(&d.b)?);
            dip[(i, j)] = C64::new(d.re, d.im);
            dip[(j, i)] = C64::new(d.re, d.im);
        }
        let mut list = Vec::new();
        for i in 0..n {
            for j in 0..i {
                if dip[(i, j)] != C64::new(0.0, 0.0) {
                    list.push((i, j, dip[(i, j)]));
                }
            }
        }
        let mut gamma = DMatrix::from_element(n, n, self.gamma_default);
        for d in &self.dephasing {
            let (i, j) = (find(&d.a)?, find(&d.b)?);
            gamma[(i, j)] = d.gamma;
            gamma[(j, i)] = d.gamma;
        }
        ExcitonSystem::new(levels, &list, gamma)
    }

    fn ladder(levels: &[(&str, Manifold, f64)], gamma: f64) -> Self {
        Self {
            levels: levels.iter().map(|&(l, m, e)| Level { label: l.into(), manifold: m, energy: e }).collect(),
            dipole_default: 1.0,
            dipoles: Vec::new(),
            gamma_default: gamma,
            dephasing: Vec::new(),
        }
    }

    /// g = {0}; e = {2.0, 2.3}; f = {4.0, 4.45, 4.75} eV; unit dipoles;
    /// 5 meV everywhere. f1 = 2 e1, so ω_{f1 e1} = ω_{e1 g1} = 2 eV.
    pub fn default_system() -> Self {
        use Manifold::*;
        Self::ladder(
            &[("g1", G, 0.0), ("e1", E, 2.0), ("e2", E, 2.3), ("f1", F, 4.0), ("f2", F, 4.45), ("f3", F, 4.75)],
            5.0 * MEV,
        )
    }

    /// One level per manifold.
    pub fn minimal(e: f64, f: f64, gamma: f64) -> Self {
        use Manifold::*;
        Self::ladder(&[("g", G, 0.0), ("e", E, e), ("f", F, f)], gamma)
    }

    /// Single oscillator ladder with bosonic coupling ratio μ_ef = √2 μ_ge.
    pub fn oscillator(e: f64, f: f64, gamma: f64) -> Self {
        let mut s = Self::minimal(e, f, gamma);
        s.dipoles.push(DipoleSpec { a: "e".into(), b: "f".into(), re: 2f64.sqrt(), im: 0.0 });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys() -> ExcitonSystem {
        SystemSpec::default_system().build().unwrap()
    }

    #[test]
    fn default_has_degenerate_pair() {
        let s = sys();
        let f = s.manifold(Manifold::F);
        let e = s.manifold(Manifold::E);
        assert!((s.energy(f[0]) - s.energy(e[0]) - s.omega(e[0])).abs() < 1e-12);
        assert!((s.omega(e[0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_structure() {
        let s = sys();
        let v = s.lowering();
        let v2 = v * v;
        for g in s.manifold(Manifold::G) {
            // V acting on g gives zero: column g of V vanishes.
            assert!(v.column(g).iter().all(|z| z.norm() == 0.0));
        }
        for i in 0..s.len() {
            for j in 0..s.len() {
                if v2[(i, j)].norm() > 0.0 {
                    assert_eq!(s.levels()[i].manifold, Manifold::G);
                    assert_eq!(s.levels()[j].manifold, Manifold::F);
                }
            }
        }
        assert_eq!(s.raising(), v.adjoint());
    }

    #[test]
    fn non_adjacent_dipole_rejected() {
        let mut spec = SystemSpec::default_system();
        spec.dipoles.push(DipoleSpec { a: "g1".into(), b: "f2".into(), re: 0.5, im: 0.0 });
        assert!(spec.build().is_err());
    }

    #[test]
    fn resonance_value_and_tail() {
        let mut spec = SystemSpec::minimal(2.0, 4.0, 10.0 * MEV);
        spec.gamma_default = 0.01;
        let s = spec.build().unwrap();
        let g = green_frequency(&s, 2.0, Target::Level(1)).unwrap();
        assert!(g.re.abs() < 1e-12 && (g.im + 100.0).abs() < 1e-9);
        let far = green_frequency(&s, 3.0, Target::Level(1)).unwrap();
        assert!((far - C64::new(1.0, -0.01) / 1.0001).norm() < 1e-12);
        // FWHM of |G|² is 2γ.
        let half = green_frequency(&s, 2.01, Target::Level(1)).unwrap().norm_sqr();
        assert!((half / g.norm_sqr() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_width_pole_is_an_error() {
        let s = SystemSpec::minimal(2.0, 4.0, 0.0).build().unwrap();
        assert!(matches!(green_frequency(&s, 2.0, Target::Level(1)), Err(Error::Singularity(_))));
    }

    #[test]
    fn time_domain_values() {
        let s = sys();
        let t = Target::Level(1);
        assert_eq!(green_time(&s, -1.0, t), C64::new(0.0, 0.0));
        assert_eq!(green_time(&s, 0.0, t), C64::new(0.0, -1.0));
        let tau = HBAR / s.gamma(1, 0);
        assert!((green_time(&s, tau, t).norm() - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn pair_target_uses_pair_rate() {
        let mut spec = SystemSpec::default_system();
        spec.dephasing.push(DephasingSpec { a: "f1".into(), b: "e1".into(), gamma: 0.02 });
        let s = spec.build().unwrap();
        let (w, g) = s.resolvent_params(Target::Pair(3, 1));
        assert!((w - 2.0).abs() < 1e-12 && g == 0.02);
    }

    #[test]
    fn fourier_check_tightens_with_width() {
        let narrow = SystemSpec::minimal(2.0, 4.0, 5.0 * MEV).build().unwrap();
        let broad = SystemSpec::minimal(2.0, 4.0, 50.0 * MEV).build().unwrap();
        let d1 = fourier_check(&narrow, Target::Level(1), 0.5, 1 << 16).unwrap();
        let d2 = fourier_check(&broad, Target::Level(1), 0.5, 1 << 16).unwrap();
        assert!(d1 < 1e-3, "{d1}");
        assert!(d2 < d1, "{d2} vs {d1}");
    }
}
