//! Two-photon joint spectral amplitude (JSA): construction, exchange-phase
//! symmetrization, normalization and Schmidt analysis.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64, HBAR};

/// Uniform frequency axis, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, n_points: usize) -> Result<Self> {
        if !(omega_min.is_finite() && omega_max.is_finite()) || omega_min >= omega_max {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must satisfy min < max (got {omega_min}, {omega_max})"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
        }
        Ok(Self { omega_min, omega_max, n_points })
    }

    pub fn spacing(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.n_points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.omega_min + i as f64 * self.spacing()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.value(i)).collect()
    }

    /// Fractional index of `omega`, `None` outside the closed interval.
    pub fn locate(&self, omega: f64) -> Option<(usize, f64)> {
        let x = (omega - self.omega_min) / self.spacing();
        let last = (self.n_points - 1) as f64;
        if !(-1e-12..=last + 1e-12).contains(&x) {
            return None;
        }
        let x = x.clamp(0.0, last);
        let i = (x.floor() as usize).min(self.n_points - 2);
        Some((i, x - i as f64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpParams {
    pub omega_p: f64,
    pub sigma_p: f64,
}

impl PumpParams {
    pub fn new(omega_p: f64, sigma_p: f64) -> Result<Self> {
        if !(omega_p > 0.0) || !(sigma_p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pump needs omega_p > 0 and sigma_p > 0 (got {omega_p}, {sigma_p})"
            )));
        }
        Ok(Self { omega_p, sigma_p })
    }
}

/// Optional crystal description from which the walk-off times follow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crystal {
    /// Length in mm.
    pub length: f64,
    /// Inverse group velocities in fs/mm.
    pub inv_v_a: f64,
    pub inv_v_b: f64,
    pub inv_v_p: f64,
}

impl Crystal {
    pub fn walk_off(&self) -> (f64, f64) {
        (self.length * (self.inv_v_a - self.inv_v_p), self.length * (self.inv_v_b - self.inv_v_p))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatchParams {
    pub omega_bar_a: f64,
    pub omega_bar_b: f64,
    /// Walk-off times in fs.
    pub t_a: f64,
    pub t_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crystal: Option<Crystal>,
}

impl PhaseMatchParams {
    pub fn new(omega_bar_a: f64, omega_bar_b: f64, t_a: f64, t_b: f64) -> Result<Self> {
        let pm = Self { omega_bar_a, omega_bar_b, t_a, t_b, crystal: None };
        pm.validate()?;
        Ok(pm)
    }

    pub fn from_crystal(omega_bar_a: f64, omega_bar_b: f64, crystal: Crystal) -> Result<Self> {
        let (t_a, t_b) = crystal.walk_off();
        let pm = Self { omega_bar_a, omega_bar_b, t_a, t_b, crystal: Some(crystal) };
        pm.validate()?;
        Ok(pm)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega_bar_a, self.omega_bar_b, self.t_a, self.t_b].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("phase-matching values must be finite".into()));
        }
        if let Some(c) = self.crystal {
            let (ta, tb) = c.walk_off();
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300);
            if !close(ta, self.t_a) || !close(tb, self.t_b) {
                return Err(Error::InvalidParameter(format!(
                    "walk-off times ({}, {}) disagree with crystal inputs ({ta}, {tb})",
                    self.t_a, self.t_b
                )));
            }
        }
        Ok(())
    }
}

pub fn pump_envelope(omega: f64, pump: &PumpParams) -> f64 {
    let x = (omega - pump.omega_p) / pump.sigma_p;
    (-x * x).exp()
}

/// sin(x)/x, by series near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

pub fn phase_matching(omega_a: f64, omega_b: f64, pm: &PhaseMatchParams) -> f64 {
    sinc(((omega_a - pm.omega_bar_a) * pm.t_a + (omega_b - pm.omega_bar_b) * pm.t_b) / HBAR)
}

/// Exchange phase carried by a JSA.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Exchange {
    Unsymmetrized,
    Theta(f64),
}

impl Exchange {
    /// Phase applied to exchanged histories; the bare amplitude has none.
    pub fn phase(&self) -> f64 {
        match self {
            Exchange::Unsymmetrized => 0.0,
            Exchange::Theta(t) => *t,
        }
    }
}

/// Joint spectral amplitude on a product grid, rows along channel a.
#[derive(Clone, Debug, PartialEq)]
pub struct Jsa {
    pub grid_a: FrequencyGrid,
    pub grid_b: FrequencyGrid,
    pub amplitude: DMatrix<C64>,
    pub exchange: Exchange,
}

pub fn build_jsa(grid_a: FrequencyGrid, grid_b: FrequencyGrid, pump: &PumpParams, pm: &PhaseMatchParams) -> Jsa {
    build_jsa_pump_scan(grid_a, grid_b, std::slice::from_ref(pump), pm)
}

/// JSA for a pump whose envelope is averaged over several settings. All
/// pathway functionals are linear in the JSA, so this equals averaging the
/// signals over the pump scan.
pub fn build_jsa_pump_scan(
    grid_a: FrequencyGrid,
    grid_b: FrequencyGrid,
    pumps: &[PumpParams],
    pm: &PhaseMatchParams,
) -> Jsa {
    let scale = 1.0 / pumps.len().max(1) as f64;
    let amplitude = DMatrix::from_fn(grid_a.n_points, grid_b.n_points, |i, j| {
        let (wa, wb) = (grid_a.value(i), grid_b.value(j));
        let env: f64 = pumps.iter().map(|p| pump_envelope(wa + wb, p)).sum::<f64>() * scale;
        C64::new(env * phase_matching(wa, wb, pm), 0.0)
    });
    Jsa { grid_a, grid_b, amplitude, exchange: Exchange::Unsymmetrized }
}

impl Jsa {
    pub fn cell_area(&self) -> f64 {
        self.grid_a.spacing() * self.grid_b.spacing()
    }

    /// Δω-weighted squared L² norm.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitude.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-10
    }

    fn require_common_grid(&self) -> Result<()> {
        if self.grid_a != self.grid_b {
            return Err(Error::GridIncompatible("exchange needs identical grids for both channels".into()));
        }
        Ok(())
    }

    /// Amplitude with channels exchanged, Φ(ω_b, ω_a).
    pub fn transposed(&self) -> Result<Jsa> {
        self.require_common_grid()?;
        Ok(Jsa { amplitude: self.amplitude.transpose(), ..self.clone() })
    }

    pub fn scaled(&self, s: f64) -> Jsa {
        Jsa { amplitude: self.amplitude.map(|z| z * s), ..self.clone() }
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, omega_a: f64, omega_b: f64) -> C64 {
        let (Some((i, fa)), Some((j, fb))) = (self.grid_a.locate(omega_a), self.grid_b.locate(omega_b)) else {
            return C64::new(0.0, 0.0);
        };
        let m = &self.amplitude;
        m[(i, j)] * ((1.0 - fa) * (1.0 - fb))
            + m[(i + 1, j)] * (fa * (1.0 - fb))
            + m[(i, j + 1)] * ((1.0 - fa) * fb)
            + m[(i + 1, j + 1)] * (fa * fb)
    }
}

/// Φ_θ(ω_a, ω_b) = [φ(ω_a, ω_b) + e^{iθ} φ(ω_b, ω_a)] / √2.
pub fn symmetrize(jsa: &Jsa, theta: f64) -> Result<Jsa> {
    jsa.require_common_grid()?;
    let phase = C64::from_polar(1.0, theta);
    let n = jsa.grid_a.n_points;
    let a = &jsa.amplitude;
    let mut amplitude = DMatrix::from_fn(n, n, |i, j| (a[(i, j)] + phase * a[(j, i)]) / 2f64.sqrt());
    if is_pi(theta) {
        // e^{iπ} is not exactly -1 in floating point.
        for i in 0..n {
            amplitude[(i, i)] = C64::new(0.0, 0.0);
        }
    }
    Ok(Jsa { amplitude, exchange: Exchange::Theta(theta), ..jsa.clone() })
}

fn is_pi(theta: f64) -> bool {
    let r = theta.rem_euclid(2.0 * std::f64::consts::PI);
    (r - std::f64::consts::PI).abs() < 1e-12
}

pub fn normalize(jsa: &Jsa) -> Result<Jsa> {
    let n2 = jsa.norm_sqr();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::DegenerateState);
    }
    Ok(jsa.scaled(1.0 / n2.sqrt()))
}

/// Descending Schmidt weights and the paired mode functions.
#[derive(Clone, Debug)]
pub struct SchmidtSpectrum {
    pub weights: Vec<f64>,
    /// Column n is ψ_n sampled on grid_a.
    pub modes_a: DMatrix<C64>,
    /// Column n is φ_n sampled on grid_b.
    pub modes_b: DMatrix<C64>,
}

fn weighted(jsa: &Jsa) -> Result<DMatrix<C64>> {
    if !jsa.is_normalized() {
        return Err(Error::NotNormalized(jsa.norm_sqr()));
    }
    let w = jsa.cell_area().sqrt();
    Ok(jsa.amplitude.map(|z| z * w))
}

/// Φ = Σ_n √p_n ψ_n(ω_a) φ_n(ω_b), from the SVD of the weighted matrix.
pub fn schmidt_decompose(jsa: &Jsa) -> Result<SchmidtSpectrum> {
    let m = weighted(jsa)?;
    let svd = m.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Format("SVD did not return singular vectors".into())),
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let (sa, sb) = (jsa.grid_a.spacing().sqrt(), jsa.grid_b.spacing().sqrt());
    let weights = order.iter().map(|&k| svd.singular_values[k].powi(2)).collect();
    let modes_a = DMatrix::from_fn(u.nrows(), order.len(), |i, n| u[(i, order[n])] / sa);
    let modes_b = DMatrix::from_fn(v_t.ncols(), order.len(), |j, n| v_t[(order[n], j)] / sb);
    Ok(SchmidtSpectrum { weights, modes_a, modes_b })
}

/// Schmidt weights only (cheaper: no singular vectors).
pub fn schmidt_weights(jsa: &Jsa) -> Result<Vec<f64>> {
    let m = weighted(jsa)?;
    let mut w: Vec<f64> = m.singular_values().iter().map(|s| s * s).collect();
    w.sort_by(|x, y| y.total_cmp(x));
    Ok(w)
}

/// Eigenvalues of the reduced single-photon kernels
/// K1(ω, ω') = ∫dω'' Φ(ω, ω'') Φ*(ω', ω'') and K2 (channel b), descending.
pub fn kernel_weights(jsa: &Jsa) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = weighted(jsa)?;
    let k1 = &m * m.adjoint();
    let k2 = m.transpose() * m.map(|z| z.conj());
    let eig = |k: DMatrix<C64>| {
        let mut v: Vec<f64> = SymmetricEigen::new(k).eigenvalues.iter().copied().collect();
        v.sort_by(|x, y| y.total_cmp(x));
        v
    };
    Ok((eig(k1), eig(k2)))
}

/// κ = 1 / Σ p².
pub fn schmidt_number(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|p| p * p).sum::<f64>()
}
