//! Run configuration (TOML). Every command reads the sections it needs and
//! reports a missing one as a configuration error.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use biphoton::exciton::{ExcitonSystem, SystemSpec};
use biphoton::photon_state::{Crystal, FrequencyGrid, PhaseMatchParams, PumpParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocols: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_match: Option<PhaseMatchConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jsa: Option<JsaConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detect: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing: Option<DephasingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
}

/// Uniform sample axis; `n = 1` is the single point `min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn validate(&self, name: &str) -> Result<(), CliError> {
        let finite = self.min.is_finite() && self.max.is_finite();
        if self.n == 0 || !finite || (self.n > 1 && !(self.max > self.min)) {
            return Err(CliError::Config(format!(
                "axis `{name}` needs finite min < max and n >= 1 (got {} .. {}, n = {})",
                self.min, self.max, self.n
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n).map(|k| self.min + k as f64 * h).collect()
    }

    pub fn grid(&self, name: &str) -> Result<FrequencyGrid, CliError> {
        self.validate(name)?;
        FrequencyGrid::new(self.min, self.max, self.n).map_err(|e| CliError::Config(format!("{name}: {e}")))
    }
}

/// An angle given in radians or as a multiple of pi: `"pi/2"`, `"-pi"`,
/// `"3pi/4"`, `"0"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Expr(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64, CliError> {
        match self {
            Angle::Radians(x) if x.is_finite() => Ok(*x),
            Angle::Radians(x) => Err(CliError::Config(format!("angle {x} is not finite"))),
            Angle::Expr(s) => parse_angle(s),
        }
    }

    /// File-name fragment.
    pub fn tag(&self) -> String {
        let raw = match self {
            Angle::Radians(x) => format!("{x}"),
            Angle::Expr(s) => s.replace(' ', ""),
        };
        raw.replace('/', "_over_").replace('-', "m").replace('.', "p").replace('*', "")
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Radians(x) => write!(f, "{x}"),
            Angle::Expr(s) => f.write_str(s),
        }
    }
}

fn parse_angle(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Config(format!("cannot read angle `{s}` (use radians or forms like pi/2, -3pi/4)"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, b.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*');
    let k = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(k * PI / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    /// Central frequency (eV); ignored when `scan` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_p: Option<f64>,
    pub sigma_p: f64,
    /// Pump central frequencies to integrate over (eV).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<Axis>,
}

impl PumpConfig {
    pub fn settings(&self) -> Result<Vec<PumpParams>, CliError> {
        let centres = match (&self.scan, self.omega_p) {
            (Some(ax), _) => {
                ax.validate("pump.scan")?;
                ax.values()
            }
            (None, Some(w)) => vec![w],
            (None, None) => return Err(CliError::Config("pump needs omega_p or scan".into())),
        };
        centres.into_iter().map(|w| PumpParams::new(w, self.sigma_p).map_err(CliError::config)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseMatchConfig {
    pub omega_bar_a: f64,
    pub omega_bar_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crystal: Option<Crystal>,
}

impl PhaseMatchConfig {
    /// Walk-off times given directly, from a crystal, or both (then they
    /// must agree).
    pub fn params(&self) -> Result<PhaseMatchParams, CliError> {
        let (a, b) = (self.omega_bar_a, self.omega_bar_b);
        let pm = match (self.crystal, self.t_a, self.t_b) {
            (Some(c), None, None) => PhaseMatchParams::from_crystal(a, b, c),
            (crystal, Some(t_a), Some(t_b)) => {
                let pm = PhaseMatchParams { omega_bar_a: a, omega_bar_b: b, t_a, t_b, crystal };
                pm.validate().map(|_| pm)
            }
            _ => return Err(CliError::Config("phase_match needs t_a and t_b, or crystal".into())),
        };
        pm.map_err(CliError::config)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsaConfig {
    /// Common grid of both channels (eV).
    pub grid: Axis,
    /// Exchange phases to symmetrize with; the unsymmetrized state is
    /// always included.
    #[serde(default)]
    pub thetas: Vec<Angle>,
    /// Also write the binary format.
    #[serde(default)]
    pub binary: bool,
    /// Leading Schmidt modes written by `schmidt`.
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// Reference Schmidt numbers, unsymmetrized first, then `thetas`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_kappa: Option<Vec<f64>>,
    #[serde(default = "default_kappa_tol")]
    pub kappa_tolerance: f64,
}

fn default_modes() -> usize {
    4
}

fn default_kappa_tol() -> f64 {
    0.05
}

/// Exactly one of `builtin`, `path` or `spec`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SystemSpec>,
}

impl SystemConfig {
    /// Resolves to an inline specification.
    pub fn resolve(&self, base: Option<&Path>) -> Result<SystemSpec, CliError> {
        match (&self.builtin, &self.path, &self.spec) {
            (Some(name), None, None) => match name.as_str() {
                "default" => Ok(SystemSpec::default_system()),
                other => Err(CliError::Config(format!("unknown builtin system `{other}`"))),
            },
            (None, Some(p), None) => {
                let path = match base {
                    Some(b) if Path::new(p).is_relative() => b.join(p),
                    _ => Path::new(p).to_path_buf(),
                };
                load_system(&path)
            }
            (None, None, Some(spec)) => Ok(spec.clone()),
            _ => Err(CliError::Config("system needs exactly one of builtin, path, spec".into())),
        }
    }
}

pub fn load_system(path: &Path) -> Result<SystemSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read system file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("system file {}: {e}", path.display())))
}

pub fn build_system(spec: &SystemSpec) -> Result<ExcitonSystem, CliError> {
    spec.build().map_err(CliError::config)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DephasingConfig {
    /// Pump central frequency axis (eV).
    pub omega_p: Axis,
    /// HOM delay axis (fs).
    pub delay: Axis,
    /// Conjugate delay axis of the dephasing spectrum (fs).
    pub tau: Axis,
    /// Intraband rates to run (eV), one output set each.
    pub gamma_g: Vec<f64>,
    /// Rate for every other pair (eV); the system's own table otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_eg: Option<f64>,
    /// Relative tolerance of the fitted intraband rate.
    #[serde(default = "default_fit_tol")]
    pub fit_tolerance: f64,
}

fn default_fit_tol() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleConfig {
    #[serde(default = "all_targets")]
    pub targets: Vec<String>,
    /// Relative tolerance against the direct pathway computation.
    #[serde(default = "default_cycle_tol")]
    pub tolerance: f64,
}

fn all_targets() -> Vec<String> {
    ["I_TPR", "R_TPR", "I_RP", "R_RP"].iter().map(|s| s.to_string()).collect()
}

fn default_cycle_tol() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Exchange phase of the test state.
    pub theta: Angle,
    /// Detected pairs (ω_a, ω_b) in eV.
    pub points: Vec<[f64; 2]>,
    #[serde(default = "default_verify_tol")]
    pub tolerance: f64,
    /// Residual-integral nodes; the automatic rule otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_nodes: Option<usize>,
    /// Time window in units of ħ/min(γ).
    #[serde(default = "default_window")]
    pub window: f64,
    /// Time steps per ħ/(largest detuning).
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    /// Scales the dipoles seen by the fast path only (negative control).
    #[serde(default = "default_scale")]
    pub fast_path_dipole_scale: f64,
}

fn default_verify_tol() -> f64 {
    1e-3
}

fn default_window() -> f64 {
    12.0
}

fn default_resolution() -> f64 {
    40.0
}

fn default_scale() -> f64 {
    1.0
}

impl RunConfig {
    /// Parses a configuration file or a sidecar (whose `config` table is
    /// the configuration that produced the output).
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let value: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let table = match value.get("config") {
            Some(toml::Value::Table(t)) if value.contains_key("command") => t.clone(),
            _ => value,
        };
        table.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    pub fn section<'a, T>(opt: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        opt.as_ref().ok_or_else(|| CliError::Config(format!("configuration has no [{name}] section")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        let r = |s: &str| Angle::Expr(s.into()).radians().unwrap();
        assert_eq!(r("pi"), PI);
        assert_eq!(r("-pi/2"), -PI / 2.0);
        assert_eq!(r("3pi/4"), 3.0 * PI / 4.0);
        assert_eq!(r("0"), 0.0);
        assert!(Angle::Expr("tau".into()).radians().is_err());
        assert_eq!(Angle::Expr("-pi/2".into()).tag(), "mpi_over_2");
    }

    #[test]
    fn axis_rules() {
        assert_eq!(Axis { min: 1.0, max: 1.0, n: 1 }.values(), vec![1.0]);
        assert!(Axis { min: 2.0, max: 1.0, n: 3 }.validate("x").is_err());
        assert!(Axis { min: 0.0, max: 1.0, n: 0 }.validate("x").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("[pump]\nsigma_p = 1.0\nbogus = 2").is_err());
    }
}
