//! The six subcommands.

use std::f64::consts::PI;
use std::io::Write;

use biphoton::diagrams::{Detection, Diagram, Pathways, ResidualQuadrature};
use biphoton::exciton::{DephasingSpec, ExcitonSystem, Manifold, SystemSpec};
use biphoton::io::{write_jsa_binary, write_jsa_csv};
use biphoton::oracle::{fourth_order_amplitudes, single_photon_amplitude, OracleConfig};
use biphoton::photon_state::{
    build_jsa_pump_scan, kernel_weights, normalize, schmidt_decompose, schmidt_number, schmidt_weights, symmetrize, Jsa,
};
use biphoton::signals::{
    coincidence_at_phase, coincidence_vs_delay, dephasing_spectrum, direct_component, fit_exponential,
    protocol_residual, run_cycling, scan_total_coincidence, Component, CyclingProtocol, ProtocolSet, SignalSource,
};
use biphoton::C64;

use crate::config::{build_system, Angle, RunConfig};
use crate::output::{notes, num, Output};
use crate::{CliError, Command, Resolved};

pub fn execute(r: &Resolved) -> Result<(), CliError> {
    let mut out = Output::new(&r.out, r.command.name(), r.preset.as_deref(), &r.config)?;
    let result = match r.command {
        Command::Jsa => jsa(&r.config, &mut out, false),
        Command::Schmidt => jsa(&r.config, &mut out, true),
        Command::Dephasing => dephasing(&r.config, &mut out),
        Command::Spectra2d => spectra2d(&r.config, &mut out),
        Command::Cycle => cycle(&r.config, &mut out),
        Command::Verify => verify(&r.config, &mut out),
    };
    println!("wrote {} file(s) to {}", out.written().len(), r.out.display());
    result
}

fn protocol_set(cfg: &RunConfig) -> Result<ProtocolSet, CliError> {
    ProtocolSet::parse(cfg.protocols.as_deref().unwrap_or("default")).map_err(CliError::config)
}

fn system_spec(cfg: &RunConfig) -> Result<SystemSpec, CliError> {
    let s = RunConfig::section(&cfg.system, "system")?;
    s.spec.clone().ok_or_else(|| CliError::Config("system was not resolved".into()))
}

/// Normalized, unsymmetrized amplitude φ.
pub fn bare_jsa(cfg: &RunConfig) -> Result<Jsa, CliError> {
    let pump = RunConfig::section(&cfg.pump, "pump")?;
    let pm = RunConfig::section(&cfg.phase_match, "phase_match")?.params()?;
    let grid = RunConfig::section(&cfg.jsa, "jsa")?.grid.grid("jsa.grid")?;
    Ok(normalize(&build_jsa_pump_scan(grid, grid, &pump.settings()?, &pm))?)
}

/// φ followed by Φ_θ (normalized) for every configured θ.
pub fn states(cfg: &RunConfig) -> Result<Vec<(String, Jsa)>, CliError> {
    let phi = bare_jsa(cfg)?;
    let mut v = vec![("unsym".to_string(), phi.clone())];
    for a in &RunConfig::section(&cfg.jsa, "jsa")?.thetas {
        v.push((format!("theta_{}", a.tag()), normalize(&symmetrize(&phi, a.radians()?)?)?));
    }
    Ok(v)
}

fn state_notes(label: &str, cfg: &RunConfig) -> toml::Table {
    let theta = cfg
        .jsa
        .as_ref()
        .and_then(|j| j.thetas.iter().find(|a| format!("theta_{}", a.tag()) == label))
        .map(Angle::to_string)
        .unwrap_or_else(|| "unsymmetrized".into());
    notes([("exchange_phase", theta.into())])
}

fn jsa(cfg: &RunConfig, out: &mut Output, modes: bool) -> Result<(), CliError> {
    let jcfg = RunConfig::section(&cfg.jsa, "jsa")?;
    let states = states(cfg)?;
    let mut kappas = Vec::new();
    let mut weight_rows = Vec::new();
    for (label, jsa) in &states {
        let weights = if modes {
            let s = schmidt_decompose(jsa)?;
            let k = jcfg.modes.min(s.weights.len());
            for (side, m, grid) in [("a", &s.modes_a, jsa.grid_a), ("b", &s.modes_b, jsa.grid_b)] {
                let rows = (0..grid.n_points).flat_map(|i| {
                    (0..k).map(move |n| {
                        let z = m[(i, n)];
                        format!("{},{},{},{}", num(grid.value(i)), n, num(z.re), num(z.im))
                    })
                });
                out.csv(
                    &format!("schmidt_modes_{side}_{label}.csv"),
                    "omega,mode,value_re,value_im",
                    rows.collect::<Vec<_>>(),
                    state_notes(label, cfg),
                )?;
            }
            s.weights
        } else {
            let body = |w: &mut dyn Write| write_jsa_csv(jsa, w).map_err(std::io::Error::other);
            out.file(&format!("jsa_{label}.csv"), state_notes(label, cfg), body)?;
            if jcfg.binary {
                let body = |w: &mut dyn Write| write_jsa_binary(jsa, w).map_err(std::io::Error::other);
                out.file(&format!("jsa_{label}.bjsa"), state_notes(label, cfg), body)?;
            }
            schmidt_weights(jsa)?
        };
        let kappa = schmidt_number(&weights);
        let kernel = if modes { Some(schmidt_number(&kernel_weights(jsa)?.0)) } else { None };
        for (n, p) in weights.iter().enumerate().take(64) {
            weight_rows.push(format!("{label},{n},{}", num(*p)));
        }
        kappas.push((label.clone(), kappa, kernel));
    }
    out.csv("schmidt_weights.csv", "state,mode,weight", weight_rows, toml::Table::new())?;

    let expected = match &jcfg.expected_kappa {
        Some(e) if e.len() != kappas.len() => {
            return Err(CliError::Config(format!("expected_kappa has {} entries for {} states", e.len(), kappas.len())))
        }
        e => e.clone(),
    };
    let mut breaches = Vec::new();
    let mut rows = Vec::new();
    println!("{:<24} {:>10} {:>10}", "state", "kappa", "expected");
    for (k, (label, kappa, kernel)) in kappas.iter().enumerate() {
        let exp = expected.as_ref().map(|e| e[k]);
        let mut row = format!("{label},{}", num(*kappa));
        if let Some(kk) = kernel {
            row.push_str(&format!(",{}", num(*kk)));
        }
        if let Some(x) = exp {
            let dev = kappa - x;
            row.push_str(&format!(",{},{}", num(x), num(dev)));
            if dev.abs() > jcfg.kappa_tolerance {
                breaches.push(format!("{label}: kappa {kappa:.4} vs {x} (tolerance {})", jcfg.kappa_tolerance));
            }
        }
        println!("{label:<24} {kappa:>10.4} {:>10}", exp.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into()));
        rows.push(row);
    }
    let mut header = String::from("state,kappa");
    if modes {
        header.push_str(",kappa_kernel");
    }
    if expected.is_some() {
        header.push_str(",expected,deviation");
    }
    out.csv("schmidt_numbers.csv", &header, rows, toml::Table::new())?;
    if breaches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(breaches.join("; ")))
    }
}

/// The system with intraband rate `gamma_g` on every ground-manifold pair
/// and, optionally, `gamma_eg` everywhere else.
pub fn with_rates(spec: &SystemSpec, gamma_g: f64, gamma_eg: Option<f64>) -> SystemSpec {
    let mut s = spec.clone();
    if let Some(r) = gamma_eg {
        s.gamma_default = r;
        s.dephasing.clear();
    }
    let gs: Vec<String> = s.levels.iter().filter(|l| l.manifold == Manifold::G).map(|l| l.label.clone()).collect();
    for a in &gs {
        for b in &gs {
            s.dephasing.push(DephasingSpec { a: a.clone(), b: b.clone(), gamma: gamma_g });
        }
    }
    s
}

fn dephasing(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let d = RunConfig::section(&cfg.dephasing, "dephasing")?;
    d.omega_p.validate("dephasing.omega_p")?;
    d.delay.validate("dephasing.delay")?;
    d.tau.validate("dephasing.tau")?;
    if d.gamma_g.is_empty() || d.gamma_g.iter().any(|g| !(*g > 0.0)) {
        return Err(CliError::Config("dephasing.gamma_g needs positive rates".into()));
    }
    let spec = system_spec(cfg)?;
    let (wp, delay, tau) = (d.omega_p.values(), d.delay.values(), d.tau.values());
    let mut fits = Vec::new();
    let mut breaches = Vec::new();
    for (k, &gg) in d.gamma_g.iter().enumerate() {
        let sys = build_system(&with_rates(&spec, gg, d.gamma_eg))?;
        let scan = scan_total_coincidence(&sys, &wp, &delay);
        let tag = format!("g{k}");
        let run_notes = || notes([("gamma_g", gg.into())]);
        let rows = (0..wp.len())
            .flat_map(|i| (0..delay.len()).map(move |t| (i, t)))
            .map(|(i, t)| format!("{},{},{}", num(wp[i]), num(delay[t]), num(scan.at(i, t))));
        out.csv(&format!("coincidence_{tag}.csv"), "omega_p,T,value_re", rows.collect::<Vec<_>>(), run_notes())?;
        let ct = coincidence_vs_delay(&scan);
        let rows = delay.iter().zip(&ct).map(|(t, c)| format!("{},{}", num(*t), num(*c)));
        out.csv(&format!("coincidence_vs_delay_{tag}.csv"), "T,value_re", rows.collect::<Vec<_>>(), run_notes())?;
        let s = dephasing_spectrum(&scan, &tau)?;
        let nt = delay.len();
        let rows = s
            .iter()
            .enumerate()
            .map(|(k, z)| format!("{},{},{},{}", num(tau[k / nt]), num(delay[k % nt]), num(z.re), num(z.im)));
        out.csv(
            &format!("dephasing_spectrum_{tag}.csv"),
            "tau,T,value_re,value_im",
            rows.collect::<Vec<_>>(),
            run_notes(),
        )?;
        if delay.len() >= 4 {
            let fit = fit_exponential(&delay, &ct)?;
            let rel = (fit.rate - gg).abs() / gg;
            println!("gamma_g = {gg:e} eV: fitted {:.6e} eV (relative error {rel:.2e})", fit.rate);
            if rel > d.fit_tolerance {
                breaches.push(format!("gamma_g {gg:e}: fitted {:e} (relative error {rel:.3e})", fit.rate));
            }
            fits.push((gg, fit, rel));
        } else {
            println!("gamma_g = {gg:e} eV: fewer than 4 delay samples, fit skipped");
        }
    }
    if !fits.is_empty() {
        let rows: Vec<String> = fits
            .iter()
            .map(|(gg, f, rel)| {
                let ratio = f.rate / fits[0].1.rate;
                format!(
                    "{},{},{},{},{},{},{}",
                    num(*gg),
                    num(f.rate),
                    num(*rel),
                    num(ratio),
                    num(f.offset),
                    num(f.amplitude),
                    num(f.rms)
                )
            })
            .collect();
        if fits.len() > 1 {
            println!(
                "fitted rate ratios to the first run: {:?}",
                fits.iter().map(|f| f.1.rate / fits[0].1.rate).collect::<Vec<_>>()
            );
        }
        let n = notes([("model", "C_T = offset - amplitude * exp(-rate T / hbar)".into())]);
        out.csv("envelope_fit.csv", "gamma_g,fitted_rate,relative_error,rate_ratio,offset,amplitude,rms", rows, n)?;
    }
    if breaches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(breaches.join("; ")))
    }
}

fn detect_points(cfg: &RunConfig) -> Result<(biphoton::photon_state::FrequencyGrid, Vec<(f64, f64)>), CliError> {
    let g = RunConfig::section(&cfg.detect, "detect")?.grid("detect")?;
    Ok((g, SignalSource::grid_points(&g, &g)))
}

fn map_rows(points: &[(f64, f64)], values: &[f64]) -> Vec<String> {
    points.iter().zip(values).map(|(&(a, b), v)| format!("{},{},{}", num(a), num(b), num(*v))).collect()
}

/// C_0(π) and the four cycling panels over the detected grid.
pub struct Panels {
    pub points: Vec<(f64, f64)>,
    pub c0_pi: Vec<f64>,
    pub panels: Vec<(Component, Vec<f64>)>,
}

pub fn compute_panels(
    sys: &ExcitonSystem,
    phi: &Jsa,
    points: Vec<(f64, f64)>,
    set: ProtocolSet,
) -> Result<Panels, CliError> {
    let mut src = SignalSource::new(sys, phi, points);
    let c0_pi: Vec<f64> = src.kernels(0.0)?.iter().map(|pp| coincidence_at_phase(pp, 0.0, PI)).collect();
    let mut panels = Vec::new();
    for c in Component::ALL {
        panels.push((c, run_cycling(&CyclingProtocol::builtin(c, set), &mut src)?));
    }
    Ok(Panels { points: src.points.clone(), c0_pi, panels })
}

impl Panels {
    pub fn panel(&self, c: Component) -> &[f64] {
        &self.panels.iter().find(|(k, _)| *k == c).expect("all components computed").1
    }

    /// Off-diagonal max |C_0(π) − (I_TPR + I_RP)| relative to max |C_0(π)|.
    pub fn panel_sum_residual(&self) -> f64 {
        let (it, ir) = (self.panel(Component::ITpr), self.panel(Component::IRp));
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (k, &(a, b)) in self.points.iter().enumerate() {
            if a == b {
                continue;
            }
            scale = scale.max(self.c0_pi[k].abs());
            worst = worst.max((self.c0_pi[k] - it[k] - ir[k]).abs());
        }
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

fn spectra2d(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let set = protocol_set(cfg)?;
    let sys = build_system(&system_spec(cfg)?)?;
    let phi = bare_jsa(cfg)?;
    let (_, points) = detect_points(cfg)?;
    let p = compute_panels(&sys, &phi, points, set)?;
    let set_name = cfg.protocols.clone().unwrap_or_else(|| "default".into());
    out.csv(
        "c0_pi.csv",
        "omega_a,omega_b,value_re",
        map_rows(&p.points, &p.c0_pi),
        notes([("signal", "C_0(pi)".into())]),
    )?;
    for (c, v) in &p.panels {
        let n = notes([("signal", c.label().into()), ("protocols", set_name.clone().into())]);
        out.csv(&format!("{}.csv", c.label()), "omega_a,omega_b,value_re", map_rows(&p.points, v), n)?;
    }
    let residual = p.panel_sum_residual();
    println!("panel sum C_0(pi) - (I_TPR + I_RP), off-diagonal, relative: {residual:.3e}");
    let n = notes([("quantity", "off-diagonal max |C_0(pi) - I_TPR - I_RP| / max |C_0(pi)|".into())]);
    out.csv("panel_sum.csv", "quantity,value", vec![format!("panel_sum_residual,{}", num(residual))], n)
}

fn cycle(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let set = protocol_set(cfg)?;
    let c = RunConfig::section(&cfg.cycle, "cycle")?;
    let targets: Vec<Component> = c.targets.iter().map(|t| Component::parse(t)).collect::<Result<_, _>>()?;
    let sys = build_system(&system_spec(cfg)?)?;
    let phi = bare_jsa(cfg)?;
    let (_, points) = detect_points(cfg)?;
    let mut src = SignalSource::new(&sys, &phi, points);
    let mut rows = Vec::new();
    let mut breaches = Vec::new();
    for t in targets {
        let protocol = CyclingProtocol::builtin(t, set);
        let got = run_cycling(&protocol, &mut src)?;
        let want = direct_component(t, &mut src)?;
        let residual = protocol_residual(&src, &got, &want);
        let pass = residual <= c.tolerance;
        println!("{:<6} residual {residual:.3e} ({})", t.label(), if pass { "ok" } else { "MISMATCH" });
        out.csv(
            &format!("cycle_{}.csv", t.label()),
            "omega_a,omega_b,value_re",
            map_rows(&src.points, &got),
            notes([("signal", "protocol".into())]),
        )?;
        out.csv(
            &format!("direct_{}.csv", t.label()),
            "omega_a,omega_b,value_re",
            map_rows(&src.points, &want),
            notes([("signal", "direct pathway".into())]),
        )?;
        rows.push(format!(
            "{},{},{},{}",
            t.label(),
            num(residual),
            num(c.tolerance),
            if pass { "ok" } else { "mismatch" }
        ));
        if !pass {
            breaches.push(format!("{} residual {residual:.3e}", t.label()));
        }
    }
    out.csv("cycle_report.csv", "target,residual,tolerance,status", rows, toml::Table::new())?;
    if breaches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!("protocol mismatch: {}", breaches.join("; "))))
    }
}

fn rel_err(oracle: C64, fast: C64) -> f64 {
    let d = (oracle - fast).norm();
    if fast.norm() > 0.0 {
        d / fast.norm()
    } else {
        d
    }
}

fn verify(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let v = RunConfig::section(&cfg.verify, "verify")?;
    if v.points.is_empty() {
        return Err(CliError::Config("verify.points is empty".into()));
    }
    let sys = build_system(&system_spec(cfg)?)?;
    let jsa = normalize(&symmetrize(&bare_jsa(cfg)?, v.theta.radians()?)?)?;
    let mut ocfg = OracleConfig::new(&jsa, &sys);
    if let Some(n) = v.quad_nodes {
        if n < 2 {
            return Err(CliError::Config("verify.quad_nodes must be >= 2".into()));
        }
        ocfg.quad = ResidualQuadrature::uniform(jsa.grid_a.omega_min, jsa.grid_a.omega_max, n);
    }
    ocfg.window = v.window;
    ocfg.resolution = v.resolution;
    let fast_sys = sys.with_dipoles_scaled(v.fast_path_dipole_scale);
    let fast = Pathways::with_quadrature(&fast_sys, &jsa, ocfg.quad.clone())?;
    let mut rows = Vec::new();
    let mut worst = [0f64; 4];
    let mut grid_note = None;
    let mut completeness: f64 = 0.0;
    for (k, &[wa, wb]) in v.points.iter().enumerate() {
        let (o, grid) = fourth_order_amplitudes(&sys, &jsa, wa, wb, &ocfg)?;
        grid_note.get_or_insert(grid);
        if o.total.norm() > 0.0 {
            completeness = completeness.max((o.total - (o.d1 + o.d2 + o.d3)).norm() / o.total.norm());
        }
        let s_oracle = single_photon_amplitude(&sys, &jsa, wa, wa + wb, &ocfg)?;
        let pairs = [
            (Diagram::D1, o.d1, fast.diagram(Diagram::D1, Detection::Coincidence, wa, wb)?),
            (Diagram::D2, o.d2, fast.diagram(Diagram::D2, Detection::Coincidence, wa, wb)?),
            (Diagram::D3, o.d3, fast.diagram(Diagram::D3, Detection::Coincidence, wa, wb)?),
            (Diagram::S, s_oracle, fast.diagram(Diagram::S, Detection::Intensity, wa, wb)?),
        ];
        for (i, (d, oz, fz)) in pairs.into_iter().enumerate() {
            let e = rel_err(oz, fz);
            worst[i] = worst[i].max(e);
            rows.push(format!(
                "{k},{},{},{},{},{},{},{},{}",
                d.name(),
                num(wa),
                num(wb),
                num(fz.re),
                num(fz.im),
                num(oz.re),
                num(oz.im),
                num(e)
            ));
        }
    }
    let labels = ["d1", "d2", "d3", "s"];
    for (l, w) in labels.iter().zip(worst) {
        println!("{l:<3} max relative residual {w:.3e} ({})", if w <= v.tolerance { "ok" } else { "BREACH" });
    }
    println!("oracle completeness |total - (d1+d2+d3)| / |total| = {completeness:.3e}");
    let mut n = toml::Table::new();
    if let Some(g) = grid_note {
        n.insert("oracle_t_max_fs".into(), g.t_max.into());
        n.insert("oracle_steps".into(), (g.n_steps as i64).into());
    }
    n.insert("quad_nodes".into(), (ocfg.quad.nodes.len() as i64).into());
    n.insert("completeness".into(), completeness.into());
    out.csv("verify.csv", "point,diagram,omega_a,omega_b,fast_re,fast_im,oracle_re,oracle_im,relative_error", rows, n)?;
    let breaches: Vec<String> = labels
        .iter()
        .zip(worst)
        .filter(|(_, w)| !(*w <= v.tolerance))
        .map(|(l, w)| format!("{l} residual {w:.3e} > {}", v.tolerance))
        .collect();
    if breaches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(breaches.join("; ")))
    }
}
