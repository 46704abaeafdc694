//! Configuration ingestion, pipeline orchestration, and deterministic
//! artifact emission.
//!
//! The binary exposes four subcommands, all driven by a single TOML config:
//!
//! - `solve`: per-angle trace/tension pipeline; writes `fields.csv` and
//!   `summary.json`.
//! - `kretschmann`: blowup-rate analysis; writes `ktilde.csv` and
//!   `blowup.json`.
//! - `kernel`: representation-kernel boundedness and equivalence checks;
//!   writes `kernel.json`.
//! - `validate`: the full invariant suite; writes `report.json`.
//!
//! Exit codes: `0` success, `1` pipeline or check failure, `2` config
//! error. Identical configs produce byte-identical CSV output: the
//! marching order is fixed, angles run sequentially, and floats are
//! printed as shortest round-trip decimals.

use crate::curvature;
use crate::goursat::SolveOptions;
use crate::grid::{CharGrid, Rect};
use crate::iface;
use crate::pulse::{self, PulseData, PulseProfile, SingularityGeometry, TracefreeSym2};
use crate::riemann;
use crate::validate::{self, ValidateParams};
use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "charfront", about = "Characteristic-front solver pipelines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run the trace/tension field pipeline and write field tables.
    Solve(RunArgs),
    /// Fit the curvature blowup rate against its predicted exponent.
    Kretschmann(RunArgs),
    /// Check representation-kernel boundedness and solver equivalence.
    Kernel(RunArgs),
    /// Run the full invariant suite.
    Validate(RunArgs),
}

#[derive(clap::Args)]
pub struct RunArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub pulse: PulseConfig,
    /// Tracefree polarization matrix per angle; at least one.
    pub angles: Vec<AngleConfig>,
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    /// One of "zero", "linear", "bump", "poly", "table".
    pub kind: String,
    /// Bump support width (kind = "bump").
    pub delta1: Option<f64>,
    /// Polynomial coefficients: `psi(v) = sum c_k v^(k+1)` (kind = "poly").
    pub coeffs: Option<Vec<f64>>,
    /// Uniformly spaced `psi` samples on `[0, 1]`, at least 5, starting at
    /// `psi(0) = 0` (kind = "table").
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub v_max: f64,
    /// Defaults to just short of the singular locus (or 1 for zero energy).
    pub eta_max: Option<f64>,
    pub nv: usize,
    pub neta: usize,
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub goursat_tol: f64,
    pub max_iter: usize,
    pub f_min: f64,
    pub sigma_min: f64,
    pub sigma_fit_max: f64,
    pub window: usize,
    pub eigen_margin: f64,
    /// Injection hook for the extracted shear coefficient (testing the
    /// unit-eigenvalue failure mode).
    pub sigma_prime_override: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let p = ValidateParams::default();
        Tolerances {
            goursat_tol: p.goursat_tol,
            max_iter: p.max_iter,
            f_min: p.f_min,
            sigma_min: p.sigma_min,
            sigma_fit_max: p.sigma_fit_max,
            window: p.window,
            eigen_margin: p.eigen_margin,
            sigma_prime_override: None,
        }
    }
}

/// Failures before any pipeline runs: unreadable, unparsable, or invalid
/// configuration. Mapped to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = toml::from_str(&text)?;
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.angles.is_empty() {
            return bad("at least one angle is required".into());
        }
        if self.grid.nv < 2 || self.grid.neta < 2 {
            return bad(format!(
                "grid counts must be at least 2 (got nv = {}, neta = {})",
                self.grid.nv, self.grid.neta
            ));
        }
        if !(self.grid.v_max > 0.0 && self.grid.v_max <= 1.0) {
            return bad(format!("v_max must lie in (0, 1], got {}", self.grid.v_max));
        }
        if let Some(e) = self.grid.eta_max {
            if e <= 0.0 {
                return bad(format!("eta_max must be positive, got {e}"));
            }
        }
        let t = &self.tolerances;
        for (name, value) in [
            ("goursat_tol", t.goursat_tol),
            ("f_min", t.f_min),
            ("sigma_min", t.sigma_min),
            ("sigma_fit_max", t.sigma_fit_max),
            ("eigen_margin", t.eigen_margin),
        ] {
            if !(value > 0.0) {
                return bad(format!("tolerance {name} must be positive, got {value}"));
            }
        }
        if t.sigma_min >= t.sigma_fit_max {
            return bad(format!(
                "sigma_min ({}) must be below sigma_fit_max ({})",
                t.sigma_min, t.sigma_fit_max
            ));
        }
        if t.window < 3 {
            return bad(format!("window must be at least 3, got {}", t.window));
        }
        if t.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        match self.pulse.kind.as_str() {
            "zero" | "linear" => {}
            "bump" => {
                let d = self
                    .pulse
                    .delta1
                    .ok_or_else(|| ConfigError::Invalid("bump pulse requires delta1".into()))?;
                if !(d > 0.0 && d <= 1.0) {
                    return bad(format!("delta1 must lie in (0, 1], got {d}"));
                }
            }
            "poly" => {
                if self.pulse.coeffs.as_deref().map_or(true, |c| c.is_empty()) {
                    return bad("poly pulse requires nonempty coeffs".into());
                }
            }
            "table" => {
                let s = self.pulse.samples.as_deref().unwrap_or(&[]);
                if s.len() < 5 {
                    return bad("table pulse requires at least 5 samples".into());
                }
                if s[0].abs() > 1e-12 {
                    return bad("table pulse must start at psi(0) = 0".into());
                }
            }
            other => return bad(format!("unknown pulse kind {other:?}")),
        }
        Ok(())
    }

    pub fn build_profile(&self) -> PulseProfile {
        match self.pulse.kind.as_str() {
            "zero" => PulseProfile::zero(),
            "linear" => PulseProfile::linear(),
            "bump" => PulseProfile::normalized_bump(self.pulse.delta1.unwrap()),
            "poly" => {
                let coeffs = self.pulse.coeffs.clone().unwrap();
                let c2 = coeffs.clone();
                PulseProfile::new(
                    move |v| {
                        coeffs
                            .iter()
                            .enumerate()
                            .map(|(k, c)| c * v.powi(k as i32 + 1))
                            .sum()
                    },
                    move |v| {
                        c2.iter()
                            .enumerate()
                            .map(|(k, c)| c * (k as f64 + 1.0) * v.powi(k as i32))
                            .sum()
                    },
                    None,
                )
            }
            "table" => PulseProfile::from_table(self.pulse.samples.clone().unwrap()),
            _ => unreachable!("kind validated in check()"),
        }
    }

    pub fn build_data(&self) -> PulseData {
        let angles = self
            .angles
            .iter()
            .map(|a| TracefreeSym2::new(a.a, a.b))
            .collect();
        PulseData::new(self.build_profile(), angles)
    }

    /// The characteristic rectangle. With no explicit `eta_max` the grid
    /// stops half a `sigma_min` short of the singular locus; for zero
    /// energy (no locus) it defaults to height 1.
    pub fn build_grid(&self, geom: &SingularityGeometry) -> CharGrid {
        let eta_max = self.grid.eta_max.unwrap_or_else(|| {
            geom.gamma(self.grid.v_max)
                .map(|g| g - 0.5 * self.tolerances.sigma_min)
                .unwrap_or(1.0)
        });
        CharGrid::new(
            Rect::new(0.0, self.grid.v_max, 0.0, eta_max),
            self.grid.nv,
            self.grid.neta,
        )
    }

    pub fn solve_options(&self) -> SolveOptions<'static> {
        SolveOptions {
            tol: self.tolerances.goursat_tol,
            max_iter: self.tolerances.max_iter,
            ..SolveOptions::default()
        }
    }

    pub fn validate_params(&self) -> ValidateParams {
        let t = &self.tolerances;
        ValidateParams {
            goursat_tol: t.goursat_tol,
            max_iter: t.max_iter,
            f_min: t.f_min,
            sigma_min: t.sigma_min,
            sigma_fit_max: t.sigma_fit_max,
            window: t.window,
            eigen_margin: t.eigen_margin,
            sigma_prime_override: t.sigma_prime_override,
        }
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Run the CLI and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (args, runner): (&RunArgs, fn(&RunConfig, &Path) -> Result<i32, String>) =
        match &cli.command {
            Command::Solve(a) => (a, cmd_solve),
            Command::Kretschmann(a) => (a, cmd_kretschmann),
            Command::Kernel(a) => (a, cmd_kernel),
            Command::Validate(a) => (a, cmd_validate),
        };
    let config = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create output directory: {e}");
        return 2;
    }
    match runner(&config, &args.out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| format!("cannot write {name}: {e}"))
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    write_file(dir, name, &(text + "\n"))
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct AngleSummary {
    theta_index: usize,
    angle: [f64; 2],
    max_detk_err: f64,
    metric_symmetry_defect: f64,
    sup_fprime: f64,
    sup_hprime: f64,
    sup_omega: f64,
    masked_nodes: usize,
}

#[derive(serde::Serialize)]
struct SolveReport {
    angles: Vec<AngleSummary>,
}

pub fn cmd_solve(config: &RunConfig, out: &Path) -> Result<i32, String> {
    let data = config.build_data();
    let opts = config.solve_options();
    let f_min = config.tolerances.f_min;

    let mut csv = String::from("v,eta,theta_index,f,h,Fprime,Hprime,omega,digamma,sigma,detk_err\n");
    let mut summaries = Vec::new();

    for theta in 0..data.n_angles() {
        let t0 = data.angles[theta];
        let geom = pulse::geometry(&data, theta);
        let grid = config.build_grid(&geom);
        let mask = |v: f64, eta: f64| geom.digamma(v, eta) >= f_min;

        let ft = |v: f64, eta: f64| -4.0 * geom.energy(v) / geom.digamma(v, eta);
        let h = |v: f64, eta: f64| -8.0 * eta * geom.energy_integral(v) / geom.digamma(v, eta);
        let f = |v: f64, eta: f64| eta * eta * ft(v, eta);
        let dpsi = |v: f64| data.profile.dpsi(v);

        let (fp, hp, _) = iface::solve_FH(&ft, &h, &dpsi, &grid, Some(&mask), &opts)
            .map_err(|e| format!("angle {theta}: {e}"))?;
        let metric = iface::reconstruct_metric(&f, &fp, &t0, &grid, Some(&mask))
            .map_err(|e| format!("angle {theta}: {e}"))?;
        let omega = iface::solve_omega(&geom, &fp, &hp, &t0, &grid, f_min);

        let mut max_detk_err: f64 = 0.0;
        let mut masked = 0usize;
        for i in 0..grid.nv {
            let v = grid.v(i);
            let sigma_line = geom.gamma(v).unwrap_or(f64::INFINITY);
            for j in 0..grid.neta {
                let eta = grid.eta(j);
                let dg = geom.digamma(v, eta);
                if dg < f_min {
                    masked += 1;
                    continue;
                }
                let exact = dg * dg / 16.0;
                let detk_err = (metric.det(i, j) - exact).abs();
                max_detk_err = max_detk_err.max(detk_err);
                let sigma = sigma_line - eta;
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    v,
                    eta,
                    theta,
                    f(v, eta),
                    h(v, eta),
                    fp[(i, j)],
                    hp[(i, j)],
                    omega[(i, j)],
                    dg,
                    sigma,
                    detk_err
                )
                .unwrap();
            }
        }

        let live = |i: usize, j: usize| mask(grid.v(i), grid.eta(j));
        summaries.push(AngleSummary {
            theta_index: theta,
            angle: [t0.a, t0.b],
            max_detk_err,
            metric_symmetry_defect: metric.symmetry_defect,
            sup_fprime: fp.max_abs_where(live),
            sup_hprime: hp.max_abs_where(live),
            sup_omega: omega.max_abs_where(live),
            masked_nodes: masked,
        });
    }

    write_file(out, "fields.csv", &csv)?;
    write_json(out, "summary.json", &SolveReport { angles: summaries })?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// kretschmann
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct AngleBlowup {
    theta_index: usize,
    angle: [f64; 2],
    sigma_prime: f64,
    tr_sigma_sq: f64,
    fit_residual: f64,
    p_fit: f64,
    p_predicted: f64,
    r_squared: f64,
    fit_samples: usize,
    omega_log_coefficient: f64,
    omega_log_predicted: f64,
    eigenvalue_margin: f64,
    criterion_pass: bool,
}

#[derive(serde::Serialize)]
struct BlowupReport {
    angles: Vec<AngleBlowup>,
    all_pass: bool,
}

pub fn cmd_kretschmann(config: &RunConfig, out: &Path) -> Result<i32, String> {
    let data = config.build_data();
    let opts = config.solve_options();
    let t = &config.tolerances;
    let live: Vec<usize> = (0..data.n_angles())
        .filter(|&th| pulse::geometry(&data, th).energy_integral(config.grid.v_max) > 0.0)
        .collect();
    if live.is_empty() {
        return Err("zero energy: no singular locus to analyze".into());
    }

    let mut csv = String::from("theta_index,log_digamma,log_ktilde\n");
    let mut angles = Vec::new();
    let mut all_pass = true;

    for &theta in &live {
        let t0 = data.angles[theta];
        let geom = pulse::geometry(&data, theta);
        let grid = config.build_grid(&geom);
        let mask = |v: f64, eta: f64| geom.digamma(v, eta) >= t.f_min;

        let ft = |v: f64, eta: f64| -4.0 * geom.energy(v) / geom.digamma(v, eta);
        let h = |v: f64, eta: f64| -8.0 * eta * geom.energy_integral(v) / geom.digamma(v, eta);
        let dpsi = |v: f64| data.profile.dpsi(v);
        let (fp, hp, _) = iface::solve_FH(&ft, &h, &dpsi, &grid, Some(&mask), &opts)
            .map_err(|e| format!("angle {theta}: {e}"))?;

        let line = grid.nv - 1;
        let sf = iface::extract_sigma(
            &hp,
            &geom,
            &grid,
            &[line],
            t.window,
            t.sigma_min,
            t.sigma_fit_max,
            t0,
        )
        .map_err(|e| format!("angle {theta}: {e}"))?;
        let sigma_prime = t.sigma_prime_override.unwrap_or(sf.sigma_prime[0]);
        let tr_sigma_sq = sigma_prime * sigma_prime * t0.norm_sq();

        let omega = iface::solve_omega(&geom, &fp, &hp, &t0, &grid, t.f_min);
        let profile = curvature::blowup_profile(
            &geom,
            &omega,
            sigma_prime,
            &t0,
            &grid,
            line,
            t.sigma_min,
            t.sigma_fit_max,
        );
        if profile.log_digamma.len() < 2 {
            return Err(format!(
                "angle {theta}: only {} samples in the fit window",
                profile.log_digamma.len()
            ));
        }
        let fit = curvature::fit_blowup(&profile);
        let (omega_coeff, _, _) = curvature::omega_log_coefficient(
            &omega,
            &geom,
            &grid,
            line,
            t.sigma_min,
            t.sigma_fit_max,
        )
        .ok_or_else(|| format!("angle {theta}: omega fit window empty"))?;

        let (margin, margin_ok) =
            curvature::eigenvalue_criterion(&[sigma_prime], t0.norm_sq(), t.eigen_margin);

        for (ld, lk) in profile.log_digamma.iter().zip(&profile.log_ktilde) {
            writeln!(csv, "{},{},{}", theta, ld, lk).unwrap();
        }

        let p_predicted = curvature::predicted_blowup_exponent(tr_sigma_sq);
        let pass = margin_ok
            && fit.exponent >= 2.85
            && (fit.exponent - p_predicted).abs() / p_predicted <= 0.05;
        all_pass &= pass;
        angles.push(AngleBlowup {
            theta_index: theta,
            angle: [t0.a, t0.b],
            sigma_prime,
            tr_sigma_sq,
            fit_residual: sf.fit_residual[0],
            p_fit: fit.exponent,
            p_predicted,
            r_squared: fit.r_squared,
            fit_samples: fit.samples,
            omega_log_coefficient: omega_coeff,
            omega_log_predicted: curvature::predicted_omega_log_coefficient(tr_sigma_sq),
            eigenvalue_margin: margin,
            criterion_pass: pass,
        });
    }

    write_file(out, "ktilde.csv", &csv)?;
    write_json(out, "blowup.json", &BlowupReport { angles, all_pass })?;
    // A failed blowup criterion is a finding, not a pipeline error.
    Ok(0)
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct KernelReport {
    monitor: f64,
    monitor_coarse: f64,
    monitor_drift: f64,
    equivalence_error: f64,
    equivalence_nodes: Vec<[usize; 2]>,
}

pub fn cmd_kernel(config: &RunConfig, out: &Path) -> Result<i32, String> {
    let data = config.build_data();
    let opts = config.solve_options();
    let t = &config.tolerances;
    let geom = pulse::geometry(&data, 0);
    let grid = config.build_grid(&geom);
    let mask = |v: f64, eta: f64| geom.digamma(v, eta) >= t.f_min;

    // Kernel boundedness monitor at the configured grid and at half
    // resolution, on matching source lattices.
    let stride = ((grid.nv - 1) / 8).max(1);
    let monitor = riemann::pulse_kernel_monitor(&geom, &grid, stride, t.f_min, &opts)
        .map_err(|e| e.to_string())?;
    let coarse = CharGrid::new(
        grid.rect,
        (grid.nv - 1) / 2 + 1,
        (grid.neta - 1) / 2 + 1,
    );
    let stride_c = ((coarse.nv - 1) / 8).max(1);
    let monitor_coarse = riemann::pulse_kernel_monitor(&geom, &coarse, stride_c, t.f_min, &opts)
        .map_err(|e| e.to_string())?;
    let drift = if monitor == 0.0 && monitor_coarse == 0.0 {
        0.0
    } else {
        (monitor - monitor_coarse).abs() / monitor_coarse.abs().max(monitor.abs())
    };

    // Representation-vs-direct equivalence at a few interior nodes.
    let ft = |v: f64, eta: f64| -4.0 * geom.energy(v) / geom.digamma(v, eta);
    let h = |v: f64, eta: f64| -8.0 * eta * geom.energy_integral(v) / geom.digamma(v, eta);
    let dpsi = |v: f64| data.profile.dpsi(v);
    let (_, hp, ftp) = iface::solve_FH(&ft, &h, &dpsi, &grid, Some(&mask), &opts)
        .map_err(|e| e.to_string())?;
    let (nv, neta) = (grid.nv, grid.neta);
    let candidates = [
        (nv - 1, neta - 1),
        (nv / 2, neta - 1),
        (nv - 1, neta / 2),
        (nv / 2, neta / 2),
    ];
    let mut err: f64 = 0.0;
    let mut nodes = Vec::new();
    for &(i, j) in &candidates {
        if !mask(grid.v(i), grid.eta(j)) || !ftp[(i, j)].is_finite() {
            continue;
        }
        let (ftr, hr) = riemann::represent_pulse(&geom, &dpsi, &grid, (i, j), &opts)
            .map_err(|e| e.to_string())?;
        let s1 = ftp[(i, j)].abs().max(1.0);
        let s2 = hp[(i, j)].abs().max(1.0);
        err = err
            .max((ftr - ftp[(i, j)]).abs() / s1)
            .max((hr - hp[(i, j)]).abs() / s2);
        nodes.push([i, j]);
    }
    if nodes.is_empty() {
        return Err("no unmasked nodes available for the equivalence check".into());
    }

    write_json(
        out,
        "kernel.json",
        &KernelReport {
            monitor,
            monitor_coarse,
            monitor_drift: drift,
            equivalence_error: err,
            equivalence_nodes: nodes,
        },
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct ValidateReport {
    criteria: Vec<validate::CriterionResult>,
    all_pass: bool,
}

pub fn cmd_validate(config: &RunConfig, out: &Path) -> Result<i32, String> {
    let params = config.validate_params();
    let results = validate::run_all(&params);
    let all_pass = results.iter().all(|r| r.passed);
    for r in &results {
        println!(
            "[{:2}] {} {} ({:.2}s): {}",
            r.index,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.seconds,
            r.detail
        );
    }
    write_json(out, "report.json", &ValidateReport { criteria: results, all_pass })?;
    Ok(if all_pass { 0 } else { 1 })
}
