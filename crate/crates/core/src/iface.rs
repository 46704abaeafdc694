//! The intermediate-face field system.
//!
//! For commutative pulse data the trace part `(f, h)` of the connection
//! fields has closed forms driven by the scalar geometry,
//!
//! ```text
//!   f = 2 dv log digamma = -4 eta^2 E / digamma,
//!   h = 2 deta log digamma = -8 eta (int_0^v E) / digamma,
//! ```
//!
//! and the tracefree part reduces to scalar coefficients `(F', H')` of `T0`
//! obeying a linear characteristic system. This module evaluates the closed
//! forms, re-solves both systems with the Goursat machinery for
//! cross-validation, reconstructs the fibre metric, integrates the lapse-log
//! `omega`, and extracts the boundary shear `Sigma` from the `1/sigma` pole
//! of `H'`.
//!
//! All solves work in the rescaled unknowns `ftilde = f / eta^2` and
//! `F'tilde = F' / eta`, which are regular on the initial line `eta = 0`.

use crate::fitting;
use crate::goursat::{self, GoursatError, GoursatProblem, SolveOptions};
use crate::grid::{CharGrid, Field};
use crate::pulse::{PulseError, SingularityGeometry, TracefreeSym2};
use crate::quad;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid reaches the singular region: digamma = {digamma} < {f_min} at (v, eta) = ({v}, {eta})")]
    SingularRegion { v: f64, eta: f64, digamma: f64, f_min: f64 },
    #[error("fibre metric lost positive-definiteness at (v, eta) = ({v}, {eta})")]
    NonPositive { v: f64, eta: f64 },
    #[error("only {found} eta-layers with sigma in ({sigma_min}, {sigma_fit_max}] at v = {v}; need {window}")]
    InsufficientWindow { v: f64, found: usize, window: usize, sigma_min: f64, sigma_fit_max: f64 },
    #[error(transparent)]
    Goursat(#[from] GoursatError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
}

/// Evaluate the closed-form trace fields `(f, h, ftilde)` at the grid nodes.
///
/// Errors with [`FieldError::SingularRegion`] if any node has
/// `digamma < f_min`; use [`fh_closed_masked`] when the grid deliberately
/// straddles the mask boundary.
pub fn fh_closed(
    geom: &SingularityGeometry,
    grid: &CharGrid,
    f_min: f64,
) -> Result<(Field, Field, Field), FieldError> {
    for i in 0..grid.nv {
        for j in 0..grid.neta {
            let (v, eta) = (grid.v(i), grid.eta(j));
            let dg = geom.digamma(v, eta);
            if dg < f_min {
                return Err(FieldError::SingularRegion { v, eta, digamma: dg, f_min });
            }
        }
    }
    Ok(fh_closed_masked(geom, grid, f_min))
}

/// As [`fh_closed`], but nodes with `digamma < f_min` are reported as NaN.
pub fn fh_closed_masked(
    geom: &SingularityGeometry,
    grid: &CharGrid,
    f_min: f64,
) -> (Field, Field, Field) {
    let mut f = Field::zeros(grid.nv, grid.neta);
    let mut h = Field::zeros(grid.nv, grid.neta);
    let mut ftilde = Field::zeros(grid.nv, grid.neta);
    for i in 0..grid.nv {
        let v = grid.v(i);
        let e = geom.energy(v);
        let j_int = geom.energy_integral(v);
        for j in 0..grid.neta {
            let eta = grid.eta(j);
            let dg = geom.digamma(v, eta);
            if dg < f_min {
                f[(i, j)] = f64::NAN;
                h[(i, j)] = f64::NAN;
                ftilde[(i, j)] = f64::NAN;
                continue;
            }
            ftilde[(i, j)] = -4.0 * e / dg;
            f[(i, j)] = eta * eta * ftilde[(i, j)];
            h[(i, j)] = -8.0 * eta * j_int / dg;
        }
    }
    (f, h, ftilde)
}

/// Solve the nonlinear trace system as a Goursat problem:
///
/// ```text
///   d/deta ftilde = -(1/2) ftilde h,            ftilde(v, 0) = -E(v),
///   d/dv   h      = -(eta^2/2) ftilde h + 2 eta ftilde,   h(0, eta) = 0,
/// ```
///
/// masked to `digamma >= f_min`. Returns `(ftilde, h)`.
pub fn fh_goursat(
    geom: &SingularityGeometry,
    grid: &CharGrid,
    f_min: f64,
    opts: &SolveOptions,
) -> Result<(Field, Field), FieldError> {
    let p = |_v: f64, _eta: f64, x: &[f64], y: &[f64], out: &mut [f64]| {
        out[0] = -0.5 * x[0] * y[0];
    };
    let q = |_v: f64, eta: f64, x: &[f64], y: &[f64], out: &mut [f64]| {
        out[0] = -0.5 * eta * eta * x[0] * y[0] + 2.0 * eta * x[0];
    };
    let x0 = |v: f64, out: &mut [f64]| out[0] = -geom.energy(v);
    let y0 = |_eta: f64, out: &mut [f64]| out[0] = 0.0;
    let problem = GoursatProblem { dim_x: 1, dim_y: 1, p: &p, q: &q, x0: &x0, y0: &y0 };

    let mask = |v: f64, eta: f64| geom.digamma(v, eta) >= f_min;
    let opts = SolveOptions { mask: Some(&mask), ..*opts };
    let sol = goursat::solve_first_order(&problem, grid, &opts)?;
    Ok((sol.x.into_iter().next().unwrap(), sol.y.into_iter().next().unwrap()))
}

/// Solve the commutative tracefree system in the regular unknowns
/// `(F'tilde, H')`:
///
/// ```text
///   d/deta F't = -(eta ftilde / 4) H' - (h/4) F't,    F't(v, 0) = dpsi(v),
///   d/dv   H'  = -(f/4) H' + (1 - eta h / 4) F't,     H'(0, eta) = 0,
/// ```
///
/// with the trace coefficients supplied as evaluable maps. Returns
/// `(F' = eta * F't, H', F't)`.
#[allow(non_snake_case)]
pub fn solve_FH(
    f_tilde: &dyn Fn(f64, f64) -> f64,
    h: &dyn Fn(f64, f64) -> f64,
    dpsi: &dyn Fn(f64) -> f64,
    grid: &CharGrid,
    mask: Option<&dyn Fn(f64, f64) -> bool>,
    opts: &SolveOptions,
) -> Result<(Field, Field, Field), FieldError> {
    let p = |v: f64, eta: f64, x: &[f64], y: &[f64], out: &mut [f64]| {
        out[0] = -0.25 * eta * f_tilde(v, eta) * y[0] - 0.25 * h(v, eta) * x[0];
    };
    let q = |v: f64, eta: f64, x: &[f64], y: &[f64], out: &mut [f64]| {
        out[0] = -0.25 * eta * eta * f_tilde(v, eta) * y[0]
            + (1.0 - 0.25 * eta * h(v, eta)) * x[0];
    };
    let x0 = |v: f64, out: &mut [f64]| out[0] = dpsi(v);
    let y0 = |_eta: f64, out: &mut [f64]| out[0] = 0.0;
    let problem = GoursatProblem { dim_x: 1, dim_y: 1, p: &p, q: &q, x0: &x0, y0: &y0 };
    let opts = SolveOptions { mask, ..*opts };
    let sol = goursat::solve_first_order(&problem, grid, &opts)?;
    let ftp = sol.x.into_iter().next().unwrap();
    let hp = sol.y.into_iter().next().unwrap();
    let mut fp = Field::zeros(grid.nv, grid.neta);
    for i in 0..grid.nv {
        for j in 0..grid.neta {
            fp[(i, j)] = grid.eta(j) * ftp[(i, j)];
        }
    }
    Ok((fp, hp, ftp))
}

/// The reconstructed fibre metric, one 2x2 matrix per node
/// (`[k11, k12, k21, k22]`).
pub struct MetricField {
    pub grid: CharGrid,
    pub k: Vec<[f64; 4]>,
    /// Largest observed `|k12 - k21|`.
    pub symmetry_defect: f64,
}

impl MetricField {
    pub fn at(&self, i: usize, j: usize) -> [f64; 4] {
        self.k[i * self.grid.neta + j]
    }

    pub fn det(&self, i: usize, j: usize) -> f64 {
        let m = self.at(i, j);
        m[0] * m[3] - m[1] * m[2]
    }
}

/// Integrate `dv k = k (f/2 + F' T0)` along each `eta`-line with the
/// classical fourth-order Runge-Kutta method, `k(0, eta) = identity`.
///
/// `f` must be an evaluable map (it is sampled at half-steps); `fprime` is
/// linearly interpolated in `v` between its node values. Nodes where `mask`
/// is false are skipped (NaN); positive-definiteness is enforced on the
/// active region.
pub fn reconstruct_metric(
    f: &dyn Fn(f64, f64) -> f64,
    fprime: &Field,
    t0: &TracefreeSym2,
    grid: &CharGrid,
    mask: Option<&dyn Fn(f64, f64) -> bool>,
) -> Result<MetricField, FieldError> {
    let active = |v: f64, eta: f64| mask.map_or(true, |m| m(v, eta));
    let mut k = vec![[f64::NAN; 4]; grid.nv * grid.neta];
    let mut symmetry_defect: f64 = 0.0;
    let dv = grid.dv();
    let t = t0.as_matrix();

    for j in 0..grid.neta {
        let eta = grid.eta(j);
        let mut cur = [1.0, 0.0, 0.0, 1.0];
        if active(grid.v(0), eta) {
            k[j] = cur;
        }
        for i in 1..grid.nv {
            let v1 = grid.v(i);
            if !active(v1, eta) {
                break;
            }
            let v0 = grid.v(i - 1);
            // F' sampled at half-steps by linear interpolation in v.
            let fp0 = fprime[(i - 1, j)];
            let fp1 = fprime[(i, j)];
            if !fp0.is_finite() || !fp1.is_finite() {
                break;
            }
            let coeff = |v: f64| -> [f64; 4] {
                let w = (v - v0) / dv;
                let fp = fp0 * (1.0 - w) + fp1 * w;
                let half_f = 0.5 * f(v, eta);
                [
                    half_f + fp * t[0][0],
                    fp * t[0][1],
                    fp * t[1][0],
                    half_f + fp * t[1][1],
                ]
            };
            let rhs = |v: f64, m: &[f64; 4]| -> [f64; 4] {
                let a = coeff(v);
                mat_mul(m, &a)
            };
            let k1 = rhs(v0, &cur);
            let k2 = rhs(v0 + 0.5 * dv, &mat_axpy(&cur, &k1, 0.5 * dv));
            let k3 = rhs(v0 + 0.5 * dv, &mat_axpy(&cur, &k2, 0.5 * dv));
            let k4 = rhs(v1, &mat_axpy(&cur, &k3, dv));
            for c in 0..4 {
                cur[c] += dv / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            // Positive-definiteness of the symmetric part.
            let det = cur[0] * cur[3] - cur[1] * cur[2];
            if !(cur[0] > 0.0 && det > 0.0) {
                return Err(FieldError::NonPositive { v: v1, eta });
            }
            symmetry_defect = symmetry_defect.max((cur[1] - cur[2]).abs());
            k[i * grid.neta + j] = cur;
        }
    }
    Ok(MetricField { grid: grid.clone(), k, symmetry_defect })
}

fn mat_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn mat_axpy(a: &[f64; 4], d: &[f64; 4], s: f64) -> [f64; 4] {
    [a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2], a[3] + s * d[3]]
}

/// Integrate the lapse-log potential
/// `deta dv omega = f h / 16 - Tr(F H) / 8 - f / (4 eta)` with zero data on
/// both edges.
///
/// The trace part of the source integrates in closed form: with
/// `P = log(digamma / 4)`, one has
/// `int int (f h / 16 - f / (4 eta)) = -P / 4` exactly (both sides vanish on
/// the edges and have the same mixed derivative). The remaining
/// `Tr(F H) / 8 = F' H' Tr(T0^2) / 8` carries a `1/sigma^2`-type pole at the
/// singular locus and is integrated with a product-trapezoid rule: the
/// smooth factor is interpolated linearly per panel while the pole kernel is
/// integrated exactly.
pub fn solve_omega(
    geom: &SingularityGeometry,
    fprime: &Field,
    hprime: &Field,
    t0: &TracefreeSym2,
    grid: &CharGrid,
    f_min: f64,
) -> Field {
    let (nv, neta) = (grid.nv, grid.neta);
    let tr = t0.norm_sq();

    // Product of the tracefree fields at the nodes; NaN marks masked nodes.
    let mut prod = Field::zeros(nv, neta);
    for i in 0..nv {
        for j in 0..neta {
            prod[(i, j)] = fprime[(i, j)] * hprime[(i, j)];
        }
    }

    let gamma_at: Vec<Option<f64>> = (0..nv).map(|i| geom.gamma(grid.v(i)).ok()).collect();

    // Inner cumulative integral over eta for each v-line. Near the pole the
    // smooth factor q = F'H' (gamma - t)^2 is interpolated instead of the
    // integrand itself.
    let deta = grid.deta();
    let mut inner = Field::full(nv, neta, f64::NAN);
    for i in 0..nv {
        inner[(i, 0)] = 0.0;
        let g = gamma_at[i];
        for j in 1..neta {
            let (w0, w1) = (prod[(i, j - 1)], prod[(i, j)]);
            if !inner[(i, j - 1)].is_finite() || !w0.is_finite() || !w1.is_finite() {
                break;
            }
            let (t0c, t1c) = (grid.eta(j - 1), grid.eta(j));
            let use_pole = matches!(g, Some(gv) if gv > t1c && gv - t1c <= 1.0);
            let inc = if use_pole {
                let gv = g.unwrap();
                let q0 = w0 * (gv - t0c) * (gv - t0c);
                let q1 = w1 * (gv - t1c) * (gv - t1c);
                quad::panel_pole2(q0, q1, gv, t0c, t1c)
            } else {
                0.5 * deta * (w0 + w1)
            };
            inner[(i, j)] = inner[(i, j - 1)] + inc;
        }
    }

    // Outer cumulative integral over v for each eta-layer, with a simple-pole
    // product rule in the kernel 1 / (gamma(s) - eta).
    let dvs = grid.dv();
    let mut w = Field::full(nv, neta, f64::NAN);
    for j in 0..neta {
        let eta = grid.eta(j);
        w[(0, j)] = 0.0;
        for i in 1..nv {
            let (i0, i1) = (inner[(i - 1, j)], inner[(i, j)]);
            if !w[(i - 1, j)].is_finite() || !i0.is_finite() || !i1.is_finite() {
                break;
            }
            let (g0, g1) = (gamma_at[i - 1], gamma_at[i]);
            let use_pole = match (g0, g1) {
                (Some(a), Some(b)) => a > eta && b > eta && (a - eta).min(b - eta) <= 1.0,
                _ => false,
            };
            let inc = if use_pole {
                let (a, b) = (g0.unwrap() - eta, g1.unwrap() - eta);
                quad::panel_pole1(i0 * a, i1 * b, a, b, dvs)
            } else {
                0.5 * dvs * (i0 + i1)
            };
            w[(i, j)] = w[(i - 1, j)] + inc;
        }
    }

    let mut omega = Field::full(nv, neta, f64::NAN);
    for i in 0..nv {
        for j in 0..neta {
            let dg = geom.digamma(grid.v(i), grid.eta(j));
            if dg < f_min || !w[(i, j)].is_finite() {
                continue;
            }
            omega[(i, j)] = -0.25 * (dg / 4.0).ln() - tr / 8.0 * w[(i, j)];
        }
    }
    omega
}

/// The extracted boundary shear along the v-axis.
pub struct SigmaField {
    /// `v`-node coordinates where the fit succeeded.
    pub v_nodes: Vec<f64>,
    /// Scalar coefficient `Sigma'(v)` (so `Sigma = Sigma' * T0`).
    pub sigma_prime: Vec<f64>,
    /// RMS residual of each fit.
    pub fit_residual: Vec<f64>,
    pub t0: TracefreeSym2,
}

impl SigmaField {
    /// `Sigma'` at the fit node nearest to `v`.
    pub fn sigma_prime_at(&self, v: f64) -> Option<f64> {
        let idx = self
            .v_nodes
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (**a - v).abs().total_cmp(&(**b - v).abs()))?
            .0;
        Some(self.sigma_prime[idx])
    }

    /// `Tr(Sigma^2)` at the fit node nearest to `v`.
    pub fn tr_sigma_sq_at(&self, v: f64) -> Option<f64> {
        self.sigma_prime_at(v).map(|s| s * s * self.t0.norm_sq())
    }
}

/// Extract `Sigma'(v)` from the simple pole of `H'` at the singular locus.
///
/// For each requested `v`-node the last `window` eta-layers with
/// `sigma in (sigma_min, sigma_fit_max]` are fitted as
/// `sigma * H' ~ c0 + c1 sigma log sigma + c2 sigma`, and `Sigma' = -c0`
/// (the basis mirrors the one-log structure of the boundary expansion).
pub fn extract_sigma(
    hprime: &Field,
    geom: &SingularityGeometry,
    grid: &CharGrid,
    v_indices: &[usize],
    window: usize,
    sigma_min: f64,
    sigma_fit_max: f64,
    t0: TracefreeSym2,
) -> Result<SigmaField, FieldError> {
    assert!(window >= 3, "fit needs at least 3 layers");
    let mut v_nodes = Vec::new();
    let mut sigma_prime = Vec::new();
    let mut fit_residual = Vec::new();

    for &i in v_indices {
        let v = grid.v(i);
        let gamma = geom.gamma(v)?;
        let mut sig = Vec::new();
        let mut y = Vec::new();
        for j in 0..grid.neta {
            let s = gamma - grid.eta(j);
            let hp = hprime[(i, j)];
            if s > sigma_min && s <= sigma_fit_max && hp.is_finite() {
                sig.push(s);
                y.push(s * hp);
            }
        }
        if sig.len() < window {
            return Err(FieldError::InsufficientWindow {
                v,
                found: sig.len(),
                window,
                sigma_min,
                sigma_fit_max,
            });
        }
        // Last `window` layers before sigma_min: the smallest sigmas.
        let mut order: Vec<usize> = (0..sig.len()).collect();
        order.sort_by(|&a, &b| sig[a].total_cmp(&sig[b]));
        let take: Vec<usize> = order.into_iter().take(window).collect();
        let sigw: Vec<f64> = take.iter().map(|&k| sig[k]).collect();
        let yw: Vec<f64> = take.iter().map(|&k| y[k]).collect();

        let basis = vec![
            vec![1.0; sigw.len()],
            sigw.iter().map(|&s| s * s.ln()).collect(),
            sigw.clone(),
        ];
        let fit = fitting::least_squares(&basis, &yw);
        let mut rss = 0.0;
        for k in 0..sigw.len() {
            let model =
                fit.coeffs[0] + fit.coeffs[1] * sigw[k] * sigw[k].ln() + fit.coeffs[2] * sigw[k];
            rss += (yw[k] - model).powi(2);
        }
        v_nodes.push(v);
        sigma_prime.push(-fit.coeffs[0]);
        fit_residual.push((rss / sigw.len() as f64).sqrt());
    }
    Ok(SigmaField { v_nodes, sigma_prime, fit_residual, t0 })
}

/// Diagnostics of the trace-energy evolution identities.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceMonitor {
    /// `sup (Tr(Ftilde^2) + Tr(H^2))` over `digamma >= 0.5`.
    pub sup_trace_energy: f64,
    /// Sup residual of the eta-identity
    /// `deta Tr(Ft^2) + (h/2) Tr(Ft^2) + (eta ftilde / 2) Tr(Ft H) = 0`.
    pub eta_identity_residual: f64,
    /// Sup residual of the v-identity
    /// `dv Tr(H^2) + (f/2) Tr(H^2) - 2 (1 - eta h / 4) Tr(Ft H) / ... = 0`
    /// (assembled from the same system the fields solve).
    pub v_identity_residual: f64,
}

/// Verify the trace-energy evolution identities satisfied by the computed
/// fields, by central finite differences at interior nodes on
/// `digamma >= 0.5`.
pub fn trace_energy_monitor(
    ftilde_prime: &Field,
    hprime: &Field,
    f_tilde: &dyn Fn(f64, f64) -> f64,
    f: &dyn Fn(f64, f64) -> f64,
    h: &dyn Fn(f64, f64) -> f64,
    t0: &TracefreeSym2,
    geom: &SingularityGeometry,
    grid: &CharGrid,
    f_keep: f64,
) -> TraceMonitor {
    let tr = t0.norm_sq();
    let (nv, neta) = (grid.nv, grid.neta);
    let mut sup: f64 = 0.0;
    let mut res_eta: f64 = 0.0;
    let mut res_v: f64 = 0.0;
    let (dv, deta) = (grid.dv(), grid.deta());

    let keep = |i: usize, j: usize| geom.digamma(grid.v(i), grid.eta(j)) >= f_keep;
    let tf2 = |i: usize, j: usize| ftilde_prime[(i, j)] * ftilde_prime[(i, j)] * tr;
    let th2 = |i: usize, j: usize| hprime[(i, j)] * hprime[(i, j)] * tr;
    let tfh = |i: usize, j: usize| ftilde_prime[(i, j)] * hprime[(i, j)] * tr;

    for i in 0..nv {
        let v = grid.v(i);
        for j in 0..neta {
            let eta = grid.eta(j);
            if !keep(i, j) || !ftilde_prime[(i, j)].is_finite() || !hprime[(i, j)].is_finite() {
                continue;
            }
            sup = sup.max(tf2(i, j) + th2(i, j));

            let interior_eta = j >= 1 && j + 1 < neta && keep(i, j + 1);
            if interior_eta
                && ftilde_prime[(i, j + 1)].is_finite()
                && ftilde_prime[(i, j - 1)].is_finite()
            {
                let d = (tf2(i, j + 1) - tf2(i, j - 1)) / (2.0 * deta);
                res_eta = res_eta.max(
                    (d + 0.5 * h(v, eta) * tf2(i, j) + 0.5 * eta * f_tilde(v, eta) * tfh(i, j))
                        .abs(),
                );
            }
            let interior_v = i >= 1 && i + 1 < nv && keep(i + 1, j);
            if interior_v && hprime[(i + 1, j)].is_finite() && hprime[(i - 1, j)].is_finite() {
                let d = (th2(i + 1, j) - th2(i - 1, j)) / (2.0 * dv);
                // From dv H' = -(f/4) H' + (1 - eta h/4) F't:
                // dv Tr(H^2) = -(f/2) Tr(H^2) + 2 (1 - eta h/4) eta^0 Tr(Ft H) ... in
                // scalar coefficients: 2 H' dv H'.
                res_v = res_v.max(
                    (d + 0.5 * f(v, eta) * th2(i, j)
                        - 2.0 * (1.0 - 0.25 * eta * h(v, eta)) * tfh(i, j))
                    .abs(),
                );
            }
        }
    }
    TraceMonitor {
        sup_trace_energy: sup,
        eta_identity_residual: res_eta,
        v_identity_residual: res_v,
    }
}
