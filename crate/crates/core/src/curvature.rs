//! Curvature invariants near the singular locus.
//!
//! For commutative pulse data the boundary shear is `Sigma = Sigma' T0` and
//! the leading Kretschmann invariant along an approach to the singular locus
//! `sigma -> 0` is
//!
//! ```text
//!   Ktilde = (dv gamma)^2 / (2 eta^2 Omega^4 sigma^4) * Tr((1 - Sigma^2)^2),
//! ```
//!
//! with `Tr((1 - Sigma^2)^2) = 2 (1 - lambda^2)^2` and
//! `lambda = Sigma' sqrt(Tr(T0^2) / 2)` the shear eigenvalue scale. The same
//! invariant assembles from the individual curvature blocks (the
//! Kulkarni-Nomizu square of the news asymmetry plus the mixed-frame
//! Riemann components); the two routes agree exactly and the comparison is
//! a strong algebraic self-check on the implementation.
//!
//! With the lapse behaving like `Omega^2 ~ C sigma^((Tr(Sigma^2) - 2) / 4)`,
//! the invariant blows up like `digamma^(-p)` with
//! `p = 3 + Tr(Sigma^2) / 2 >= 3`.

use crate::fitting;
use crate::grid::{CharGrid, Field};
use crate::pulse::{SingularityGeometry, TracefreeSym2};

/// Pointwise inputs to the Kretschmann assembly.
#[derive(Debug, Clone, Copy)]
pub struct CurvaturePoint {
    pub eta: f64,
    /// `sigma = gamma(v) - eta`.
    pub sigma: f64,
    /// `dv gamma` at the same `v`.
    pub dgamma_dv: f64,
    /// Lapse-log `omega`, so `Omega^2 = exp(2 omega)`.
    pub omega: f64,
    /// Scalar shear coefficient `Sigma'`.
    pub sigma_prime: f64,
    /// `Tr(T0^2)` of the polarization tensor.
    pub tr_t0_sq: f64,
}

impl CurvaturePoint {
    /// `lambda^2 = Sigma'^2 Tr(T0^2) / 2`, the squared shear eigenvalue.
    pub fn lambda_sq(&self) -> f64 {
        0.5 * self.sigma_prime * self.sigma_prime * self.tr_t0_sq
    }

    fn omega4(&self) -> f64 {
        (4.0 * self.omega).exp()
    }
}

/// Leading Kretschmann invariant, simplified closed form.
pub fn kretschmann_simplified(p: &CurvaturePoint) -> f64 {
    let one_minus = 1.0 - p.lambda_sq();
    let tr = 2.0 * one_minus * one_minus;
    p.dgamma_dv * p.dgamma_dv / (2.0 * p.eta * p.eta * p.omega4() * p.sigma.powi(4)) * tr
}

/// Component-wise Kretschmann assembly.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct KretschmannBreakdown {
    /// Kulkarni-Nomizu square of the fibre-fibre block.
    pub fibre_square: f64,
    /// Mixed fibre-null contraction `r_(aLbL) r_(aNbN)`.
    pub mixed_ll_nn: f64,
    /// Mixed fibre-null contraction `|r_(LaNb)|^2`.
    pub mixed_ln_sq: f64,
    /// Null-null component `r_(NLNL)^2`.
    pub null_square: f64,
    pub total: f64,
}

/// Assemble the invariant from the individual curvature blocks. For
/// commutative data every block is a multiple of the identity or of
/// `(1 - Sigma^2) = (1 - lambda^2) I`, so the Frobenius contractions reduce
/// to scalar products; the remaining blocks vanish identically.
pub fn kretschmann_components(p: &CurvaturePoint) -> KretschmannBreakdown {
    let lam2 = p.lambda_sq();
    let tr_sigma_sq = p.sigma_prime * p.sigma_prime * p.tr_t0_sq;
    let om4 = p.omega4();
    let (eta, sig, dg) = (p.eta, p.sigma, p.dgamma_dv);

    // Fibre-fibre block: the Kulkarni-Nomizu square of the asymmetry tensor,
    // |U (kn) U|^2 = 4 (2 - Tr(Sigma^2))^2, with the frame prefactor.
    let kn_sq = 4.0 * (2.0 - tr_sigma_sq) * (2.0 - tr_sigma_sq);
    let fibre_square = dg * dg / (eta * eta) / (64.0 * om4 * sig.powi(4)) * kn_sq;

    // Mixed blocks: r_(aLbL) = (1/4) eta^-4 (dv gamma)^2 sigma^-2 (1-Sigma^2)
    // and r_(aNbN) = (1/4) eta^2 sigma^-2 (1-Sigma^2) contract against each
    // other; r_(LaNb) = -(1/4) eta^-1 (dv gamma) sigma^-2 (1-Sigma^2)
    // contracts against itself. Each carries frame weight 2 / Omega^4, and
    // each matrix trace contributes Tr((1-Sigma^2)^2) = 2 (1-lambda^2)^2.
    let m = 1.0 - lam2;
    let scal_ll = 0.25 / (eta * eta * eta * eta) * dg * dg / (sig * sig);
    let scal_nn = 0.25 * eta * eta / (sig * sig);
    let scal_ln = -0.25 / eta * dg / (sig * sig);
    let mixed_ll_nn = 2.0 / om4 * (scal_ll * m) * (scal_nn * m) * 2.0;
    let mixed_ln_sq = 2.0 / om4 * (scal_ln * m) * (scal_ln * m) * 2.0;

    // Null-null component r_(NLNL) = (1/2) Omega^2 eta^-1 (dv gamma)
    // sigma^-2 (2 - Tr(Sigma^2)), frame weight 1 / (4 Omega^8).
    let r_nlnl = 0.5 * (2.0 * p.omega).exp() / eta * dg / (sig * sig) * (2.0 - tr_sigma_sq);
    let null_square = r_nlnl * r_nlnl / (4.0 * om4 * om4);

    let total = fibre_square + mixed_ll_nn + mixed_ln_sq + null_square;
    KretschmannBreakdown { fibre_square, mixed_ll_nn, mixed_ln_sq, null_square, total }
}

/// Power of `sigma` in the lapse: `Omega^2 ~ C sigma^lapse_power`.
pub fn lapse_power(tr_sigma_sq: f64) -> f64 {
    (tr_sigma_sq - 2.0) / 4.0
}

/// Predicted blowup exponent of `Ktilde ~ digamma^(-p)`.
pub fn predicted_blowup_exponent(tr_sigma_sq: f64) -> f64 {
    3.0 + 0.5 * tr_sigma_sq
}

/// One eta-line profile of the invariant inside the fit window.
pub struct BlowupProfile {
    pub log_digamma: Vec<f64>,
    pub log_ktilde: Vec<f64>,
}

/// Sample `Ktilde` along the eta-line at `v_index` over
/// `sigma in (sigma_min, sigma_max]`, using the computed lapse-log field.
pub fn blowup_profile(
    geom: &SingularityGeometry,
    omega: &Field,
    sigma_prime: f64,
    t0: &TracefreeSym2,
    grid: &CharGrid,
    v_index: usize,
    sigma_min: f64,
    sigma_max: f64,
) -> BlowupProfile {
    let v = grid.v(v_index);
    let gamma = geom.gamma(v).expect("blowup profile needs gamma(v)");
    let dg = geom.dgamma_dv(v).expect("blowup profile needs dv gamma(v)");
    let mut log_digamma = Vec::new();
    let mut log_ktilde = Vec::new();
    for j in 0..grid.neta {
        let eta = grid.eta(j);
        let sig = gamma - eta;
        let om = omega[(v_index, j)];
        if sig <= sigma_min || sig > sigma_max || !om.is_finite() {
            continue;
        }
        let pt = CurvaturePoint {
            eta,
            sigma: sig,
            dgamma_dv: dg,
            omega: om,
            sigma_prime,
            tr_t0_sq: t0.norm_sq(),
        };
        log_digamma.push(geom.digamma(v, eta).ln());
        log_ktilde.push(kretschmann_simplified(&pt).ln());
    }
    BlowupProfile { log_digamma, log_ktilde }
}

/// Result of the blowup-rate fit.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct BlowupFit {
    /// Fitted exponent `p` of `log Ktilde ~ -p log digamma`.
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Fit `log Ktilde` against `-log digamma`.
pub fn fit_blowup(profile: &BlowupProfile) -> BlowupFit {
    assert!(profile.log_digamma.len() >= 2, "need at least two samples");
    let x: Vec<f64> = profile.log_digamma.iter().map(|t| -t).collect();
    let (slope, intercept, r2) = fitting::fit_line(&x, &profile.log_ktilde);
    BlowupFit {
        exponent: slope,
        intercept,
        r_squared: r2,
        samples: x.len(),
    }
}

/// Fit the `log sigma` coefficient of `omega` along the eta-line at
/// `v_index` over `sigma in (sigma_min, sigma_max]`, using the basis
/// `{log sigma, 1, sigma}`. Returns `(coefficient, r_squared, samples)`.
pub fn omega_log_coefficient(
    omega: &Field,
    geom: &SingularityGeometry,
    grid: &CharGrid,
    v_index: usize,
    sigma_min: f64,
    sigma_max: f64,
) -> Option<(f64, f64, usize)> {
    let v = grid.v(v_index);
    let gamma = geom.gamma(v).ok()?;
    let mut sig = Vec::new();
    let mut y = Vec::new();
    for j in 0..grid.neta {
        let s = gamma - grid.eta(j);
        let om = omega[(v_index, j)];
        if s > sigma_min && s <= sigma_max && om.is_finite() {
            sig.push(s);
            y.push(om);
        }
    }
    if sig.len() < 3 {
        return None;
    }
    let basis = vec![
        sig.iter().map(|&s| s.ln()).collect(),
        vec![1.0; sig.len()],
        sig.clone(),
    ];
    let fit = fitting::least_squares(&basis, &y);
    Some((fit.coeffs[0], fit.r_squared, sig.len()))
}

/// Predicted `log sigma` coefficient of `omega`.
pub fn predicted_omega_log_coefficient(tr_sigma_sq: f64) -> f64 {
    (tr_sigma_sq - 2.0) / 8.0
}

/// Genericity margin `min |1 - lambda|` over the supplied shear samples;
/// the blowup statement requires it to stay above the margin `eps`.
pub fn eigenvalue_criterion(sigma_primes: &[f64], tr_t0_sq: f64, eps: f64) -> (f64, bool) {
    let mut margin = f64::INFINITY;
    for &sp in sigma_primes {
        let lambda = sp * (0.5 * tr_t0_sq).sqrt();
        margin = margin.min((1.0 - lambda.abs()).abs());
    }
    (margin, margin > eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Rect;
    use crate::pulse::{geometry, PulseData, PulseProfile};

    fn point(sigma_prime: f64) -> CurvaturePoint {
        CurvaturePoint {
            eta: 1.3,
            sigma: 2.7e-3,
            dgamma_dv: -0.83,
            omega: 0.21,
            sigma_prime,
            tr_t0_sq: 2.0,
        }
    }

    #[test]
    fn dual_paths_agree_to_machine_precision() {
        for &sp in &[0.0, 0.17, -0.42, 0.9, 2.3] {
            let p = point(sp);
            let simple = kretschmann_simplified(&p);
            let parts = kretschmann_components(&p);
            let rel = (parts.total - simple).abs() / simple.abs();
            assert!(rel < 1e-12, "Sigma' = {sp}: rel = {rel}");
        }
    }

    #[test]
    fn component_weights_are_quarter_half_quarter() {
        let p = point(0.3);
        let parts = kretschmann_components(&p);
        assert!((parts.fibre_square / parts.total - 0.25).abs() < 1e-12);
        assert!(((parts.mixed_ll_nn + parts.mixed_ln_sq) / parts.total - 0.5).abs() < 1e-12);
        assert!((parts.null_square / parts.total - 0.25).abs() < 1e-12);
    }

    #[test]
    fn exponents_and_lapse_power() {
        // Vacuum shear-free: p = 3, lapse power -1/2, omega coefficient -1/4.
        assert_eq!(predicted_blowup_exponent(0.0), 3.0);
        assert_eq!(lapse_power(0.0), -0.5);
        assert_eq!(predicted_omega_log_coefficient(0.0), -0.25);
        // Unit-eigenvalue shear Tr(Sigma^2) = 2: p = 4, regular lapse.
        assert_eq!(predicted_blowup_exponent(2.0), 4.0);
        assert_eq!(lapse_power(2.0), 0.0);
    }

    #[test]
    fn eigenvalue_margin() {
        let (m, ok) = eigenvalue_criterion(&[0.1, 0.3, -0.2], 2.0, 0.05);
        assert!((m - 0.7).abs() < 1e-12 && ok);
        let (m2, ok2) = eigenvalue_criterion(&[0.98], 2.0, 0.05);
        assert!((m2 - 0.02).abs() < 1e-12 && !ok2);
    }

    #[test]
    fn blowup_fit_recovers_manufactured_exponent() {
        // Manufacture omega so that Ktilde ~ digamma^(-3.4) exactly along
        // the line: choose omega = a log sigma with the right a, using
        // digamma = (const) sigma near the locus for the linear pulse.
        let data = PulseData::new(PulseProfile::linear(), vec![TracefreeSym2::new(1.0, 0.0)]);
        let geom = geometry(&data, 0);
        let n = 4097;
        let grid = CharGrid::new(Rect::new(0.0, 1.0, 0.0, 2.0 - 5e-4), 9, n);
        let t0 = TracefreeSym2::new(1.0, 0.0);
        // With omega = a log sigma: Ktilde ~ sigma^(-4 - 4a); digamma ~ c sigma,
        // so the exponent is 4 + 4a; pick a = -0.15 for p = 3.4.
        let mut omega = Field::full(9, n, f64::NAN);
        let gamma = geom.gamma(1.0).unwrap();
        for j in 0..n {
            let s = gamma - grid.eta(j);
            if s > 0.0 {
                omega[(8, j)] = -0.15 * s.ln();
            }
        }
        let prof = blowup_profile(&geom, &omega, 0.0, &t0, &grid, 8, 1e-3, 1e-2);
        assert!(prof.log_digamma.len() >= 8, "window has {} samples", prof.log_digamma.len());
        let fit = fit_blowup(&prof);
        assert!((fit.exponent - 3.4).abs() < 0.05, "exponent {}", fit.exponent);
        assert!(fit.r_squared > 0.999);
    }

    #[test]
    fn fitted_exponent_ignores_constant_conformal_rescaling() {
        // Shifting omega by a constant multiplies the squared conformal
        // factor by a constant, which may move the fit intercept but must
        // leave the rate untouched.
        let data = PulseData::new(PulseProfile::linear(), vec![TracefreeSym2::new(1.0, 0.0)]);
        let geom = geometry(&data, 0);
        let t0 = TracefreeSym2::new(1.0, 0.0);
        let n = 4097;
        let grid = CharGrid::new(Rect::new(0.0, 1.0, 0.0, 2.0 - 5e-4), 9, n);
        let gamma = geom.gamma(1.0).unwrap();
        let mut omega = Field::full(9, n, f64::NAN);
        for j in 0..n {
            let s = gamma - grid.eta(j);
            if s > 0.0 {
                omega[(8, j)] = -0.2 * s.ln() + 0.1 * s;
            }
        }
        let base = fit_blowup(&blowup_profile(&geom, &omega, 0.3, &t0, &grid, 8, 1e-3, 1e-2));
        for j in 0..n {
            omega[(8, j)] += 0.8;
        }
        let shifted = fit_blowup(&blowup_profile(&geom, &omega, 0.3, &t0, &grid, 8, 1e-3, 1e-2));
        assert!(
            (base.exponent - shifted.exponent).abs() < 1e-9,
            "exponent moved: {} vs {}",
            base.exponent,
            shifted.exponent
        );
        assert!((shifted.intercept - base.intercept + 4.0 * 0.8).abs() < 1e-9);
    }

    #[test]
    fn omega_log_fit_recovers_coefficient() {
        let data = PulseData::new(PulseProfile::linear(), vec![TracefreeSym2::new(1.0, 0.0)]);
        let geom = geometry(&data, 0);
        let n = 4097;
        let grid = CharGrid::new(Rect::new(0.0, 1.0, 0.0, 2.0 - 5e-4), 9, n);
        let gamma = geom.gamma(1.0).unwrap();
        let mut omega = Field::full(9, n, f64::NAN);
        for j in 0..n {
            let s = gamma - grid.eta(j);
            if s > 0.0 {
                omega[(8, j)] = -0.25 * s.ln() + 0.7 + 1.9 * s;
            }
        }
        let (coeff, r2, m) =
            omega_log_coefficient(&omega, &geom, &grid, 8, 1e-3, 1e-2).unwrap();
        assert!(m >= 8);
        assert!((coeff + 0.25).abs() < 1e-6, "coeff = {coeff}");
        assert!(r2 > 0.999999);
    }
}
