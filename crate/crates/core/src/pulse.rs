//! Short-pulse characteristic data and the scalar geometry it generates.
//!
//! The data model is commutative: the pulse tensor factors as
//! `T(v, theta) = psi(v) * T0(theta)` with `T0` a tracefree symmetric 2x2
//! tensor sampled at finitely many angles. Everything downstream is driven by
//! the front energy
//!
//! ```text
//!   E(v, theta) = 1/2 * int_0^v |ds T|^2 ds = 1/2 Tr(T0^2) int_0^v (ds psi)^2 ds
//! ```
//!
//! and the derived scalars
//! `digamma(v, eta) = 4 - 2 eta^2 int_0^v E`, `gamma(v) = sqrt(2 / int_0^v E)`
//! and `sigma = gamma(v) - eta`, whose zero locus is the curvature blow-up
//! front.

use crate::fitting;
use crate::quad;
use thiserror::Error;

/// Number of nodes of the cached cumulative quadrature tables.
pub const ENERGY_TABLE_NODES: usize = 4096;

/// Threshold below which `dpsi/dv(0)` does not count as a simple zero.
pub const SIMPLE_ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("coordinate {0} outside the pulse domain [0, 1]")]
    OutOfDomain(f64),
    #[error("gamma undefined at v = {v}: cumulative energy vanishes (v_star = {v_star})")]
    ZeroEnergy { v: f64, v_star: f64 },
    #[error("constraint solution blew up at v = {v} (|L Phi| = {slope:e})")]
    BlowupDetected { v: f64, slope: f64 },
}

/// A tracefree symmetric 2x2 tensor `[[a, b], [b, -a]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracefreeSym2 {
    pub a: f64,
    pub b: f64,
}

impl TracefreeSym2 {
    pub fn new(a: f64, b: f64) -> Self {
        TracefreeSym2 { a, b }
    }

    /// `Tr(M^2) = 2 (a^2 + b^2)`, the squared norm.
    pub fn norm_sq(&self) -> f64 {
        2.0 * (self.a * self.a + self.b * self.b)
    }

    /// The eigenvalues are `+lambda` and `-lambda` with this `lambda >= 0`.
    pub fn eigenvalue(&self) -> f64 {
        (self.a * self.a + self.b * self.b).sqrt()
    }

    /// Sup-norm distance of the coefficient pairs.
    pub fn dist(&self, other: &TracefreeSym2) -> f64 {
        (self.a - other.a).abs().max((self.b - other.b).abs())
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.b, -self.a]]
    }
}

/// The scalar pulse profile `psi` with its derivative.
///
/// `psi(0)` must vanish; when a support hint `[0, delta1]` is given, the
/// derivative must vanish outside it (checked on construction by sampling).
pub struct PulseProfile {
    psi: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    dpsi: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub support_hint: Option<f64>,
}

impl PulseProfile {
    pub fn new(
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dpsi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_hint: Option<f64>,
    ) -> Self {
        assert!(psi(0.0).abs() <= 1e-12, "psi(0) must vanish");
        if let Some(d1) = support_hint {
            for k in 0..=256 {
                let v = d1 + (1.0 - d1) * k as f64 / 256.0;
                assert!(
                    dpsi(v).abs() <= 1e-12,
                    "support hint [0, {d1}] violated at v = {v}"
                );
            }
        }
        PulseProfile { psi: Box::new(psi), dpsi: Box::new(dpsi), support_hint }
    }

    /// The linear profile `psi(v) = v`.
    pub fn linear() -> Self {
        PulseProfile::new(|v| v, |_| 1.0, None)
    }

    /// The zero profile.
    pub fn zero() -> Self {
        PulseProfile::new(|_| 0.0, |_| 0.0, Some(0.0 + f64::MIN_POSITIVE))
    }

    /// A smooth bump derivative supported in `[0, delta1]`, scaled so that
    /// `int_0^1 (dpsi)^2 dv = 1`; `psi` is its integral.
    ///
    /// Shape: `dpsi(v) = A exp(-1 / (x (1 - x)))` with `x = v / delta1`.
    pub fn normalized_bump(delta1: f64) -> Self {
        assert!(delta1 > 0.0 && delta1 <= 1.0);
        let shape = move |v: f64| -> f64 {
            let x = v / delta1;
            if x <= 0.0 || x >= 1.0 {
                0.0
            } else {
                (-1.0 / (x * (1.0 - x))).exp()
            }
        };
        // Normalize the L2 norm of the derivative on a dense grid.
        let l2 = quad::simpson_fn(0.0, delta1, 4096, |v| shape(v) * shape(v));
        let amp = 1.0 / l2.sqrt();
        // Cache psi as a cumulative table of the (cheap) closed-form derivative.
        let n = ENERGY_TABLE_NODES;
        let h = delta1 / (n - 1) as f64;
        let samples: Vec<f64> = (0..n).map(|k| amp * shape(h * k as f64)).collect();
        let cum = quad::cumulative_integral(h, &samples);
        let table = cum;
        let psi = move |v: f64| -> f64 {
            if v <= 0.0 {
                0.0
            } else if v >= delta1 {
                table[n - 1]
            } else {
                let f = v / h;
                let i = (f.floor() as usize).min(n - 2);
                let t = f - i as f64;
                table[i] * (1.0 - t) + table[i + 1] * t
            }
        };
        let dpsi = move |v: f64| amp * shape(v);
        PulseProfile::new(psi, dpsi, Some(delta1))
    }

    /// A profile from uniform samples of `psi` on `[0, 1]`; the derivative
    /// uses fourth-order finite differences of the table.
    pub fn from_table(samples: Vec<f64>) -> Self {
        let n = samples.len();
        assert!(n >= 5, "need at least 5 samples");
        assert!(samples[0].abs() <= 1e-12, "psi(0) must vanish");
        let h = 1.0 / (n - 1) as f64;
        let mut deriv = vec![0.0; n];
        for k in 0..n {
            deriv[k] = if k >= 2 && k + 2 < n {
                (samples[k - 2] - 8.0 * samples[k - 1] + 8.0 * samples[k + 1] - samples[k + 2])
                    / (12.0 * h)
            } else if k + 4 < n {
                // one-sided fourth-order stencil
                (-25.0 * samples[k] + 48.0 * samples[k + 1] - 36.0 * samples[k + 2]
                    + 16.0 * samples[k + 3]
                    - 3.0 * samples[k + 4])
                    / (12.0 * h)
            } else {
                (25.0 * samples[k] - 48.0 * samples[k - 1] + 36.0 * samples[k - 2]
                    - 16.0 * samples[k - 3]
                    + 3.0 * samples[k - 4])
                    / (12.0 * h)
            };
        }
        let interp = move |table: &[f64], v: f64| -> f64 {
            let f = (v / h).clamp(0.0, (n - 1) as f64);
            let i = (f.floor() as usize).min(n - 2);
            let t = f - i as f64;
            table[i] * (1.0 - t) + table[i + 1] * t
        };
        let s2 = samples.clone();
        let psi = move |v: f64| interp(&s2, v);
        let dpsi = move |v: f64| interp(&deriv, v);
        PulseProfile::new(psi, dpsi, None)
    }

    pub fn psi(&self, v: f64) -> f64 {
        (self.psi)(v)
    }

    pub fn dpsi(&self, v: f64) -> f64 {
        (self.dpsi)(v)
    }

    /// `int_0^1 (dpsi)^2 dv`, the L2 normalization of the derivative.
    pub fn derivative_l2_sq(&self) -> f64 {
        quad::simpson_fn(0.0, 1.0, ENERGY_TABLE_NODES / 2, |v| {
            let d = self.dpsi(v);
            d * d
        })
    }
}

/// Commutative short-pulse data: one profile, finitely many angles.
pub struct PulseData {
    pub profile: PulseProfile,
    pub angles: Vec<TracefreeSym2>,
    /// Cumulative table of `int_0^v (dpsi)^2` on a uniform grid over `[0,1]`.
    dpsi_sq_cum: Vec<f64>,
    /// Cumulative table of `int_0^v int_0^s (dpsi)^2 dt ds` (used for `int E`).
    dpsi_sq_cum2: Vec<f64>,
}

impl PulseData {
    pub fn new(profile: PulseProfile, angles: Vec<TracefreeSym2>) -> Self {
        assert!(!angles.is_empty(), "need at least one angle sample");
        let n = ENERGY_TABLE_NODES;
        let h = 1.0 / (n - 1) as f64;
        let sq: Vec<f64> = (0..n)
            .map(|k| {
                let d = profile.dpsi(h * k as f64);
                d * d
            })
            .collect();
        let dpsi_sq_cum = quad::cumulative_integral(h, &sq);
        let dpsi_sq_cum2 = quad::cumulative_integral(h, &dpsi_sq_cum);
        PulseData { profile, angles, dpsi_sq_cum, dpsi_sq_cum2 }
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    fn table_at(table: &[f64], v: f64) -> f64 {
        let n = table.len();
        let h = 1.0 / (n - 1) as f64;
        let f = (v / h).clamp(0.0, (n - 1) as f64);
        let i = (f.floor() as usize).min(n - 2);
        let t = f - i as f64;
        table[i] * (1.0 - t) + table[i + 1] * t
    }

    /// `int_0^v (dpsi)^2` from the cached table.
    pub fn dpsi_l2_cum(&self, v: f64) -> f64 {
        Self::table_at(&self.dpsi_sq_cum, v)
    }

    /// `int_0^v int_0^s (dpsi)^2` from the cached table.
    fn dpsi_l2_cum2(&self, v: f64) -> f64 {
        Self::table_at(&self.dpsi_sq_cum2, v)
    }
}

/// Front energy `E(v, theta_k)`.
pub fn energy(data: &PulseData, angle: usize, v: f64) -> Result<f64, PulseError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(PulseError::OutOfDomain(v));
    }
    Ok(0.5 * data.angles[angle].norm_sq() * data.dpsi_l2_cum(v))
}

/// The scalars `digamma`, `gamma`, `sigma` for one angle.
pub struct SingularityGeometry<'a> {
    data: &'a PulseData,
    /// `R^2 = Tr(T0^2) / 2` for this angle.
    pub r_sq: f64,
    /// First `v` beyond which the cumulative energy integral is positive.
    pub v_star: f64,
}

impl<'a> SingularityGeometry<'a> {
    /// `int_0^v E(t) dt`.
    pub fn energy_integral(&self, v: f64) -> f64 {
        self.r_sq * self.data.dpsi_l2_cum2(v)
    }

    /// `E(v)` itself.
    pub fn energy(&self, v: f64) -> f64 {
        self.r_sq * self.data.dpsi_l2_cum(v)
    }

    /// `digamma(v, eta) = 4 - 2 eta^2 int_0^v E`.
    pub fn digamma(&self, v: f64, eta: f64) -> f64 {
        4.0 - 2.0 * eta * eta * self.energy_integral(v)
    }

    /// `gamma(v) = sqrt(2 / int_0^v E)`; undefined for `v <= v_star`.
    pub fn gamma(&self, v: f64) -> Result<f64, PulseError> {
        let j = self.energy_integral(v);
        if j <= 0.0 {
            return Err(PulseError::ZeroEnergy { v, v_star: self.v_star });
        }
        Ok((2.0 / j).sqrt())
    }

    /// `sigma(v, eta) = gamma(v) - eta`.
    pub fn sigma(&self, v: f64, eta: f64) -> Result<f64, PulseError> {
        Ok(self.gamma(v)? - eta)
    }

    /// `d gamma / d v = -gamma * E / (2 int E)`; undefined for `v <= v_star`.
    pub fn dgamma_dv(&self, v: f64) -> Result<f64, PulseError> {
        let j = self.energy_integral(v);
        if j <= 0.0 {
            return Err(PulseError::ZeroEnergy { v, v_star: self.v_star });
        }
        Ok(-(2.0 / j).sqrt() * self.energy(v) / (2.0 * j))
    }
}

/// Build the [`SingularityGeometry`] for one angle.
pub fn geometry(data: &PulseData, angle: usize) -> SingularityGeometry<'_> {
    let r_sq = 0.5 * data.angles[angle].norm_sq();
    let n = data.dpsi_sq_cum2.len();
    let h = 1.0 / (n - 1) as f64;
    let mut v_star = 1.0;
    if r_sq > 0.0 {
        for k in 0..n {
            if data.dpsi_sq_cum2[k] > 0.0 {
                v_star = h * k.saturating_sub(1) as f64;
                break;
            }
        }
    }
    SingularityGeometry { data, r_sq, v_star }
}

/// Result of the very-short-pulse class membership test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassReport {
    pub support_ok: bool,
    /// Largest `|dpsi|` sampled outside `[0, delta1]`.
    pub support_leak: f64,
    pub angle_ok: bool,
    /// Largest sup-norm distance of a `T0` sample from the reference.
    pub angle_distance: f64,
    pub normalization_ok: bool,
    /// `| ||dpsi||_{L2}^2 - 1 |`, compared against `delta2^2`.
    pub normalization_defect: f64,
    pub in_class: bool,
}

/// Test membership in the very-short-pulse class `C_{delta1, delta2}`:
/// support of `dpsi` inside `[0, delta1]`, all angle samples within `delta2`
/// of `reference`, and `| ||dpsi||^2_{L2[0,1]} - 1 | < delta2^2`.
pub fn check_class(
    data: &PulseData,
    reference: &TracefreeSym2,
    delta1: f64,
    delta2: f64,
) -> ClassReport {
    assert!(delta1 > 0.0 && delta1 < 1.0 && delta2 > 0.0);
    let mut support_leak: f64 = 0.0;
    for k in 0..=2048 {
        let v = delta1 + (1.0 - delta1) * k as f64 / 2048.0;
        support_leak = support_leak.max(data.profile.dpsi(v).abs());
    }
    let support_ok = support_leak <= 1e-12;

    let angle_distance = data
        .angles
        .iter()
        .map(|t| t.dist(reference))
        .fold(0.0f64, f64::max);
    let angle_ok = angle_distance < delta2;

    let normalization_defect = (data.profile.derivative_l2_sq() - 1.0).abs();
    let normalization_ok = normalization_defect < delta2 * delta2;

    ClassReport {
        support_ok,
        support_leak,
        angle_ok,
        angle_distance,
        normalization_ok,
        normalization_defect,
        in_class: support_ok && angle_ok && normalization_ok,
    }
}

/// Output of [`constraint_residual`].
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    /// `Phi` at the nodes of `v_grid`.
    pub phi: Vec<f64>,
    /// Sup of the assembled ODE residual over interior nodes (second-order
    /// finite differences of the returned samples).
    pub residual: f64,
    pub sup_phi: f64,
    /// Whether `sup |Phi| <= kappa * x^2` for the supplied `kappa`.
    pub bound_ok: bool,
}

/// Verify the initial-surface constraint for the conformal factor.
///
/// With `ghat = gring * exp(x psi(v) T0)` and `T0` tracefree, the trace
/// terms of the constraint drop and it reduces to the scalar Riccati-type
/// ODE
///
/// ```text
///   2 Phi'' + (Phi')^2 + (x dpsi)^2 Tr(T0^2) / 2 = 0,
///   Phi(0) = 0,  Phi'(0) = 0,
/// ```
///
/// integrated with the classical fourth-order Runge-Kutta method on
/// `v_grid`. The initial slope vanishes because `Tr(ghat^{-1} dv ghat) =
/// x dpsi Tr(T0) = 0`.
pub fn constraint_residual(
    data: &PulseData,
    angle: usize,
    x: f64,
    v_grid: &[f64],
    kappa: f64,
) -> Result<ConstraintReport, PulseError> {
    assert!(x > 0.0 && x <= 1.0, "x must lie in (0, 1]");
    assert!(v_grid.len() >= 3);
    let tr = data.angles[angle].norm_sq();
    let forcing = |v: f64| {
        let d = x * data.profile.dpsi(v);
        0.5 * d * d * tr
    };
    // State (phi, slope); slope' = -(slope^2 + forcing) / 2.
    let rhs = |v: f64, s: [f64; 2]| [s[1], -0.5 * (s[1] * s[1] + forcing(v))];

    let mut phi = vec![0.0; v_grid.len()];
    let mut state = [0.0, 0.0];
    for k in 1..v_grid.len() {
        let (v0, v1) = (v_grid[k - 1], v_grid[k]);
        let h = v1 - v0;
        let k1 = rhs(v0, state);
        let k2 = rhs(v0 + 0.5 * h, add(state, scale(k1, 0.5 * h)));
        let k3 = rhs(v0 + 0.5 * h, add(state, scale(k2, 0.5 * h)));
        let k4 = rhs(v1, add(state, scale(k3, h)));
        for c in 0..2 {
            state[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        if !state.iter().all(|t| t.is_finite()) || state[1].abs() > 1e8 {
            return Err(PulseError::BlowupDetected { v: v1, slope: state[1] });
        }
        phi[k] = state[0];
    }

    // Self-consistency: plug the samples back into the ODE with central
    // differences (assumes a uniform v_grid for the stencil).
    let mut residual: f64 = 0.0;
    for k in 1..v_grid.len() - 1 {
        let h = v_grid[k + 1] - v_grid[k];
        let d1 = (phi[k + 1] - phi[k - 1]) / (2.0 * h);
        let d2 = (phi[k + 1] - 2.0 * phi[k] + phi[k - 1]) / (h * h);
        residual = residual.max((2.0 * d2 + d1 * d1 + forcing(v_grid[k])).abs());
    }
    let sup_phi = phi.iter().fold(0.0f64, |m, &t| m.max(t.abs()));
    Ok(ConstraintReport { phi, residual, sup_phi, bound_ok: sup_phi <= kappa * x * x })
}

/// Fit the scaling exponent of `sup |Phi|` in the pulse amplitude `x`.
pub fn constraint_scaling_exponent(
    data: &PulseData,
    angle: usize,
    xs: &[f64],
    v_grid: &[f64],
) -> Result<f64, PulseError> {
    let mut logx = Vec::new();
    let mut logs = Vec::new();
    for &x in xs {
        let rep = constraint_residual(data, angle, x, v_grid, f64::INFINITY)?;
        logx.push(x.ln());
        logs.push(rep.sup_phi.ln());
    }
    let (slope, _, _) = fitting::fit_line(&logx, &logs);
    Ok(slope)
}

fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn scale(a: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] * s, a[1] * s]
}

/// Genericity report: simple zero of `psi` at 0, zero proximity of `T0`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GenericityReport {
    pub dpsi_at_zero: f64,
    pub simple_zero: bool,
    /// `|T0|` per angle (`sqrt(Tr(T0^2) / 2)`, the eigenvalue magnitude).
    pub angle_magnitudes: Vec<f64>,
    pub min_angle_magnitude: f64,
}

pub fn genericity(data: &PulseData) -> GenericityReport {
    let dpsi_at_zero = data.profile.dpsi(0.0);
    let angle_magnitudes: Vec<f64> = data.angles.iter().map(|t| t.eigenvalue()).collect();
    let min_angle_magnitude = angle_magnitudes.iter().fold(f64::INFINITY, |m, &t| m.min(t));
    GenericityReport {
        dpsi_at_zero,
        simple_zero: dpsi_at_zero.abs() > SIMPLE_ZERO_THRESHOLD,
        angle_magnitudes,
        min_angle_magnitude,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_data() -> PulseData {
        // Tr(T0^2) = 2 (a = 1, b = 0).
        PulseData::new(PulseProfile::linear(), vec![TracefreeSym2::new(1.0, 0.0)])
    }

    #[test]
    fn energy_examples() {
        let data = linear_data();
        // psi(v) = v, Tr T0^2 = 2 -> E(v) = v.
        for &v in &[0.0, 0.25, 0.5, 1.0] {
            assert!((energy(&data, 0, v).unwrap() - v).abs() < 1e-10);
        }
        // psi(v) = sin(pi v)/pi -> E(1) = 1/2.
        let sine = PulseData::new(
            PulseProfile::new(
                |v| (std::f64::consts::PI * v).sin() / std::f64::consts::PI,
                |v| (std::f64::consts::PI * v).cos(),
                None,
            ),
            vec![TracefreeSym2::new(1.0, 0.0)],
        );
        assert!((energy(&sine, 0, 1.0).unwrap() - 0.5).abs() < 1e-10);
        // zero profile
        let zero = PulseData::new(PulseProfile::zero(), vec![TracefreeSym2::new(1.0, 0.0)]);
        assert_eq!(energy(&zero, 0, 0.7).unwrap(), 0.0);
        assert!(energy(&data, 0, 1.5).is_err());
    }

    #[test]
    fn geometry_closed_forms() {
        let data = linear_data();
        let geo = geometry(&data, 0);
        // digamma = 4 - eta^2 v^2, gamma = 2/v, sigma(1,1) = 1.
        for &(v, eta) in &[(0.5, 0.5), (1.0, 1.0), (1.0, 1.9), (0.3, 2.0)] {
            let exact = 4.0 - eta * eta * v * v;
            // Tolerance limited by the linear interpolation of the cached
            // cumulative table between its 4096 nodes.
            assert!((geo.digamma(v, eta) - exact).abs() < 2e-7, "digamma({v},{eta})");
        }
        assert!((geo.gamma(1.0).unwrap() - 2.0).abs() < 1e-6);
        assert!((geo.gamma(0.5).unwrap() - 4.0).abs() < 1e-6);
        assert!((geo.sigma(1.0, 1.0).unwrap() - 1.0).abs() < 1e-6);
        // digamma(v, 0) = 4 always; digamma(v, gamma(v)) = 0.
        assert_eq!(geo.digamma(0.77, 0.0), 4.0);
        let g = geo.gamma(0.9).unwrap();
        assert!(geo.digamma(0.9, g).abs() < 1e-10);
        // dgamma/dv = -2/v^2 for the linear pulse.
        assert!((geo.dgamma_dv(1.0).unwrap() + 2.0).abs() < 1e-7);
    }

    #[test]
    fn zero_profile_has_no_singularity() {
        let zero = PulseData::new(PulseProfile::zero(), vec![TracefreeSym2::new(1.0, 0.0)]);
        let geo = geometry(&zero, 0);
        assert_eq!(geo.digamma(1.0, 5.0), 4.0);
        assert!(matches!(geo.gamma(1.0), Err(PulseError::ZeroEnergy { .. })));
        assert_eq!(geo.v_star, 1.0);
    }

    #[test]
    fn tracefree_eigenvalues() {
        let m = TracefreeSym2::new(0.6, 0.8);
        assert!((m.eigenvalue() - 1.0).abs() < 1e-15);
        assert!((m.norm_sq() - 2.0).abs() < 1e-15);
        // Sigma^2 = lambda^2 Id for these tensors.
        let mm = m.as_matrix();
        let sq = mm[0][0] * mm[0][0] + mm[0][1] * mm[1][0];
        assert!((sq - m.eigenvalue().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn class_membership_bump() {
        let data = PulseData::new(
            PulseProfile::normalized_bump(0.1),
            vec![TracefreeSym2::new(1.0, 0.0)],
        );
        let rep = check_class(&data, &TracefreeSym2::new(1.0, 0.0), 0.1, 0.05);
        assert!(rep.support_ok && rep.angle_ok && rep.normalization_ok && rep.in_class);

        // Linear profile fails the support test for delta1 < 1.
        let lin = linear_data();
        let rep = check_class(&lin, &TracefreeSym2::new(1.0, 0.0), 0.5, 0.05);
        assert!(!rep.support_ok && !rep.in_class);
    }

    #[test]
    fn normalization_tolerance_arithmetic() {
        // ||dpsi||^2 = 1.01: defect 0.01 fails delta2 = 0.05 (0.0025) but
        // passes delta2 = 0.2 (0.04).
        let amp = 1.01f64.sqrt();
        let data = PulseData::new(
            PulseProfile::new(move |v| amp * v, move |_| amp, None),
            vec![TracefreeSym2::new(1.0, 0.0)],
        );
        let strict = check_class(&data, &TracefreeSym2::new(1.0, 0.0), 0.999, 0.05);
        assert!(!strict.normalization_ok);
        let loose = check_class(&data, &TracefreeSym2::new(1.0, 0.0), 0.999, 0.2);
        assert!(loose.normalization_ok);
    }

    #[test]
    fn constraint_scaling_is_quadratic() {
        let data = linear_data();
        let v_grid: Vec<f64> = (0..1024).map(|k| k as f64 / 1023.0).collect();
        let rep = constraint_residual(&data, 0, 0.1, &v_grid, 1.0).unwrap();
        assert!(rep.residual < 1e-8, "residual {}", rep.residual);
        assert!(rep.sup_phi <= 0.01, "sup phi {}", rep.sup_phi);
        assert!(rep.bound_ok);
        let slope =
            constraint_scaling_exponent(&data, 0, &[0.2, 0.1, 0.05], &v_grid).unwrap();
        assert!((1.9..=2.1).contains(&slope), "slope {slope}");
    }

    #[test]
    fn genericity_reports() {
        let data = linear_data();
        let rep = genericity(&data);
        assert!(rep.simple_zero);
        assert!((rep.dpsi_at_zero - 1.0).abs() < 1e-15);

        let quad_profile = PulseData::new(
            PulseProfile::new(|v| v * v, |v| 2.0 * v, None),
            vec![TracefreeSym2::new(0.5, 0.0)],
        );
        let rep = genericity(&quad_profile);
        assert!(!rep.simple_zero);
        assert!((rep.min_angle_magnitude - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cross_derivative_identity_for_closed_forms() {
        // f = 2 dv log digamma, h = 2 deta log digamma: d_eta f = d_v h.
        let data = linear_data();
        let geo = geometry(&data, 0);
        let d = 1e-5;
        let f = |v: f64, e: f64| {
            (geo.digamma(v + d, e).ln() - geo.digamma(v - d, e).ln()) / d
        };
        let h = |v: f64, e: f64| {
            (geo.digamma(v, e + d).ln() - geo.digamma(v, e - d).ln()) / d
        };
        let (v, e) = (0.8, 0.9);
        let df_de = (f(v, e + d) - f(v, e - d)) / (2.0 * d);
        let dh_dv = (h(v + d, e) - h(v - d, e)) / (2.0 * d);
        assert!((df_de - dh_dv).abs() < 1e-4);
    }
}
