//! Characteristic initial-value (Goursat) solvers on a coordinate rectangle.
//!
//! The first-order system reads
//!
//! ```text
//!   d/deta X = P(v, eta, X, Y),      X(v, c) = X0(v),
//!   d/dv   Y = Q(v, eta, X, Y),      Y(a, eta) = Y0(eta),
//! ```
//!
//! on `[a, b] x [c, d]`. The discretisation integrates the weak form cell by
//! cell with the trapezoid rule and resolves the implicit corner value of
//! each cell by fixed-point (Picard) iteration, marching with `v` outermost
//! and `eta` innermost so every update only touches already-computed nodes.
//!
//! Also provided: the reduction of a second-order equation
//! `dv deta Z = P(v, eta, dv Z, deta Z, Z)` to a first-order system, a solver
//! for systems with a `eta * d/deta` degeneracy on the initial line
//! `eta = 0`, and an a-priori sup bound of Gronwall type for affine-linear
//! problems.

use crate::grid::{CharGrid, Field};
use thiserror::Error;

/// Right-hand side of one equation group: `f(v, eta, x, y, out)` writes the
/// derivative into `out`.
pub type Rhs<'a> = &'a dyn Fn(f64, f64, &[f64], &[f64], &mut [f64]);
/// Characteristic data: `f(coord, out)`.
pub type EdgeData<'a> = &'a dyn Fn(f64, &mut [f64]);

/// A first-order Goursat problem with `dim`-vector unknowns `X` and `Y`.
pub struct GoursatProblem<'a> {
    pub dim_x: usize,
    pub dim_y: usize,
    /// `d/deta X = p(v, eta, X, Y)`.
    pub p: Rhs<'a>,
    /// `d/dv Y = q(v, eta, X, Y)`.
    pub q: Rhs<'a>,
    /// `X` on the edge `eta = c`.
    pub x0: EdgeData<'a>,
    /// `Y` on the edge `v = a`.
    pub y0: EdgeData<'a>,
}

/// Seed used for the per-cell fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Seed {
    /// Start from the already-computed neighbour values (default).
    #[default]
    Extension,
    /// Start from zero; useful as a uniqueness surrogate.
    Zero,
}

/// Solver controls.
#[derive(Clone, Copy)]
pub struct SolveOptions<'m> {
    /// Fixed-point stopping tolerance on the sup-norm update.
    pub tol: f64,
    /// Iteration cap per cell.
    pub max_iter: usize,
    pub seed: Seed,
    /// Active-region predicate; nodes where it returns `false` are skipped
    /// and reported as NaN. Must be monotone (a skipped node may not sit
    /// below or left of an active one).
    pub mask: Option<&'m dyn Fn(f64, f64) -> bool>,
}

impl Default for SolveOptions<'_> {
    fn default() -> Self {
        SolveOptions { tol: 1e-12, max_iter: 64, seed: Seed::default(), mask: None }
    }
}

#[derive(Debug, Error)]
pub enum GoursatError {
    #[error("cell ({i}, {j}) did not converge: last update {residual:e} after {iters} iterations")]
    NonConvergence { i: usize, j: usize, residual: f64, iters: usize },
    #[error("non-finite value produced at node ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("incompatible corner data: Z0(a) = {z0_a}, Z1(c) = {z1_c}")]
    IncompatibleCorner { z0_a: f64, z1_c: f64 },
    #[error("source fails the vanishing bound at v = {v}: |F| = {value:e} > {bound:e}")]
    SourceNotVanishing { v: f64, value: f64, bound: f64 },
}

/// Discrete solution of a first-order problem: one [`Field`] per component.
pub struct GoursatSolution {
    pub grid: CharGrid,
    pub x: Vec<Field>,
    pub y: Vec<Field>,
    /// Largest final fixed-point update over all cells.
    pub residual: f64,
    /// Largest iteration count used by any cell.
    pub iterations: usize,
}

impl GoursatSolution {
    /// Sup of `|X| + |Y|` component-wise over active nodes.
    pub fn sup_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for f in self.x.iter().chain(self.y.iter()) {
            m = m.max(f.max_abs_where(|_, _| true));
        }
        m
    }
}

/// Solve a first-order Goursat problem on `grid`.
pub fn solve_first_order(
    problem: &GoursatProblem,
    grid: &CharGrid,
    opts: &SolveOptions,
) -> Result<GoursatSolution, GoursatError> {
    let (nx, ny) = (problem.dim_x, problem.dim_y);
    let (nv, neta) = (grid.nv, grid.neta);
    let (dv, deta) = (grid.dv(), grid.deta());

    let mut x = vec![Field::full(nv, neta, f64::NAN); nx];
    let mut y = vec![Field::full(nv, neta, f64::NAN); ny];
    // Cached right-hand-side values at solved nodes; they feed the
    // Adams-Moulton panel quadratures of the later nodes on the same line.
    let mut pf = vec![Field::full(nv, neta, f64::NAN); nx];
    let mut qf = vec![Field::full(nv, neta, f64::NAN); ny];
    let mut residual: f64 = 0.0;
    let mut iterations = 0usize;

    // Scratch buffers reused across cells.
    let mut xc = vec![0.0; nx];
    let mut yc = vec![0.0; ny];
    let mut x_base = vec![0.0; nx];
    let mut y_base = vec![0.0; ny];
    let mut p_cur = vec![0.0; nx];
    let mut q_cur = vec![0.0; ny];
    let mut x_new = vec![0.0; nx];
    let mut y_new = vec![0.0; ny];

    let active = |v: f64, eta: f64| opts.mask.map_or(true, |m| m(v, eta));

    for i in 0..nv {
        let v = grid.v(i);
        for j in 0..neta {
            let eta = grid.eta(j);
            if !active(v, eta) {
                continue;
            }

            let have_x_data = j == 0;
            let have_y_data = i == 0;
            if have_x_data {
                (problem.x0)(v, &mut xc);
            }
            if have_y_data {
                (problem.y0)(eta, &mut yc);
            }

            // Assemble the explicit part of each line quadrature. Per panel
            // the integral of P over [eta_{j-1}, eta_j] is taken with the
            // highest-order Adams-Moulton rule the line history supports
            // (fourth order from the third panel on); `cx`/`cy` are the
            // implicit weights multiplying the current node's value.
            let mut cx = 0.0;
            let mut cy = 0.0;
            let mut broken = false;
            if !have_x_data {
                load(&x, i, j - 1, &mut x_base);
                if x_base.iter().any(|t| t.is_nan()) {
                    continue; // predecessor masked; propagate the gap
                }
                for k in 0..nx {
                    let (expl, c) = match j {
                        1 => (0.5 * deta * pf[k][(i, 0)], 0.5 * deta),
                        2 => (
                            deta / 12.0 * (-pf[k][(i, 0)] + 8.0 * pf[k][(i, 1)]),
                            5.0 * deta / 12.0,
                        ),
                        _ => (
                            deta / 24.0
                                * (pf[k][(i, j - 3)] - 5.0 * pf[k][(i, j - 2)]
                                    + 19.0 * pf[k][(i, j - 1)]),
                            9.0 * deta / 24.0,
                        ),
                    };
                    if !expl.is_finite() {
                        broken = true;
                    }
                    x_base[k] += expl;
                    cx = c;
                }
            }
            if !have_y_data {
                load(&y, i - 1, j, &mut y_base);
                if y_base.iter().any(|t| t.is_nan()) {
                    continue;
                }
                for k in 0..ny {
                    let (expl, c) = match i {
                        1 => (0.5 * dv * qf[k][(0, j)], 0.5 * dv),
                        2 => (
                            dv / 12.0 * (-qf[k][(0, j)] + 8.0 * qf[k][(1, j)]),
                            5.0 * dv / 12.0,
                        ),
                        _ => (
                            dv / 24.0
                                * (qf[k][(i - 3, j)] - 5.0 * qf[k][(i - 2, j)]
                                    + 19.0 * qf[k][(i - 1, j)]),
                            9.0 * dv / 24.0,
                        ),
                    };
                    if !expl.is_finite() {
                        broken = true;
                    }
                    y_base[k] += expl;
                    cy = c;
                }
            }
            if broken {
                continue; // history crosses a masked node
            }

            if !(have_x_data && have_y_data) {
                // Seed the corner iterate.
                match opts.seed {
                    Seed::Extension => {
                        if !have_x_data {
                            load(&x, i, j - 1, &mut xc);
                        }
                        if !have_y_data {
                            load(&y, i - 1, j, &mut yc);
                        }
                    }
                    Seed::Zero => {
                        if !have_x_data {
                            xc.iter_mut().for_each(|t| *t = 0.0);
                        }
                        if !have_y_data {
                            yc.iter_mut().for_each(|t| *t = 0.0);
                        }
                    }
                }

                let mut last_update = f64::INFINITY;
                let mut converged = false;
                let mut used = 0usize;
                for it in 0..opts.max_iter {
                    used = it + 1;
                    last_update = 0.0;
                    if !have_x_data {
                        (problem.p)(v, eta, &xc, &yc, &mut p_cur);
                        for k in 0..nx {
                            x_new[k] = x_base[k] + cx * p_cur[k];
                            last_update = last_update.max((x_new[k] - xc[k]).abs());
                        }
                    }
                    if !have_y_data {
                        (problem.q)(v, eta, &xc, &yc, &mut q_cur);
                        for k in 0..ny {
                            y_new[k] = y_base[k] + cy * q_cur[k];
                            last_update = last_update.max((y_new[k] - yc[k]).abs());
                        }
                    }
                    if !have_x_data {
                        xc.copy_from_slice(&x_new);
                    }
                    if !have_y_data {
                        yc.copy_from_slice(&y_new);
                    }
                    if !last_update.is_finite() {
                        return Err(GoursatError::NonFinite { i, j });
                    }
                    if last_update <= opts.tol {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(GoursatError::NonConvergence {
                        i,
                        j,
                        residual: last_update,
                        iters: used,
                    });
                }
                if xc.iter().chain(yc.iter()).any(|t| !t.is_finite()) {
                    return Err(GoursatError::NonFinite { i, j });
                }
                residual = residual.max(last_update);
                iterations = iterations.max(used);
            }

            store(&mut x, i, j, &xc);
            store(&mut y, i, j, &yc);
            // Cache the right-hand sides for downstream panel quadratures.
            (problem.p)(v, eta, &xc, &yc, &mut p_cur);
            (problem.q)(v, eta, &xc, &yc, &mut q_cur);
            store(&mut pf, i, j, &p_cur);
            store(&mut qf, i, j, &q_cur);
        }
    }

    Ok(GoursatSolution { grid: grid.clone(), x, y, residual, iterations })
}

fn store(fields: &mut [Field], i: usize, j: usize, vals: &[f64]) {
    for (f, &v) in fields.iter_mut().zip(vals) {
        f[(i, j)] = v;
    }
}

fn load(fields: &[Field], i: usize, j: usize, out: &mut [f64]) {
    for (f, o) in fields.iter().zip(out.iter_mut()) {
        *o = f[(i, j)];
    }
}

/// Discrete solution of a second-order characteristic problem.
pub struct SecondOrderSolution {
    pub grid: CharGrid,
    pub z: Field,
    /// `d/dv Z`.
    pub zv: Field,
    /// `d/deta Z`.
    pub zeta: Field,
    pub residual: f64,
}

/// Solve `dv deta Z = rhs(v, eta, dv Z, deta Z, Z)` with characteristic data
/// `Z = Z0(v)` on `eta = c` and `Z = Z1(eta)` on `v = a`.
///
/// `z0` returns `(Z0, dZ0/dv)` and `z1` returns `(Z1, dZ1/deta)`. The corner
/// values `Z0(a)` and `Z1(c)` must agree.
///
/// The reduction introduces `X = (dv Z, Z)` propagated in `eta` and
/// `Y = (deta Z, Z)` propagated in `v`, both driven by the same scalar
/// right-hand side, and reads `Z` off the second `X` component.
pub fn solve_second_order(
    rhs: &dyn Fn(f64, f64, f64, f64, f64) -> f64,
    z0: &dyn Fn(f64) -> (f64, f64),
    z1: &dyn Fn(f64) -> (f64, f64),
    grid: &CharGrid,
    opts: &SolveOptions,
) -> Result<SecondOrderSolution, GoursatError> {
    let (z0_a, _) = z0(grid.rect.a);
    let (z1_c, _) = z1(grid.rect.c);
    let scale = 1.0 + z0_a.abs().max(z1_c.abs());
    if (z0_a - z1_c).abs() > 1e-10 * scale {
        return Err(GoursatError::IncompatibleCorner { z0_a, z1_c });
    }

    // X = (X1, X2) = (dv Z, Z) evolves in eta; Y = (Y1, Y2) = (deta Z, Z)
    // evolves in v. The cross-derivative equation drives X1 and Y1; X2 and Y2
    // just integrate the first components.
    let p = |v: f64, eta: f64, x: &[f64], y: &[f64], out: &mut [f64]| {
        out[0] = rhs(v, eta, x[0], y[0], x[1]);
        out[1] = y[0];
    };
    let q = |v: f64, eta: f64, x: &[f64], y: &[f64], out: &mut [f64]| {
        out[0] = rhs(v, eta, x[0], y[0], x[1]);
        out[1] = x[0];
    };
    let x_data = |v: f64, out: &mut [f64]| {
        let (z, dz) = z0(v);
        out[0] = dz;
        out[1] = z;
    };
    let y_data = |eta: f64, out: &mut [f64]| {
        let (z, dz) = z1(eta);
        out[0] = dz;
        out[1] = z;
    };
    let problem = GoursatProblem {
        dim_x: 2,
        dim_y: 2,
        p: &p,
        q: &q,
        x0: &x_data,
        y0: &y_data,
    };
    let sol = solve_first_order(&problem, grid, opts)?;

    let mut z = sol.x[1].clone();
    // The characteristic edges carry exact data; pin them so the returned
    // field matches it to machine precision.
    for i in 0..grid.nv {
        z[(i, 0)] = z0(grid.v(i)).0;
    }
    for j in 0..grid.neta {
        z[(0, j)] = z1(grid.eta(j)).0;
    }
    Ok(SecondOrderSolution {
        grid: grid.clone(),
        z,
        zv: sol.x[0].clone(),
        zeta: sol.y[0].clone(),
        residual: sol.residual,
    })
}

/// Scalar coefficient/source closure `f(v, eta)`.
pub type Coeff<'a> = &'a dyn Fn(f64, f64) -> f64;

/// Coefficients and sources of the singular linear system
///
/// ```text
///   eta * d/deta X + p1 X + q1 Y = F,     X(v, 0) = 0,
///         d/dv   Y + p2 X + q2 Y = G,     Y(a, eta) = Y0(eta).
/// ```
pub struct SingularProblem<'a> {
    pub p1: Coeff<'a>,
    pub q1: Coeff<'a>,
    pub p2: Coeff<'a>,
    pub q2: Coeff<'a>,
    pub f: Coeff<'a>,
    pub g: Coeff<'a>,
    pub y0: &'a dyn Fn(f64) -> f64,
}

/// Solve a [`SingularProblem`] on a grid whose `eta`-range starts at `0`.
///
/// `X` is recovered from the integral form
/// `X(v, eta) = int_0^eta (F - p1 X - q1 Y) / t dt`, whose integrand is set
/// to zero at `t = 0`; this requires the source to vanish rapidly, which is
/// enforced by the bound `|F(v, eta_1)| <= kappa * eta_1^2` on the first
/// interior layer.
///
/// Near `eta = 0` the trapezoid weight of the implicit `p1 X / eta` term is
/// `p1 * deta / (2 eta) = O(p1)`, so a naive Picard sweep need not contract.
/// Each node update therefore solves its own-linear part algebraically and
/// iterates only across the `X`-`Y` cross coupling.
pub fn solve_singular(
    problem: &SingularProblem,
    grid: &CharGrid,
    opts: &SolveOptions,
    kappa: f64,
) -> Result<GoursatSolution, GoursatError> {
    assert!(
        grid.rect.c.abs() < 1e-300,
        "singular solver requires the initial line eta = 0"
    );
    let eta1 = grid.eta(1);
    let bound = kappa * eta1 * eta1;
    for i in 0..grid.nv {
        let v = grid.v(i);
        let val = (problem.f)(v, eta1).abs();
        if val > bound {
            return Err(GoursatError::SourceNotVanishing { v, value: val, bound });
        }
    }

    let (nv, neta) = (grid.nv, grid.neta);
    let (dv, deta) = (grid.dv(), grid.deta());
    let mut x = Field::zeros(nv, neta);
    let mut y = Field::zeros(nv, neta);
    let mut residual: f64 = 0.0;
    let mut iterations = 0usize;

    // Integrand of the X integral form; zero on the degenerate line.
    let gx = |v: f64, eta: f64, xv: f64, yv: f64| -> f64 {
        if eta == 0.0 {
            0.0
        } else {
            ((problem.f)(v, eta) - (problem.p1)(v, eta) * xv - (problem.q1)(v, eta) * yv) / eta
        }
    };
    let qy = |v: f64, eta: f64, xv: f64, yv: f64| -> f64 {
        (problem.g)(v, eta) - (problem.p2)(v, eta) * xv - (problem.q2)(v, eta) * yv
    };

    for i in 0..nv {
        let v = grid.v(i);
        for j in 0..neta {
            let eta = grid.eta(j);
            if j == 0 {
                x[(i, j)] = 0.0;
            }
            if i == 0 {
                y[(i, j)] = (problem.y0)(eta);
            }
            if i == 0 && j == 0 {
                continue;
            }

            // Known halves of the trapezoid increments.
            let x_base = if j > 0 {
                let (xp, yp) = (x[(i, j - 1)], y[(i, j - 1)]);
                x[(i, j - 1)] + 0.5 * deta * gx(v, grid.eta(j - 1), xp, yp)
            } else {
                0.0
            };
            let y_base = if i > 0 {
                let (xp, yp) = (x[(i - 1, j)], y[(i - 1, j)]);
                y[(i - 1, j)] + 0.5 * dv * qy(grid.v(i - 1), eta, xp, yp)
            } else {
                0.0
            };

            // Implicit own-coefficients of the current node.
            let ax = if j > 0 { 1.0 + 0.5 * deta * (problem.p1)(v, eta) / eta } else { 1.0 };
            let ay = if i > 0 { 1.0 + 0.5 * dv * (problem.q2)(v, eta) } else { 1.0 };
            if ax.abs() < 1e-10 || ay.abs() < 1e-10 {
                return Err(GoursatError::NonFinite { i, j });
            }

            let mut xc = if j > 0 { x[(i, j - 1)] } else { 0.0 };
            let mut yc = if i > 0 { y[(i - 1, j)] } else { y[(i, j)] };
            let mut last_update = f64::INFINITY;
            let mut converged = false;
            let mut used = 0usize;
            for it in 0..opts.max_iter {
                used = it + 1;
                let xn = if j > 0 {
                    (x_base
                        + 0.5 * deta / eta
                            * ((problem.f)(v, eta) - (problem.q1)(v, eta) * yc))
                        / ax
                } else {
                    0.0
                };
                let yn = if i > 0 {
                    (y_base + 0.5 * dv * ((problem.g)(v, eta) - (problem.p2)(v, eta) * xn)) / ay
                } else {
                    yc
                };
                last_update = (xn - xc).abs().max((yn - yc).abs());
                xc = xn;
                yc = yn;
                if !last_update.is_finite() {
                    return Err(GoursatError::NonFinite { i, j });
                }
                if last_update <= opts.tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(GoursatError::NonConvergence { i, j, residual: last_update, iters: used });
            }
            residual = residual.max(last_update);
            iterations = iterations.max(used);
            if j > 0 {
                x[(i, j)] = xc;
            }
            if i > 0 {
                y[(i, j)] = yc;
            }
        }
    }

    Ok(GoursatSolution {
        grid: grid.clone(),
        x: vec![x],
        y: vec![y],
        residual,
        iterations,
    })
}

/// A-priori sup bound for affine-linear Goursat problems.
///
/// For `|P| <= B + M (|X| + |Y|)`, `|Q| <= B + M (|X| + |Y|)` and data
/// bounded by `B` on a rectangle of side lengths `w x h`, the iterated
/// one-dimensional Gronwall inequality gives
///
/// ```text
///   |X|, |Y| <= B * D * (1 + 2 E w h exp(2 E w h)),
///   D = max((1 + M h) e^{M h}, (1 + M w) e^{M w}),   E = M^2 max(e^{M h}, e^{M w}).
/// ```
///
/// The bound is far from sharp but is monotone in all arguments, reduces to
/// `B` when `M = 0`, and dominates the discrete solution.
pub fn gronwall_bound(m: f64, b: f64, w: f64, h: f64) -> f64 {
    assert!(m >= 0.0 && b >= 0.0 && w > 0.0 && h > 0.0);
    let dh = (1.0 + m * h) * (m * h).exp();
    let dw = (1.0 + m * w) * (m * w).exp();
    let d = dh.max(dw);
    let e = m * m * (m * h).exp().max((m * w).exp());
    let area = w * h;
    b * d * (1.0 + 2.0 * e * area * (2.0 * e * area).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Rect;

    /// Series oracle `sum_k s^k / (k!)^2`; at `s = v * eta` this solves
    /// `dv deta Z = Z` with `Z = 1` on both edges (alternating sign: the
    /// same problem with right-hand side `-Z`).
    fn squared_factorial_series(s: f64, alternating: bool) -> f64 {
        let mut term = 1.0;
        let mut acc = 1.0;
        for k in 1..40 {
            term *= s / ((k * k) as f64);
            acc += if alternating && k % 2 == 1 { -term } else { term };
        }
        acc
    }

    /// Series oracle `sum_k s^k / (k! (k+1)!)`; together with the previous
    /// series, `X(1, 1) = I0(2) + I1(2)` solves the first-order exchange
    /// system `d/deta X = Y`, `d/dv Y = X` with unit data: the second edge
    /// condition is `X(0, eta) = 1 + eta`, which adds the `I1` branch.
    fn exchange_corner_series(s: f64) -> f64 {
        let mut term = 1.0;
        let mut acc = 1.0; // k = 0 term of I1 part
        for k in 1..40 {
            term *= s / ((k * (k + 1)) as f64);
            acc += term;
        }
        squared_factorial_series(s, false) + acc
    }

    // Frozen oracle values at the corner (1, 1).
    const BESSEL_I0_2: f64 = 2.2795853023360673;
    const BESSEL_J0_2: f64 = 0.2238907791412357;
    const EXCHANGE_CORNER: f64 = 3.8702221569733964; // I0(2) + I1(2)

    #[test]
    fn oracle_series_match_frozen_values() {
        assert!((squared_factorial_series(1.0, false) - BESSEL_I0_2).abs() < 1e-15);
        assert!((squared_factorial_series(1.0, true) - BESSEL_J0_2).abs() < 1e-15);
        assert!((exchange_corner_series(1.0) - EXCHANGE_CORNER).abs() < 2e-15);
    }

    fn exchange_problem() -> GoursatProblem<'static> {
        GoursatProblem {
            dim_x: 1,
            dim_y: 1,
            p: &|_, _, _, y, out| out[0] = y[0],
            q: &|_, _, x, _, out| out[0] = x[0],
            x0: &|_, out| out[0] = 1.0,
            y0: &|_, out| out[0] = 1.0,
        }
    }

    #[test]
    fn first_order_matches_series_oracle() {
        let grid = CharGrid::new(Rect::unit(), 129, 129);
        let sol = solve_first_order(&exchange_problem(), &grid, &SolveOptions::default()).unwrap();
        let err = (sol.x[0][(128, 128)] - EXCHANGE_CORNER).abs();
        assert!(err < 5e-5, "corner error {err}");
        // Symmetric problem: X and Y agree on the diagonal.
        assert!((sol.x[0][(64, 64)] - sol.y[0][(64, 64)]).abs() < 1e-12);
    }

    #[test]
    fn first_order_is_second_order_accurate() {
        let corner_err = |n: usize| {
            let grid = CharGrid::new(Rect::unit(), n, n);
            let sol = solve_first_order(&exchange_problem(), &grid, &SolveOptions::default()).unwrap();
            (sol.x[0][(n - 1, n - 1)] - EXCHANGE_CORNER).abs()
        };
        let e1 = corner_err(33);
        let e2 = corner_err(65);
        assert!(e2 * 3.5 < e1, "halving the step should cut the error ~4x: {e1} vs {e2}");
    }

    #[test]
    fn data_edges_are_reproduced_exactly() {
        let grid = CharGrid::new(Rect::new(0.0, 1.0, 0.5, 2.0), 17, 23);
        let problem = GoursatProblem {
            dim_x: 1,
            dim_y: 1,
            p: &|v, e, x, y, out| out[0] = x[0] * y[0] - v * e,
            q: &|v, e, x, y, out| out[0] = (x[0] + y[0]).sin() + v + e,
            x0: &|v, out| out[0] = v * v,
            y0: &|e, out| out[0] = e.cos(),
        };
        let sol = solve_first_order(&problem, &grid, &SolveOptions::default()).unwrap();
        for i in 0..grid.nv {
            assert_eq!(sol.x[0][(i, 0)], grid.v(i) * grid.v(i));
        }
        for j in 0..grid.neta {
            assert_eq!(sol.y[0][(0, j)], grid.eta(j).cos());
        }
    }

    #[test]
    fn seed_choice_converges_to_the_same_solution() {
        let grid = CharGrid::new(Rect::unit(), 33, 33);
        let run = |seed| {
            let opts = SolveOptions { seed, ..SolveOptions::default() };
            solve_first_order(&exchange_problem(), &grid, &opts).unwrap()
        };
        let a = run(Seed::Extension);
        let b = run(Seed::Zero);
        for i in 0..33 {
            for j in 0..33 {
                assert!((a.x[0][(i, j)] - b.x[0][(i, j)]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn second_order_matches_bessel_oracle() {
        // dv deta Z = -Z with Z = 1 on both edges has Z(1,1) = J0(2).
        let grid = CharGrid::new(Rect::unit(), 129, 129);
        let sol = solve_second_order(
            &|_, _, _, _, z| -z,
            &|_| (1.0, 0.0),
            &|_| (1.0, 0.0),
            &grid,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!((sol.z[(128, 128)] - BESSEL_J0_2).abs() < 5e-5);
    }

    #[test]
    fn second_order_matches_modified_bessel_oracle() {
        // dv deta Z = Z with Z = 1 on both edges has Z(1,1) = I0(2).
        let grid = CharGrid::new(Rect::unit(), 129, 129);
        let sol = solve_second_order(
            &|_, _, _, _, z| z,
            &|_| (1.0, 0.0),
            &|_| (1.0, 0.0),
            &grid,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!((sol.z[(128, 128)] - BESSEL_I0_2).abs() < 5e-5);
    }

    #[test]
    fn second_order_linear_data_is_exact() {
        // Zero right-hand side with Z0 = v, Z1 = eta gives Z = v + eta, exact
        // at the nodes because all integrands are constant.
        let grid = CharGrid::new(Rect::unit(), 9, 9);
        let sol = solve_second_order(
            &|_, _, _, _, _| 0.0,
            &|v| (v, 1.0),
            &|e| (e, 1.0),
            &grid,
            &SolveOptions::default(),
        )
        .unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let exact = grid.v(i) + grid.eta(j);
                assert!((sol.z[(i, j)] - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn second_order_unit_source_is_exact() {
        // dv deta Z = 1 with zero data gives Z = v * eta exactly at nodes.
        let grid = CharGrid::new(Rect::unit(), 9, 9);
        let sol = solve_second_order(
            &|_, _, _, _, _| 1.0,
            &|_| (0.0, 0.0),
            &|_| (0.0, 0.0),
            &grid,
            &SolveOptions::default(),
        )
        .unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let exact = grid.v(i) * grid.eta(j);
                assert!((sol.z[(i, j)] - exact).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn second_order_rejects_incompatible_corner() {
        let grid = CharGrid::new(Rect::unit(), 9, 9);
        let res = solve_second_order(
            &|_, _, _, _, _| 0.0,
            &|v| (v + 1.0, 1.0),
            &|e| (e, 1.0),
            &grid,
            &SolveOptions::default(),
        );
        assert!(matches!(res, Err(GoursatError::IncompatibleCorner { .. })));
    }

    #[test]
    fn singular_solver_reproduces_quartic() {
        // eta X' - 3 X = eta^4 has the exact rapidly-vanishing solution
        // X = eta^4 (direct substitution: 4 eta^4 - 3 eta^4 = eta^4).
        let problem = SingularProblem {
            p1: &|_, _| -3.0,
            q1: &|_, _| 0.0,
            p2: &|_, _| 0.0,
            q2: &|_, _| 0.0,
            f: &|_, e| e.powi(4),
            g: &|_, _| 0.0,
            y0: &|_| 0.0,
        };
        let err_at = |n: usize| {
            let grid = CharGrid::new(Rect::unit(), 9, n);
            let sol = solve_singular(&problem, &grid, &SolveOptions::default(), 10.0).unwrap();
            let mut e: f64 = 0.0;
            for j in 0..n {
                e = e.max((sol.x[0][(4, j)] - grid.eta(j).powi(4)).abs());
            }
            e
        };
        let e1 = err_at(65);
        let e2 = err_at(129);
        assert!(e1 < 1e-3, "coarse error {e1}");
        assert!(e2 * 3.5 < e1, "expected second-order decay: {e1} vs {e2}");
    }

    #[test]
    fn singular_solver_rejects_slowly_vanishing_sources() {
        let problem = SingularProblem {
            p1: &|_, _| 1.0,
            q1: &|_, _| 0.0,
            p2: &|_, _| 0.0,
            q2: &|_, _| 0.0,
            f: &|_, _| 1.0, // does not vanish at eta = 0
            g: &|_, _| 0.0,
            y0: &|_| 0.0,
        };
        let grid = CharGrid::new(Rect::unit(), 9, 33);
        let res = solve_singular(&problem, &grid, &SolveOptions::default(), 10.0);
        assert!(matches!(res, Err(GoursatError::SourceNotVanishing { .. })));
    }

    #[test]
    fn gronwall_bound_dominates_linear_solutions() {
        // P = Y, Q = X with unit data: M = 1, B = 1 on the unit square.
        let grid = CharGrid::new(Rect::unit(), 65, 65);
        let sol = solve_first_order(&exchange_problem(), &grid, &SolveOptions::default()).unwrap();
        let ceiling = gronwall_bound(1.0, 1.0, 1.0, 1.0);
        assert!(sol.sup_norm() <= ceiling, "{} > {ceiling}", sol.sup_norm());
    }

    #[test]
    fn gronwall_bound_basic_properties() {
        assert_eq!(gronwall_bound(0.0, 3.0, 1.0, 1.0), 3.0);
        assert_eq!(gronwall_bound(2.0, 0.0, 1.0, 1.0), 0.0);
        assert!(gronwall_bound(2.0, 1.0, 1.0, 1.0) > gronwall_bound(1.0, 1.0, 1.0, 1.0));
        assert!(gronwall_bound(1.0, 1.0, 2.0, 1.0) > gronwall_bound(1.0, 1.0, 1.0, 1.0));
    }
}
