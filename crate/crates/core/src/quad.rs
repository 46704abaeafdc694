//! Quadrature helpers: cumulative integrals on uniform grids and
//! singularity-weighted panel rules for integrands with a near-boundary
//! pole of known shape.

/// Quadrature weights for `n` uniformly spaced nodes with spacing `h`,
/// fourth order (exact for cubics): composite Simpson, patched with the
/// 3/8 rule on the final three panels when the panel count is odd. Falls
/// back to the trapezoid rule for fewer than three nodes.
pub fn composite_weights(n: usize, h: f64) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        2 => vec![0.5 * h, 0.5 * h],
        3 => vec![h / 3.0, 4.0 * h / 3.0, h / 3.0],
        4 => vec![3.0 * h / 8.0, 9.0 * h / 8.0, 9.0 * h / 8.0, 3.0 * h / 8.0],
        _ => {
            let mut w = vec![0.0; n];
            // Simpson section: even panel count, i.e. odd node count.
            let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
            w[0] += h / 3.0;
            w[simpson_end] += h / 3.0;
            for (k, wk) in w.iter_mut().enumerate().take(simpson_end).skip(1) {
                *wk += if k % 2 == 1 { 4.0 * h / 3.0 } else { 2.0 * h / 3.0 };
            }
            if n % 2 == 0 {
                for (k, c) in [(n - 4, 3.0), (n - 3, 9.0), (n - 2, 9.0), (n - 1, 3.0)] {
                    w[k] += c * h / 8.0;
                }
            }
            w
        }
    }
}

/// Cumulative integral of uniformly sampled data, fourth order.
///
/// Returns `I` with `I[0] = 0` and `I[j] ~ integral of f over the first j
/// panels`, integrating the cubic interpolant through the four nodes nearest
/// each panel (exact for cubics). Falls back to the trapezoid rule when
/// fewer than four samples are available.
pub fn cumulative_integral(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 4 {
        return cumulative_trapezoid(h, f);
    }
    for j in 0..n - 1 {
        let inc = if j == 0 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if j + 2 < n {
            h / 24.0 * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2])
        } else {
            h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4])
        };
        out[j + 1] = out[j] + inc;
    }
    out
}

/// Cumulative trapezoid rule on uniformly sampled data (`I[0] = 0`).
pub fn cumulative_trapezoid(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for j in 1..n {
        out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
    }
    out
}

/// Composite trapezoid of a callable over `[lo, hi]` with `n` panels.
pub fn trapezoid_fn(lo: f64, hi: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let n = n.max(1);
    let h = (hi - lo) / n as f64;
    let mut acc = 0.5 * (f(lo) + f(hi));
    for k in 1..n {
        acc += f(lo + h * k as f64);
    }
    acc * h
}

/// Composite Simpson rule of a callable over `[lo, hi]` with `2n` panels.
pub fn simpson_fn(lo: f64, hi: f64, half_panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let n = 2 * half_panels.max(1);
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * k as f64);
    }
    acc * h / 3.0
}

/// Exact integral of `q(t) / (g - t)^2` over one panel `[t0, t1]`, where `q`
/// is the linear interpolant of `(q0, q1)` and `g > t1` is the pole location.
///
/// Used as a product rule: the smooth factor is sampled, the pole is
/// integrated analytically.
pub fn panel_pole2(q0: f64, q1: f64, g: f64, t0: f64, t1: f64) -> f64 {
    let dt = t1 - t0;
    debug_assert!(dt > 0.0 && g > t1);
    let s0 = g - t0;
    let s1 = g - t1;
    let m = (q1 - q0) / dt;
    // q(t) = aq - m * (g - t)  with  aq = q0 + m * (g - t0).
    let aq = q0 + m * s0;
    aq * (1.0 / s1 - 1.0 / s0) - m * (s0 / s1).ln()
}

/// Exact integral of `q(x) / g(x)` over one panel of width `dt`, where both
/// `q` and `g` are linear interpolants of their endpoint samples and `g`
/// keeps one sign on the panel.
pub fn panel_pole1(q0: f64, q1: f64, g0: f64, g1: f64, dt: f64) -> f64 {
    debug_assert!(g0 * g1 > 0.0);
    let dg = g1 - g0;
    if dg.abs() <= 1e-12 * g0.abs().max(g1.abs()) {
        return 0.5 * dt * (q0 / g0 + q1 / g1);
    }
    let l = (g1 / g0).ln() / dg;
    let i1 = l; // int_0^1 dx / (g0 + dg x)
    let i2 = (1.0 - g0 * l) / dg; // int_0^1 x dx / (g0 + dg x)
    dt * (q0 * i1 + (q1 - q0) * i2)
}

#[cfg(test)]
mod tests {
    #[test]
    fn composite_weights_exact_on_cubics() {
        for n in 2..20usize {
            let h = 1.0 / (n as f64 - 1.0);
            let w = super::composite_weights(n, h);
            for pow in 0..=3u32 {
                if n == 2 && pow > 1 {
                    continue; // trapezoid fallback is only first-degree exact
                }
                let got: f64 = w
                    .iter()
                    .enumerate()
                    .map(|(k, &wk)| wk * (k as f64 * h).powi(pow as i32))
                    .sum();
                let exact = 1.0 / (pow as f64 + 1.0);
                assert!((got - exact).abs() < 1e-13, "n = {n}, power {pow}: {got}");
            }
        }
    }

    use super::*;

    #[test]
    fn cumulative_integral_is_fourth_order_on_cubics() {
        // Exact for cubics by construction.
        let n = 17;
        let h = 1.0 / (n - 1) as f64;
        let f: Vec<f64> = (0..n).map(|j| {
            let x = h * j as f64;
            1.0 - 2.0 * x + 3.0 * x * x - 4.0 * x * x * x
        }).collect();
        let cum = cumulative_integral(h, &f);
        for j in 0..n {
            let x = h * j as f64;
            let exact = x - x * x + x * x * x - x * x * x * x;
            assert!((cum[j] - exact).abs() < 1e-14, "j={j}");
        }
    }

    #[test]
    fn cumulative_integral_converges_on_smooth_data() {
        let err = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|j| (h * j as f64).exp()).collect();
            let cum = cumulative_integral(h, &f);
            (cum[n - 1] - (1.0f64.exp() - 1.0)).abs()
        };
        let e1 = err(33);
        let e2 = err(65);
        assert!(e2 < e1 / 8.0, "expected at least third-order decay: {e1} vs {e2}");
    }

    #[test]
    fn panel_pole2_matches_fine_trapezoid() {
        // q(t) = 2 + t on [0.3, 0.31], pole at g = 0.32.
        let exact = panel_pole2(2.3, 2.31, 0.32, 0.3, 0.31);
        let fine = trapezoid_fn(0.3, 0.31, 200_000, |t| (2.0 + t) / (0.32 - t).powi(2));
        assert!((exact - fine).abs() < 1e-6 * exact.abs());
    }

    #[test]
    fn panel_pole1_matches_fine_trapezoid() {
        let exact = panel_pole1(1.0, 1.5, 0.02, 0.011, 0.01);
        let fine = trapezoid_fn(0.0, 0.01, 200_000, |x| {
            let q = 1.0 + 50.0 * x;
            let g = 0.02 + (0.011 - 0.02) * x / 0.01;
            q / g
        });
        assert!((exact - fine).abs() < 1e-9 * exact.abs());
    }
}
