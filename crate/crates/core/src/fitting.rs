//! Small dense least-squares fits used by the boundary-layer extractions.

/// Result of a least-squares fit `y ~ sum_k coeffs[k] * basis_k(x)`.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub coeffs: Vec<f64>,
    /// Coefficient of determination of the fit.
    pub r_squared: f64,
}

/// Least-squares fit of `y` against the given basis columns (each the same
/// length as `y`), via the normal equations. Panics if the system is smaller
/// than the basis or the normal matrix is numerically singular.
pub fn least_squares(basis: &[Vec<f64>], y: &[f64]) -> FitResult {
    let k = basis.len();
    let n = y.len();
    assert!(k >= 1 && n >= k, "need at least {k} samples, got {n}");
    for col in basis {
        assert_eq!(col.len(), n, "basis column length mismatch");
    }

    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for r in 0..k {
        for c in 0..k {
            a[r][c] = dot(&basis[r], &basis[c]);
        }
        b[r] = dot(&basis[r], y);
    }
    let coeffs = solve_dense(&mut a, &mut b);

    let mean = y.iter().sum::<f64>() / n as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..n {
        let fitted: f64 = (0..k).map(|r| coeffs[r] * basis[r][i]).sum();
        ss_res += (y[i] - fitted).powi(2);
        ss_tot += (y[i] - mean).powi(2);
    }
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    FitResult { coeffs, r_squared }
}

/// Straight-line fit `y ~ slope * x + intercept`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let ones = vec![1.0; x.len()];
    let fit = least_squares(&[x.to_vec(), ones], y);
    (fit.coeffs[0], fit.coeffs[1], fit.r_squared)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on a small in-place system.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        assert!(a[pivot][col].abs() > 1e-300, "singular normal matrix");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let m = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= m * a[col][c];
            }
            b[r] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_coefficients() {
        let x: Vec<f64> = (0..40).map(|i| 0.01 + 0.02 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| 3.0 * t.ln() - 0.5 + 2.0 * t).collect();
        let basis = vec![
            x.iter().map(|&t| t.ln()).collect::<Vec<_>>(),
            vec![1.0; x.len()],
            x.clone(),
        ];
        let fit = least_squares(&basis, &y);
        assert!((fit.coeffs[0] - 3.0).abs() < 1e-10);
        assert!((fit.coeffs[1] + 0.5).abs() < 1e-10);
        assert!((fit.coeffs[2] - 2.0).abs() < 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn line_fit_slope() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.1, 4.1, 6.1, 8.1];
        let (slope, intercept, r2) = fit_line(&x, &y);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 0.1).abs() < 1e-12);
        assert!(r2 > 0.999999);
    }
}
