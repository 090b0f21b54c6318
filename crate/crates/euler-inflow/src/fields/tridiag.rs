use num_complex::Complex64;

/// Thomas algorithm for a tridiagonal system with real coefficients and a complex right side.
/// `lower[i]` multiplies x[i-1], `upper[i]` multiplies x[i+1].
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / beta } else { 0.0 };
        d[i] = (rhs[i] - d[i - 1] * lower[i]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= next * c[i];
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let lower = [0.0, 1.0, 1.0, 1.0];
        let diag = [-4.0, -4.0, -4.0, -4.0];
        let upper = [1.0, 1.0, 1.0, 0.0];
        let x: Vec<Complex64> = (0..4).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let rhs: Vec<Complex64> = (0..4)
            .map(|i| {
                let mut r = x[i] * diag[i];
                if i > 0 {
                    r += x[i - 1] * lower[i];
                }
                if i < 3 {
                    r += x[i + 1] * upper[i];
                }
                r
            })
            .collect();
        let s = solve(&lower, &diag, &upper, &rhs);
        for i in 0..4 {
            assert!((s[i] - x[i]).norm() < 1e-14);
        }
    }
}
