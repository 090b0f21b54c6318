//! Row-major 3×3 matrices, entry `3*i + j` in row i, column j.

pub type Mat3 = [f64; 9];

pub const IDENTITY: Mat3 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];

#[inline]
pub fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            out[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
        }
    }
    out
}

#[inline]
pub fn apply(a: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        a[0] * v[0] + a[1] * v[1] + a[2] * v[2],
        a[3] * v[0] + a[4] * v[1] + a[5] * v[2],
        a[6] * v[0] + a[7] * v[1] + a[8] * v[2],
    ]
}

#[inline]
pub fn det(a: &Mat3) -> f64 {
    a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6])
}

/// Inverse by cofactors. Flow Jacobians have determinant close to one.
#[inline]
pub fn inverse(a: &Mat3) -> Mat3 {
    let d = det(a);
    let c = [
        a[4] * a[8] - a[5] * a[7],
        a[2] * a[7] - a[1] * a[8],
        a[1] * a[5] - a[2] * a[4],
        a[5] * a[6] - a[3] * a[8],
        a[0] * a[8] - a[2] * a[6],
        a[2] * a[3] - a[0] * a[5],
        a[3] * a[7] - a[4] * a[6],
        a[1] * a[6] - a[0] * a[7],
        a[0] * a[4] - a[1] * a[3],
    ];
    c.map(|v| v / d)
}

/// Max absolute row sum.
pub fn inf_norm(a: &Mat3) -> f64 {
    (0..3).map(|i| a[3 * i].abs() + a[3 * i + 1].abs() + a[3 * i + 2].abs()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let a = [2.0, 0.5, 0.0, -1.0, 1.0, 0.3, 0.2, 0.0, 1.5];
        let p = mul(&a, &inverse(&a));
        assert!(max_abs_diff(&p, &IDENTITY) < 1e-14);
        assert_eq!(inf_norm(&[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]), 2.0);
    }
}
