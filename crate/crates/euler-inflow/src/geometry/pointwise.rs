//! Pointwise vector algebra at a boundary point with unit normal n.

use crate::error::GeometryError;

/// Tolerance on the normal component accepted by `perp`.
pub const TANGENT_TOL: f64 = 1e-10;

#[inline]
pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Split v into its normal component and tangential part.
pub fn tangential_decompose(n: [f64; 3], v: [f64; 3]) -> (f64, [f64; 3]) {
    let vn = dot(v, n);
    (vn, [v[0] - vn * n[0], v[1] - vn * n[1], v[2] - vn * n[2]])
}

/// Rotation by 90 degrees counterclockwise about n: n × v.
pub fn perp(n: [f64; 3], v: [f64; 3]) -> Result<[f64; 3], GeometryError> {
    let vn = dot(v, n);
    let scale = 1.0 + dot(v, v).sqrt();
    if vn.abs() > TANGENT_TOL * scale {
        return Err(GeometryError::NotTangent(vn));
    }
    Ok(cross(n, v))
}

/// Tangential part of u × v written as uⁿ[v^τ]^⊥ − vⁿ[u^τ]^⊥.
pub fn cross_tangential(n: [f64; 3], u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    let (un, ut) = tangential_decompose(n, u);
    let (vn, vt) = tangential_decompose(n, v);
    let pv = cross(n, vt);
    let pu = cross(n, ut);
    [un * pv[0] - vn * pu[0], un * pv[1] - vn * pu[1], un * pv[2] - vn * pu[2]]
}
