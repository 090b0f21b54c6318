//! Fourier differentiation along periodic lines and 2D transforms of wall planes.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid2;

/// FFT plans and wavenumbers for one periodic direction.
pub struct Fourier1 {
    pub n: usize,
    pub period: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// First-derivative symbol; the Nyquist entry is zero so derivatives of real data stay real.
    pub kd: Vec<f64>,
    /// Second-derivative symbol -k^2 uses the full wavenumber including Nyquist.
    pub k2: Vec<f64>,
}

type Cache = Mutex<HashMap<(usize, u64), Arc<Fourier1>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared plan for `n` points over `period`.
pub fn fourier(n: usize, period: f64) -> Arc<Fourier1> {
    let key = (n, period.to_bits());
    let mut map = cache().lock().expect("fft cache poisoned");
    map.entry(key)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let fwd = planner.plan_fft_forward(n);
            let inv = planner.plan_fft_inverse(n);
            let base = 2.0 * PI / period;
            let mut kd = vec![0.0; n];
            let mut k2 = vec![0.0; n];
            for (m, (d, s)) in kd.iter_mut().zip(k2.iter_mut()).enumerate() {
                let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                *s = (base * signed).powi(2);
                *d = if 2 * m == n { 0.0 } else { base * signed };
            }
            Arc::new(Fourier1 { n, period, fwd, inv, kd, k2 })
        })
        .clone()
}

impl Fourier1 {
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }
    /// Unnormalized inverse; callers divide by `n`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
    }

    /// Differentiate consecutive contiguous lines of length `n`.
    pub fn diff_lines(&self, input: &[f64], out: &mut [f64]) {
        let n = self.n;
        let mut buf: Vec<Complex64> = input.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        for line in buf.chunks_mut(n) {
            for (c, &k) in line.iter_mut().zip(&self.kd) {
                *c = Complex64::new(-k * c.im, k * c.re);
            }
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / n as f64;
        for (o, c) in out.iter_mut().zip(&buf) {
            *o = c.re * scale;
        }
    }
}

/// x-derivative of a plane stored x-fastest.
pub fn diff_x(g: &Grid2, f: &[f64], out: &mut [f64]) {
    fourier(g.n1, g.l1).diff_lines(f, out);
}

/// y-derivative of a plane stored x-fastest.
pub fn diff_y(g: &Grid2, f: &[f64], out: &mut [f64]) {
    let (n1, n2) = (g.n1, g.n2);
    let mut t = vec![0.0; n1 * n2];
    transpose(f, &mut t, n1, n2);
    let mut dt = vec![0.0; n1 * n2];
    fourier(n2, g.l2).diff_lines(&t, &mut dt);
    transpose(&dt, out, n2, n1);
}

/// `src` has rows of length `w` (h rows); `dst` gets rows of length `h`.
pub fn transpose<T: Copy>(src: &[T], dst: &mut [T], w: usize, h: usize) {
    for j in 0..h {
        for i in 0..w {
            dst[i * h + j] = src[j * w + i];
        }
    }
}

/// Forward 2D transform of a real plane; output indexed `[jy * n1 + ix]`.
pub fn fft2(g: &Grid2, f: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_in_place(g, &mut buf, true);
    buf
}

/// Inverse 2D transform, returning the real part scaled by 1/(n1 n2).
pub fn ifft2(g: &Grid2, mut spec: Vec<Complex64>) -> Vec<f64> {
    fft2_in_place(g, &mut spec, false);
    let scale = 1.0 / (g.n1 * g.n2) as f64;
    spec.iter().map(|c| c.re * scale).collect()
}

fn fft2_in_place(g: &Grid2, buf: &mut [Complex64], forward: bool) {
    let (n1, n2) = (g.n1, g.n2);
    let fx = fourier(n1, g.l1);
    let fy = fourier(n2, g.l2);
    if forward {
        fx.forward(buf);
    } else {
        fx.inverse(buf);
    }
    let mut t = vec![Complex64::new(0.0, 0.0); n1 * n2];
    transpose(buf, &mut t, n1, n2);
    if forward {
        fy.forward(&mut t);
    } else {
        fy.inverse(&mut t);
    }
    transpose(&t, buf, n2, n1);
}

/// Plane-by-plane forward transform of a volume field; output `[k * n1 * n2 + mode]`.
pub fn fft_planes(g: &super::grid::Grid3, f: &[f64]) -> Vec<Complex64> {
    let pg = g.plane();
    let np = g.plane_len();
    let mut out = Vec::with_capacity(f.len());
    for k in 0..g.n3 {
        out.extend(fft2(&pg, &f[k * np..(k + 1) * np]));
    }
    out
}

/// Inverse of `fft_planes`.
pub fn ifft_planes(g: &super::grid::Grid3, spec: Vec<Complex64>) -> Vec<f64> {
    let pg = g.plane();
    let np = g.plane_len();
    let mut out = Vec::with_capacity(spec.len());
    for k in 0..g.n3 {
        out.extend(ifft2(&pg, spec[k * np..(k + 1) * np].to_vec()));
    }
    out
}

/// Per-mode wavenumbers of a plane: derivative symbols (kx, ky) and the full |k|².
#[derive(Clone, Debug)]
pub struct ModeTable {
    pub kx: Vec<f64>,
    pub ky: Vec<f64>,
    pub k2: Vec<f64>,
}

pub fn modes(g: &Grid2) -> ModeTable {
    let fx = fourier(g.n1, g.l1);
    let fy = fourier(g.n2, g.l2);
    let n = g.n1 * g.n2;
    let (mut kx, mut ky, mut k2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for j in 0..g.n2 {
        for i in 0..g.n1 {
            let m = j * g.n1 + i;
            kx[m] = fx.kd[i];
            ky[m] = fy.kd[j];
            k2[m] = fx.k2[i] + fy.k2[j];
        }
    }
    ModeTable { kx, ky, k2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine_is_spectral() {
        let g = Grid2 { n1: 16, n2: 8, l1: 2.0, l2: 1.0 };
        let k = 2.0 * PI / g.l1;
        let f: Vec<f64> = (0..g.len()).map(|p| (k * g.xy(p).0).sin()).collect();
        let mut d = vec![0.0; g.len()];
        diff_x(&g, &f, &mut d);
        for p in 0..g.len() {
            assert!((d[p] - k * (k * g.xy(p).0).cos()).abs() < 1e-12);
        }
        let fy: Vec<f64> = (0..g.len()).map(|p| (2.0 * PI * g.xy(p).1).cos()).collect();
        diff_y(&g, &fy, &mut d);
        for p in 0..g.len() {
            let y = g.xy(p).1;
            assert!((d[p] + 2.0 * PI * (2.0 * PI * y).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn fft2_round_trip() {
        let g = Grid2 { n1: 8, n2: 4, l1: 1.0, l2: 1.0 };
        let f: Vec<f64> = (0..g.len()).map(|p| (p as f64 * 0.37).sin()).collect();
        let back = ifft2(&g, fft2(&g, &f));
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
