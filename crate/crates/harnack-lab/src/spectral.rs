//! Fourier differentiation of smooth periodic samples.
//!
//! Support functions of convex curves are smooth and 2pi-periodic, so
//! spectral differentiation gives essentially machine-precision
//! derivatives on a uniform grid. Third-order combinations like
//! `kappa_ss` stay accurate where central differences would already have
//! lost several digits.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Planned forward/inverse FFT pair for one grid size.
pub struct SpectralDiff {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralDiff {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    fn spectrum(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn back(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.m as f64;
        buf.into_iter().map(|z| z.re * scale).collect()
    }

    /// Signed wavenumber of bin `i` on an `m`-point grid.
    fn wavenumber(&self, i: usize) -> i64 {
        let m = self.m as i64;
        let i = i as i64;
        if i <= m / 2 {
            i
        } else {
            i - m
        }
    }

    /// First derivative. The Nyquist mode is dropped, as usual for odd
    /// derivatives of real samples.
    pub fn derivative(&self, samples: &[f64]) -> Vec<f64> {
        assert_eq!(samples.len(), self.m);
        let mut spec = self.spectrum(samples);
        for (i, z) in spec.iter_mut().enumerate() {
            let k = self.wavenumber(i);
            if 2 * k.unsigned_abs() as usize == self.m {
                *z = Complex64::new(0.0, 0.0);
            } else {
                *z *= Complex64::new(0.0, k as f64);
            }
        }
        self.back(spec)
    }

    /// Second derivative (multiplier `-k^2`, Nyquist included).
    pub fn second_derivative(&self, samples: &[f64]) -> Vec<f64> {
        assert_eq!(samples.len(), self.m);
        let mut spec = self.spectrum(samples);
        for (i, z) in spec.iter_mut().enumerate() {
            let k = self.wavenumber(i) as f64;
            *z *= -k * k;
        }
        self.back(spec)
    }

    /// `f'' + f`, the radius-of-curvature operator for support samples.
    pub fn second_derivative_plus_identity(&self, samples: &[f64]) -> Vec<f64> {
        let mut out = self.second_derivative(samples);
        for (o, s) in out.iter_mut().zip(samples) {
            *o += s;
        }
        out
    }

    /// Apply a real Fourier multiplier `filter(k)` to the samples.
    pub fn filtered(&self, samples: &[f64], filter: impl Fn(i64) -> f64) -> Vec<f64> {
        assert_eq!(samples.len(), self.m);
        let mut spec = self.spectrum(samples);
        for (i, z) in spec.iter_mut().enumerate() {
            *z *= filter(self.wavenumber(i));
        }
        self.back(spec)
    }
}

/// Periodic cubic (4-point Lagrange) interpolation of grid samples at an
/// arbitrary angle. `theta` in radians, grid spacing `2pi/m`.
pub fn interp_periodic(samples: &[f64], theta: f64) -> f64 {
    let m = samples.len();
    let step = std::f64::consts::TAU / m as f64;
    let s = (theta / step).rem_euclid(m as f64);
    let j = s.floor() as usize % m;
    let u = s - s.floor();
    let sm1 = samples[(j + m - 1) % m];
    let s0 = samples[j];
    let s1 = samples[(j + 1) % m];
    let s2 = samples[(j + 2) % m];
    // Lagrange basis on offsets -1, 0, 1, 2.
    let a = -u * (u - 1.0) * (u - 2.0) / 6.0;
    let b = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    let c = -(u + 1.0) * u * (u - 2.0) / 2.0;
    let d = (u + 1.0) * u * (u - 1.0) / 6.0;
    a * sm1 + b * s0 + c * s1 + d * s2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn grid(m: usize) -> Vec<f64> {
        (0..m).map(|j| TAU * j as f64 / m as f64).collect()
    }

    #[test]
    fn differentiates_trig_polynomials_exactly() {
        let m = 64;
        let th = grid(m);
        let f: Vec<f64> = th.iter().map(|&t| 1.5 + (2.0 * t).cos() - 0.25 * (5.0 * t).sin()).collect();
        let df = SpectralDiff::new(m).derivative(&f);
        for (j, &t) in th.iter().enumerate() {
            let exact = -2.0 * (2.0 * t).sin() - 1.25 * (5.0 * t).cos();
            assert!((df[j] - exact).abs() < 1e-12, "j={j}: {} vs {exact}", df[j]);
        }
    }

    #[test]
    fn second_derivative_matches() {
        let m = 128;
        let th = grid(m);
        let f: Vec<f64> = th.iter().map(|&t| (3.0 * t).cos()).collect();
        let d2 = SpectralDiff::new(m).second_derivative(&f);
        for (j, &t) in th.iter().enumerate() {
            assert!((d2[j] + 9.0 * (3.0 * t).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn interpolation_is_accurate_on_smooth_samples() {
        let m = 256;
        let f: Vec<f64> = grid(m).iter().map(|&t| (2.0 * t).cos() + 0.3 * t.sin()).collect();
        for &theta in &[0.1f64, 1.7, 3.9, 6.2, -0.4, 9.0] {
            let exact = (2.0 * theta).cos() + 0.3 * theta.sin();
            assert!((interp_periodic(&f, theta) - exact).abs() < 5e-7);
        }
    }
}
