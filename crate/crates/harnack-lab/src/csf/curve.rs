//! Convex closed plane curves in the support-function encoding.

use crate::spectral::SpectralDiff;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Preset descriptions of initial curves, also used by the CLI config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Generic { samples: Vec<f64> },
}

impl CurveSpec {
    /// Raw support samples on an `m`-point angle grid, unvalidated.
    pub fn support_samples(&self, m: usize) -> Vec<f64> {
        match self {
            CurveSpec::Circle { radius } => vec![*radius; m],
            CurveSpec::Ellipse { a, b } => (0..m)
                .map(|j| {
                    let th = TAU * j as f64 / m as f64;
                    ((a * th.cos()).powi(2) + (b * th.sin()).powi(2)).sqrt()
                })
                .collect(),
            CurveSpec::Generic { samples } => samples.clone(),
        }
    }

    /// Largest distance from the origin to the curve, for sizing grids.
    pub fn circumradius(&self, m: usize) -> f64 {
        self.support_samples(m).into_iter().fold(0.0, f64::max)
    }

    pub fn label(&self) -> String {
        match self {
            CurveSpec::Circle { radius } => format!("circle({radius})"),
            CurveSpec::Ellipse { a, b } => format!("ellipse({a},{b})"),
            CurveSpec::Generic { samples } => format!("generic[{}]", samples.len()),
        }
    }
}

/// Smooth strictly convex closed curve enclosing the origin, stored as
/// support values `h(theta_j)` at the uniform normal angles
/// `theta_j = 2 pi j / M`.
///
/// The curve point with outward normal `n(theta) = (cos theta, sin theta)`
/// is `x(theta) = h n + h' tau`, `tau = (-sin theta, cos theta)`; the
/// radius of curvature is `r = h'' + h > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCurve {
    h: Vec<f64>,
}

impl SupportCurve {
    /// Validate samples: grid size a power of two >= 64, `h > 0`, and
    /// strict convexity `h'' + h > 0` at every grid angle.
    pub fn from_samples(h: Vec<f64>) -> Result<Self> {
        let m = h.len();
        if m < 64 || !m.is_power_of_two() {
            return Err(Error::BadGridSize(m));
        }
        for (j, &v) in h.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { context: format!("support sample {j}") });
            }
            if v <= 0.0 {
                return Err(Error::NonPositiveSupport { theta: TAU * j as f64 / m as f64, support: v });
            }
        }
        let curve = Self { h };
        let r = curve.radius_of_curvature();
        if let Some((j, &rj)) = r
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        {
            if rj <= 0.0 {
                return Err(Error::NotConvex { theta: TAU * j as f64 / m as f64, radius: rj });
            }
        }
        Ok(curve)
    }

    /// Skip validation; for internal constructions known to be valid and
    /// for convexity reports on deliberately bad data.
    pub(crate) fn from_samples_unchecked(h: Vec<f64>) -> Self {
        Self { h }
    }

    pub fn grid_size(&self) -> usize {
        self.h.len()
    }

    pub fn support(&self) -> &[f64] {
        &self.h
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * (j % self.h.len()) as f64 / self.h.len() as f64
    }

    pub fn angle_step(&self) -> f64 {
        TAU / self.h.len() as f64
    }

    fn diff(&self) -> SpectralDiff {
        SpectralDiff::new(self.h.len())
    }

    /// `r(theta_j) = h'' + h`, spectral.
    pub fn radius_of_curvature(&self) -> Vec<f64> {
        self.diff().second_derivative_plus_identity(&self.h)
    }

    /// `kappa = 1/r` at the grid angles.
    pub fn curvature(&self) -> Vec<f64> {
        self.radius_of_curvature().into_iter().map(|r| 1.0 / r).collect()
    }

    pub fn support_derivative(&self) -> Vec<f64> {
        self.diff().derivative(&self.h)
    }

    /// Curve points `x(theta_j) = h n + h' tau` for all grid angles.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let hp = self.support_derivative();
        (0..self.h.len())
            .map(|j| {
                let th = self.theta(j);
                let (sin, cos) = th.sin_cos();
                [self.h[j] * cos - hp[j] * sin, self.h[j] * sin + hp[j] * cos]
            })
            .collect()
    }

    /// Enclosed area `(1/2) integral h r dtheta` (spectral quadrature).
    pub fn area(&self) -> f64 {
        let r = self.radius_of_curvature();
        let dth = self.angle_step();
        0.5 * self.h.iter().zip(&r).map(|(h, r)| h * r).sum::<f64>() * dth
    }

    /// Perimeter `integral r dtheta`.
    pub fn perimeter(&self) -> f64 {
        self.radius_of_curvature().iter().sum::<f64>() * self.angle_step()
    }

    pub fn min_support(&self) -> f64 {
        self.h.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_support(&self) -> f64 {
        self.h.iter().cloned().fold(0.0, f64::max)
    }

    /// Smallest distance from the origin to a curve point (the radial
    /// function minimum), found over grid points.
    pub fn min_radial_distance(&self) -> f64 {
        self.points()
            .iter()
            .map(|p| p[0].hypot(p[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Build a validated curve from a preset on an `m`-point grid.
///
/// `circle(R)` has `h = R` and `kappa = 1/R`; `ellipse(a,b)` has
/// `h(theta) = sqrt(a^2 cos^2 theta + b^2 sin^2 theta)`. Generic samples
/// are validated and rejected with the offending angle when `h'' + h <= 0`
/// somewhere.
pub fn make_curve(spec: &CurveSpec, m: usize) -> Result<SupportCurve> {
    match spec {
        CurveSpec::Circle { radius } if !(*radius > 0.0) => {
            return Err(Error::NonPositiveParameter { what: "circle radius", value: *radius })
        }
        CurveSpec::Ellipse { a, b } if !(*a > 0.0 && *b > 0.0) => {
            return Err(Error::NonPositiveParameter { what: "ellipse semi-axis", value: a.min(*b) })
        }
        _ => {}
    }
    let m = match spec {
        CurveSpec::Generic { samples } => samples.len(),
        _ => m,
    };
    SupportCurve::from_samples(spec.support_samples(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_has_unit_curvature() {
        let c = make_curve(&CurveSpec::Circle { radius: 1.0 }, 64).unwrap();
        for &k in &c.curvature() {
            assert!((k - 1.0).abs() < 1e-12);
        }
        assert!((c.area() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn ellipse_support_and_curvature_match_closed_form() {
        // r = a^2 b^2 / h^3 for the ellipse support function.
        let (a, b) = (2.0, 1.0);
        let c = make_curve(&CurveSpec::Ellipse { a, b }, 256).unwrap();
        assert!((c.support()[0] - 2.0).abs() < 1e-12);
        let r = c.radius_of_curvature();
        for j in 0..c.grid_size() {
            let exact = a * a * b * b / c.support()[j].powi(3);
            assert!((r[j] - exact).abs() < 1e-9, "j = {j}");
        }
        assert!((r[0] - 0.5).abs() < 1e-10);
        assert!((c.curvature()[0] - 2.0).abs() < 1e-9);
        assert!((c.area() - std::f64::consts::PI * a * b).abs() < 1e-9);
    }

    #[test]
    fn rejects_nonconvex_generic_samples() {
        let m = 128;
        let samples: Vec<f64> = (0..m)
            .map(|j| 1.0 + 0.6 * (2.0 * TAU * j as f64 / m as f64).cos())
            .collect();
        match make_curve(&CurveSpec::Generic { samples }, m) {
            Err(Error::NotConvex { theta, radius }) => {
                // r(0) = 1 + 0.6 - 2.4 = -0.8; worst angle is 0 (or pi).
                assert!(radius < 0.0);
                assert!((radius + 0.8).abs() < 1e-9);
                assert!(theta.abs() < 1e-12 || (theta - std::f64::consts::PI).abs() < 1e-9);
            }
            other => panic!("expected convexity rejection, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_grid_sizes_and_parameters() {
        assert!(SupportCurve::from_samples(vec![1.0; 60]).is_err());
        assert!(SupportCurve::from_samples(vec![1.0; 100]).is_err());
        assert!(make_curve(&CurveSpec::Circle { radius: 0.0 }, 64).is_err());
        assert!(make_curve(&CurveSpec::Ellipse { a: 1.0, b: -1.0 }, 64).is_err());
    }

    #[test]
    fn points_lie_on_the_ellipse() {
        let c = make_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 256).unwrap();
        for p in c.points() {
            let v = (p[0] / 2.0).powi(2) + p[1].powi(2);
            assert!((v - 1.0).abs() < 1e-9);
        }
    }
}
