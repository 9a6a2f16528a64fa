//! Positive heat solutions on `R^n` (n = 1, 2) and their Harnack defects.
//!
//! Solutions are finite positive combinations of translated Gaussian
//! kernels, so every evaluation is closed form and any measured defect is
//! attributable to finite differencing alone. The checks:
//!
//! * matrix bound: `Hess(log u) + I/(2t) >= 0`, with equality for the
//!   kernel `rho(x,t) = (4 pi t)^(-n/2) exp(-|x|^2 / 4t)`;
//! * trace bounds: `Lap(log u) + n/(2t) >= 0` and the Li-Yau form
//!   `d/dt log u - |grad log u|^2 + n/(2t) >= 0`;
//! * integrated (classical) bound:
//!   `u(x2,t2) >= u(x1,t1) (t1/t2)^(n/2) exp(-|x2-x1|^2 / (4(t2-t1)))`;
//! * log-convexity of the ratio `u / rho` at each fixed time.
//!
//! All evaluation happens in log space; Gaussian tails never underflow
//! into the defect arithmetic. Finite differences carry a Richardson
//! estimate of their truncation error so near-zero defects come with an
//! error bar.

use crate::{Error, Result};

/// Default spatial step for second differences of `log u`.
pub const DEFAULT_STEP: f64 = 1e-3;

/// The Gaussian heat kernel on `R^n`, n = 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalSolution {
    dim: usize,
}

impl FundamentalSolution {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 1 || dim == 2 {
            Ok(Self { dim })
        } else {
            Err(Error::Config {
                field: "dim".into(),
                message: format!("dimension must be 1 or 2, got {dim}"),
            })
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `log rho(x, t)`; requires `t > 0`.
    pub fn log_eval(&self, x: [f64; 2], t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Err(Error::NonPositiveTime(t));
        }
        let r2 = sq_norm(x, self.dim);
        let v = -(self.dim as f64 / 2.0) * (4.0 * std::f64::consts::PI * t).ln() - r2 / (4.0 * t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: format!("log rho at x = {x:?}, t = {t}"),
            })
        }
    }
}

/// Finite positive combination of translated kernels:
/// `u(x, t) = sum_i w_i rho(x - y_i, t + eps)`.
///
/// The optional shift `eps >= 0` mirrors smoothing the initial data by
/// translating time; the combination is already smooth for `t > 0`, so the
/// default is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSourceSolution {
    dim: usize,
    sources: Vec<([f64; 2], f64)>,
    time_shift: f64,
}

impl PointSourceSolution {
    pub fn new(dim: usize, sources: Vec<([f64; 2], f64)>, time_shift: f64) -> Result<Self> {
        FundamentalSolution::new(dim)?;
        if sources.is_empty() {
            return Err(Error::Config {
                field: "sources".into(),
                message: "need at least one point source".into(),
            });
        }
        for &(loc, w) in &sources {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveParameter { what: "source weight", value: w });
            }
            if !loc[0].is_finite() || !loc[1].is_finite() {
                return Err(Error::NonFinite { context: format!("source location {loc:?}") });
            }
        }
        if !(time_shift >= 0.0) {
            return Err(Error::NonPositiveParameter { what: "time shift", value: time_shift });
        }
        let sources = if dim == 1 {
            sources.into_iter().map(|(loc, w)| ([loc[0], 0.0], w)).collect()
        } else {
            sources
        };
        Ok(Self { dim, sources, time_shift })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sources(&self) -> &[([f64; 2], f64)] {
        &self.sources
    }

    pub fn log_eval(&self, x: [f64; 2], t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Err(Error::NonPositiveTime(t));
        }
        let te = t + self.time_shift;
        let n = self.dim as f64;
        let front = -(n / 2.0) * (4.0 * std::f64::consts::PI * te).ln();
        let mut terms = Vec::with_capacity(self.sources.len());
        for &(y, w) in &self.sources {
            let d = [x[0] - y[0], x[1] - y[1]];
            terms.push(w.ln() - sq_norm(d, self.dim) / (4.0 * te));
        }
        let v = front + log_sum_exp(&terms);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                context: format!("log u at x = {x:?}, t = {t}"),
            })
        }
    }
}

/// A positive bounded heat solution with closed-form evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum HeatSolution {
    Fundamental(FundamentalSolution),
    PointSources(PointSourceSolution),
}

impl From<FundamentalSolution> for HeatSolution {
    fn from(f: FundamentalSolution) -> Self {
        HeatSolution::Fundamental(f)
    }
}

impl From<PointSourceSolution> for HeatSolution {
    fn from(p: PointSourceSolution) -> Self {
        HeatSolution::PointSources(p)
    }
}

/// Symmetric n x n matrix, n <= 2; only the upper triangle is stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricMatrix2 {
    pub dim: usize,
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymmetricMatrix2 {
    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim == 1 {
            self.xx
        } else {
            let mean = 0.5 * (self.xx + self.yy);
            let disc = (0.5 * (self.xx - self.yy)).hypot(self.xy);
            mean - disc
        }
    }

    pub fn trace(&self) -> f64 {
        if self.dim == 1 {
            self.xx
        } else {
            self.xx + self.yy
        }
    }

    fn shifted(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            xx: self.xx + s,
            xy: self.xy,
            yy: self.yy + s,
        }
    }
}

/// A finite-difference value together with a Richardson estimate of its
/// truncation error and a rounding floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectEstimate {
    pub value: f64,
    pub budget: f64,
}

impl HeatSolution {
    pub fn dim(&self) -> usize {
        match self {
            HeatSolution::Fundamental(f) => f.dim(),
            HeatSolution::PointSources(p) => p.dim(),
        }
    }

    /// `log u(x, t)`, closed form.
    pub fn log_eval(&self, x: [f64; 2], t: f64) -> Result<f64> {
        match self {
            HeatSolution::Fundamental(f) => f.log_eval(x, t),
            HeatSolution::PointSources(p) => p.log_eval(x, t),
        }
    }

    /// `u(x, t)`; strictly positive.
    pub fn eval(&self, x: [f64; 2], t: f64) -> Result<f64> {
        Ok(self.log_eval(x, t)?.exp())
    }

    /// Central second-difference approximation of `Hess(log u)(x, t)`.
    pub fn hessian_log(&self, x: [f64; 2], t: f64, step: f64) -> Result<SymmetricMatrix2> {
        if !(step > 0.0) {
            return Err(Error::NonPositiveParameter { what: "step", value: step });
        }
        let h = step;
        let l = |p: [f64; 2]| self.log_eval(p, t);
        let c = l(x)?;
        let xx = (l([x[0] + h, x[1]])? - 2.0 * c + l([x[0] - h, x[1]])?) / (h * h);
        if self.dim() == 1 {
            return Ok(SymmetricMatrix2 { dim: 1, xx, xy: 0.0, yy: 0.0 });
        }
        let yy = (l([x[0], x[1] + h])? - 2.0 * c + l([x[0], x[1] - h])?) / (h * h);
        let xy = (l([x[0] + h, x[1] + h])? - l([x[0] + h, x[1] - h])?
            - l([x[0] - h, x[1] + h])?
            + l([x[0] - h, x[1] - h])?)
            / (4.0 * h * h);
        Ok(SymmetricMatrix2 { dim: 2, xx, xy, yy })
    }

    /// Smallest eigenvalue of `Hess(log u) + I/(2t)`. Nonnegative for every
    /// positive bounded solution, zero identically for the kernel.
    pub fn matrix_harnack_defect(&self, x: [f64; 2], t: f64, step: f64) -> Result<f64> {
        Ok(self.hessian_log(x, t, step)?.shifted(1.0 / (2.0 * t)).min_eigenvalue())
    }

    /// Defect plus an error budget (Richardson against step doubling,
    /// plus the rounding floor of the stencil).
    pub fn matrix_harnack_defect_with_budget(
        &self,
        x: [f64; 2],
        t: f64,
        step: f64,
    ) -> Result<DefectEstimate> {
        let v = self.matrix_harnack_defect(x, t, step)?;
        let v2 = self.matrix_harnack_defect(x, t, 2.0 * step)?;
        Ok(DefectEstimate {
            value: v,
            budget: (v2 - v).abs() / 3.0 + self.rounding_floor(x, t, step),
        })
    }

    fn rounding_floor(&self, x: [f64; 2], t: f64, step: f64) -> f64 {
        let scale = self.log_eval(x, t).map(|l| l.abs()).unwrap_or(1.0) + 1.0;
        8.0 * f64::EPSILON * scale / (step * step)
    }

    /// `(li_yau, trace_harnack)`:
    /// `Lap(log u) + n/(2t)` and `d/dt log u - |grad log u|^2 + n/(2t)`.
    /// The two agree up to discretization because
    /// `d/dt log u = Lap(log u) + |grad log u|^2` along the heat flow.
    pub fn trace_defects(&self, x: [f64; 2], t: f64, step: f64) -> Result<(f64, f64)> {
        if !(step > 0.0) {
            return Err(Error::NonPositiveParameter { what: "step", value: step });
        }
        let n = self.dim() as f64;
        let h = step;
        let l = |p: [f64; 2]| self.log_eval(p, t);
        let c = l(x)?;
        let mut lap = (l([x[0] + h, x[1]])? - 2.0 * c + l([x[0] - h, x[1]])?) / (h * h);
        let mut grad2 = {
            let g = (l([x[0] + h, x[1]])? - l([x[0] - h, x[1]])?) / (2.0 * h);
            g * g
        };
        if self.dim() == 2 {
            lap += (l([x[0], x[1] + h])? - 2.0 * c + l([x[0], x[1] - h])?) / (h * h);
            let g = (l([x[0], x[1] + h])? - l([x[0], x[1] - h])?) / (2.0 * h);
            grad2 += g * g;
        }
        let dt_log = self.time_derivative_log(x, t, step)?;
        let li_yau = lap + n / (2.0 * t);
        let trace_harnack = dt_log - grad2 + n / (2.0 * t);
        Ok((li_yau, trace_harnack))
    }

    /// Trace defects with Richardson budgets for each estimator.
    pub fn trace_defects_with_budget(
        &self,
        x: [f64; 2],
        t: f64,
        step: f64,
    ) -> Result<(DefectEstimate, DefectEstimate)> {
        let (ly, th) = self.trace_defects(x, t, step)?;
        let (ly2, th2) = self.trace_defects(x, t, 2.0 * step)?;
        let floor = self.rounding_floor(x, t, step);
        Ok((
            DefectEstimate { value: ly, budget: (ly2 - ly).abs() / 3.0 + floor },
            DefectEstimate { value: th, budget: (th2 - th).abs() / 3.0 + floor },
        ))
    }

    /// `d/dt log u` by a central difference whose step shrinks with `t`
    /// and with the Gaussian exponent, keeping the truncation term
    /// `(d^3/dt^3 log u) dt^2` below the spatial budget even deep in the
    /// tails where that third derivative grows like `|x|^2 / t^4`.
    fn time_derivative_log(&self, x: [f64; 2], t: f64, step: f64) -> Result<f64> {
        let q = match self {
            HeatSolution::Fundamental(_) => sq_norm(x, self.dim()) / (4.0 * t),
            HeatSolution::PointSources(p) => {
                let te = t + p.time_shift;
                p.sources
                    .iter()
                    .map(|&(y, _)| sq_norm([x[0] - y[0], x[1] - y[1]], self.dim()) / (4.0 * te))
                    .fold(0.0, f64::max)
            }
        };
        let dt = (step * t.powf(1.5) / (1.0 + q)).min(t / 4.0);
        let lp = self.log_eval(x, t + dt)?;
        let lm = self.log_eval(x, t - dt)?;
        Ok((lp - lm) / (2.0 * dt))
    }

    /// `u(x2,t2) - u(x1,t1) (t1/t2)^(n/2) exp(-|x2-x1|^2 / (4 (t2-t1)))`.
    /// Nonnegative for every positive bounded solution; zero for the
    /// kernel when `x1 = x2 = 0`.
    pub fn classical_harnack_gap(
        &self,
        x1: [f64; 2],
        t1: f64,
        x2: [f64; 2],
        t2: f64,
    ) -> Result<f64> {
        if t1 <= 0.0 {
            return Err(Error::NonPositiveTime(t1));
        }
        if t1 >= t2 {
            return Err(Error::TimeOrder { t1, t2 });
        }
        let n = self.dim() as f64;
        let l2 = self.log_eval(x2, t2)?;
        let d = [x2[0] - x1[0], x2[1] - x1[1]];
        let lb = self.log_eval(x1, t1)? + (n / 2.0) * (t1 / t2).ln()
            - sq_norm(d, self.dim()) / (4.0 * (t2 - t1));
        Ok(l2.exp() - lb.exp())
    }

    /// Midpoint convexity defect of `log(u / rho)` at fixed time `t`:
    /// `alpha log F(x) + (1-alpha) log F(z) - log F(alpha x + (1-alpha) z)`.
    /// Nonnegative; identically zero when `u = rho`.
    pub fn log_ratio_convexity_defect(
        &self,
        t: f64,
        x: [f64; 2],
        z: [f64; 2],
        alpha: f64,
    ) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::NonPositiveParameter { what: "alpha in (0,1)", value: alpha });
        }
        let rho = FundamentalSolution::new(self.dim())?;
        let lf = |p: [f64; 2]| -> Result<f64> { Ok(self.log_eval(p, t)? - rho.log_eval(p, t)?) };
        let mid = [alpha * x[0] + (1.0 - alpha) * z[0], alpha * x[1] + (1.0 - alpha) * z[1]];
        Ok(alpha * lf(x)? + (1.0 - alpha) * lf(z)? - lf(mid)?)
    }

    /// Smallest eigenvalue of the finite-difference Hessian of
    /// `log(u / rho)` — the derivative-level route to the same convexity
    /// statement as [`Self::log_ratio_convexity_defect`].
    pub fn log_ratio_hessian_min(&self, x: [f64; 2], t: f64, step: f64) -> Result<f64> {
        let rho = HeatSolution::Fundamental(FundamentalSolution::new(self.dim())?);
        let hu = self.hessian_log(x, t, step)?;
        let hr = rho.hessian_log(x, t, step)?;
        let diff = SymmetricMatrix2 {
            dim: hu.dim,
            xx: hu.xx - hr.xx,
            xy: hu.xy - hr.xy,
            yy: hu.yy - hr.yy,
        };
        Ok(diff.min_eigenvalue())
    }
}

fn sq_norm(x: [f64; 2], dim: usize) -> f64 {
    if dim == 1 {
        x[0] * x[0]
    } else {
        x[0] * x[0] + x[1] * x[1]
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn kernel(dim: usize) -> HeatSolution {
        HeatSolution::Fundamental(FundamentalSolution::new(dim).unwrap())
    }

    fn two_sources() -> HeatSolution {
        HeatSolution::PointSources(
            PointSourceSolution::new(1, vec![([-1.0, 0.0], 1.0), ([1.0, 0.0], 1.0)], 0.0).unwrap(),
        )
    }

    #[test]
    fn kernel_normalization_point() {
        // (4 pi t)^(-1) = 1 at t = 1/(4 pi), exponent 0.
        let u = kernel(2).eval([0.0, 0.0], 1.0 / (4.0 * PI)).unwrap();
        assert!((u - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_value_dim_one() {
        let u = kernel(1).eval([0.0, 0.0], 1.0).unwrap();
        assert!((u - (4.0 * PI).powf(-0.5)).abs() < 1e-14);
        assert!((u - 0.2820947918).abs() < 1e-9);
    }

    #[test]
    fn two_source_value_matches_direct_summation() {
        // Oracle: direct sum of the two kernel terms.
        let oracle = 2.0 * (4.0 * PI).powf(-0.5) * (-0.25f64).exp();
        let u = two_sources().eval([0.0, 0.0], 1.0).unwrap();
        assert!((u - oracle).abs() < 1e-13);
        assert!((u - 0.4393).abs() < 1e-4);
    }

    #[test]
    fn rejects_nonpositive_time() {
        assert!(kernel(1).eval([0.0, 0.0], 0.0).is_err());
        assert!(kernel(2).eval([1.0, 1.0], -0.3).is_err());
    }

    #[test]
    fn kernel_log_hessian_is_minus_half_at_unit_time() {
        // Hess(log rho) = -I/(2t) exactly; the second difference of a
        // quadratic is exact up to rounding.
        for &x in &[0.0, 0.7, -2.0] {
            let h = kernel(1).hessian_log([x, 0.0], 1.0, 1e-3).unwrap();
            assert!((h.xx + 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn kernel_log_hessian_dim_two_far_from_origin() {
        let h = kernel(2).hessian_log([3.0, -7.0], 0.25, 1e-3).unwrap();
        assert!((h.xx + 2.0).abs() < 1e-5);
        assert!((h.yy + 2.0).abs() < 1e-5);
        assert!(h.xy.abs() < 1e-5);
    }

    #[test]
    fn two_source_log_hessian_above_kernel_bound() {
        let h = two_sources().hessian_log([0.0, 0.0], 1.0, 1e-3).unwrap();
        assert!(h.xx >= -0.5 - 1e-9);
        // At the balanced point the variance of the source measure is 1,
        // lifting the Hessian to -1/2 + 1/4.
        assert!((h.xx + 0.25).abs() < 1e-6);
    }

    #[test]
    fn matrix_defect_vanishes_for_kernel() {
        for &(x, t) in &[([0.3, 0.0], 0.5), ([1.0, 1.0], 0.5), ([-4.0, 2.0], 1.7)] {
            let d = kernel(2).matrix_harnack_defect(x, t, 1e-3).unwrap();
            assert!(d.abs() < 1e-6, "defect {d} at {x:?}, {t}");
        }
    }

    #[test]
    fn single_source_at_origin_is_the_kernel() {
        let s = HeatSolution::PointSources(
            PointSourceSolution::new(2, vec![([0.0, 0.0], 1.0)], 0.0).unwrap(),
        );
        let d = s.matrix_harnack_defect([1.0, 1.0], 0.5, 1e-3).unwrap();
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn two_source_matrix_defect_nonnegative_on_samples() {
        let sol = two_sources();
        let mut worst = f64::INFINITY;
        for i in 0..20 {
            for j in 0..10 {
                let x = -5.0 + 10.0 * (i as f64) / 19.0;
                let t = 0.1 + 1.9 * (j as f64) / 9.0;
                let d = sol.matrix_harnack_defect([x, 0.0], t, 1e-3).unwrap();
                worst = worst.min(d);
            }
        }
        assert!(worst >= -1e-6, "worst defect {worst}");
    }

    #[test]
    fn trace_defects_vanish_for_kernel() {
        let (ly, th) = kernel(1).trace_defects([0.0, 0.0], 1.0, 1e-3).unwrap();
        assert!(ly.abs() < 1e-6 && th.abs() < 1e-6, "({ly}, {th})");
        let (ly, th) = kernel(2).trace_defects([1.0, 0.0], 0.5, 1e-3).unwrap();
        assert!(ly.abs() < 1e-5 && th.abs() < 1e-5, "({ly}, {th})");
    }

    #[test]
    fn trace_defects_consistent_for_point_sources() {
        let (ly, th) = two_sources().trace_defects([0.3, 0.0], 0.7, 1e-3).unwrap();
        assert!(ly >= -1e-6 && th >= -1e-6);
        assert!((ly - th).abs() <= 1e-5, "estimators differ: {ly} vs {th}");
    }

    #[test]
    fn li_yau_is_exact_trace_of_matrix_defect() {
        // Shared stencil: trace(Hess + I/2t) and Lap(log u) + n/2t are the
        // same floating-point sums.
        let sol = two_sources();
        let (x, t) = ([0.4, 0.0], 0.9);
        let (ly, _) = sol.trace_defects(x, t, 1e-3).unwrap();
        let m = sol.hessian_log(x, t, 1e-3).unwrap().shifted(1.0 / (2.0 * t));
        assert!((ly - m.trace()).abs() < 1e-12);
    }

    #[test]
    fn classical_gap_sharp_for_kernel_at_origin() {
        for &(t1, t2) in &[(0.5, 1.0), (0.1, 0.3), (0.25, 1.75)] {
            let g = kernel(2).classical_harnack_gap([0.0, 0.0], t1, [0.0, 0.0], t2).unwrap();
            assert!(g.abs() <= 1e-12, "gap {g}");
        }
    }

    #[test]
    fn classical_gap_strict_off_center() {
        let g = kernel(1).classical_harnack_gap([0.0, 0.0], 0.5, [1.0, 0.0], 1.0).unwrap();
        assert!(g > 0.0);
    }

    #[test]
    fn classical_gap_rejects_bad_time_order() {
        assert!(kernel(1).classical_harnack_gap([0.0, 0.0], 1.0, [0.0, 0.0], 0.5).is_err());
        assert!(kernel(1).classical_harnack_gap([0.0, 0.0], -1.0, [0.0, 0.0], 0.5).is_err());
    }

    #[test]
    fn log_ratio_defect_zero_for_kernel_and_degenerate_segment() {
        let d = kernel(1).log_ratio_convexity_defect(1.0, [0.4, 0.0], [1.3, 0.0], 0.3).unwrap();
        assert_eq!(d, 0.0);
        let sol = two_sources();
        let d = sol.log_ratio_convexity_defect(1.0, [0.7, 0.0], [0.7, 0.0], 0.41).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn log_ratio_defect_nonnegative_between_sources() {
        let d = two_sources().log_ratio_convexity_defect(1.0, [-2.0, 0.0], [2.0, 0.0], 0.5).unwrap();
        assert!(d >= 0.0);
    }

    #[test]
    fn log_ratio_hessian_route_agrees_with_matrix_defect() {
        // Hess log(u/rho) = Hess log u + I/(2t) since the kernel's log
        // Hessian is exactly -I/(2t).
        let sol = two_sources();
        let a = sol.log_ratio_hessian_min([0.6, 0.0], 0.8, 1e-3).unwrap();
        let b = sol.matrix_harnack_defect([0.6, 0.0], 0.8, 1e-3).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn budget_reported_with_defect() {
        let e = two_sources().matrix_harnack_defect_with_budget([0.2, 0.0], 0.5, 1e-3).unwrap();
        assert!(e.budget > 0.0 && e.budget < 1e-4);
        assert!(e.value >= -e.budget);
    }

    #[test]
    fn rejects_bad_constructions() {
        assert!(FundamentalSolution::new(3).is_err());
        assert!(PointSourceSolution::new(1, vec![], 0.0).is_err());
        assert!(PointSourceSolution::new(1, vec![([0.0, 0.0], -1.0)], 0.0).is_err());
        assert!(PointSourceSolution::new(1, vec![([0.0, 0.0], 1.0)], -0.1).is_err());
    }
}
