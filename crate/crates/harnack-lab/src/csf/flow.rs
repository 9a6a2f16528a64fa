//! Time stepping for the support-function flow `dh/dt = -1/(h'' + h)`.
//!
//! Three schemes:
//!
//! * `SemiImplicit` (default): the stiff linearization of the right-hand
//!   side around the current curve is `(1/r^2)(d_theta^2 + 1)`, so the
//!   update damps the increment mode-by-mode in Fourier space,
//!   `h_new = h + dt * F^-1[ F[-1/r]_k / (1 + dt c (k^2 - 1)) ]` with
//!   `c = max 1/r^2`. Unconditionally stable, first order in `dt`.
//! * `Heun`: explicit trapezoidal predictor-corrector, second order,
//!   subject to the parabolic step bound `dt <= 2 r_min^2 / (M/2)^2`.
//! * `Explicit`: forward Euler, for cross-validation.
//!
//! Convexity (`h'' + h > 0`) is re-validated after every step; its loss
//! means the step was too large or the flow was pushed past the maximal
//! time. Compact convex curves shrink to a point at
//! `T_max = area / (2 pi)` exactly, so runs refuse end times beyond
//! `0.9 * area / (2 pi)`, where the support parametrization is still
//! comfortably nondegenerate.

use super::curve::SupportCurve;
use crate::spectral::SpectralDiff;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    SemiImplicit,
    Heun,
    Explicit,
}

#[derive(Debug, Clone, Copy)]
pub struct FlowParams {
    pub dt: f64,
    /// Keep every `store_every`-th step in the history.
    pub store_every: usize,
    pub scheme: Scheme,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self { dt: 1e-5, store_every: 100, scheme: Scheme::SemiImplicit }
    }
}

/// Spectral geometry of one stored snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotGeometry {
    /// Radius of curvature `r = h'' + h`.
    pub r: Vec<f64>,
    /// `dr/dtheta`.
    pub r_theta: Vec<f64>,
    /// Curvature `kappa = 1/r`; this is the mean curvature `H` for curves.
    pub kappa: Vec<f64>,
    /// `d kappa / d theta`.
    pub kappa_theta: Vec<f64>,
    /// Second arclength derivative `kappa_ss = kappa d_theta(kappa kappa_theta)`.
    pub kappa_ss: Vec<f64>,
    /// Curve points `x(theta_j) = h n + h' tau`.
    pub points: Vec<[f64; 2]>,
}

impl SnapshotGeometry {
    fn compute(curve: &SupportCurve, diff: &SpectralDiff) -> Self {
        let h = curve.support();
        let m = h.len();
        let r = diff.second_derivative_plus_identity(h);
        let r_theta = diff.derivative(&r);
        let kappa: Vec<f64> = r.iter().map(|r| 1.0 / r).collect();
        let kappa_theta = diff.derivative(&kappa);
        let ks: Vec<f64> = kappa.iter().zip(&kappa_theta).map(|(k, kt)| k * kt).collect();
        let dks = diff.derivative(&ks);
        let kappa_ss = kappa.iter().zip(&dks).map(|(k, d)| k * d).collect();
        let hp = diff.derivative(h);
        let points = (0..m)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / m as f64;
                let (sin, cos) = th.sin_cos();
                [h[j] * cos - hp[j] * sin, h[j] * sin + hp[j] * cos]
            })
            .collect();
        Self { r, r_theta, kappa, kappa_theta, kappa_ss, points }
    }
}

/// Time-indexed snapshots of a curve shortening flow, write-once.
#[derive(Debug, Clone)]
pub struct FlowHistory {
    times: Vec<f64>,
    curves: Vec<SupportCurve>,
    geometry: Vec<SnapshotGeometry>,
    dt: f64,
    scheme: Scheme,
    initial_label: String,
}

impl FlowHistory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn curve(&self, i: usize) -> &SupportCurve {
        &self.curves[i]
    }

    pub fn geometry(&self, i: usize) -> &SnapshotGeometry {
        &self.geometry[i]
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn initial_label(&self) -> &str {
        &self.initial_label
    }

    pub fn grid_size(&self) -> usize {
        self.curves[0].grid_size()
    }

    pub fn t_min(&self) -> f64 {
        self.times[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index of the stored snapshot nearest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i >= self.times.len() {
                    self.times.len() - 1
                } else if (self.times[i] - t).abs() < (t - self.times[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        }
    }

    /// Snapshot index for `t` with at least `margin` snapshots on each
    /// side, for centered time stencils.
    pub fn interior_index(&self, t: f64, margin: usize) -> Result<usize> {
        let i = self.index_near(t);
        if i < margin || i + margin >= self.times.len() {
            return Err(Error::OutsideHistory {
                t,
                lo: self.times[margin.min(self.times.len() - 1)],
                hi: self.times[self.times.len().saturating_sub(margin + 1)],
            });
        }
        Ok(i)
    }

    /// Spacing of stored snapshots around index `i` over a `+-k` window;
    /// `None` if the window is non-uniform (e.g. across a partial final
    /// step) or out of range.
    pub fn uniform_spacing(&self, i: usize, k: usize) -> Option<f64> {
        if i < k || i + k >= self.times.len() {
            return None;
        }
        let d = self.times[i + 1] - self.times[i];
        for j in (i - k)..(i + k) {
            if (self.times[j + 1] - self.times[j] - d).abs() > 1e-9 * (1.0 + d.abs()) {
                return None;
            }
        }
        Some(d)
    }

    /// Support samples interpolated linearly in time (for level-set and
    /// gauge queries between snapshots).
    pub fn support_at_time(&self, t: f64) -> Result<Vec<f64>> {
        if t < self.t_min() - 1e-12 || t > self.t_max() + 1e-12 {
            return Err(Error::OutsideHistory { t, lo: self.t_min(), hi: self.t_max() });
        }
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.curves[i].support().to_vec()),
            Err(i) => i.clamp(1, self.times.len() - 1),
        };
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let h0 = self.curves[i - 1].support();
        let h1 = self.curves[i].support();
        Ok(h0.iter().zip(h1).map(|(a, b)| a * (1.0 - w) + b * w).collect())
    }
}

struct Stepper {
    diff: SpectralDiff,
    scheme: Scheme,
}

impl Stepper {
    fn new(m: usize, scheme: Scheme) -> Self {
        Self { diff: SpectralDiff::new(m), scheme }
    }

    fn radius(&self, h: &[f64]) -> Vec<f64> {
        self.diff.second_derivative_plus_identity(h)
    }

    fn check_valid(h: &[f64], r: &[f64], t: f64) -> Result<f64> {
        let m = h.len();
        let mut r_min = f64::INFINITY;
        for j in 0..m {
            if !h[j].is_finite() || !r[j].is_finite() {
                return Err(Error::ConvexityLost { t });
            }
            if h[j] <= 0.0 || r[j] <= 0.0 {
                return Err(Error::ConvexityLost { t });
            }
            r_min = r_min.min(r[j]);
        }
        Ok(r_min)
    }

    fn explicit_bound(&self, r_min: f64) -> f64 {
        let k_max = (self.diff.len() / 2) as f64;
        2.0 * r_min * r_min / (k_max * k_max + 1.0)
    }

    /// One step from time `t`; returns the new support samples.
    fn step(&self, h: &[f64], t: f64, dt: f64) -> Result<Vec<f64>> {
        let r = self.radius(h);
        let r_min = Self::check_valid(h, &r, t)?;
        match self.scheme {
            Scheme::SemiImplicit => {
                let c = 1.0 / (r_min * r_min);
                if dt * c >= 0.5 {
                    return Err(Error::StepTooLarge { ds: dt, bound: 0.5 / c });
                }
                let f: Vec<f64> = r.iter().map(|r| -1.0 / r).collect();
                let inc = self.diff.filtered(&f, |k| {
                    let lam = 1.0 - (k * k) as f64;
                    dt / (1.0 - dt * c * lam)
                });
                Ok(h.iter().zip(&inc).map(|(h, d)| h + d).collect())
            }
            Scheme::Heun => {
                self.require_explicit_ok(dt, r_min)?;
                let k1: Vec<f64> = r.iter().map(|r| -1.0 / r).collect();
                let h1: Vec<f64> = h.iter().zip(&k1).map(|(h, k)| h + dt * k).collect();
                let r1 = self.radius(&h1);
                Self::check_valid(&h1, &r1, t + dt)?;
                Ok((0..h.len())
                    .map(|j| h[j] + 0.5 * dt * (k1[j] - 1.0 / r1[j]))
                    .collect())
            }
            Scheme::Explicit => {
                self.require_explicit_ok(dt, r_min)?;
                Ok(h.iter().zip(&r).map(|(h, r)| h - dt / r).collect())
            }
        }
    }

    fn require_explicit_ok(&self, dt: f64, r_min: f64) -> Result<()> {
        let bound = self.explicit_bound(r_min);
        if dt > bound {
            Err(Error::StepTooLarge { ds: dt, bound })
        } else {
            Ok(())
        }
    }
}

/// Advance one step and re-validate the curve.
pub fn step_flow(curve: &SupportCurve, dt: f64, scheme: Scheme) -> Result<SupportCurve> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveParameter { what: "dt", value: dt });
    }
    let stepper = Stepper::new(curve.grid_size(), scheme);
    let h = stepper.step(curve.support(), 0.0, dt)?;
    let r = stepper.radius(&h);
    Stepper::check_valid(&h, &r, dt)?;
    Ok(SupportCurve::from_samples_unchecked(h))
}

/// Run the flow to `t_end`, storing every `store_every`-th step (plus the
/// final one). `t_end` is rounded to a whole number of steps.
pub fn run_flow(curve: &SupportCurve, t_end: f64, params: &FlowParams) -> Result<FlowHistory> {
    if t_end < 0.0 {
        return Err(Error::NonPositiveParameter { what: "t_end", value: t_end });
    }
    if !(params.dt > 0.0) {
        return Err(Error::NonPositiveParameter { what: "dt", value: params.dt });
    }
    let horizon = 0.9 * curve.area() / std::f64::consts::TAU;
    if t_end > horizon * (1.0 + 1e-12) {
        return Err(Error::BeyondHorizon { t_end, horizon });
    }
    let m = curve.grid_size();
    let stepper = Stepper::new(m, params.scheme);
    let store_every = params.store_every.max(1);
    let n_steps = (t_end / params.dt).round() as usize;

    let mut times = Vec::new();
    let mut curves = Vec::new();
    let mut geometry = Vec::new();
    let mut h = curve.support().to_vec();

    let store = |h: &[f64], t: f64, times: &mut Vec<f64>, curves: &mut Vec<SupportCurve>, geometry: &mut Vec<SnapshotGeometry>| {
        let c = SupportCurve::from_samples_unchecked(h.to_vec());
        geometry.push(SnapshotGeometry::compute(&c, &stepper.diff));
        times.push(t);
        curves.push(c);
    };

    store(&h, 0.0, &mut times, &mut curves, &mut geometry);
    for step in 0..n_steps {
        let t = step as f64 * params.dt;
        h = stepper.step(&h, t, params.dt)?;
        let done = step + 1 == n_steps;
        if (step + 1) % store_every == 0 || done {
            let t_new = (step + 1) as f64 * params.dt;
            let r = stepper.radius(&h);
            Stepper::check_valid(&h, &r, t_new)?;
            store(&h, t_new, &mut times, &mut curves, &mut geometry);
        }
    }

    Ok(FlowHistory {
        times,
        curves,
        geometry,
        dt: params.dt,
        scheme: params.scheme,
        initial_label: format!("m={m}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csf::curve::{make_curve, CurveSpec};

    fn circle(r: f64, m: usize) -> SupportCurve {
        make_curve(&CurveSpec::Circle { radius: r }, m).unwrap()
    }

    #[test]
    fn shrinking_circle_tracks_closed_form() {
        // dR/dt = -1/R gives R(t) = sqrt(1 - 2t).
        let params = FlowParams { dt: 1e-4, store_every: 125, scheme: Scheme::SemiImplicit };
        let hist = run_flow(&circle(1.0, 64), 0.375, &params).unwrap();
        for (i, &t) in hist.times().iter().enumerate() {
            let exact = (1.0 - 2.0 * t).sqrt();
            for &h in hist.curve(i).support() {
                assert!((h - exact).abs() < 1e-4, "t={t}: {h} vs {exact}");
            }
        }
        let last = hist.curve(hist.len() - 1).support()[0];
        assert!((last - 0.5).abs() < 1e-4);
    }

    #[test]
    fn heun_is_second_order_on_the_circle() {
        let params = FlowParams { dt: 1e-4, store_every: 1000, scheme: Scheme::Heun };
        let hist = run_flow(&circle(1.0, 64), 0.375, &params).unwrap();
        let last = hist.curve(hist.len() - 1).support()[0];
        assert!((last - 0.5).abs() < 1e-8, "{last}");
    }

    #[test]
    fn ellipse_area_decays_at_rate_two_pi() {
        let c = make_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 128).unwrap();
        let a0 = c.area();
        let params = FlowParams { dt: 5e-5, store_every: 200, scheme: Scheme::Heun };
        let t_end = 0.3;
        let hist = run_flow(&c, t_end, &params).unwrap();
        let a1 = hist.curve(hist.len() - 1).area();
        let rate = (a0 - a1) / t_end;
        assert!((rate - std::f64::consts::TAU).abs() < 1e-3, "rate {rate}");
    }

    #[test]
    fn zero_end_time_returns_only_the_initial_curve() {
        let hist = run_flow(&circle(1.0, 64), 0.0, &FlowParams::default()).unwrap();
        assert_eq!(hist.len(), 1);
        assert_eq!(hist.times()[0], 0.0);
    }

    #[test]
    fn refuses_end_time_past_horizon() {
        // T_max = area/(2 pi) = 1/2 for the unit circle.
        match run_flow(&circle(1.0, 64), 0.46, &FlowParams::default()) {
            Err(Error::BeyondHorizon { horizon, .. }) => {
                assert!((horizon - 0.45).abs() < 1e-12)
            }
            other => panic!("expected horizon error, got {other:?}"),
        }
    }

    #[test]
    fn explicit_scheme_rejects_oversized_steps() {
        let c = make_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 256).unwrap();
        match step_flow(&c, 1e-3, Scheme::Explicit) {
            Err(Error::StepTooLarge { .. }) => {}
            other => panic!("expected step bound error, got {other:?}"),
        }
    }

    #[test]
    fn snapshots_remain_convex() {
        let c = make_curve(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 128).unwrap();
        let params = FlowParams { dt: 5e-5, store_every: 500, scheme: Scheme::SemiImplicit };
        let hist = run_flow(&c, 0.5, &params).unwrap();
        for i in 0..hist.len() {
            let r_min = hist.geometry(i).r.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(r_min > 0.0, "snapshot {i}");
        }
    }

    #[test]
    fn schemes_cross_validate() {
        let c = make_curve(&CurveSpec::Ellipse { a: 1.5, b: 1.0 }, 128).unwrap();
        let t_end = 0.1;
        let si = run_flow(&c, t_end, &FlowParams { dt: 2e-5, store_every: 5000, scheme: Scheme::SemiImplicit }).unwrap();
        let he = run_flow(&c, t_end, &FlowParams { dt: 2e-5, store_every: 5000, scheme: Scheme::Heun }).unwrap();
        let hs = si.curve(si.len() - 1).support();
        let hh = he.curve(he.len() - 1).support();
        let max_diff = hs.iter().zip(hh).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        // First-order vs second-order scheme differ at O(dt).
        assert!(max_diff < 5e-4, "{max_diff}");
        assert!(max_diff > 0.0);
    }
}
