//! Exact functional-ODE reduction for spatially homogeneous data.
//!
//! For constant-in-space states the Laplacian drops out and Jensen's
//! inequality is an equality, so the space averages `U = int u`,
//! `V = int v` satisfy the closed system
//!
//! ```text
//! U'' + b U' + m^2 U = |V|^p
//! V''               = |U|^q
//! ```
//!
//! exactly. This module integrates that system with an adaptive embedded
//! pair, measures blow-up times with tolerance-refinement extrapolation, and
//! verifies the integral frames and first lower bounds along trajectories.

pub mod dopri;

use serde::{Deserialize, Serialize};

use crate::model::{CharRoots, SystemParams};
use crate::{Error, Result};
use dopri::{Dopri5Options, DenseOutput, StopReason};

/// Snapshot of the functional pair and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalState {
    pub t: f64,
    pub u: f64,
    pub up: f64,
    pub v: f64,
    pub vp: f64,
}

impl FunctionalState {
    fn from_y(t: f64, y: &[f64; 4]) -> Self {
        Self { t, u: y[0], up: y[1], v: y[2], vp: y[3] }
    }
}

/// Spatially constant Cauchy data `(u0, u1, v0, v1)`, to be scaled by `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousData {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl HomogeneousData {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Self { u0, u1, v0, v1 }
    }

    /// Data index: `r = 1` iff the `v1` component is nontrivial.
    pub fn r(&self) -> u8 {
        if self.v1 != 0.0 {
            1
        } else {
            0
        }
    }

    pub fn is_non_negative(&self) -> bool {
        self.u0 >= 0.0 && self.u1 >= 0.0 && self.v0 >= 0.0 && self.v1 >= 0.0
    }
}

/// Reduce homogeneous data to the functional initial state
/// `(U, U', V, V')(0) = eps (u0, u1, v0, v1)`.
///
/// Negative components are allowed by the reduction but flagged: the blow-up
/// theorems assume non-negative data.
pub fn reduce_homogeneous(
    params: &SystemParams,
    data: &HomogeneousData,
) -> (FunctionalState, Vec<String>) {
    let eps = params.epsilon;
    let mut warnings = Vec::new();
    if !data.is_non_negative() {
        warnings.push(
            "data has a negative component; blow-up theorems assume non-negative data"
                .to_string(),
        );
    }
    (
        FunctionalState {
            t: 0.0,
            u: eps * data.u0,
            up: eps * data.u1,
            v: eps * data.v0,
            vp: eps * data.v1,
        },
        warnings,
    )
}

/// Sampled trajectory with its dense output.
#[derive(Debug, Clone)]
pub struct FunctionalTrajectory {
    pub samples: Vec<FunctionalState>,
    pub dense: DenseOutput<4>,
    /// Tolerances the trajectory was integrated at.
    pub rtol: f64,
    pub atol: f64,
}

impl FunctionalTrajectory {
    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Interpolated state at `t` (clamped to the covered interval).
    pub fn eval(&self, t: f64) -> FunctionalState {
        FunctionalState::from_y(t, &self.dense.eval(t))
    }

    /// Export as CSV rows `(t, U, Up, V, Vp)`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,U,Up,V,Vp")?;
        for s in &self.samples {
            writeln!(w, "{},{},{},{},{}", s.t, s.u, s.up, s.v, s.vp)?;
        }
        Ok(())
    }
}

/// Outcome classification for a blow-up measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    BlewUp,
    Survived,
    /// Step collapse without reaching the magnitude threshold — reported
    /// as its own state, never silently treated as blow-up.
    NonConvergence,
}

/// One tolerance level of the refinement sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub rtol: f64,
    pub t_reached: f64,
}

/// Measured blow-up time with convergence metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub blew_up: bool,
    pub status: OracleStatus,
    /// Earliest certified integration endpoint across refinement levels.
    pub t_low: f64,
    /// Upper bracket of the numerical blow-up time (horizon when survived).
    pub t_high: f64,
    pub threshold_used: f64,
    pub refinement: Vec<RefinementLevel>,
    /// Extrapolated blow-up time (absent when no blow-up was observed).
    pub t_est: Option<f64>,
    /// Accepted steps at the finest level.
    pub steps: usize,
    pub warnings: Vec<String>,
}

/// Options for [`integrate_blowup`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntegrateOpts {
    pub rtol: f64,
    pub atol: f64,
    /// Magnitude threshold `B` on `|U| + |V|`.
    pub threshold: f64,
    /// Number of tolerance levels for the extrapolation (>= 1).
    pub refine_levels: usize,
    /// Tolerance contraction between levels.
    pub refine_ratio: f64,
    pub max_steps: usize,
    /// Disable the coupling sources (linear runs for order checks).
    pub linear_only: bool,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-14,
            threshold: 1e8,
            refine_levels: 3,
            refine_ratio: 8.0,
            max_steps: 2_000_000,
            linear_only: false,
        }
    }
}

fn rhs_factory(
    params: &SystemParams,
    linear_only: bool,
) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    let (b, m2, p, q) = (params.b, params.m2, params.p, params.q);
    move |_t, y: &[f64; 4]| {
        let (fu, fv) = if linear_only {
            (0.0, 0.0)
        } else {
            (y[2].abs().powf(p), y[0].abs().powf(q))
        };
        [y[1], fu - b * y[1] - m2 * y[0], y[3], fv]
    }
}

fn run_once(
    params: &SystemParams,
    init: &FunctionalState,
    horizon: f64,
    rtol: f64,
    opts: &IntegrateOpts,
) -> dopri::Integration<4> {
    let d_opts = Dopri5Options {
        rtol,
        atol: opts.atol,
        h_init: None,
        h_max: (horizon / 16.0).max(1e-6),
        max_steps: opts.max_steps,
        step_floor_rel: 1e-13,
    };
    let y0 = [init.u, init.up, init.v, init.vp];
    dopri::integrate(rhs_factory(params, opts.linear_only), init.t, y0, horizon, &d_opts)
}

fn trajectory_from(integ: &dopri::Integration<4>, rtol: f64, atol: f64) -> FunctionalTrajectory {
    let mut samples: Vec<FunctionalState> = integ
        .dense
        .steps
        .iter()
        .map(|s| FunctionalState::from_y(s.t0, &s.eval(s.t0)))
        .collect();
    samples.push(FunctionalState::from_y(integ.t_end, &integ.y_end));
    FunctionalTrajectory { samples, dense: integ.dense.clone(), rtol, atol }
}

/// Integrate the reduced system and measure the blow-up time.
///
/// Blow-up is declared when `|U| + |V|` crossed the threshold and the step
/// size collapsed below `t * 1e-13`. The reported `t_est` comes from
/// integrating at `refine_levels` tolerance levels and extrapolating the
/// collapse times.
pub fn integrate_blowup(
    params: &SystemParams,
    init: &FunctionalState,
    horizon: f64,
    opts: &IntegrateOpts,
) -> Result<(FunctionalTrajectory, BlowupReport)> {
    if !(horizon > init.t) {
        return Err(Error::InvalidConfig(format!(
            "horizon {horizon} must lie beyond the initial time {}",
            init.t
        )));
    }
    let first = run_once(params, init, horizon, opts.rtol, opts);
    let crossed =
        |i: &dopri::Integration<4>| i.y_end[0].abs() + i.y_end[2].abs() >= opts.threshold;

    match first.reason {
        StopReason::ReachedEnd => {
            let traj = trajectory_from(&first, opts.rtol, opts.atol);
            let report = BlowupReport {
                blew_up: false,
                status: OracleStatus::Survived,
                t_low: first.t_end,
                t_high: horizon,
                threshold_used: opts.threshold,
                refinement: vec![RefinementLevel { rtol: opts.rtol, t_reached: first.t_end }],
                t_est: None,
                steps: first.accepted,
                warnings: Vec::new(),
            };
            Ok((traj, report))
        }
        StopReason::MaxSteps => {
            let traj = trajectory_from(&first, opts.rtol, opts.atol);
            let report = BlowupReport {
                blew_up: false,
                status: OracleStatus::NonConvergence,
                t_low: first.t_end,
                t_high: horizon,
                threshold_used: opts.threshold,
                refinement: vec![RefinementLevel { rtol: opts.rtol, t_reached: first.t_end }],
                t_est: None,
                steps: first.accepted,
                warnings: vec!["step budget exhausted before the horizon".into()],
            };
            Ok((traj, report))
        }
        StopReason::StepFloor => {
            if !crossed(&first) {
                let traj = trajectory_from(&first, opts.rtol, opts.atol);
                let report = BlowupReport {
                    blew_up: false,
                    status: OracleStatus::NonConvergence,
                    t_low: first.t_end,
                    t_high: horizon,
                    threshold_used: opts.threshold,
                    refinement: vec![RefinementLevel {
                        rtol: opts.rtol,
                        t_reached: first.t_end,
                    }],
                    t_est: None,
                    steps: first.accepted,
                    warnings: vec![
                        "step collapse without threshold crossing (stagnation)".into()
                    ],
                };
                return Ok((traj, report));
            }
            // Refine: rerun at tighter tolerances and extrapolate.
            let mut refinement =
                vec![RefinementLevel { rtol: opts.rtol, t_reached: first.t_end }];
            let mut finest = first;
            let mut finest_rtol = opts.rtol;
            for level in 1..opts.refine_levels.max(1) {
                let rtol = opts.rtol / opts.refine_ratio.powi(level as i32);
                let run = run_once(params, init, horizon, rtol, opts);
                if run.reason != StopReason::StepFloor || !crossed(&run) {
                    // A refined run disagreeing with the coarse one is
                    // recorded but does not overturn the measurement.
                    refinement.push(RefinementLevel { rtol, t_reached: run.t_end });
                    continue;
                }
                refinement.push(RefinementLevel { rtol, t_reached: run.t_end });
                finest = run;
                finest_rtol = rtol;
            }
            let times: Vec<f64> = refinement.iter().map(|l| l.t_reached).collect();
            let t_min = times.iter().cloned().fold(f64::INFINITY, f64::min);
            let t_max = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let spread = t_max - t_min;
            let t_high = t_max + spread + 1e-12 * t_max.abs();
            let t_est = aitken(&times).clamp(t_min, t_high);
            let steps = finest.accepted;
            let traj = trajectory_from(&finest, finest_rtol, opts.atol);
            let report = BlowupReport {
                blew_up: true,
                status: OracleStatus::BlewUp,
                t_low: t_min,
                t_high,
                threshold_used: opts.threshold,
                refinement,
                t_est: Some(t_est),
                steps,
                warnings: Vec::new(),
            };
            Ok((traj, report))
        }
    }
}

/// Aitken delta-squared extrapolation of a short sequence; falls back to the
/// last entry when the acceleration is ill-conditioned.
fn aitken(times: &[f64]) -> f64 {
    let n = times.len();
    if n < 3 {
        return *times.last().expect("at least one refinement level");
    }
    let (t0, t1, t2) = (times[n - 3], times[n - 2], times[n - 1]);
    let (d1, d2) = (t1 - t0, t2 - t1);
    let denom = d2 - d1;
    if denom.abs() > 1e-3 * d2.abs().max(1e-300) {
        t2 - d2 * d2 / denom
    } else {
        t2
    }
}

// ---------------------------------------------------------------------------
// Frame and first-bound verification
// ---------------------------------------------------------------------------

/// Options for the quadrature-based frame check.
#[derive(Debug, Clone, Copy)]
pub struct FrameCheckOpts {
    /// Number of quadrature nodes on `[0, t_max]`.
    pub quad_points: usize,
    /// Number of checkpoints where margins are evaluated.
    pub checkpoints: usize,
    /// Fraction of the trajectory end time to cover.
    pub t_fraction: f64,
}

impl Default for FrameCheckOpts {
    fn default() -> Self {
        Self { quad_points: 4096, checkpoints: 8, t_fraction: 0.9 }
    }
}

/// Signed margins of the nonlinear integral inequalities along a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameReport {
    /// Worst value of `U(t) - RHS_U(t)` over the checkpoints.
    pub worst_margin_u: f64,
    /// Worst value of `V(t) - RHS_V(t)`.
    pub worst_margin_v: f64,
    /// Richardson estimates of the quadrature error at the worst points.
    pub quad_err_u: f64,
    pub quad_err_v: f64,
    pub checkpoints: Vec<f64>,
    pub pass: bool,
}

/// Verify the iteration frames
/// `U(t) >= int_0^t int_0^s e^{-k1 (t-s)} e^{-k2 (s-tau)} |V|^p dtau ds` and
/// `V(t) >= int_0^t int_0^s |U|^q dtau ds`
/// by composite trapezoid quadrature on the dense output. The massless case
/// is the `k2 = 0` instance of the same weights.
pub fn verify_frames(
    traj: &FunctionalTrajectory,
    params: &SystemParams,
    roots: &CharRoots,
    opts: &FrameCheckOpts,
) -> Result<FrameReport> {
    let t_max = traj.end_time() * opts.t_fraction;
    if t_max <= 0.0 {
        return Err(Error::InvalidConfig("trajectory too short for a frame check".into()));
    }
    // Frames are derived under sign conditions.
    for s in &traj.samples {
        if s.u < -1e-12 || s.v < -1e-12 {
            return Err(Error::NotApplicable(
                "frames require non-negative U and V along the trajectory".into(),
            ));
        }
    }

    let m = opts.quad_points.max(64);
    let rhs = |m: usize| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let dt = t_max / m as f64;
        let mut ts = Vec::with_capacity(m + 1);
        let mut fu = Vec::with_capacity(m + 1); // |V|^p samples
        let mut fv = Vec::with_capacity(m + 1); // |U|^q samples
        for i in 0..=m {
            let t = dt * i as f64;
            let s = traj.eval(t);
            ts.push(t);
            fu.push(s.v.abs().powf(params.p));
            fv.push(s.u.abs().powf(params.q));
        }
        // Exponentially weighted cumulative integrals (weights stay in (0,1]).
        let wk2 = (-roots.k2 * dt).exp();
        let wk1 = (-roots.k1 * dt).exp();
        let mut g = vec![0.0; m + 1];
        let mut rhs_u = vec![0.0; m + 1];
        for i in 1..=m {
            g[i] = wk2 * g[i - 1] + 0.5 * dt * (wk2 * fu[i - 1] + fu[i]);
            rhs_u[i] = wk1 * rhs_u[i - 1] + 0.5 * dt * (wk1 * g[i - 1] + g[i]);
        }
        let mut p1 = vec![0.0; m + 1];
        let mut rhs_v = vec![0.0; m + 1];
        for i in 1..=m {
            p1[i] = p1[i - 1] + 0.5 * dt * (fv[i - 1] + fv[i]);
            rhs_v[i] = rhs_v[i - 1] + 0.5 * dt * (p1[i - 1] + p1[i]);
        }
        (ts, rhs_u, rhs_v)
    };

    let (ts, rhs_u, rhs_v) = rhs(m);
    let (_, rhs_u_half, rhs_v_half) = rhs(m / 2);

    let mut worst_u = f64::INFINITY;
    let mut worst_v = f64::INFINITY;
    let mut err_u: f64 = 0.0;
    let mut err_v: f64 = 0.0;
    let mut checkpoints = Vec::new();
    for c in 1..=opts.checkpoints {
        let idx = c * m / opts.checkpoints;
        let t = ts[idx];
        checkpoints.push(t);
        let state = traj.eval(t);
        worst_u = worst_u.min(state.u - rhs_u[idx]);
        worst_v = worst_v.min(state.v - rhs_v[idx]);
        // Trapezoid is O(h^2): Richardson error estimate (I_m - I_{m/2})/3.
        err_u = err_u.max((rhs_u[idx] - rhs_u_half[idx / 2]).abs() / 3.0);
        err_v = err_v.max((rhs_v[idx] - rhs_v_half[idx / 2]).abs() / 3.0);
    }
    let tol_u = 10.0 * err_u + 1e-14;
    let tol_v = 10.0 * err_v + 1e-14;
    Ok(FrameReport {
        worst_margin_u: worst_u,
        worst_margin_v: worst_v,
        quad_err_u: err_u,
        quad_err_v: err_v,
        checkpoints,
        pass: worst_u >= -tol_u && worst_v >= -tol_v,
    })
}

/// Margins of the first lower bounds along a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirstBoundReport {
    /// `min_t (U(t) - C_2 eps)` over `t >= 1/b` (massless case only).
    pub margin_u: Option<f64>,
    /// `min_t (V(t) - C_r eps t^r)`.
    pub margin_v: f64,
    pub pass: bool,
}

/// Verify `V(t) >= C_r eps t^r` for all sampled `t`, and additionally
/// `U(t) >= C_2 eps` for `t >= 1/b` in the massless case, with
/// `C_2 = int u_0 + b^{-1}(1 - e^{-1}) int u_1`.
pub fn verify_first_bounds(
    traj: &FunctionalTrajectory,
    params: &SystemParams,
    data: &HomogeneousData,
) -> Result<FirstBoundReport> {
    if !data.is_non_negative() {
        return Err(Error::NotApplicable(
            "first lower bounds require non-negative data".into(),
        ));
    }
    let eps = params.epsilon;
    let r = data.r();
    let c_r = if r == 1 { data.v1 } else { data.v0 };
    let c2 = data.u0 + (1.0 - (-1.0f64).exp()) / params.b * data.u1;

    let tol = 1e-8 * (1.0 + eps);
    let mut margin_v = f64::INFINITY;
    let mut margin_u: Option<f64> = None;
    for s in &traj.samples {
        margin_v = margin_v.min(s.v - c_r * eps * s.t.powi(r as i32));
        if params.m2 == 0.0 && s.t >= 1.0 / params.b {
            let m = s.u - c2 * eps;
            margin_u = Some(margin_u.map_or(m, |cur: f64| cur.min(m)));
        }
    }
    let pass = margin_v >= -tol && margin_u.map_or(true, |m| m >= -tol);
    Ok(FirstBoundReport { margin_u, margin_v, pass })
}

/// Closed-form solution of the linear equation `w'' + b w' + m^2 w = 0`
/// with `w(0) = w0`, `w'(0) = w1` (dominant damping).
pub fn u_lin(roots: &CharRoots, b: f64, w0: f64, w1: f64, t: f64) -> f64 {
    if roots.double_root {
        (-b / 2.0 * t).exp() * ((1.0 + b / 2.0 * t) * w0 + t * w1)
    } else {
        let (k1, k2) = (roots.k1, roots.k2);
        ((k1 * (-k2 * t).exp() - k2 * (-k1 * t).exp()) * w0
            + ((-k2 * t).exp() - (-k1 * t).exp()) * w1)
            / (k1 - k2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::char_roots;
    use approx::assert_relative_eq;

    fn kg_params(eps: f64) -> SystemParams {
        SystemParams::new(2.0, 0.75, 2.0, 2.0, eps).unwrap()
    }

    #[test]
    fn reduction_scales_by_eps() {
        let params = kg_params(0.01);
        let (state, warn) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!((state.u, state.up, state.v, state.vp), (0.0, 0.0, 0.0, 0.01));
        assert!(warn.is_empty());
        let (zero, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 0.0));
        assert_eq!((zero.u, zero.up, zero.v, zero.vp), (0.0, 0.0, 0.0, 0.0));
        let (neg, warn) = reduce_homogeneous(&params, &HomogeneousData::new(-1.0, 0.0, 0.0, 1.0));
        assert_eq!(neg.u, -0.01);
        assert_eq!(warn.len(), 1);
    }

    #[test]
    fn zero_data_survives_any_horizon() {
        let params = kg_params(1e-3);
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 0.0));
        let (_, report) =
            integrate_blowup(&params, &init, 50.0, &IntegrateOpts::default()).unwrap();
        assert_eq!(report.status, OracleStatus::Survived);
        assert!(!report.blew_up);
        assert!(report.t_est.is_none());
    }

    #[test]
    fn kg_blowup_reproducible_across_tolerances() {
        let params = kg_params(1e-2);
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
        let opts = IntegrateOpts::default();
        let (_, report) = integrate_blowup(&params, &init, 1e4, &opts).unwrap();
        assert!(report.blew_up);
        let t_est = report.t_est.unwrap();
        assert!(report.t_low <= t_est && t_est <= report.t_high);

        let tighter = IntegrateOpts { rtol: opts.rtol / 2.0, ..opts };
        let (_, report2) = integrate_blowup(&params, &init, 1e4, &tighter).unwrap();
        let t2 = report2.t_est.unwrap();
        assert!((t2 - t_est).abs() / t_est < 1e-3, "t = {t_est}, t' = {t2}");
    }

    #[test]
    fn blowup_time_decreasing_in_eps() {
        let mut last = f64::INFINITY;
        // 6-point grid spanning 3 decades.
        for i in 0..6 {
            let eps = 1e-2 * 10f64.powf(-(i as f64) * 3.0 / 5.0);
            let params = kg_params(eps);
            let (init, _) =
                reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
            let (_, report) =
                integrate_blowup(&params, &init, 1e7, &IntegrateOpts::default()).unwrap();
            let t = report.t_est.unwrap();
            assert!(t > 0.0 && t < last, "T not strictly decreasing at eps = {eps}");
            last = t;
        }
    }

    #[test]
    fn sensitivity_to_threshold_is_small() {
        // Escape time converges rapidly as the threshold grows.
        let params = kg_params(1e-2);
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
        let lo = IntegrateOpts { threshold: 1e6, ..Default::default() };
        let hi = IntegrateOpts { threshold: 1e10, ..Default::default() };
        let (_, r1) = integrate_blowup(&params, &init, 1e4, &lo).unwrap();
        let (_, r2) = integrate_blowup(&params, &init, 1e4, &hi).unwrap();
        let (t1, t2) = (r1.t_est.unwrap(), r2.t_est.unwrap());
        assert!((t1 - t2).abs() / t1 < 5e-3, "threshold sensitivity {t1} vs {t2}");
    }

    #[test]
    fn bracket_shrinks_under_refinement() {
        let params = kg_params(1e-2);
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
        let coarse = IntegrateOpts { rtol: 1e-5, ..Default::default() };
        let fine = IntegrateOpts { rtol: 1e-10, ..Default::default() };
        let (_, r1) = integrate_blowup(&params, &init, 1e4, &coarse).unwrap();
        let (_, r2) = integrate_blowup(&params, &init, 1e4, &fine).unwrap();
        assert!(r1.t_low < r1.t_high);
        assert!(r2.t_low < r2.t_high);
        assert!(r2.t_high - r2.t_low <= r1.t_high - r1.t_low);
    }

    #[test]
    fn linear_kg_matches_closed_form_both_branches() {
        for (b, m2) in [(3.0, 2.0), (2.0, 1.0)] {
            let params = SystemParams::new(b, m2, 2.0, 2.0, 1.0).unwrap();
            let roots = char_roots(&params).unwrap();
            let (init, _) =
                reduce_homogeneous(&params, &HomogeneousData::new(0.7, 0.3, 0.0, 0.0));
            let opts = IntegrateOpts {
                rtol: 1e-12,
                atol: 1e-14,
                linear_only: true,
                ..Default::default()
            };
            let (traj, _) = integrate_blowup(&params, &init, 10.0, &opts).unwrap();
            for i in 0..=40 {
                let t = 0.25 * i as f64;
                let expected = u_lin(&roots, b, 0.7, 0.3, t);
                let got = traj.eval(t).u;
                assert!(
                    (got - expected).abs() <= 1e-10 * expected.abs().max(1.0),
                    "b = {b}, m2 = {m2}, t = {t}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn pre_coupling_v_is_exactly_linear() {
        // With data (0,0,0,1), V(t) = eps t until U deviates from zero.
        let params = kg_params(1e-3);
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
        let (traj, _) =
            integrate_blowup(&params, &init, 0.5, &IntegrateOpts::default()).unwrap();
        let s = traj.eval(0.5);
        assert!(s.u.abs() < 1e-8);
        assert!((s.v - 1e-3 * 0.5).abs() < 1e-12 * 1e-3);
    }

    #[test]
    fn frames_hold_along_kg_run() {
        let params = kg_params(1e-2);
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
        let (traj, report) =
            integrate_blowup(&params, &init, 1e4, &IntegrateOpts::default()).unwrap();
        assert!(report.blew_up);
        let roots = char_roots(&params).unwrap();
        let fr = verify_frames(&traj, &params, &roots, &FrameCheckOpts::default()).unwrap();
        assert!(fr.pass, "frame margins: {} / {}", fr.worst_margin_u, fr.worst_margin_v);
    }

    #[test]
    fn frames_hold_along_massless_run() {
        let params = SystemParams::new(2.0, 0.0, 2.0, 2.0, 1e-2).unwrap();
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
        let (traj, report) =
            integrate_blowup(&params, &init, 1e5, &IntegrateOpts::default()).unwrap();
        assert!(report.blew_up);
        let roots = char_roots(&params).unwrap();
        let fr = verify_frames(&traj, &params, &roots, &FrameCheckOpts::default()).unwrap();
        assert!(fr.pass, "frame margins: {} / {}", fr.worst_margin_u, fr.worst_margin_v);
    }

    #[test]
    fn frames_reject_negative_trajectories() {
        let params = kg_params(1e-2);
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(-1.0, 0.0, 0.0, 1.0));
        let (traj, _) = integrate_blowup(&params, &init, 2.0, &IntegrateOpts::default()).unwrap();
        let roots = char_roots(&params).unwrap();
        assert!(verify_frames(&traj, &params, &roots, &FrameCheckOpts::default()).is_err());
    }

    #[test]
    fn first_bounds_hold() {
        // Massless with u-data: U(t) >= C_2 eps for t >= 1/b; here with
        // (1, 0) the bound is C_2 = 1 and U is non-decreasing from eps.
        let params = SystemParams::new(2.0, 0.0, 2.0, 2.0, 1e-3).unwrap();
        let data = HomogeneousData::new(1.0, 0.0, 0.0, 1.0);
        let (init, _) = reduce_homogeneous(&params, &data);
        let (traj, _) = integrate_blowup(&params, &init, 50.0, &IntegrateOpts::default()).unwrap();
        let report = verify_first_bounds(&traj, &params, &data).unwrap();
        assert!(report.pass);
        assert!(report.margin_u.unwrap() >= -1e-9);

        // V(t) = eps t exactly before coupling: equality margin ~ 0.
        let params = kg_params(1e-3);
        let data = HomogeneousData::new(0.0, 0.0, 0.0, 1.0);
        let (init, _) = reduce_homogeneous(&params, &data);
        let (traj, _) = integrate_blowup(&params, &init, 5.0, &IntegrateOpts::default()).unwrap();
        let report = verify_first_bounds(&traj, &params, &data).unwrap();
        assert!(report.pass);
        assert!(report.margin_v >= -1e-12);
    }

    #[test]
    fn csv_export_shape() {
        let params = kg_params(1e-3);
        let (init, _) = reduce_homogeneous(&params, &HomogeneousData::new(0.0, 0.0, 0.0, 1.0));
        let (traj, _) = integrate_blowup(&params, &init, 1.0, &IntegrateOpts::default()).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,U,Up,V,Vp\n"));
        assert_eq!(text.lines().count(), traj.samples.len() + 1);
    }

    #[test]
    fn u_lin_initial_conditions() {
        let params = SystemParams::new(3.0, 2.0, 2.0, 2.0, 1.0).unwrap();
        let roots = char_roots(&params).unwrap();
        assert_relative_eq!(u_lin(&roots, 3.0, 1.3, 0.0, 0.0), 1.3);
        let h = 1e-7;
        let deriv = (u_lin(&roots, 3.0, 1.3, 0.4, h) - u_lin(&roots, 3.0, 1.3, 0.4, 0.0)) / h;
        assert_relative_eq!(deriv, 0.4, max_relative = 1e-6);
    }
}
