//! Dormand-Prince 5(4) embedded pair with continuous (dense) output.
//!
//! Seven stages, FSAL, fourth-order interpolant. Coefficients follow the
//! standard RK5(4)7M tableau and its companion dense-output weights.

/// Integration options.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Hard step ceiling (also capped by the remaining interval).
    pub h_max: f64,
    pub max_steps: usize,
    /// Declare step collapse when `h < step_floor_rel * t`.
    pub step_floor_rel: f64,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
            step_floor_rel: 1e-13,
        }
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Reached the requested end time.
    ReachedEnd,
    /// The accepted step size collapsed below the relative floor.
    StepFloor,
    /// Step budget exhausted.
    MaxSteps,
}

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    /// Evaluate the quartic interpolant at `t0 <= t <= t0 + h`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            let c = &self.cont;
            out[i] = c[0][i]
                + theta
                    * (c[1][i] + theta1 * (c[2][i] + theta * (c[3][i] + theta1 * c[4][i])));
        }
        out
    }
}

/// Piecewise-polynomial continuous extension of a solution.
#[derive(Debug, Clone, Default)]
pub struct DenseOutput<const N: usize> {
    pub steps: Vec<DenseStep<N>>,
}

impl<const N: usize> DenseOutput<N> {
    pub fn t_start(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.t0)
    }

    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.t0 + s.h)
    }

    /// Interpolated state; clamps to the covered interval.
    pub fn eval(&self, t: f64) -> [f64; N] {
        debug_assert!(!self.steps.is_empty());
        let idx = match self
            .steps
            .binary_search_by(|s| s.t0.partial_cmp(&t).expect("non-finite node"))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let step = &self.steps[idx];
        let t = t.clamp(step.t0, step.t0 + step.h);
        step.eval(t)
    }
}

/// Result of a single integration.
#[derive(Debug, Clone)]
pub struct Integration<const N: usize> {
    pub t_end: f64,
    pub y_end: [f64; N],
    pub dense: DenseOutput<N>,
    pub accepted: usize,
    pub rejected: usize,
    pub reason: StopReason,
}

// Butcher tableau, RK5(4)7M.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Error weights b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrate `y' = f(t, y)` from `(t0, y0)` to `t_end`, storing the dense
/// output of every accepted step.
pub fn integrate<const N: usize>(
    rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Dopri5Options,
) -> Integration<N> {
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = opts.h_init.unwrap_or_else(|| initial_step(&rhs, t, &y, &k1, opts));
    let mut dense = DenseOutput { steps: Vec::new() };
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut last_rejected = false;

    let reason = loop {
        if t >= t_end {
            break StopReason::ReachedEnd;
        }
        if accepted + rejected >= opts.max_steps {
            break StopReason::MaxSteps;
        }
        h = h.min(opts.h_max).min(t_end - t);
        if t > 0.0 && h < opts.step_floor_rel * t {
            break StopReason::StepFloor;
        }

        // Stage evaluations (k1 carried over, FSAL).
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ys[i] += h * acc;
            }
            k[s] = rhs(t + C[s] * h, &ys);
        }
        // 5th-order solution is the 7th-stage argument (a7 row = b row).
        let mut ynew = y;
        for i in 0..N {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[6][j] * kj[i];
            }
            ynew[i] += h * acc;
        }

        // Scaled error estimate.
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            let r = h * e / sc;
            err_sq += r * r;
        }
        let err = (err_sq / N as f64).sqrt();
        let err = if err.is_finite() { err } else { f64::INFINITY };

        if err <= 1.0 {
            // Dense coefficients.
            let mut cont = [[0.0; N]; 5];
            for i in 0..N {
                let delta = ynew[i] - y[i];
                cont[0][i] = y[i];
                cont[1][i] = delta;
                cont[2][i] = h * k[0][i] - delta;
                cont[3][i] = 2.0 * delta - h * (k[0][i] + k[6][i]);
                let mut d = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    d += D[j] * kj[i];
                }
                cont[4][i] = h * d;
            }
            dense.steps.push(DenseStep { t0: t, h, cont });
            t += h;
            y = ynew;
            k1 = k[6];
            accepted += 1;
            let fac_max = if last_rejected { 1.0 } else { 5.0 };
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, fac_max);
            last_rejected = false;
        } else {
            rejected += 1;
            last_rejected = true;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 1.0) } else { 0.5 };
            h *= fac.min(0.5_f64.max(0.1));
        }
    };

    Integration { t_end: t, y_end: y, dense, accepted, rejected, reason }
}

/// Conservative automatic initial step (norm-based, then clipped).
fn initial_step<const N: usize>(
    rhs: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    opts: &Dopri5Options,
) -> f64 {
    let norm = |v: &[f64; N]| -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt() / (N as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    // One Euler probe to estimate the second derivative scale.
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = rhs(t + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(opts.h_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let opts = Dopri5Options { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        let res = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &opts);
        assert_eq!(res.reason, StopReason::ReachedEnd);
        assert_relative_eq!(res.y_end[0], (-5.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn dense_output_matches_nodes_and_interpolates() {
        let opts = Dopri5Options { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        let res = integrate(
            |t, y: &[f64; 2]| [y[1], -y[0] + (t * 0.0)],
            0.0,
            [1.0, 0.0],
            6.0,
            &opts,
        );
        // Interpolant reproduces node values to near machine precision.
        for step in &res.dense.steps {
            let at_node = step.eval(step.t0);
            assert!((at_node[0] - step.cont[0][0]).abs() < 1e-13);
        }
        // Mid-interval values track cos(t) to interpolation accuracy.
        for i in 0..60 {
            let t = 0.1 * i as f64;
            let y = res.dense.eval(t);
            assert_relative_eq!(y[0], t.cos(), epsilon = 1e-8);
        }
    }

    #[test]
    fn blow_up_triggers_step_floor() {
        // y' = y^2 from y(0) = 1 blows up at t = 1.
        let opts = Dopri5Options { rtol: 1e-9, atol: 1e-12, ..Default::default() };
        let res = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 10.0, &opts);
        assert_eq!(res.reason, StopReason::StepFloor);
        assert_relative_eq!(res.t_end, 1.0, max_relative = 1e-6);
        assert!(res.y_end[0] > 1e8);
    }
}
