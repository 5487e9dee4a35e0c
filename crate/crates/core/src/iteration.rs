//! Slicing sequences, iterative lower-bound sequences, explicit constants
//! and proof-side blow-up deadlines.
//!
//! The blow-up argument generates lower bounds `V(t) >= D_j (t - L_{2j})^{alpha_j}`
//! (damped Klein-Gordon, 2-step slicing) or
//! `U(t) >= H_j (t - L_j)^{a_j}`, `V(t) >= K_j (t - L_j)^{b_j}`
//! (massless, 1-step slicing) whose divergence as `j -> inf` pins an explicit
//! deadline for the lifespan. All `D_j/H_j/K_j` arithmetic is carried in
//! log-space: these quantities scale like `eps^{(pq)^j}` and underflow
//! immediately in linear scale.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::model::{CharRoots, SystemParams};
use crate::rational::{pow_usize, ratio};
use crate::{Error, Result};

/// Which slicing scheme generated a sequence of cut points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlicingScheme {
    /// Damped Klein-Gordon: `l_0 = 1/k2`, `l_k = 1 + (pq)^(-k/2)` for `k >= 1`.
    TwoStep,
    /// Massless: `l_0 = 1/b`, `l_k = 1 + (pq)^(-k)` for `k >= 1`.
    OneStep,
}

/// Cut-point multipliers `l_k`, partial products `L_j` and the converged
/// infinite product `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicingData {
    pub scheme: SlicingScheme,
    /// `l_0 .. l_K`.
    pub ell: Vec<f64>,
    /// Partial products `L_j = prod_{k<=j} l_k`.
    pub partial: Vec<f64>,
    /// Converged infinite product.
    pub limit: f64,
    /// Index at which the product was truncated.
    pub truncation_index: usize,
    /// Bound on the relative tail left out of `limit`.
    pub truncation_error: f64,
}

impl SlicingData {
    /// `L_j`, extending past the stored prefix with the limit.
    pub fn partial_product(&self, j: usize) -> f64 {
        if j < self.partial.len() {
            self.partial[j]
        } else {
            self.limit
        }
    }

    /// `l_k` for arbitrary `k`, recomputed past the stored prefix.
    pub fn multiplier(&self, k: usize, pq: f64) -> f64 {
        if k < self.ell.len() {
            self.ell[k]
        } else {
            match self.scheme {
                SlicingScheme::TwoStep => 1.0 + pq.powf(-(k as f64) / 2.0),
                SlicingScheme::OneStep => 1.0 + pq.powf(-(k as f64)),
            }
        }
    }
}

/// Build the slicing sequence up to index `K` and converge the infinite
/// product (extend until the log-increment drops below 1e-15).
pub fn build_slicing(
    scheme: SlicingScheme,
    params: &SystemParams,
    roots: &CharRoots,
    k_max: usize,
) -> Result<SlicingData> {
    let pq = params.pq();
    let ell0 = match scheme {
        SlicingScheme::TwoStep => {
            if roots.k2 <= 0.0 {
                return Err(Error::InvalidParams(
                    "the 2-step slicing needs k2 > 0 (m^2 > 0); \
                     the massless case uses the 1-step scheme"
                        .into(),
                ));
            }
            1.0 / roots.k2
        }
        SlicingScheme::OneStep => 1.0 / params.b,
    };
    let ell_k = |k: usize| -> f64 {
        match scheme {
            SlicingScheme::TwoStep => 1.0 + pq.powf(-(k as f64) / 2.0),
            SlicingScheme::OneStep => 1.0 + pq.powf(-(k as f64)),
        }
    };

    let mut ell = Vec::with_capacity(k_max + 1);
    let mut partial = Vec::with_capacity(k_max + 1);
    ell.push(ell0);
    partial.push(ell0);
    for k in 1..=k_max {
        ell.push(ell_k(k));
        partial.push(partial[k - 1] * ell[k]);
    }

    // Converge the infinite product in log-space.
    let mut log_limit = ell0.ln();
    let mut k = 1usize;
    loop {
        let inc = ell_k(k).ln();
        log_limit += inc;
        if inc < 1e-15 || k > 10_000 {
            break;
        }
        k += 1;
    }
    // Geometric tail bound on sum_{j>k} ln l_j.
    let q_ratio = match scheme {
        SlicingScheme::TwoStep => pq.powf(-0.5),
        SlicingScheme::OneStep => 1.0 / pq,
    };
    let tail = q_ratio.powi(k as i32 + 1) / (1.0 - q_ratio);

    Ok(SlicingData {
        scheme,
        ell,
        partial,
        limit: log_limit.exp(),
        truncation_index: k,
        truncation_error: tail,
    })
}

// ---------------------------------------------------------------------------
// Damped Klein-Gordon sequences (2-step slicing)
// ---------------------------------------------------------------------------

/// Exponent sequence `alpha_j` with recursion/closed-form cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaValue {
    pub value: f64,
    /// |recursion - closed form| in float arithmetic (0 for exact inputs).
    pub discrepancy: f64,
}

/// `alpha_0 = r`, `alpha_{j+1} = alpha_j pq + 2`; closed form
/// `alpha_j = (2/(pq-1) + r) (pq)^j - 2/(pq-1)`.
pub fn kg_alpha(j: usize, r: u8, pq: f64) -> AlphaValue {
    let mut rec = r as f64;
    for _ in 0..j {
        rec = rec * pq + 2.0;
    }
    let c = 2.0 / (pq - 1.0);
    let closed = (c + r as f64) * pq.powi(j as i32) - c;
    AlphaValue { value: closed, discrepancy: (rec - closed).abs() }
}

/// Exact-rational version of [`kg_alpha`]; the recursion and the closed form
/// agree identically over the rationals.
pub fn kg_alpha_exact(j: usize, r: u8, pq: &BigRational) -> (BigRational, BigRational) {
    let two = ratio(2, 1);
    let mut rec = ratio(r as i64, 1);
    for _ in 0..j {
        rec = rec * pq.clone() + two.clone();
    }
    let c = two / (pq.clone() - BigRational::one());
    let closed = (c.clone() + ratio(r as i64, 1)) * pow_usize(pq, j) - c;
    (rec, closed)
}

/// The iterative lower-bound data for `V` in the damped Klein-Gordon case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgLowerBoundSeq {
    pub r: u8,
    /// Data integral `C_r = int v_r` under the normalized Haar measure.
    pub c_r: f64,
    pub epsilon: f64,
    /// `alpha_j` for `j = 0..=jmax`.
    pub alpha: Vec<f64>,
    /// `ln D_j` for `j = 0..=jmax`.
    pub ln_d: Vec<f64>,
}

/// Default depth for sequence evaluation: `(pq)^j` exceeds 1e12 well before
/// j = 40 for any pq >= 2, making deeper terms numerically irrelevant in
/// log-space comparisons.
pub const DEFAULT_JMAX: usize = 40;

impl KgLowerBoundSeq {
    /// Evaluate `alpha_j` and `ln D_j` up to `jmax`.
    ///
    /// `D_0 = C_r eps` and
    /// `D_{j+1} = (pq - 1/2)^{2q} / ((k1 k2)^q (l_{2j+1} l_{2j+2})^{alpha_j pq}
    ///            (alpha_j pq + 1)(alpha_j pq + 2) (pq)^{(4j+3) q}) D_j^{pq}`.
    pub fn new(
        params: &SystemParams,
        roots: &CharRoots,
        slicing: &SlicingData,
        r: u8,
        c_r: f64,
        jmax: usize,
    ) -> Result<Self> {
        if slicing.scheme != SlicingScheme::TwoStep {
            return Err(Error::InvalidParams(
                "the damped Klein-Gordon sequence needs 2-step slicing data".into(),
            ));
        }
        if c_r < 0.0 || (params.epsilon > 0.0 && c_r == 0.0) {
            return Err(Error::InvalidParams(format!(
                "the iteration assumes nontrivial non-negative data: C_r = {c_r}"
            )));
        }
        let (p, q, pq) = (params.p, params.q, params.pq());
        let k1k2 = roots.product();
        let mut alpha = Vec::with_capacity(jmax + 1);
        let mut ln_d = Vec::with_capacity(jmax + 1);
        alpha.push(r as f64);
        ln_d.push((c_r * params.epsilon).ln());
        for j in 0..jmax {
            let a = alpha[j];
            let ell_a = slicing.multiplier(2 * j + 1, pq);
            let ell_b = slicing.multiplier(2 * j + 2, pq);
            let ln_factor = 2.0 * q * (pq - 0.5).ln()
                - q * k1k2.ln()
                - a * pq * (ell_a * ell_b).ln()
                - (a * pq + 1.0).ln()
                - (a * pq + 2.0).ln()
                - ((4 * j + 3) as f64) * q * pq.ln();
            ln_d.push(pq * ln_d[j] + ln_factor);
            alpha.push(kg_alpha(j + 1, r, pq).value);
        }
        let _ = p;
        Ok(Self { r, c_r, epsilon: params.epsilon, alpha, ln_d })
    }

    pub fn jmax(&self) -> usize {
        self.alpha.len() - 1
    }
}

/// Explicit constants and thresholds driving the blow-up deadline in the
/// damped Klein-Gordon case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgThresholds {
    pub r: u8,
    pub c_r: f64,
    /// `M0 = (2/(pq-1) + r)^2`.
    pub m0: f64,
    /// Uniform bound on `(l_{2j+1} l_{2j+2})^{alpha_{j+1}}`; the maximum of
    /// the computed factors and the analytic limit
    /// `exp[(2/(pq-1) + r)(1 + sqrt(pq))]`.
    pub m1: f64,
    /// Index achieving the computed part of `m1` (`None` when the analytic
    /// limit dominates).
    pub m1_arg: Option<usize>,
    /// `M2 = (pq - 1/2)^{2q} (pq)^q / ((k1 k2)^q M0 M1)`.
    pub m2: f64,
    /// `M3 = C_r 2^{-2/(pq-1)-r} (pq)^{-(4q+2) pq/(pq-1)^2} M2^{1/(pq-1)}`.
    pub m3: f64,
    /// Smallest admissible iteration index.
    pub j0: usize,
    /// Threshold data size below which the deadline certificate applies.
    pub eps0: f64,
}

/// Compute the explicit constants `M0..M3`, the admissible index `j0` and
/// the data threshold `eps0`.
pub fn kg_thresholds(
    params: &SystemParams,
    roots: &CharRoots,
    slicing: &SlicingData,
    r: u8,
    c_r: f64,
) -> Result<KgThresholds> {
    if slicing.scheme != SlicingScheme::TwoStep {
        return Err(Error::InvalidParams("thresholds need 2-step slicing data".into()));
    }
    if c_r <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "thresholds need a positive data integral C_r, got {c_r}"
        )));
    }
    let (q, pq) = (params.q, params.pq());
    let cr_exp = 2.0 / (pq - 1.0) + r as f64;
    let m0 = cr_exp * cr_exp;

    // Uniform dominating constant for (l_{2j+1} l_{2j+2})^{alpha_{j+1}}.
    let analytic = (cr_exp * (1.0 + pq.sqrt())).exp();
    let mut m1 = analytic;
    let mut m1_arg = None;
    for j in 0..=64usize {
        let a1 = kg_alpha(j + 1, r, pq).value;
        let val = a1
            * (slicing.multiplier(2 * j + 1, pq) * slicing.multiplier(2 * j + 2, pq)).ln();
        let val = val.exp();
        if val > m1 {
            m1 = val;
            m1_arg = Some(j);
        }
    }

    let k1k2 = roots.product();
    let m2 = (pq - 0.5).powf(2.0 * q) * pq.powf(q) / (k1k2.powf(q) * m0 * m1);
    let m3 = c_r
        * 2f64.powf(-cr_exp)
        * pq.powf(-(4.0 * q + 2.0) * pq / ((pq - 1.0) * (pq - 1.0)))
        * m2.powf(1.0 / (pq - 1.0));
    let j0_raw = m2.ln() / ((4.0 * q + 2.0) * pq.ln()) - pq / (pq - 1.0);
    let j0 = j0_raw.ceil().max(0.0) as usize;
    let eps0 = (2.0 * slicing.limit).powf(-cr_exp) / m3;
    Ok(KgThresholds { r, c_r, m0, m1, m1_arg, m2, m3, j0, eps0 })
}

/// Explicit proof-side blow-up deadline
/// `T(eps) <= max{2L, (M3 eps)^(-(pq-1)/(r pq + 2 - r))}`, valid for
/// `0 < eps <= eps0`.
pub fn kg_upper_t(
    eps: f64,
    params: &SystemParams,
    thresholds: &KgThresholds,
    slicing: &SlicingData,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("deadline needs eps > 0, got {eps}")));
    }
    if eps > thresholds.eps0 {
        return Err(Error::NotApplicable(format!(
            "eps = {eps} exceeds the certified threshold eps0 = {}; \
             the deadline hypotheses are not met",
            thresholds.eps0
        )));
    }
    let pq = params.pq();
    let r = thresholds.r as f64;
    let exponent = -(pq - 1.0) / (r * pq + 2.0 - r);
    Ok((2.0 * slicing.limit).max((thresholds.m3 * eps).powf(exponent)))
}

// ---------------------------------------------------------------------------
// Massless sequences (1-step slicing)
// ---------------------------------------------------------------------------

/// `a_0 = 0`, `a_{j+1} = pq a_j + 2p + 1`; closed form
/// `a_j = (a_0 + (2p+1)/(pq-1)) (pq)^j - (2p+1)/(pq-1)`.
pub fn massless_a(j: usize, p: f64, q: f64) -> AlphaValue {
    let pq = p * q;
    let mut rec = 0.0;
    for _ in 0..j {
        rec = rec * pq + 2.0 * p + 1.0;
    }
    let c = (2.0 * p + 1.0) / (pq - 1.0);
    let closed = c * pq.powi(j as i32) - c;
    AlphaValue { value: closed, discrepancy: (rec - closed).abs() }
}

/// `b_0 = r`, `b_{j+1} = pq b_j + q + 2`; closed form analogous to `a_j`.
pub fn massless_b(j: usize, r: u8, p: f64, q: f64) -> AlphaValue {
    let pq = p * q;
    let mut rec = r as f64;
    for _ in 0..j {
        rec = rec * pq + q + 2.0;
    }
    let c = (q + 2.0) / (pq - 1.0);
    let closed = (r as f64 + c) * pq.powi(j as i32) - c;
    AlphaValue { value: closed, discrepancy: (rec - closed).abs() }
}

/// Exact-rational recursion and closed form for `a_j`.
pub fn massless_a_exact(j: usize, p: &BigRational, q: &BigRational) -> (BigRational, BigRational) {
    let pq = p.clone() * q.clone();
    let step = ratio(2, 1) * p.clone() + BigRational::one();
    let mut rec = BigRational::zero();
    for _ in 0..j {
        rec = rec * pq.clone() + step.clone();
    }
    let c = step / (pq.clone() - BigRational::one());
    let closed = c.clone() * pow_usize(&pq, j) - c;
    (rec, closed)
}

/// Exact-rational recursion and closed form for `b_j`.
pub fn massless_b_exact(
    j: usize,
    r: u8,
    p: &BigRational,
    q: &BigRational,
) -> (BigRational, BigRational) {
    let pq = p.clone() * q.clone();
    let step = q.clone() + ratio(2, 1);
    let mut rec = ratio(r as i64, 1);
    for _ in 0..j {
        rec = rec * pq.clone() + step.clone();
    }
    let c = step / (pq.clone() - BigRational::one());
    let closed = (ratio(r as i64, 1) + c.clone()) * pow_usize(&pq, j) - c;
    (rec, closed)
}

/// Iterative lower-bound data for the massless case: exponent sequences
/// `a_j`, `b_j` and log-space amplitude sequences `ln H_j`, `ln K_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasslessLowerBoundSeq {
    pub r: u8,
    /// First-bound constant for `U` (`U(t) >= C_2 eps` for `t >= 1/b`).
    pub c2: f64,
    /// First-bound constant for `V` (`V(t) >= C_r eps t^r`).
    pub c_r: f64,
    pub epsilon: f64,
    pub a: Vec<f64>,
    pub b_seq: Vec<f64>,
    /// `ln H_j`; identically `-inf` when `C_2 = 0` (trivial `u`-data).
    pub ln_h: Vec<f64>,
    pub ln_k: Vec<f64>,
}

impl MasslessLowerBoundSeq {
    /// Evaluate the four sequences up to `jmax`.
    ///
    /// `H_0 = C_2 eps`, `K_0 = C_r eps`, and
    /// `H_{j+1} = (pq - 1/2) l_{j+1}^{-a_{j+1}} / (b a_{j+1}^{2p+1} (pq)^{2(j+1)}) H_j^{pq}`,
    /// `K_{j+1} = (pq - 1/2)^q l_{j+1}^{-b_{j+1}} / (b^q b_{j+1}^{q+2} (pq)^{2q(j+1)}) K_j^{pq}`.
    ///
    /// `C_2 = 0` is allowed (the `U`-route is then vacuous, `H_j = 0` for
    /// every `j`); negative constants are rejected.
    pub fn new(
        params: &SystemParams,
        slicing: &SlicingData,
        r: u8,
        c2: f64,
        c_r: f64,
        jmax: usize,
    ) -> Result<Self> {
        if slicing.scheme != SlicingScheme::OneStep {
            return Err(Error::InvalidParams(
                "the massless sequence needs 1-step slicing data".into(),
            ));
        }
        if c2 < 0.0 || c_r < 0.0 {
            return Err(Error::InvalidParams(format!(
                "first-bound constants must be non-negative, got C_2 = {c2}, C_r = {c_r}"
            )));
        }
        if c_r == 0.0 && params.epsilon > 0.0 {
            return Err(Error::InvalidParams(
                "the massless iteration assumes a nontrivial v-datum (C_r > 0)".into(),
            ));
        }
        let (p, q, pq, b) = (params.p, params.q, params.pq(), params.b);
        let mut a = vec![0.0f64];
        let mut b_seq = vec![r as f64];
        let mut ln_h = vec![(c2 * params.epsilon).ln()];
        let mut ln_k = vec![(c_r * params.epsilon).ln()];
        for j in 0..jmax {
            let a1 = massless_a(j + 1, p, q).value;
            let b1 = massless_b(j + 1, r, p, q).value;
            let ell = slicing.multiplier(j + 1, pq);
            let ln_factor_h = (pq - 0.5).ln()
                - a1 * ell.ln()
                - b.ln()
                - (2.0 * p + 1.0) * a1.ln()
                - 2.0 * ((j + 1) as f64) * pq.ln();
            let ln_factor_k = q * (pq - 0.5).ln()
                - b1 * ell.ln()
                - q * b.ln()
                - (q + 2.0) * b1.ln()
                - 2.0 * q * ((j + 1) as f64) * pq.ln();
            ln_h.push(pq * ln_h[j] + ln_factor_h);
            ln_k.push(pq * ln_k[j] + ln_factor_k);
            a.push(a1);
            b_seq.push(b1);
        }
        Ok(Self { r, c2, c_r, epsilon: params.epsilon, a, b_seq, ln_h, ln_k })
    }

    pub fn jmax(&self) -> usize {
        self.a.len() - 1
    }
}

/// Explicit constants of the massless deadline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasslessConstants {
    pub r: u8,
    pub c2: f64,
    pub c_r: f64,
    /// Uniform lower bound for `l_j^{-a_j}` and `l_j^{-b_j}`: the infimum of
    /// the computed factors and the analytic limits
    /// `exp(-(a_0 + (2p+1)/(pq-1)))`, `exp(-(b_0 + (q+2)/(pq-1)))`.
    pub m4: f64,
    /// `H = (M4/b)(pq - 1/2)(a_0 + (2p+1)/(pq-1))^{-(2p+1)}`.
    pub h_const: f64,
    /// `K = (M4/b^q)(pq - 1/2)^q (b_0 + (q+2)/(pq-1))^{-(q+2)}`.
    pub k_const: f64,
    /// `M5 = C_2 (pq)^{-(2p+3) pq/(pq-1)^2} 2^{-(a_0 + (2p+1)/(pq-1))} H^{1/(pq-1)}`;
    /// zero when the `u`-data is trivial.
    pub m5: f64,
    /// `M6 = C_r (pq)^{-(3q+2) pq/(pq-1)^2} 2^{-(b_0 + (q+2)/(pq-1))} K^{1/(pq-1)}`.
    pub m6: f64,
    /// Smallest admissible indices for the `U`- and `V`-routes.
    pub j1: usize,
    pub j2: usize,
    /// Threshold data size.
    pub eps0: f64,
}

/// Compute the massless deadline constants.
///
/// `C_2 = 0` degenerates the `U`-route: `M5 = 0` and the corresponding
/// deadline branch drops out (it reads as `+inf`).
pub fn massless_constants(
    params: &SystemParams,
    slicing: &SlicingData,
    r: u8,
    c2: f64,
    c_r: f64,
) -> Result<MasslessConstants> {
    if slicing.scheme != SlicingScheme::OneStep {
        return Err(Error::InvalidParams("massless constants need 1-step slicing".into()));
    }
    if c2 < 0.0 || c_r <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "massless constants need C_2 >= 0 and C_r > 0, got C_2 = {c2}, C_r = {c_r}"
        )));
    }
    let (p, q, pq, b) = (params.p, params.q, params.pq(), params.b);
    let a_inf = (2.0 * p + 1.0) / (pq - 1.0); // a_0 = 0
    let b_inf = r as f64 + (q + 2.0) / (pq - 1.0); // b_0 = r

    // Uniform lower bound for l_j^{-a_j} and l_j^{-b_j} over all j.
    let mut m4 = (-a_inf).exp().min((-b_inf).exp());
    for j in 0..=64usize {
        let ell = slicing.multiplier(j, pq);
        let a = massless_a(j, p, q).value;
        let bb = massless_b(j, r, p, q).value;
        m4 = m4.min((-a * ell.ln()).exp()).min((-bb * ell.ln()).exp());
    }

    let h_const = m4 / b * (pq - 0.5) * a_inf.powf(-(2.0 * p + 1.0));
    let k_const = m4 / b.powf(q) * (pq - 0.5).powf(q) * b_inf.powf(-(q + 2.0));
    let m5 = c2
        * pq.powf(-(2.0 * p + 3.0) * pq / ((pq - 1.0) * (pq - 1.0)))
        * 2f64.powf(-a_inf)
        * h_const.powf(1.0 / (pq - 1.0));
    let m6 = c_r
        * pq.powf(-(3.0 * q + 2.0) * pq / ((pq - 1.0) * (pq - 1.0)))
        * 2f64.powf(-b_inf)
        * k_const.powf(1.0 / (pq - 1.0));
    let j1 = (h_const.ln() / ((2.0 * p + 3.0) * pq.ln()) - pq / (pq - 1.0))
        .ceil()
        .max(0.0) as usize;
    let j2 = (k_const.ln() / ((3.0 * q + 2.0) * pq.ln()) - pq / (pq - 1.0))
        .ceil()
        .max(0.0) as usize;
    let two_l = 2.0 * slicing.limit;
    let eps_u = if m5 > 0.0 { two_l.powf(-a_inf) / m5 } else { f64::INFINITY };
    let eps_v = two_l.powf(-b_inf) / m6;
    Ok(MasslessConstants {
        r,
        c2,
        c_r,
        m4,
        h_const,
        k_const,
        m5,
        m6,
        j1,
        j2,
        eps0: eps_u.min(eps_v),
    })
}

/// Massless proof-side deadline
/// `T(eps) <= max{2L, min{(M5 eps)^(-(pq-1)/(2p+1)), (M6 eps)^(-(pq-1)/(r pq + 2 - r + q))}}`.
pub fn massless_upper_t(
    eps: f64,
    params: &SystemParams,
    constants: &MasslessConstants,
    slicing: &SlicingData,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("deadline needs eps > 0, got {eps}")));
    }
    if eps > constants.eps0 {
        return Err(Error::NotApplicable(format!(
            "eps = {eps} exceeds the certified threshold eps0 = {}",
            constants.eps0
        )));
    }
    let pq = params.pq();
    let (p, q, r) = (params.p, params.q, constants.r as f64);
    let u_branch = if constants.m5 > 0.0 {
        (constants.m5 * eps).powf(-(pq - 1.0) / (2.0 * p + 1.0))
    } else {
        f64::INFINITY
    };
    let v_branch = (constants.m6 * eps).powf(-(pq - 1.0) / (r * pq + 2.0 - r + q));
    Ok((2.0 * slicing.limit).max(u_branch.min(v_branch)))
}

// ---------------------------------------------------------------------------
// Evaluable lower-bound envelopes
// ---------------------------------------------------------------------------

/// Certified lower bound for `V(t)` along solutions of the reduced monotone
/// system: the maximum of the first bound `C_r eps t^r` (valid for all
/// `t >= 0`) and the iterated bounds `D_j (t - L_{2j})^{alpha_j}` over
/// `j <= jmax` with `t >= L_{2j}`.
pub fn envelope_v_kg(t: f64, seq: &KgLowerBoundSeq, slicing: &SlicingData) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let mut best = seq.c_r * seq.epsilon * t.powi(seq.r as i32);
    for j in 0..=seq.jmax() {
        let l2j = slicing.partial_product(2 * j);
        if t < l2j {
            break;
        }
        let ln_term = seq.ln_d[j] + seq.alpha[j] * (t - l2j).ln();
        best = best.max(ln_term.exp());
    }
    best
}

/// Massless analogue for `V(t)`: `max{C_r eps t^r, K_j (t - L_j)^{b_j}}`.
pub fn envelope_v_massless(t: f64, seq: &MasslessLowerBoundSeq, slicing: &SlicingData) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let mut best = seq.c_r * seq.epsilon * t.powi(seq.r as i32);
    for j in 0..=seq.jmax() {
        let lj = slicing.partial_product(j);
        if t < lj {
            break;
        }
        best = best.max((seq.ln_k[j] + seq.b_seq[j] * (t - lj).ln()).exp());
    }
    best
}

/// Massless envelope for `U(t)`: `max{C_2 eps [t >= 1/b], H_j (t - L_j)^{a_j}}`.
pub fn envelope_u_massless(
    t: f64,
    params: &SystemParams,
    seq: &MasslessLowerBoundSeq,
    slicing: &SlicingData,
) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let mut best = if t >= 1.0 / params.b { seq.c2 * seq.epsilon } else { 0.0 };
    for j in 0..=seq.jmax() {
        let lj = slicing.partial_product(j);
        if t < lj {
            break;
        }
        best = best.max((seq.ln_h[j] + seq.a[j] * (t - lj).ln()).exp());
    }
    best
}
