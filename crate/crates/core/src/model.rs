//! Model parameters, case taxonomy, characteristic roots, theoretical
//! lifespan exponents and the scalar formulas of the linear theory.
//!
//! Everything here is a pure function of the coefficients `(b, m^2, p, q)`
//! and the data index `r` (`r = 1` iff the first-order `v` datum is
//! nontrivial). The heavy machinery — sequences, thresholds, solvers —
//! lives in the sibling modules and consumes these values.

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::rational::{self, approx_rational, ratio, to_f64};
use crate::{Error, Result};

/// Relative tolerance deciding when `b^2 - 4 m^2` counts as a double root.
///
/// The two closed forms on either side of the branch point are distinct
/// formulas; naive evaluation near `b^2 = 4 m^2` is catastrophically
/// cancellative, so the branch is widened to this tolerance.
pub const BRANCH_TOL: f64 = 1e-12;

/// Coefficients of the coupled system plus the data amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Damping coefficient of the `u`-equation (1/time).
    pub b: f64,
    /// Squared mass of the `u`-equation (1/time^2).
    pub m2: f64,
    /// Exponent of the source `|v|^p`.
    pub p: f64,
    /// Exponent of the source `|u|^q`.
    pub q: f64,
    /// Cauchy data amplitude.
    pub epsilon: f64,
}

impl SystemParams {
    /// Validate `b > 0`, `m2 >= 0`, `b^2 >= 4 m2`, `p, q > 1`, `epsilon > 0`.
    pub fn new(b: f64, m2: f64, p: f64, q: f64, epsilon: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!("b must be positive, got {b}")));
        }
        if !(m2 >= 0.0) || !m2.is_finite() {
            return Err(Error::InvalidParams(format!(
                "m2 must be non-negative, got {m2}"
            )));
        }
        if b * b < 4.0 * m2 * (1.0 - BRANCH_TOL) {
            return Err(Error::InvalidParams(format!(
                "dominant damping requires b^2 >= 4 m^2 (b^2 = {}, 4 m^2 = {}); \
                 the oscillatory regime is out of scope",
                b * b,
                4.0 * m2
            )));
        }
        if !(p > 1.0) || !(q > 1.0) {
            return Err(Error::InvalidParams(format!(
                "exponents must satisfy p, q > 1, got p = {p}, q = {q}"
            )));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self { b, m2, p, q, epsilon })
    }

    /// Product `p * q`.
    pub fn pq(&self) -> f64 {
        self.p * self.q
    }

    /// Mass case implied by `m2`.
    pub fn mass_case(&self) -> MassCase {
        if self.m2 > 0.0 {
            MassCase::DampedKleinGordon
        } else {
            MassCase::Massless
        }
    }

    /// Exact rationals for `(p, q)` when both admit small representations.
    pub fn exact_pq(&self) -> Option<(BigRational, BigRational)> {
        Some((approx_rational(self.p)?, approx_rational(self.q)?))
    }
}

/// Which linear `u`-equation we are in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MassCase {
    /// `m^2 > 0` with dominant damping `b^2 >= 4 m^2`.
    DampedKleinGordon,
    /// `m^2 = 0`, classical damped equation.
    Massless,
}

/// Case taxonomy: mass case plus the data index `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTag {
    pub mass_case: MassCase,
    /// `r = 1` iff the `v_1` datum is nontrivial, else `r = 0`.
    pub r: u8,
}

impl CaseTag {
    pub fn new(mass_case: MassCase, r: u8) -> Result<Self> {
        if r > 1 {
            return Err(Error::InvalidParams(format!("data index r must be 0 or 1, got {r}")));
        }
        Ok(Self { mass_case, r })
    }

    /// Construct from params, checking consistency of the mass case.
    pub fn for_params(params: &SystemParams, r: u8) -> Result<Self> {
        Self::new(params.mass_case(), r)
    }
}

/// Roots of `k^2 - b k + m^2 = 0`, ordered `k1 >= k2 >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharRoots {
    pub k1: f64,
    pub k2: f64,
    pub double_root: bool,
}

impl CharRoots {
    /// Product `k1 * k2` (equals `m^2`).
    pub fn product(&self) -> f64 {
        self.k1 * self.k2
    }
}

/// Characteristic roots `k_{1/2} = (b +- sqrt(b^2 - 4 m^2)) / 2`.
///
/// The larger root comes from the `+` formula; the smaller one is recovered
/// as `m^2 / k1` when `m^2 > 0`, which avoids the cancellation in the `-`
/// branch.
pub fn char_roots(params: &SystemParams) -> Result<CharRoots> {
    let (b, m2) = (params.b, params.m2);
    let disc = b * b - 4.0 * m2;
    if disc < -BRANCH_TOL * b.powi(2).max(1.0) {
        return Err(Error::InvalidParams(format!(
            "b^2 - 4 m^2 = {disc} < 0 violates the dominant damping assumption"
        )));
    }
    let double_root = disc.abs() <= BRANCH_TOL * b.powi(2).max(1.0);
    if double_root {
        let k = b / 2.0;
        return Ok(CharRoots { k1: k, k2: k, double_root: true });
    }
    let k1 = 0.5 * (b + disc.sqrt());
    let k2 = if m2 > 0.0 { m2 / k1 } else { 0.0 };
    Ok(CharRoots { k1, k2, double_root: false })
}

/// Whether an exponent bounds the lifespan from above or below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Upper,
    Lower,
}

/// A constraint attached to a lifespan exponent, e.g. `p < 2 - 1/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Applicability {
    /// Human-readable constraint.
    pub constraint: String,
    /// Whether the constraint holds for the queried `(p, q)`.
    pub satisfied: bool,
}

/// A lifespan scaling exponent `gamma`, meaning `T(eps) ~ eps^(-gamma)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifespanExponent {
    pub value: f64,
    /// Exact value when `p, q` are small rationals.
    #[serde(skip)]
    pub exact: Option<BigRational>,
    pub bound_kind: BoundKind,
    pub applicability: Option<Applicability>,
}

impl LifespanExponent {
    fn from_exact(exact: Option<BigRational>, value: f64, kind: BoundKind) -> Self {
        let value = exact.as_ref().map(to_f64).unwrap_or(value);
        Self { value, exact, bound_kind: kind, applicability: None }
    }
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0) || !(q > 1.0) {
        return Err(Error::InvalidParams(format!(
            "lifespan exponents require p, q > 1, got p = {p}, q = {q}"
        )));
    }
    Ok(())
}

/// Upper-bound lifespan exponent (blow-up side).
///
/// Damped Klein-Gordon: `(pq-1)/(pq+1)` for `r = 1`, `(pq-1)/2` for `r = 0`.
/// Massless: `(pq-1)/max{2p+1, r pq + 2 - r + q}`, which unfolds to
/// `max{2p+1, pq+q+1}` for `r = 1` and `max{2p+1, q+2}` for `r = 0`.
pub fn upper_lifespan_exponent(case: CaseTag, p: f64, q: f64) -> Result<LifespanExponent> {
    check_pq(p, q)?;
    let r = case.r as f64;
    let exact = exact_upper(case, p, q);
    let pq = p * q;
    let value = match case.mass_case {
        MassCase::DampedKleinGordon => {
            if case.r == 1 {
                (pq - 1.0) / (pq + 1.0)
            } else {
                (pq - 1.0) / 2.0
            }
        }
        MassCase::Massless => {
            let denom = (2.0 * p + 1.0).max(r * pq + 2.0 - r + q);
            (pq - 1.0) / denom
        }
    };
    Ok(LifespanExponent::from_exact(exact, value, BoundKind::Upper))
}

fn exact_upper(case: CaseTag, p: f64, q: f64) -> Option<BigRational> {
    let (p, q) = (approx_rational(p)?, approx_rational(q)?);
    let one = BigRational::one();
    let pq = p.clone() * q.clone();
    let r = ratio(case.r as i64, 1);
    Some(match case.mass_case {
        MassCase::DampedKleinGordon => {
            if case.r == 1 {
                (pq.clone() - one.clone()) / (pq + one)
            } else {
                (pq - one) / ratio(2, 1)
            }
        }
        MassCase::Massless => {
            let a = ratio(2, 1) * p + one.clone();
            let b = r.clone() * pq.clone() + ratio(2, 1) - r + q;
            (pq - one) / rational::max(a, b)
        }
    })
}

/// Lower-bound lifespan exponent (local existence side).
///
/// Damped Klein-Gordon: `(pq-1)/(pq+1)` for `r = 1`; for `r = 0` the value
/// `(pq-1)/2` applies only under `p < 2 - 1/q` and the call fails with
/// [`Error::NotApplicable`] otherwise. Massless: `min{(p-1)/(p+1), q-1}`
/// for `r = 1`, `min{p-1, (q-1)/2}` for `r = 0`.
pub fn lower_lifespan_exponent(case: CaseTag, p: f64, q: f64) -> Result<LifespanExponent> {
    check_pq(p, q)?;
    let pq = p * q;
    let (value, applicability) = match (case.mass_case, case.r) {
        (MassCase::DampedKleinGordon, 1) => ((pq - 1.0) / (pq + 1.0), None),
        (MassCase::DampedKleinGordon, _) => {
            let bound = 2.0 - 1.0 / q;
            if p >= bound {
                return Err(Error::NotApplicable(format!(
                    "the lower bound for the damped Klein-Gordon case with trivial v_1 \
                     requires p < 2 - 1/q = {bound}, got p = {p}"
                )));
            }
            (
                (pq - 1.0) / 2.0,
                Some(Applicability {
                    constraint: format!("p < 2 - 1/q = {bound}"),
                    satisfied: true,
                }),
            )
        }
        (MassCase::Massless, 1) => (((p - 1.0) / (p + 1.0)).min(q - 1.0), None),
        (MassCase::Massless, _) => ((p - 1.0).min((q - 1.0) / 2.0), None),
    };
    let mut exp =
        LifespanExponent::from_exact(exact_lower(case, p, q), value, BoundKind::Lower);
    exp.applicability = applicability;
    Ok(exp)
}

fn exact_lower(case: CaseTag, p: f64, q: f64) -> Option<BigRational> {
    let (p, q) = (approx_rational(p)?, approx_rational(q)?);
    let one = BigRational::one();
    let pq = p.clone() * q.clone();
    Some(match (case.mass_case, case.r) {
        (MassCase::DampedKleinGordon, 1) => (pq.clone() - one.clone()) / (pq + one),
        (MassCase::DampedKleinGordon, _) => (pq - one) / ratio(2, 1),
        (MassCase::Massless, 1) => rational::min(
            (p.clone() - one.clone()) / (p + one.clone()),
            q - one,
        ),
        (MassCase::Massless, _) => {
            rational::min(p - one.clone(), (q - one) / ratio(2, 1))
        }
    })
}

/// The loss-of-decay parameter and its sign check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossParameter {
    pub lambda0: f64,
    #[serde(skip)]
    pub exact: Option<BigRational>,
    /// `1 - lambda0 * q`; positivity is what closes the contraction.
    pub one_minus_lambda0_q: f64,
    pub positive: bool,
}

/// Loss-of-decay weight `lambda0` of the solution-space norm:
/// `(2p - pq - 1)/(pq - 1)` if `r = 1`, `(2p - 2)/(pq - 1)` if `r = 0`.
pub fn loss_parameter(p: f64, q: f64, r: u8) -> Result<LossParameter> {
    check_pq(p, q)?;
    if r > 1 {
        return Err(Error::InvalidParams(format!("data index r must be 0 or 1, got {r}")));
    }
    let pq = p * q;
    let lambda0 = if r == 1 {
        (2.0 * p - pq - 1.0) / (pq - 1.0)
    } else {
        (2.0 * p - 2.0) / (pq - 1.0)
    };
    let exact = approx_rational(p).zip(approx_rational(q)).map(|(p, q)| {
        let one = BigRational::one();
        let two = ratio(2, 1);
        let pq = p.clone() * q;
        if r == 1 {
            (two * p - pq.clone() - one.clone()) / (pq - one)
        } else {
            (two * p - ratio(2, 1)) / (pq - one)
        }
    });
    let lambda0 = exact.as_ref().map(to_f64).unwrap_or(lambda0);
    let one_minus_lambda0_q = 1.0 - lambda0 * q;
    Ok(LossParameter { lambda0, exact, one_minus_lambda0_q, positive: one_minus_lambda0_q > 0.0 })
}

/// Linear decay factor `d_{b,m^2}(t)` of the damped Klein-Gordon equation:
/// `exp(-(b - sqrt(b^2 - 4 m^2)) t / 2)` for `b^2 > 4 m^2`, and
/// `(1 + t) exp(-b t / 2)` at the double root.
pub fn decay_factor(b: f64, m2: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParams(format!("decay factor requires t >= 0, got {t}")));
    }
    if !(b > 0.0) || !(m2 > 0.0) {
        return Err(Error::InvalidParams(
            "decay factor is the damped Klein-Gordon branch; it requires b > 0 and m^2 > 0"
                .into(),
        ));
    }
    let disc = b * b - 4.0 * m2;
    if disc < -BRANCH_TOL * b.powi(2).max(1.0) {
        return Err(Error::InvalidParams(format!(
            "b^2 - 4 m^2 = {disc} < 0 is outside the dominant damping regime"
        )));
    }
    if disc.abs() <= BRANCH_TOL * b.powi(2).max(1.0) {
        Ok((1.0 + t) * (-b * t / 2.0).exp())
    } else {
        // b - sqrt(b^2 - 4 m^2) = 2 k2; evaluate via the stable small root.
        let k1 = 0.5 * (b + disc.sqrt());
        let k2 = m2 / k1;
        Ok((-k2 * t).exp())
    }
}

/// Massless decay rate `(1 + t)^(-(2j + k)/2)` for `(j, k)` in the index set
/// `Lambda = {(j, k): 0 <= j + k <= 1}`.
pub fn massless_decay_rate(j: u32, k: u32, t: f64) -> Result<f64> {
    if j + k > 1 {
        return Err(Error::InvalidParams(format!(
            "(j, k) = ({j}, {k}) is outside the index set 0 <= j + k <= 1"
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidParams(format!("decay rate requires t >= 0, got {t}")));
    }
    Ok((1.0 + t).powf(-((2 * j + k) as f64) / 2.0))
}

/// Data weight `a(t)` of the free wave estimate: `1 + t` if `r = 1`, else 1.
pub fn data_weight(t: f64, r: u8) -> f64 {
    if r == 1 {
        1.0 + t
    } else {
        1.0
    }
}

/// Gagliardo-Nirenberg interpolation exponent `theta(n, gamma) = n (1/2 - 1/gamma)`
/// on the admissible range `2 <= gamma <= 2n/(n-2)`, `n >= 3`.
pub fn gn_theta(n: u32, gamma: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "the interpolation inequality requires topological dimension n >= 3, got {n}"
        )));
    }
    let upper = 2.0 * n as f64 / (n as f64 - 2.0);
    if !(2.0..=upper).contains(&gamma) {
        return Err(Error::InvalidParams(format!(
            "gamma = {gamma} outside the admissible range [2, {upper}] for n = {n}"
        )));
    }
    Ok(n as f64 * (0.5 - 1.0 / gamma))
}

/// Admissible `gamma` range `[2, 2n/(n-2)]` for `gn_theta`.
pub fn gn_gamma_range(n: u32) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("gamma range requires n >= 3, got {n}")));
    }
    Ok((2.0, 2.0 * n as f64 / (n as f64 - 2.0)))
}

/// Euclidean blow-up-range inequality for the coupled problem in `R^n`:
/// `max{2 + 1/p, q/2 + 1} / (pq - 1) > (n - 1)/2`.
///
/// With `n` replaced by 0 (the compact-group heuristic) the right-hand side
/// is `-1/2` and the inequality holds for every `p, q > 1`.
pub fn nakao_rn_blowup(n: u32, p: f64, q: f64) -> Result<bool> {
    check_pq(p, q)?;
    let lhs = (2.0 + 1.0 / p).max(q / 2.0 + 1.0) / (p * q - 1.0);
    let rhs = (n as f64 - 1.0) / 2.0;
    Ok(lhs > rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn kg(r: u8) -> CaseTag {
        CaseTag::new(MassCase::DampedKleinGordon, r).unwrap()
    }

    fn massless(r: u8) -> CaseTag {
        CaseTag::new(MassCase::Massless, r).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(2.0, 0.75, 2.0, 2.0, 1e-3).is_ok());
        assert!(SystemParams::new(2.0, 2.0, 2.0, 2.0, 1e-3).is_err()); // b^2 < 4 m^2
        assert!(SystemParams::new(0.0, 0.0, 2.0, 2.0, 1e-3).is_err());
        assert!(SystemParams::new(1.0, 0.0, 1.0, 2.0, 1e-3).is_err());
        assert!(SystemParams::new(1.0, 0.0, 2.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn roots_double() {
        let p = SystemParams::new(2.0, 1.0, 2.0, 2.0, 1.0).unwrap();
        let roots = char_roots(&p).unwrap();
        assert!(roots.double_root);
        assert_eq!(roots.k1, 1.0);
        assert_eq!(roots.k2, 1.0);
    }

    #[test]
    fn roots_distinct() {
        // Oracle: substitute into k^2 - 3k + 2 = 0.
        let p = SystemParams::new(3.0, 2.0, 2.0, 2.0, 1.0).unwrap();
        let r = char_roots(&p).unwrap();
        assert!(!r.double_root);
        assert!((r.k1 * r.k1 - 3.0 * r.k1 + 2.0).abs() < 1e-12);
        assert!((r.k2 * r.k2 - 3.0 * r.k2 + 2.0).abs() < 1e-12);
        assert_relative_eq!(r.k1, 2.0, max_relative = 1e-14);
        assert_relative_eq!(r.k2, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn roots_massless() {
        let p = SystemParams::new(1.0, 0.0, 2.0, 2.0, 1.0).unwrap();
        let r = char_roots(&p).unwrap();
        assert_eq!((r.k1, r.k2), (1.0, 0.0));
    }

    #[test]
    fn upper_exponents_reference_values() {
        let e = upper_lifespan_exponent(kg(1), 2.0, 2.0).unwrap();
        assert_eq!(e.exact.as_ref().unwrap(), &ratio(3, 5));
        let e = upper_lifespan_exponent(kg(0), 2.0, 2.0).unwrap();
        assert_eq!(e.exact.as_ref().unwrap(), &ratio(3, 2));
        let e = upper_lifespan_exponent(massless(1), 2.0, 2.0).unwrap();
        assert_eq!(e.exact.as_ref().unwrap(), &ratio(3, 7));
        let e = upper_lifespan_exponent(massless(0), 2.0, 2.0).unwrap();
        assert_eq!(e.exact.as_ref().unwrap(), &ratio(3, 5));
    }

    #[test]
    fn lower_exponents_reference_values() {
        let e = lower_lifespan_exponent(kg(1), 2.0, 2.0).unwrap();
        assert_eq!(e.exact.as_ref().unwrap(), &ratio(3, 5));
        let e = lower_lifespan_exponent(kg(0), 1.3, 2.0).unwrap();
        assert_relative_eq!(e.value, 0.8, max_relative = 1e-14);
        assert!(e.applicability.as_ref().unwrap().satisfied);
        let e = lower_lifespan_exponent(massless(1), 2.0, 2.0).unwrap();
        assert_eq!(e.exact.as_ref().unwrap(), &ratio(1, 3));
        let e = lower_lifespan_exponent(massless(0), 2.0, 2.0).unwrap();
        assert_eq!(e.exact.as_ref().unwrap(), &ratio(1, 2));
    }

    #[test]
    fn lower_exponent_not_applicable() {
        let err = lower_lifespan_exponent(kg(0), 1.8, 2.0).unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
    }

    #[test]
    fn loss_parameter_reference_values() {
        let l = loss_parameter(2.0, 2.0, 1).unwrap();
        assert_eq!(l.exact.as_ref().unwrap(), &ratio(-1, 3));
        assert!(l.positive); // 1 - lambda0 q = 1 + 4/3 > 0
        let l = loss_parameter(2.0, 2.0, 0).unwrap();
        assert_eq!(l.exact.as_ref().unwrap(), &ratio(2, 3));
        let l = loss_parameter(1.5, 2.0, 1).unwrap();
        assert_eq!(l.exact.as_ref().unwrap(), &ratio(-1, 2));
    }

    #[test]
    fn loss_parameter_sign_check_tracks_thm_condition() {
        // r = 0: 1 - lambda0 q > 0 iff p < 2 - 1/q.
        let l = loss_parameter(1.3, 2.0, 0).unwrap();
        assert!(l.positive);
        let l = loss_parameter(1.6, 2.0, 0).unwrap();
        assert!(!l.positive);
    }

    #[test]
    fn decay_factor_reference_values() {
        assert_eq!(decay_factor(2.0, 1.0, 0.0).unwrap(), 1.0);
        // Distinct roots: k2 = 1, cross-checked against the solution of
        // w'' + 3w' + 2w = 0 with the slow mode normalized out.
        assert_relative_eq!(decay_factor(3.0, 2.0, 1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-14);
        // Double root branch (1 + t) e^{-t}.
        assert_relative_eq!(decay_factor(2.0, 1.0, 1.0).unwrap(), 2.0 * (-1.0f64).exp(), max_relative = 1e-14);
        assert!(decay_factor(2.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn massless_rate_and_weight() {
        assert_eq!(massless_decay_rate(0, 0, 7.0).unwrap(), 1.0);
        assert_relative_eq!(massless_decay_rate(1, 0, 1.0).unwrap(), 0.5);
        assert_relative_eq!(
            massless_decay_rate(0, 1, 3.0).unwrap(),
            0.5,
            max_relative = 1e-14
        );
        assert!(massless_decay_rate(1, 1, 1.0).is_err());
        assert_eq!(data_weight(0.0, 1), 1.0);
        assert_eq!(data_weight(3.0, 1), 4.0);
        assert_eq!(data_weight(3.0, 0), 1.0);
    }

    #[test]
    fn gn_theta_reference_values() {
        assert_eq!(gn_theta(3, 2.0).unwrap(), 0.0);
        assert_relative_eq!(gn_theta(3, 4.0).unwrap(), 0.75);
        assert_relative_eq!(gn_theta(3, 6.0).unwrap(), 1.0);
        assert!(gn_theta(3, 6.5).is_err());
        assert!(gn_theta(3, 1.5).is_err());
        assert!(gn_theta(2, 3.0).is_err());
    }

    #[test]
    fn nakao_rn_reference_values() {
        assert!(nakao_rn_blowup(1, 2.0, 2.0).unwrap()); // 5/6 > 0
        assert!(!nakao_rn_blowup(3, 2.0, 2.0).unwrap()); // 5/6 > 1 fails
        // Global dimension 0 of a compact group: holds for all p, q > 1.
        assert!(nakao_rn_blowup(0, 2.0, 2.0).unwrap());
        assert!(nakao_rn_blowup(0, 50.0, 50.0).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        // k1 + k2 = b and k1 k2 = m^2 to 1e-12 relative over valid (b, m^2).
        #[test]
        fn root_identities(b in 1e-3f64..1e3, frac in 0.0f64..1.0) {
            let m2 = frac * b * b / 4.0;
            let p = SystemParams::new(b, m2, 2.0, 2.0, 1.0).unwrap();
            let r = char_roots(&p).unwrap();
            prop_assert!((r.k1 + r.k2 - b).abs() <= 1e-12 * b.abs().max(1.0));
            prop_assert!((r.k1 * r.k2 - m2).abs() <= 1e-12 * m2.abs().max(1.0));
            prop_assert!(r.k1 >= r.k2);
            prop_assert!(r.k2 >= 0.0);
            prop_assert_eq!(r.k2 > 0.0, m2 > 0.0);
        }
    }

    proptest! {
        // KG sharpness for r = 1: upper and lower coincide exactly.
        #[test]
        fn kg_sharpness_exact(pn in 11i64..50, qn in 11i64..50) {
            let p = pn as f64 / 10.0;
            let q = qn as f64 / 10.0;
            let up = upper_lifespan_exponent(kg(1), p, q).unwrap();
            let lo = lower_lifespan_exponent(kg(1), p, q).unwrap();
            prop_assert_eq!(up.exact.unwrap(), lo.exact.unwrap());
        }

        // Massless ordering: lower <= upper for both r.
        #[test]
        fn massless_ordering(pn in 11i64..60, qn in 11i64..60, r in 0u8..2) {
            let p = pn as f64 / 10.0;
            let q = qn as f64 / 10.0;
            let up = upper_lifespan_exponent(massless(r), p, q).unwrap();
            let lo = lower_lifespan_exponent(massless(r), p, q).unwrap();
            prop_assert!(lo.exact.unwrap() <= up.exact.unwrap());
        }

        // d(0) = 1 always; non-increasing in t (past the hump for the
        // double-root branch, i.e. t >= 2/b).
        #[test]
        fn decay_factor_monotone(b in 0.1f64..10.0, frac in 0.01f64..1.0, t in 0.0f64..30.0) {
            let m2 = frac * b * b / 4.0;
            prop_assert_eq!(decay_factor(b, m2, 0.0).unwrap(), 1.0);
            let t0 = t.max(2.0 / b);
            let d0 = decay_factor(b, m2, t0).unwrap();
            let d1 = decay_factor(b, m2, t0 + 0.5).unwrap();
            prop_assert!(d1 <= d0 * (1.0 + 1e-12));
        }

        // theta in [0, 1] over the admissible range; endpoints pinned.
        #[test]
        fn gn_theta_range(n in 3u32..7, s in 0.0f64..1.0) {
            let (lo, hi) = gn_gamma_range(n).unwrap();
            let gamma = lo + s * (hi - lo);
            let theta = gn_theta(n, gamma).unwrap();
            prop_assert!((0.0..=1.0 + 1e-15).contains(&theta));
            prop_assert_eq!(gn_theta(n, lo).unwrap(), 0.0);
            prop_assert!((gn_theta(n, hi).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
