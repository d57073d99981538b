//! Model primitives: controls, worst-case rates, throughput, the two fairness
//! measures, critical throughputs, and the two-value (restricted) control family.
//!
//! Everything here is a pure function of its arguments; values are immutable
//! after construction.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on `sum(p) == 1` when testing membership in the efficient set.
pub const EFFICIENT_SUM_TOL: f64 = 1e-9;

/// Contention probabilities `p` of the `n` users, each in `[0,1)`.
///
/// Components equal to 1 are excluded; callers needing the throughput-1 corner
/// use a limit input such as `1.0 - 1e-6`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ControlVector(Vec<f64>);

impl ControlVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidControl {
                reason: "empty control".to_string(),
            });
        }
        for (i, &v) in p.iter().enumerate() {
            if !(0.0..1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidControl {
                    reason: format!("component {i} = {v} outside [0,1)"),
                });
            }
        }
        Ok(Self(p))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Membership in the efficient set: `sum(p) == 1` within tolerance.
    pub fn is_efficient(&self) -> bool {
        (self.0.iter().sum::<f64>() - 1.0).abs() <= EFFICIENT_SUM_TOL
    }

    /// Worst-case service rates under this control (all queues saturated).
    pub fn rates(&self) -> RateVector {
        rates_from_control(self)
    }
}

/// Packet service rates `x`, packets per slot, each in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidRate {
                reason: "empty rate vector".to_string(),
            });
        }
        for (i, &v) in x.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidRate {
                    reason: format!("component {i} = {v} outside [0,1]"),
                });
            }
        }
        Ok(Self(x))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Worst-case rate map: `x_i = p_i * prod_{j != i} (1 - p_j)`.
///
/// Uses prefix/suffix products of `(1 - p_j)` so no division by `1 - p_i`
/// is needed even when some component approaches 1.
pub fn rates_from_control(p: &ControlVector) -> RateVector {
    let q: Vec<f64> = p.components().iter().map(|&v| 1.0 - v).collect();
    let n = q.len();
    let mut prefix = vec![1.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * q[i];
    }
    let mut suffix = vec![1.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] * q[i];
    }
    let x = p
        .components()
        .iter()
        .enumerate()
        .map(|(i, &pi)| pi * prefix[i] * suffix[i + 1])
        .collect();
    RateVector(x)
}

/// Sum-user throughput `T(x)`.
pub fn throughput(x: &RateVector) -> f64 {
    x.components().iter().sum()
}

/// Jain's fairness index `T(x)^2 / (n * ||x||^2)`, in `[1/n, 1]`.
pub fn jain_fairness(x: &RateVector) -> Result<f64> {
    let sum: f64 = x.components().iter().sum();
    let sumsq: f64 = x.components().iter().map(|v| v * v).sum();
    if sumsq == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(sum * sum / (x.len() as f64 * sumsq))
}

/// Per-user isoelastic utility: `log x` at `alpha = 1`, `x^(1-alpha)/(1-alpha)` otherwise.
pub fn alpha_utility(x: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        x.ln()
    } else {
        x.powf(1.0 - alpha) / (1.0 - alpha)
    }
}

/// Sum-user alpha-fair objective. Returns `-inf` when any rate is zero and
/// `alpha >= 1`; that is a first-class value, not an error.
pub fn alpha_objective(x: &RateVector, alpha: f64) -> f64 {
    assert!(alpha >= 0.0, "alpha_objective requires alpha >= 0");
    x.components().iter().map(|&v| alpha_utility(v, alpha)).sum()
}

/// Critical throughputs `theta_1 = 1`, `theta_t = (1 - 1/t)^(t-1)`,
/// strictly decreasing toward `1/e`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CriticalThroughputs(Vec<f64>);

impl CriticalThroughputs {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `theta_t`, 1-based; `t` must be in `1..=n`.
    pub fn theta(&self, t: usize) -> f64 {
        self.0[t - 1]
    }

    /// `theta_n` for the `n` this vector was built for.
    pub fn theta_n(&self) -> f64 {
        *self.0.last().unwrap()
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }
}

/// Single critical throughput `theta_t` without materializing the vector.
pub fn critical_throughput(t: usize) -> f64 {
    if t == 1 {
        1.0
    } else {
        ((t as f64 - 1.0) / t as f64).powi(t as i32 - 1)
    }
}

pub fn critical_throughputs(n: usize) -> Result<CriticalThroughputs> {
    if n < 1 {
        return Err(Error::InvalidN { n, min: 1 });
    }
    Ok(CriticalThroughputs(
        (1..=n).map(critical_throughput).collect(),
    ))
}

/// Single-value rate `p (1-p)^(n-1)`: the per-user rate when all `n` users
/// contend with the same probability `p`. Unimodal with maximum at `p = 1/n`.
pub fn single_value_rate(p: f64, n: usize) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    p * (1.0 - p).powi(n as i32 - 1)
}

/// Slack allowed on `p_s <= 1/n'` and on the degenerate `p_s = 1/n'` test.
const RC_BOUNDARY_TOL: f64 = 1e-12;

/// Efficient two-value control: `k` components at the small value `p_s`,
/// `n' - k` at the large value `p_l = (1 - k p_s)/(n' - k)`, and `n - n'` zeros.
///
/// `k = n'` is allowed only as the degenerate uniform limit `p_s = 1/n'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestrictedControl {
    pub p_s: f64,
    pub k: usize,
    pub n_prime: usize,
    pub n: usize,
}

impl RestrictedControl {
    pub fn new(p_s: f64, k: usize, n_prime: usize, n: usize) -> Result<Self> {
        if n_prime < 2 || n_prime > n {
            return Err(Error::InvalidParameters {
                reason: format!("need 2 <= n' <= n, got n' = {n_prime}, n = {n}"),
            });
        }
        let uniform = 1.0 / n_prime as f64;
        if !(p_s > 0.0 && p_s <= uniform + RC_BOUNDARY_TOL) || !p_s.is_finite() {
            return Err(Error::InvalidParameters {
                reason: format!("p_s = {p_s} outside (0, 1/n'] with n' = {n_prime}"),
            });
        }
        if k == n_prime {
            if (p_s - uniform).abs() > RC_BOUNDARY_TOL {
                return Err(Error::InvalidParameters {
                    reason: format!(
                        "k = n' = {n_prime} is only the uniform limit p_s = 1/n', got p_s = {p_s}"
                    ),
                });
            }
        } else if !(1..n_prime).contains(&k) {
            return Err(Error::InvalidParameters {
                reason: format!("need k in 1..=n'-1 (or k = n' at p_s = 1/n'), got k = {k}"),
            });
        }
        Ok(Self {
            p_s,
            k,
            n_prime,
            n,
        })
    }

    /// The large value forced by efficiency: `k p_s + (n'-k) p_l = 1` exactly.
    pub fn p_l(&self) -> f64 {
        if self.k == self.n_prime {
            self.p_s
        } else {
            (1.0 - self.k as f64 * self.p_s) / (self.n_prime - self.k) as f64
        }
    }

    /// Whether this is the uniform control over the `n'` active users.
    pub fn is_degenerate(&self) -> bool {
        self.k == self.n_prime || (self.p_s - 1.0 / self.n_prime as f64).abs() <= RC_BOUNDARY_TOL
    }

    /// Rates of the small- and large-valued users.
    pub fn rates_sl(&self) -> (f64, f64) {
        let (p_s, p_l) = (self.p_s, self.p_l());
        let (k, np) = (self.k as i32, self.n_prime as i32);
        if self.k == self.n_prime {
            let r = single_value_rate(p_s, self.n_prime);
            return (r, r);
        }
        let x_s = p_s * (1.0 - p_s).powi(k - 1) * (1.0 - p_l).powi(np - k);
        let x_l = p_l * (1.0 - p_s).powi(k) * (1.0 - p_l).powi(np - k - 1);
        (x_s, x_l)
    }
}

/// Expand a restricted control into its canonical (nondecreasing) control
/// vector together with the small and large rates.
pub fn expand_restricted(rc: &RestrictedControl) -> (ControlVector, f64, f64) {
    let p_l = rc.p_l();
    let mut p = Vec::with_capacity(rc.n);
    p.resize(rc.n - rc.n_prime, 0.0);
    p.extend(std::iter::repeat(rc.p_s).take(rc.k));
    p.extend(std::iter::repeat(p_l).take(rc.n_prime - rc.k));
    let (x_s, x_l) = rc.rates_sl();
    (ControlVector(p), x_s, x_l)
}

/// Control returned by a tradeoff solver: an efficient restricted control,
/// or the sub-efficient uniform control of the equal-rate regime (all `n`
/// components equal to `p`, with `n p <= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OptimalControl {
    Restricted(RestrictedControl),
    UniformScaled { p: f64, n: usize },
}

impl OptimalControl {
    pub fn expand(&self) -> ControlVector {
        match self {
            Self::Restricted(rc) => expand_restricted(rc).0,
            Self::UniformScaled { p, n } => ControlVector(vec![*p; *n]),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Restricted(rc) => rc.n,
            Self::UniformScaled { n, .. } => *n,
        }
    }

    /// Count of active (nonzero) users.
    pub fn n_prime(&self) -> usize {
        match self {
            Self::Restricted(rc) => rc.n_prime,
            Self::UniformScaled { n, .. } => *n,
        }
    }

    /// Count of small-valued components; the whole vector for uniform controls.
    pub fn k(&self) -> usize {
        match self {
            Self::Restricted(rc) => rc.k,
            Self::UniformScaled { n, .. } => *n,
        }
    }

    pub fn p_s(&self) -> f64 {
        match self {
            Self::Restricted(rc) => rc.p_s,
            Self::UniformScaled { p, .. } => *p,
        }
    }

    pub fn p_l(&self) -> f64 {
        match self {
            Self::Restricted(rc) => rc.p_l(),
            Self::UniformScaled { p, .. } => *p,
        }
    }
}

/// Fairness measure selector: Jain's index or the alpha-fair sum utility
/// (solver support requires `alpha >= 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FairnessMeasure {
    Jain,
    Alpha(f64),
}

impl FairnessMeasure {
    pub fn alpha(alpha: f64) -> Result<Self> {
        if alpha < 1.0 || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange { alpha });
        }
        Ok(Self::Alpha(alpha))
    }

    /// Evaluate the measure on a rate vector. Jain errors on the zero vector;
    /// the alpha objective returns `-inf` there instead.
    pub fn evaluate(&self, x: &RateVector) -> Result<f64> {
        match self {
            Self::Jain => jain_fairness(x),
            Self::Alpha(a) => Ok(alpha_objective(x, *a)),
        }
    }
}

impl Serialize for FairnessMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Jain => serializer.serialize_str("jain"),
            Self::Alpha(a) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("alpha", a)?;
                m.end()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(p: &[f64]) -> ControlVector {
        ControlVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn rates_single_contender_limit() {
        let x = rates_from_control(&cv(&[0.999999, 0.0, 0.0]));
        assert!((x.components()[0] - 0.999999).abs() < 1e-12);
        assert_eq!(x.components()[1], 0.0);
        assert_eq!(x.components()[2], 0.0);
    }

    #[test]
    fn rates_uniform_two_users() {
        let x = rates_from_control(&cv(&[0.5, 0.5]));
        assert_eq!(x.components(), &[0.25, 0.25]);
        assert_eq!(throughput(&x), 0.5);
    }

    #[test]
    fn rates_uniform_three_users() {
        let x = rates_from_control(&cv(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]));
        for &v in x.components() {
            assert!((v - 4.0 / 27.0).abs() < 1e-15);
        }
        assert!((throughput(&x) - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(throughput(&RateVector::new(vec![0.0, 0.0, 0.0]).unwrap()), 0.0);
        assert_eq!(throughput(&RateVector::new(vec![0.25, 0.25]).unwrap()), 0.5);
    }

    #[test]
    fn jain_bounds() {
        // All-equal vector: F = 1 for any positive scale.
        for beta in [0.01, 0.3, 1.0] {
            let x = RateVector::new(vec![beta * 0.5; 4]).unwrap();
            assert!((jain_fairness(&x).unwrap() - 1.0).abs() < 1e-15);
        }
        // Single active user: F = 1/n.
        let x = RateVector::new(vec![0.0, 0.7, 0.0]).unwrap();
        assert!((jain_fairness(&x).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            jain_fairness(&RateVector::new(vec![0.0, 0.0]).unwrap()),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn jain_matches_two_user_closed_form_at_06() {
        // x = ((theta + sqrt(2 theta - 1))/2, (theta - ...)/2) at theta = 0.6.
        let x = RateVector::new(vec![0.5236067977499790, 0.0763932022500210]).unwrap();
        assert!((jain_fairness(&x).unwrap() - 9.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_objective_values() {
        let x = RateVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(alpha_objective(&x, 1.0), 0.0);
        let x = RateVector::new(vec![0.2, 0.2]).unwrap();
        assert!((alpha_objective(&x, 1.0) - (-2.0 * 5.0_f64.ln())).abs() < 1e-12);
        let x = RateVector::new(vec![0.5236067977499790, 0.0763932022500210]).unwrap();
        assert!((alpha_objective(&x, 2.0) - (-15.0)).abs() < 1e-9);
        // A zero rate with alpha >= 1 yields -inf, not an error.
        let x = RateVector::new(vec![0.0, 0.5]).unwrap();
        assert_eq!(alpha_objective(&x, 1.0), f64::NEG_INFINITY);
        assert_eq!(alpha_objective(&x, 2.0), f64::NEG_INFINITY);
    }

    #[test]
    fn critical_throughputs_table() {
        assert_eq!(critical_throughputs(1).unwrap().values(), &[1.0]);
        let th = critical_throughputs(4).unwrap();
        assert_eq!(th.values(), &[1.0, 0.5, 4.0 / 9.0, 27.0 / 64.0]);
        let th = critical_throughputs(100).unwrap();
        assert!((th.theta(100) - 0.3697296376497268).abs() < 1e-12);
        for t in 1..100 {
            assert!(th.theta(t) > th.theta(t + 1));
        }
        assert!(th.theta(100) > (-1.0_f64).exp());
        assert_eq!(critical_throughputs(0), Err(Error::InvalidN { n: 0, min: 1 }));
    }

    #[test]
    fn single_value_rate_examples() {
        assert_eq!(single_value_rate(0.0, 5), 0.0);
        assert!((single_value_rate(0.2, 3) - 0.128).abs() < 1e-15);
        // Maximum at p = 1/n equals theta_n / n.
        for n in 2..=8 {
            let peak = single_value_rate(1.0 / n as f64, n);
            assert!((peak - critical_throughput(n) / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn expand_degenerate_uniform() {
        let rc = RestrictedControl::new(0.25, 2, 4, 4).unwrap();
        assert_eq!(rc.p_l(), 0.25);
        let (p, x_s, x_l) = expand_restricted(&rc);
        assert_eq!(p.components(), &[0.25; 4]);
        assert!((x_s - 27.0 / 256.0).abs() < 1e-15);
        assert_eq!(x_s, x_l);
        // k = n' is accepted only at the uniform point.
        assert!(RestrictedControl::new(0.25, 4, 4, 4).is_ok());
        assert!(RestrictedControl::new(0.2, 4, 4, 4).is_err());
    }

    #[test]
    fn expand_two_user_optimum() {
        let rc = RestrictedControl::new(0.276393, 1, 2, 2).unwrap();
        assert!((rc.p_l() - 0.723607).abs() < 1e-12);
        let (_, x_s, x_l) = expand_restricted(&rc);
        assert!((x_s - 0.076393).abs() < 1e-6);
        assert!((x_l - 0.523607).abs() < 1e-6);
    }

    #[test]
    fn expand_with_inactive_users() {
        let rc = RestrictedControl::new(0.1, 3, 4, 6).unwrap();
        assert!((rc.p_l() - 0.7).abs() < 1e-15);
        let (p, x_s, x_l) = expand_restricted(&rc);
        assert_eq!(p.components(), &[0.0, 0.0, 0.1, 0.1, 0.1, 0.7]);
        // Rates must agree with the full rate map on the expanded control.
        let x = p.rates();
        assert!((x.components()[2] - x_s).abs() < 1e-15);
        assert!((x.components()[5] - x_l).abs() < 1e-15);
        assert!(x_s < x_l);
        assert!(p.is_efficient());
    }

    #[test]
    fn restricted_control_rejects_bad_parameters() {
        assert!(RestrictedControl::new(0.6, 1, 2, 2).is_err()); // p_s > 1/n'
        assert!(RestrictedControl::new(0.0, 1, 2, 2).is_err());
        assert!(RestrictedControl::new(0.1, 0, 3, 3).is_err());
        assert!(RestrictedControl::new(0.1, 1, 1, 3).is_err()); // n' < 2
        assert!(RestrictedControl::new(0.1, 1, 4, 3).is_err()); // n' > n
    }

    #[test]
    fn control_vector_domain() {
        assert!(ControlVector::new(vec![]).is_err());
        assert!(ControlVector::new(vec![1.0]).is_err());
        assert!(ControlVector::new(vec![-0.1]).is_err());
        assert!(ControlVector::new(vec![0.0, 0.5]).is_ok());
        assert!(cv(&[0.5, 0.5]).is_efficient());
        assert!(!cv(&[0.4, 0.4]).is_efficient());
    }
}
