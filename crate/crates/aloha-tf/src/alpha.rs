//! Alpha-fair (alpha >= 1) throughput-fairness tradeoff: per-theta optimal
//! points under equality and inequality throughput constraints, curve sweeps,
//! and the convex/concave inflection threshold of the tradeoff curve.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{try_map, ExecMode};
use crate::grid::GridSpec;
use crate::jain::equal_rate_control;
use crate::model::{alpha_utility, critical_throughput, OptimalControl, RestrictedControl};
use crate::solver::{restricted_throughput, solve_ps};

/// Points with `p_s* < PS_UNDERFLOW` (theta pushed against 1) are reported
/// with `F_star = -inf` and flagged.
pub const PS_UNDERFLOW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlphaRegime {
    /// `theta <= theta_n`: equal rates (equality) or the uniform control
    /// pinned at `theta_n` (inequality).
    EqualRate,
    /// `theta > theta_n`: all `n` users active, `n-1` small and one large.
    TwoValue,
}

impl fmt::Display for AlphaRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaRegime::EqualRate => "EqualRate",
            AlphaRegime::TwoValue => "TwoValue",
        })
    }
}

/// One point of the alpha-fair tradeoff. `f_star` is extended-real:
/// `-inf` is a legitimate value.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaTradeoffPoint {
    pub theta: f64,
    pub alpha: f64,
    pub f_star: f64,
    pub regime: AlphaRegime,
    pub control: OptimalControl,
    pub x_s: f64,
    pub x_l: f64,
    /// Set when `p_s*` underflowed toward zero and `f_star` was pinned to `-inf`.
    pub flagged: bool,
}

impl AlphaTradeoffPoint {
    pub fn n(&self) -> usize {
        self.control.n()
    }
}

fn check_domain(theta: f64, alpha: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    if !(0.0 < theta && theta < 1.0) {
        return Err(Error::ThetaOutOfRange { theta });
    }
    Ok(())
}

/// Sum utility when all `n` users receive rate `theta/n`:
/// `-n log(n/theta)` at `alpha = 1`, `-(n/(alpha-1)) (n/theta)^(alpha-1)` above.
fn equal_rate_objective(theta: f64, alpha: f64, n: usize) -> f64 {
    let nf = n as f64;
    if alpha == 1.0 {
        -nf * (nf / theta).ln()
    } else {
        -nf / (alpha - 1.0) * (nf / theta).powf(alpha - 1.0)
    }
}

/// Maximum alpha-fair objective at throughput exactly `theta`.
///
/// Below `theta_n` the equal-rate vector is optimal; above it the optimal
/// control always activates all `n` users with `k = n-1` small components.
pub fn alpha_optimal_point(theta: f64, alpha: f64, n: usize) -> Result<AlphaTradeoffPoint> {
    check_domain(theta, alpha, n)?;
    let theta_n = critical_throughput(n);
    if theta <= theta_n {
        let p = equal_rate_control(theta, n);
        return Ok(AlphaTradeoffPoint {
            theta,
            alpha,
            f_star: equal_rate_objective(theta, alpha, n),
            regime: AlphaRegime::EqualRate,
            control: OptimalControl::UniformScaled { p, n },
            x_s: theta / n as f64,
            x_l: theta / n as f64,
            flagged: false,
        });
    }
    let p_s = solve_ps(theta, n - 1, n)?.expect("theta inside the (n-1, n) achievable range");
    let rc = RestrictedControl::new(p_s, n - 1, n, n)?;
    let (x_s, x_l) = rc.rates_sl();
    let flagged = p_s < PS_UNDERFLOW;
    let f_star = if flagged {
        f64::NEG_INFINITY
    } else {
        (n - 1) as f64 * alpha_utility(x_s, alpha) + alpha_utility(x_l, alpha)
    };
    Ok(AlphaTradeoffPoint {
        theta,
        alpha,
        f_star,
        regime: AlphaRegime::TwoValue,
        control: OptimalControl::Restricted(rc),
        x_s,
        x_l,
        flagged,
    })
}

/// Same problem with `T(x) >= theta`: identical above `theta_n`; below it
/// the optimum is the uniform control with realized throughput `theta_n`,
/// so the objective there is a constant independent of `theta`.
pub fn alpha_optimal_point_inequality(
    theta: f64,
    alpha: f64,
    n: usize,
) -> Result<AlphaTradeoffPoint> {
    check_domain(theta, alpha, n)?;
    let theta_n = critical_throughput(n);
    if theta > theta_n {
        return alpha_optimal_point(theta, alpha, n);
    }
    Ok(AlphaTradeoffPoint {
        theta,
        alpha,
        f_star: equal_rate_objective(theta_n, alpha, n),
        regime: AlphaRegime::EqualRate,
        control: OptimalControl::UniformScaled {
            p: 1.0 / n as f64,
            n,
        },
        x_s: theta_n / n as f64,
        x_l: theta_n / n as f64,
        flagged: false,
    })
}

/// Inflection of the alpha-fair curve: the control value and throughput at
/// which the curve switches from convex (small theta) to concave (large theta).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InflectionResult {
    pub alpha: f64,
    pub n: usize,
    pub p_ring_s: f64,
    pub theta_ring: f64,
    pub p_s_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum InflectionOutcome {
    Threshold(InflectionResult),
    AlwaysConcave { alpha: f64, n: usize, result: AlwaysConcaveTag },
}

/// Marker serializing as the string `"always-concave"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlwaysConcaveTag;

impl Serialize for AlwaysConcaveTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str("always-concave")
    }
}

impl InflectionOutcome {
    pub fn always_concave(alpha: f64, n: usize) -> Self {
        Self::AlwaysConcave {
            alpha,
            n,
            result: AlwaysConcaveTag,
        }
    }
}

/// Smaller root `p_s-` of the downward quadratic `1 - p - alpha(np-2)(np-1)`;
/// the bracketing function below diverges to `-inf` there.
fn p_s_minus(alpha: f64, n: usize) -> f64 {
    let (a, nf) = (alpha, n as f64);
    (3.0 * a * nf - 1.0 - (a * nf * (a * nf + 4.0 * nf - 6.0) + 1.0).sqrt()) / (2.0 * a * nf * nf)
}

/// Log form of the curvature-sign condition: tends to `-inf` at `p_s-`,
/// crosses zero once at the inflection control, and returns to zero at the
/// `1/n` endpoint.
fn curvature_sign_fn(p: f64, alpha: f64, n: usize) -> f64 {
    let nf = n as f64;
    let z = alpha * (nf * p - 2.0) * (nf * p - 1.0);
    let num = 1.0 - p - z;
    let den = (1.0 - p) * (z / (1.0 - (nf - 1.0) * p) + 1.0);
    let ratio = (nf - 1.0) * p * p / ((1.0 - p) * (1.0 - (nf - 1.0) * p));
    (num / den).ln() / alpha - ratio.ln()
}

/// Inflection threshold of the alpha-fair tradeoff curve.
///
/// `n = 2` curves are concave throughout. For `n > 2` and `alpha = 1` the
/// threshold control has the closed form `(3 - sqrt((5n-9)/(n-1)))/(2n)`;
/// for `alpha > 1` it is the unique interior sign change of the curvature
/// condition on `(p_s-, 1/n)`, located by a 64-interval scan (the function
/// also vanishes at the `1/n` endpoint) and then bisection.
pub fn inflection_threshold(alpha: f64, n: usize) -> Result<InflectionOutcome> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    if n == 2 {
        return Ok(InflectionOutcome::always_concave(alpha, n));
    }
    let psm = p_s_minus(alpha, n);
    let p_ring = if alpha == 1.0 {
        let nf = n as f64;
        (3.0 - ((5.0 * nf - 9.0) / (nf - 1.0)).sqrt()) / (2.0 * nf)
    } else {
        let (a, b) = (psm + 1e-12, 1.0 / n as f64 - 1e-12);
        let f = |p: f64| curvature_sign_fn(p, alpha, n);
        let mut bracket = None;
        let mut prev = (a, f(a));
        for i in 1..=64 {
            let x = a + (b - a) * i as f64 / 64.0;
            let fx = f(x);
            if prev.1 < 0.0 && fx >= 0.0 {
                bracket = Some((prev.0, x));
                break;
            }
            prev = (x, fx);
        }
        let (mut lo, mut hi) = bracket.ok_or(Error::Domain {
            reason: format!("no curvature sign change found for alpha = {alpha}, n = {n}"),
        })?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let theta_ring = restricted_throughput(p_ring, n - 1, n)?;
    Ok(InflectionOutcome::Threshold(InflectionResult {
        alpha,
        n,
        p_ring_s: p_ring,
        theta_ring,
        p_s_minus: psm,
    }))
}

fn check_curve_grid(grid: &GridSpec) -> Result<()> {
    if grid.lo <= 0.0 || grid.hi > 1.0 {
        return Err(Error::InvalidGrid {
            reason: format!("theta grid must lie within (0,1), got [{}, {})", grid.lo, grid.hi),
        });
    }
    Ok(())
}

/// Equality-constrained curve over the grid, one point per grid theta.
pub fn alpha_curve(alpha: f64, n: usize, grid: &GridSpec) -> Result<Vec<AlphaTradeoffPoint>> {
    alpha_curve_with(alpha, n, grid, ExecMode::default())
}

pub fn alpha_curve_with(
    alpha: f64,
    n: usize,
    grid: &GridSpec,
    mode: ExecMode,
) -> Result<Vec<AlphaTradeoffPoint>> {
    check_domain(0.5, alpha, n)?;
    check_curve_grid(grid)?;
    try_map(&grid.points(), mode, |&theta| {
        alpha_optimal_point(theta, alpha, n)
    })
}

/// Inequality-constrained curve; differs from [`alpha_curve`] exactly and
/// only on `theta <= theta_n`, where it is flat.
pub fn alpha_curve_inequality_with(
    alpha: f64,
    n: usize,
    grid: &GridSpec,
    mode: ExecMode,
) -> Result<Vec<AlphaTradeoffPoint>> {
    check_domain(0.5, alpha, n)?;
    check_curve_grid(grid)?;
    try_map(&grid.points(), mode, |&theta| {
        alpha_optimal_point_inequality(theta, alpha, n)
    })
}
