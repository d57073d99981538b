//! Jain throughput-fairness tradeoff: per-theta optimal points, incremental
//! curve generation over a user-count range, the critical-point
//! interpolation, and curve-shape property checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{try_map, ExecMode};
use crate::grid::GridSpec;
use crate::model::{critical_throughput, OptimalControl, RestrictedControl};
use crate::solver::{regime_index, solve_ps};

/// Which branch of the tradeoff produced a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `theta < theta_n`: all users at equal rate `theta/n`, fairness 1.
    EqualRate,
    /// `theta = theta_t`: uniform contention over `t` users, fairness `t/n`.
    CriticalPoint,
    /// `theta` interior to `(theta_t, theta_{t-1})`: one small user, `t-1` large.
    TwoValue,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::EqualRate => "EqualRate",
            Regime::CriticalPoint => "CriticalPoint",
            Regime::TwoValue => "TwoValue",
        };
        f.write_str(s)
    }
}

/// One point of the Jain tradeoff.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub theta: f64,
    pub f_star: f64,
    pub regime: Regime,
    pub control: OptimalControl,
    pub x_s: f64,
    pub x_l: f64,
    /// Active index: number of users contending at the optimum.
    pub t: usize,
}

impl TradeoffPoint {
    pub fn n(&self) -> usize {
        self.control.n()
    }
}

/// Tradeoff curve for one user count over a theta grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    pub n: usize,
    pub points: Vec<TradeoffPoint>,
    pub grid: GridSpec,
}

/// Control of the equal-rate point at throughput `theta <= theta_n`: the
/// smaller root of `p (1-p)^(n-1) = theta/n` on `[0, 1/n]`, where the map
/// is increasing and bisection applies. At `theta = theta_n` this is `1/n`
/// exactly.
pub(crate) fn equal_rate_control(theta: f64, n: usize) -> f64 {
    let hi0 = 1.0 / n as f64;
    if theta >= critical_throughput(n) {
        return hi0;
    }
    let r = theta / n as f64;
    let (mut lo, mut hi) = (0.0_f64, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = crate::model::single_value_rate(mid, n);
        if v == r {
            return mid;
        }
        if v < r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn check_point_domain(theta: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    if !(0.0 < theta && theta < 1.0) {
        return Err(Error::ThetaOutOfRange { theta });
    }
    Ok(())
}

/// Maximum Jain fairness at throughput exactly `theta`, for `n` users.
///
/// Three regimes: equal rates below `theta_n`; the uniform-over-`t` control
/// at `theta = theta_t` with fairness `t/n`; and otherwise the two-value
/// control with `k = 1`, `n' = t` solved from the throughput constraint.
pub fn jain_optimal_point(theta: f64, n: usize) -> Result<TradeoffPoint> {
    check_point_domain(theta, n)?;
    if theta < critical_throughput(n) {
        let p = equal_rate_control(theta, n);
        return Ok(TradeoffPoint {
            theta,
            f_star: 1.0,
            regime: Regime::EqualRate,
            control: OptimalControl::UniformScaled { p, n },
            x_s: theta / n as f64,
            x_l: theta / n as f64,
            t: n,
        });
    }
    let t = regime_index(theta, n)?;
    if theta == critical_throughput(t) {
        let rc = RestrictedControl::new(1.0 / t as f64, t, t, n)?;
        let (x_s, x_l) = rc.rates_sl();
        return Ok(TradeoffPoint {
            theta,
            f_star: t as f64 / n as f64,
            regime: Regime::CriticalPoint,
            control: OptimalControl::Restricted(rc),
            x_s,
            x_l,
            t,
        });
    }
    let p_s = solve_ps(theta, 1, t)?.expect("theta inside the (1, t) achievable range");
    let rc = RestrictedControl::new(p_s, 1, t, n)?;
    let (x_s, x_l) = rc.rates_sl();
    Ok(TradeoffPoint {
        theta,
        f_star: jain_of_two_value(n, t, x_s, x_l),
        regime: Regime::TwoValue,
        control: OptimalControl::Restricted(rc),
        x_s,
        x_l,
        t,
    })
}

/// Jain index of the rate vector with one `x_s`, `t-1` copies of `x_l`,
/// and `n - t` zeros.
fn jain_of_two_value(n: usize, t: usize, x_s: f64, x_l: f64) -> f64 {
    let sum = x_s + (t - 1) as f64 * x_l;
    let sumsq = x_s * x_s + (t - 1) as f64 * x_l * x_l;
    sum * sum / (n as f64 * sumsq)
}

/// Same tradeoff under the inequality constraint `T(x) >= theta`: the
/// solution is unchanged, so this delegates; it exists as a named entry
/// point so the equivalence is itself testable.
pub fn jain_optimal_point_inequality(theta: f64, n: usize) -> Result<TradeoffPoint> {
    jain_optimal_point(theta, n)
}

/// Interpolation through the critical points `(theta_t, t/n)`:
/// `(1 - 1/(nF))^(nF - 1)` for `F` in `[1/n, 1]`. Monotone, convex, and
/// lies on or above the true tradeoff.
pub fn jain_interpolation(f: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    let lo = 1.0 / n as f64;
    if !(lo..=1.0).contains(&f) {
        return Err(Error::Domain {
            reason: format!("interpolation needs F in [1/n, 1] = [{lo}, 1], got {f}"),
        });
    }
    let nf = n as f64 * f;
    Ok((1.0 - 1.0 / nf).powf(nf - 1.0))
}

/// Per-theta work shared by every curve: the active interval index and the
/// one constrained solve, reused for all user counts via the recursion
/// `F*(theta; m) = (t/m) F*(theta; t)`.
enum BaseSolve {
    /// `theta < theta_n`: every curve is in its equal-rate regime here.
    BelowAll,
    Critical { t: usize },
    Active { t: usize, p_s: f64 },
}

fn base_solve(theta: f64, n: usize) -> Result<BaseSolve> {
    if theta < critical_throughput(n) {
        return Ok(BaseSolve::BelowAll);
    }
    let t = regime_index(theta, n)?;
    if theta == critical_throughput(t) {
        return Ok(BaseSolve::Critical { t });
    }
    let p_s = solve_ps(theta, 1, t)?.expect("theta inside the (1, t) achievable range");
    Ok(BaseSolve::Active { t, p_s })
}

/// Tradeoff curves for every user count `m` in `{2, .., n}` over one grid.
///
/// Critical throughputs are injected as exact grid members. Each grid theta
/// is solved once in its active interval and scaled to larger `m`; grid
/// points are processed in parallel under the default mode.
pub fn jain_curve(n: usize, grid: &GridSpec) -> Result<BTreeMap<usize, TradeoffCurve>> {
    jain_curve_with(n, grid, ExecMode::default())
}

pub fn jain_curve_with(
    n: usize,
    grid: &GridSpec,
    mode: ExecMode,
) -> Result<BTreeMap<usize, TradeoffCurve>> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    if grid.lo <= 0.0 || grid.hi > 1.0 {
        return Err(Error::InvalidGrid {
            reason: format!("theta grid must lie within (0,1), got [{}, {})", grid.lo, grid.hi),
        });
    }
    let criticals: Vec<f64> = (2..=n).map(critical_throughput).collect();
    let thetas = grid.points_with(&criticals);
    let bases = try_map(&thetas, mode, |&theta| base_solve(theta, n))?;

    let mut curves = BTreeMap::new();
    for m in 2..=n {
        let theta_m = critical_throughput(m);
        let mut points = Vec::with_capacity(thetas.len());
        for (&theta, base) in thetas.iter().zip(&bases) {
            let point = match base {
                _ if theta < theta_m => {
                    let p = equal_rate_control(theta, m);
                    TradeoffPoint {
                        theta,
                        f_star: 1.0,
                        regime: Regime::EqualRate,
                        control: OptimalControl::UniformScaled { p, n: m },
                        x_s: theta / m as f64,
                        x_l: theta / m as f64,
                        t: m,
                    }
                }
                BaseSolve::Critical { t } => {
                    let rc = RestrictedControl::new(1.0 / *t as f64, *t, *t, m)?;
                    let (x_s, x_l) = rc.rates_sl();
                    TradeoffPoint {
                        theta,
                        f_star: *t as f64 / m as f64,
                        regime: Regime::CriticalPoint,
                        control: OptimalControl::Restricted(rc),
                        x_s,
                        x_l,
                        t: *t,
                    }
                }
                BaseSolve::Active { t, p_s } => {
                    let rc = RestrictedControl::new(*p_s, 1, *t, m)?;
                    let (x_s, x_l) = rc.rates_sl();
                    TradeoffPoint {
                        theta,
                        f_star: jain_of_two_value(m, *t, x_s, x_l),
                        regime: Regime::TwoValue,
                        control: OptimalControl::Restricted(rc),
                        x_s,
                        x_l,
                        t: *t,
                    }
                }
                BaseSolve::BelowAll => unreachable!("theta < theta_n implies theta < theta_m"),
            };
            points.push(point);
        }
        curves.insert(
            m,
            TradeoffCurve {
                n: m,
                points,
                grid: *grid,
            },
        );
    }
    Ok(curves)
}

/// Curve-shape checks from the tradeoff's structural properties. A `None`
/// means the check was not applicable on this grid (too few points in the
/// constrained region).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePropertyReport {
    pub n: usize,
    pub f_strictly_decreasing: Option<bool>,
    pub continuous_at_criticals: Option<bool>,
    pub max_jump_at_criticals: f64,
    pub piecewise_convex: Option<bool>,
    pub slope_ratio_at_boundary: Option<f64>,
    pub slope_ratio_ok: Option<bool>,
    pub p_s_piecewise_decreasing: Option<bool>,
    pub x_s_piecewise_decreasing: Option<bool>,
    pub p_l_increasing: Option<bool>,
    pub x_l_increasing: Option<bool>,
}

impl CurvePropertyReport {
    /// True when every applicable check passed.
    pub fn all_pass(&self) -> bool {
        [
            self.f_strictly_decreasing,
            self.continuous_at_criticals,
            self.piecewise_convex,
            self.slope_ratio_ok,
            self.p_s_piecewise_decreasing,
            self.x_s_piecewise_decreasing,
            self.p_l_increasing,
            self.x_l_increasing,
        ]
        .iter()
        .all(|c| c.unwrap_or(true))
    }
}

/// Check monotonicity, continuity, piecewise convexity, and the one-sided
/// slope ratio at `theta_{n-1}` on a generated curve. Slopes use one-sided
/// finite differences at the grid resolution.
pub fn jain_curve_properties(curve: &TradeoffCurve) -> Result<CurvePropertyReport> {
    let step = curve.grid.step;
    if step > 1e-3 + 1e-12 {
        return Err(Error::GridTooCoarse {
            reason: format!("need step <= 1e-3 to resolve the intervals, got {step}"),
        });
    }
    let m = curve.n;
    let active: Vec<&TradeoffPoint> = curve
        .points
        .iter()
        .filter(|p| p.regime != Regime::EqualRate)
        .collect();

    let mut report = CurvePropertyReport {
        n: m,
        f_strictly_decreasing: None,
        continuous_at_criticals: None,
        max_jump_at_criticals: 0.0,
        piecewise_convex: None,
        slope_ratio_at_boundary: None,
        slope_ratio_ok: None,
        p_s_piecewise_decreasing: None,
        x_s_piecewise_decreasing: None,
        p_l_increasing: None,
        x_l_increasing: None,
    };
    if active.len() < 3 {
        return Ok(report);
    }

    report.f_strictly_decreasing =
        Some(active.windows(2).all(|w| w[1].f_star < w[0].f_star));
    report.p_l_increasing = Some(
        active
            .windows(2)
            .all(|w| w[1].control.p_l() > w[0].control.p_l() - 1e-12),
    );
    report.x_l_increasing = Some(active.windows(2).all(|w| w[1].x_l > w[0].x_l - 1e-12));

    // Within one active interval (same t): p_s and x_s strictly decrease and
    // the second divided differences of F are strictly positive.
    let mut convex = true;
    let mut ps_dec = true;
    let mut xs_dec = true;
    for w in active.windows(2) {
        if w[0].t == w[1].t {
            ps_dec &= w[1].control.p_s() < w[0].control.p_s();
            xs_dec &= w[1].x_s < w[0].x_s;
        }
    }
    for w in active.windows(3) {
        if w[0].t == w[2].t && w[0].regime == Regime::TwoValue {
            let sl = (w[1].f_star - w[0].f_star) / (w[1].theta - w[0].theta);
            let sr = (w[2].f_star - w[1].f_star) / (w[2].theta - w[1].theta);
            convex &= sr > sl;
        }
    }
    report.piecewise_convex = Some(convex);
    report.p_s_piecewise_decreasing = Some(ps_dec);
    report.x_s_piecewise_decreasing = Some(xs_dec);

    // Continuity at each interior critical throughput.
    let mut max_jump: f64 = 0.0;
    let mut any_critical = false;
    for (i, p) in active.iter().enumerate() {
        if p.regime == Regime::CriticalPoint && i > 0 && i + 1 < active.len() {
            any_critical = true;
            let jump = (p.f_star - active[i - 1].f_star).abs();
            max_jump = max_jump.max(jump);
        }
    }
    if any_critical {
        report.continuous_at_criticals = Some(max_jump < 10.0 * step);
        report.max_jump_at_criticals = max_jump;
    }

    // One-sided slope ratio at theta_{m-1}: (m-2)/(m-1) within 5%.
    if m >= 3 {
        let boundary = critical_throughput(m - 1);
        if let Some(i) = active.iter().position(|p| p.theta == boundary) {
            if i > 0 && i + 1 < active.len() {
                let left = (active[i].f_star - active[i - 1].f_star)
                    / (active[i].theta - active[i - 1].theta);
                let right = (active[i + 1].f_star - active[i].f_star)
                    / (active[i + 1].theta - active[i].theta);
                let ratio = left / right;
                let expected = (m - 2) as f64 / (m - 1) as f64;
                report.slope_ratio_at_boundary = Some(ratio);
                report.slope_ratio_ok = Some((ratio / expected - 1.0).abs() <= 0.05);
            }
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{jain_fairness, rates_from_control, throughput};

    #[test]
    fn critical_point_regime() {
        let pt = jain_optimal_point(0.5, 4).unwrap();
        assert_eq!(pt.regime, Regime::CriticalPoint);
        assert_eq!(pt.f_star, 0.5);
        assert_eq!(pt.t, 2);
        let p = pt.control.expand();
        assert_eq!(p.components(), &[0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn two_user_closed_form_at_06() {
        let pt = jain_optimal_point(0.6, 2).unwrap();
        assert_eq!(pt.regime, Regime::TwoValue);
        assert!((pt.f_star - 9.0 / 14.0).abs() < 1e-12);
        assert!((pt.control.p_s() - 0.2763932022500210).abs() < 1e-12);
        // f_star agrees with Jain's index evaluated on the full rate map.
        let f = jain_fairness(&rates_from_control(&pt.control.expand())).unwrap();
        assert!((pt.f_star - f).abs() < 1e-12);
    }

    #[test]
    fn equal_rate_regime() {
        let pt = jain_optimal_point(0.4, 3).unwrap();
        assert_eq!(pt.regime, Regime::EqualRate);
        assert_eq!(pt.f_star, 1.0);
        assert!((pt.x_s - 0.4 / 3.0).abs() < 1e-15);
        // Lemma-1 smaller branch: p <= 1/n and the control realizes theta.
        let p = pt.control.p_s();
        assert!((p - 0.21807801814575442).abs() < 1e-12);
        assert!(p <= 1.0 / 3.0);
        let tput = throughput(&rates_from_control(&pt.control.expand()));
        assert!((tput - 0.4).abs() < 1e-12);
    }

    #[test]
    fn inequality_variant_is_bitwise_identical() {
        for theta in [0.3, 0.47, 0.5, 0.6, 0.93] {
            let a = jain_optimal_point(theta, 4).unwrap();
            let b = jain_optimal_point_inequality(theta, 4).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn domain_errors() {
        assert_eq!(
            jain_optimal_point(1.0, 2).unwrap_err(),
            Error::ThetaOutOfRange { theta: 1.0 }
        );
        assert!(jain_optimal_point(0.5, 1).is_err());
    }

    #[test]
    fn fairness_tends_to_one_over_n() {
        let pt = jain_optimal_point(0.999999, 4).unwrap();
        assert!((pt.f_star - 0.25).abs() < 1e-4);
    }

    #[test]
    fn interpolation_hits_criticals_exactly() {
        for n in 2..=10 {
            for t in 2..=n {
                let th = jain_interpolation(t as f64 / n as f64, n).unwrap();
                assert!((th - critical_throughput(t)).abs() < 1e-12);
            }
            assert!((jain_interpolation(1.0, n).unwrap() - critical_throughput(n)).abs() < 1e-12);
        }
        let v = jain_interpolation(0.6, 4).unwrap();
        assert!((v - 0.47020096007904112).abs() < 1e-12);
        assert!(jain_interpolation(0.1, 4).is_err());
        assert!(jain_interpolation(1.1, 4).is_err());
    }

    #[test]
    fn curve_matches_direct_solves_and_recursion() {
        let grid = GridSpec::new(0.40, 0.95, 1e-3).unwrap();
        let curves = jain_curve(4, &grid).unwrap();
        let c3 = &curves[&3];
        let c4 = &curves[&4];
        assert_eq!(c3.points.len(), c4.points.len());
        for (p3, p4) in c3.points.iter().zip(&c4.points) {
            assert_eq!(p3.theta, p4.theta);
            let direct = jain_optimal_point(p4.theta, 4).unwrap();
            assert!((p4.f_star - direct.f_star).abs() < 1e-10);
            if p4.theta >= critical_throughput(3) {
                assert!((p4.f_star - 0.75 * p3.f_star).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn curve_grid_contains_criticals_exactly() {
        let grid = GridSpec::new(0.42, 0.51, 1e-3).unwrap();
        let curves = jain_curve(4, &grid).unwrap();
        let c4 = &curves[&4];
        for t in [2, 3, 4] {
            let th = critical_throughput(t);
            if th >= 0.42 && th < 0.51 {
                let p = c4.points.iter().find(|p| p.theta == th).unwrap();
                assert_eq!(p.regime, Regime::CriticalPoint);
                assert_eq!(p.f_star, t as f64 / 4.0);
            }
        }
    }

    #[test]
    fn properties_on_moderate_grid() {
        let grid = GridSpec::new(0.421875, 0.99, 1e-3).unwrap();
        let curves = jain_curve(4, &grid).unwrap();
        let report = jain_curve_properties(&curves[&4]).unwrap();
        assert_eq!(report.f_strictly_decreasing, Some(true));
        assert_eq!(report.continuous_at_criticals, Some(true));
        assert_eq!(report.piecewise_convex, Some(true));
        assert_eq!(report.p_s_piecewise_decreasing, Some(true));
        assert_eq!(report.x_s_piecewise_decreasing, Some(true));
        assert_eq!(report.p_l_increasing, Some(true));
        assert_eq!(report.x_l_increasing, Some(true));
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn properties_not_applicable_below_theta_n() {
        let grid = GridSpec::new(0.30, 0.40, 1e-3).unwrap();
        let curves = jain_curve(4, &grid).unwrap();
        let report = jain_curve_properties(&curves[&4]).unwrap();
        assert_eq!(report.f_strictly_decreasing, None);
        assert!(report.all_pass());
    }

    #[test]
    fn properties_reject_coarse_grid() {
        let grid = GridSpec::new(0.45, 0.60, 5e-3).unwrap();
        let curves = jain_curve(4, &grid).unwrap();
        assert!(matches!(
            jain_curve_properties(&curves[&4]),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn n2_closed_form_second_derivative_positive() {
        // d2F/dtheta2 = (2 th^2 (3 - 2 th) + 2) / (th^2 + 2 th - 1)^3 on [1/2, 1).
        for i in 0..100 {
            let th = 0.5 + 0.005 * i as f64;
            if th >= 1.0 {
                break;
            }
            let d2 = (2.0 * th * th * (3.0 - 2.0 * th) + 2.0)
                / (th * th + 2.0 * th - 1.0).powi(3);
            assert!(d2 > 0.0);
        }
    }
}
