//! Throughput equality constraint over the two-value control family:
//! evaluate `T(p_s, k, n')`, invert it for `p_s`, and enumerate the
//! feasible `(k, n')` pairs for a target throughput.

use crate::error::{Error, Result};
use crate::model::{critical_throughput, RestrictedControl};

/// Lower bracket end for the bisection; `T` is evaluated on `(eps, 1/n']`.
const BRACKET_EPS: f64 = 1e-15;
/// Bisection stops once the bracket width drops below this.
const PS_TOL: f64 = 1e-15;
const MAX_ITERS: usize = 200;

/// Achievable throughputs for fixed `(k, n')`: the half-open interval
/// `[theta_{n'}, theta_{n'-k})`, swept as `p_s` runs over `(0, 1/n']`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputRange {
    pub k: usize,
    pub n_prime: usize,
    pub lo: f64,
    pub hi: f64,
}

impl ThroughputRange {
    pub fn contains(&self, theta: f64) -> bool {
        self.lo <= theta && theta < self.hi
    }
}

/// The `(k, n')` pairs that can meet a target throughput, for `theta` in
/// the regime interval `[theta_t, theta_{t-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePairSet {
    pub t: usize,
    pub n: usize,
    /// `(k, n')` pairs, sorted by `n'` then `k`.
    pub pairs: Vec<(usize, usize)>,
}

fn check_box(p_s: f64, k: usize, n_prime: usize) -> Result<RestrictedControl> {
    RestrictedControl::new(p_s, k, n_prime, n_prime).map_err(|e| Error::Domain {
        reason: e.to_string(),
    })
}

/// Throughput of the restricted control: `k x_s + (n'-k) x_l`.
/// Strictly decreasing in `p_s` on `(0, 1/n']`.
pub fn restricted_throughput(p_s: f64, k: usize, n_prime: usize) -> Result<f64> {
    let rc = check_box(p_s, k, n_prime)?;
    let (x_s, x_l) = rc.rates_sl();
    Ok(k as f64 * x_s + (n_prime - k) as f64 * x_l)
}

/// Unchecked evaluation used inside the bisection loop, where `(k, n')`
/// have already been validated and `p_s` stays inside the bracket.
fn throughput_unchecked(p_s: f64, k: usize, n_prime: usize) -> f64 {
    let p_l = (1.0 - k as f64 * p_s) / (n_prime - k) as f64;
    let (ki, ni) = (k as i32, n_prime as i32);
    let x_s = p_s * (1.0 - p_s).powi(ki - 1) * (1.0 - p_l).powi(ni - ki);
    let x_l = p_l * (1.0 - p_s).powi(ki) * (1.0 - p_l).powi(ni - ki - 1);
    k as f64 * x_s + (n_prime - k) as f64 * x_l
}

/// The achievable range `[theta_{n'}, theta_{n'-k})`.
pub fn achievable_range(k: usize, n_prime: usize) -> Result<ThroughputRange> {
    if n_prime < 2 || k == 0 || k >= n_prime {
        return Err(Error::Domain {
            reason: format!("need n' >= 2 and 1 <= k <= n'-1, got k = {k}, n' = {n_prime}"),
        });
    }
    Ok(ThroughputRange {
        k,
        n_prime,
        lo: critical_throughput(n_prime),
        hi: critical_throughput(n_prime - k),
    })
}

/// Invert the throughput constraint: the unique `p_s` in `(0, 1/n']` with
/// `T(p_s, k, n') = theta`, or `None` when `theta` is outside
/// `[theta_{n'}, theta_{n'-k})`.
///
/// Monotonicity of `T` in `p_s` makes plain bisection exact; `n' = 2` takes
/// the closed-form quadratic root instead.
pub fn solve_ps(theta: f64, k: usize, n_prime: usize) -> Result<Option<f64>> {
    let range = achievable_range(k, n_prime)?;
    if !(0.0 < theta && theta < 1.0) {
        return Err(Error::ThetaOutOfRange { theta });
    }
    if !range.contains(theta) {
        return Ok(None);
    }
    if n_prime == 2 {
        // T(p_s, 1, 2) = p_s^2 + (1 - p_s)^2 = theta.
        return Ok(Some((1.0 - (2.0 * theta - 1.0).sqrt()) / 2.0));
    }
    Ok(Some(bisect_ps(theta, k, n_prime)))
}

/// Bisection path without the `n' = 2` shortcut; `theta` must lie in the
/// achievable range.
pub(crate) fn bisect_ps(theta: f64, k: usize, n_prime: usize) -> f64 {
    let hi0 = 1.0 / n_prime as f64;
    if theta <= critical_throughput(n_prime) {
        return hi0;
    }
    // T is decreasing: T(lo) > theta >= T(hi).
    let (mut lo, mut hi) = (BRACKET_EPS, hi0);
    for _ in 0..MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let t_mid = throughput_unchecked(mid, k, n_prime);
        if t_mid == theta {
            return mid;
        }
        if t_mid > theta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= PS_TOL {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Regime index: the `t` in `{2, ..., n}` with `theta` in
/// `[theta_t, theta_{t-1})`; exact equality with a computed `theta_t`
/// maps to `t`.
pub fn regime_index(theta: f64, n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    if !(0.0 < theta && theta < 1.0) {
        return Err(Error::ThetaOutOfRange { theta });
    }
    for t in 2..=n {
        if theta >= critical_throughput(t) {
            return Ok(t);
        }
    }
    Err(Error::OutOfRegime {
        theta,
        theta_n: critical_throughput(n),
    })
}

/// All `(k, n')` pairs whose achievable range contains `theta`:
/// `n'` in `{t, ..., n}` and `k` in `{n'-t+1, ..., n'-1}`.
pub fn feasible_pairs(theta: f64, n: usize) -> Result<FeasiblePairSet> {
    let t = regime_index(theta, n)?;
    let mut pairs = Vec::new();
    for n_prime in t..=n {
        for k in (n_prime - t + 1)..=(n_prime - 1) {
            pairs.push((k, n_prime));
        }
    }
    Ok(FeasiblePairSet { t, n, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::critical_throughputs;

    /// Explicit rational form of T(p_s, k, n') from expanding the product
    /// terms; an independent route used to cross-check the direct evaluation.
    fn throughput_closed_form(p_s: f64, k: usize, n_prime: usize) -> f64 {
        let (kf, nf) = (k as f64, n_prime as f64);
        let p_l = (1.0 - kf * p_s) / (nf - kf);
        -((1.0 - p_s).powi(k as i32 - 1)
            * (-kf * nf * p_s * p_s + nf * p_s + kf - nf)
            * (1.0 - p_l).powi((n_prime - k) as i32))
            / (kf * p_s + nf - kf - 1.0)
    }

    /// Explicit derivative dT/dp_s; negative on (0, 1/n').
    fn throughput_derivative(p_s: f64, k: usize, n_prime: usize) -> f64 {
        let (kf, nf) = (k as f64, n_prime as f64);
        let p_l = (1.0 - kf * p_s) / (nf - kf);
        -(kf * (1.0 - p_s).powi(k as i32 - 2)
            * (nf * p_s - 1.0)
            * (1.0 - p_l).powi((n_prime - k) as i32)
            * (kf * p_s * (nf * p_s - 2.0) - (nf - 1.0 - kf)))
            / (kf * p_s + nf - kf - 1.0).powi(2)
    }

    #[test]
    fn throughput_at_uniform_is_theta_nprime() {
        for n_prime in 2..=8 {
            for k in 1..n_prime {
                let t = restricted_throughput(1.0 / n_prime as f64, k, n_prime).unwrap();
                assert!((t - critical_throughput(n_prime)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn throughput_limit_small_ps() {
        // k = 1, n' = 2: p_s^2 + (1-p_s)^2 -> 1 as p_s -> 0.
        let t = restricted_throughput(1e-9, 1, 2).unwrap();
        assert!((t - 1.0).abs() < 1e-8);
        let t = restricted_throughput(0.2763932022500210, 1, 2).unwrap();
        assert!((t - 0.6).abs() < 1e-12);
    }

    #[test]
    fn throughput_matches_closed_form() {
        for n_prime in 2..=9 {
            for k in 1..n_prime {
                for i in 1..40 {
                    let p_s = i as f64 / 40.0 / n_prime as f64;
                    let direct = restricted_throughput(p_s, k, n_prime).unwrap();
                    let closed = throughput_closed_form(p_s, k, n_prime);
                    assert!(
                        (direct - closed).abs() < 1e-13,
                        "mismatch at p_s={p_s}, k={k}, n'={n_prime}"
                    );
                    assert!(throughput_derivative(p_s, k, n_prime) < 0.0);
                }
            }
        }
    }

    #[test]
    fn throughput_rejects_out_of_box() {
        assert!(restricted_throughput(0.6, 1, 2).is_err());
        assert!(restricted_throughput(0.1, 3, 3).is_err());
        assert!(restricted_throughput(-0.1, 1, 2).is_err());
        assert!(restricted_throughput(0.1, 0, 2).is_err());
    }

    #[test]
    fn solve_ps_boundary_is_uniform() {
        for n_prime in 2..=8 {
            for k in 1..n_prime {
                let ps = solve_ps(critical_throughput(n_prime), k, n_prime)
                    .unwrap()
                    .unwrap();
                assert_eq!(ps, 1.0 / n_prime as f64);
            }
        }
    }

    #[test]
    fn solve_ps_two_user_quadratic() {
        let ps = solve_ps(0.6, 1, 2).unwrap().unwrap();
        assert!((ps - 0.2763932022500210).abs() < 1e-15);
        // fast path agrees with the generic bisection
        let ps_b = bisect_ps(0.6, 1, 2);
        assert!((ps - ps_b).abs() < 1e-12);
    }

    #[test]
    fn solve_ps_three_user_example() {
        let ps = solve_ps(0.47, 1, 3).unwrap().unwrap();
        assert!((ps - 0.12600131604352744).abs() < 1e-11);
        let t = restricted_throughput(ps, 1, 3).unwrap();
        assert!((t - 0.47).abs() <= 1e-12);
    }

    #[test]
    fn solve_ps_no_solution_outside_range() {
        assert_eq!(solve_ps(0.3, 1, 3).unwrap(), None); // below theta_3
        assert_eq!(solve_ps(0.55, 1, 3).unwrap(), None); // >= theta_2
        assert!(solve_ps(1.2, 1, 3).is_err());
    }

    #[test]
    fn ranges_match_criticals_and_nest() {
        let r = achievable_range(1, 3).unwrap();
        assert_eq!((r.lo, r.hi), (4.0 / 9.0, 0.5));
        let r = achievable_range(2, 4).unwrap();
        assert_eq!((r.lo, r.hi), (27.0 / 64.0, 0.5));
        for n_prime in 2..=10 {
            let r = achievable_range(n_prime - 1, n_prime).unwrap();
            assert_eq!(r.hi, 1.0);
            for k in 1..n_prime - 1 {
                let a = achievable_range(k, n_prime).unwrap();
                let b = achievable_range(k + 1, n_prime).unwrap();
                assert_eq!(a.lo, b.lo);
                assert!(a.hi <= b.hi);
            }
        }
    }

    #[test]
    fn feasible_pairs_examples() {
        let fp = feasible_pairs(0.6, 2).unwrap();
        assert_eq!(fp.t, 2);
        assert_eq!(fp.pairs, vec![(1, 2)]);

        // t = 4, n = 12, restricted to n' = 8: k in {5, 6, 7}.
        let th = critical_throughputs(12).unwrap();
        let fp = feasible_pairs(0.5 * (th.theta(4) + th.theta(3)), 12).unwrap();
        assert_eq!(fp.t, 4);
        let ks: Vec<usize> = fp
            .pairs
            .iter()
            .filter(|&&(_, np)| np == 8)
            .map(|&(k, _)| k)
            .collect();
        assert_eq!(ks, vec![5, 6, 7]);

        let fp = feasible_pairs(0.47, 4).unwrap();
        assert_eq!(fp.t, 3);
        assert_eq!(fp.pairs, vec![(1, 3), (2, 3), (2, 4), (3, 4)]);
    }

    #[test]
    fn feasible_pairs_regime_errors() {
        assert!(matches!(
            feasible_pairs(0.40, 4),
            Err(Error::OutOfRegime { .. })
        ));
        assert!(matches!(
            feasible_pairs(1.0, 4),
            Err(Error::ThetaOutOfRange { .. })
        ));
    }

    #[test]
    fn regime_index_half_open_convention() {
        // theta exactly at a computed theta_t maps to t.
        assert_eq!(regime_index(0.5, 4).unwrap(), 2);
        assert_eq!(regime_index(4.0 / 9.0, 4).unwrap(), 3);
        assert_eq!(regime_index(0.5 - 1e-12, 4).unwrap(), 3);
        assert_eq!(regime_index(0.99, 4).unwrap(), 2);
    }
}
