//! Sampling probe for the majorization structure of the constrained
//! feasible set: every interior rate vector on the throughput hyperplane is
//! majorized by some boundary point (found by walking toward the centroid),
//! while distinct boundary points are mutually non-comparable.
//!
//! Membership in the feasible set is exact for `n = 2` (sqrt(x1) + sqrt(x2)
//! <= 1) and grid-certified for `n in {3, 4}`, which is why the probe shares
//! the oracle's `n <= 4` limit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{critical_throughput, expand_restricted, rates_from_control, ControlVector};
use crate::rng::SplitMix64;
use crate::solver::{feasible_pairs, solve_ps};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub n: usize,
    pub theta: f64,
    pub samples: usize,
    pub seed: u64,
    /// Fraction of sampled interior points for which a majorized boundary
    /// point was found on the segment toward the centroid.
    pub boundary_success_fraction: f64,
    /// Fraction of distinct boundary-point pairs that are non-comparable.
    pub noncomparable_pair_fraction: f64,
    pub checked_pairs: usize,
}

/// `x` majorized by `y` (`x` more evenly spread): descending prefix sums of
/// `x` never exceed those of `y`, with equal totals.
pub(crate) fn is_majorized_by(x: &[f64], y: &[f64], tol: f64) -> bool {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ys.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let (mut px, mut py) = (0.0, 0.0);
    for i in 0..xs.len() {
        px += xs[i];
        py += ys[i];
        if px > py + tol {
            return false;
        }
    }
    (px - py).abs() <= tol
}

/// Feasible-set membership test for rate vectors.
pub(crate) enum Membership {
    /// Exact: sqrt(x1) + sqrt(x2) <= 1.
    TwoUser,
    /// Certified by domination from a precomputed boundary rate grid.
    Grid(Vec<Vec<f64>>),
}

impl Membership {
    fn build(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Self::TwoUser),
            3 | 4 => {
                let resolution = if n == 3 { 200 } else { 60 };
                let mut pts = Vec::new();
                let mut comp = vec![0u32; n];
                gen_simplex(resolution, 0, resolution, &mut comp, &mut pts);
                Ok(Self::Grid(pts))
            }
            n if n < 2 => Err(Error::InvalidN { n, min: 2 }),
            n => Err(Error::OracleUnsupportedN { n }),
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::TwoUser => x[0].sqrt() + x[1].sqrt() <= 1.0,
            Self::Grid(pts) => pts
                .iter()
                .any(|b| x.iter().zip(b).all(|(&xi, &bi)| xi <= bi)),
        }
    }
}

fn gen_simplex(res: u32, idx: usize, remaining: u32, comp: &mut Vec<u32>, out: &mut Vec<Vec<f64>>) {
    if idx == comp.len() - 1 {
        comp[idx] = remaining;
        if comp.iter().all(|&c| c < res) {
            let p: Vec<f64> = comp.iter().map(|&c| c as f64 / res as f64).collect();
            let x = rates_from_control(&ControlVector::new(p).unwrap());
            out.push(x.components().to_vec());
        }
        return;
    }
    for v in 0..=remaining {
        comp[idx] = v;
        gen_simplex(res, idx + 1, remaining - v, comp, out);
    }
}

/// Walk from `x` toward the centroid `c = (theta/n) 1` until leaving the
/// feasible set; returns the crossing point, or `x` itself when `x` is
/// already on (or outside within tolerance of) the boundary.
pub(crate) fn boundary_point_toward_center(
    x: &[f64],
    theta: f64,
    membership: &Membership,
) -> Option<Vec<f64>> {
    let n = x.len();
    let c = vec![theta / n as f64; n];
    let at = |s: f64| -> Vec<f64> {
        x.iter()
            .zip(&c)
            .map(|(&xi, &ci)| (1.0 - s) * xi + s * ci)
            .collect()
    };
    if !membership.contains(x) {
        return Some(x.to_vec()); // already boundary-or-outside within grid slack
    }
    if membership.contains(&c) {
        return None; // centroid feasible: no crossing on the segment
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if membership.contains(&at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(at(lo))
}

/// Sample interior rate vectors with throughput `theta`, walk each to the
/// boundary toward the centroid, and check the boundary point majorizes
/// into the sample; also check pairwise non-comparability of the exact
/// two-value boundary points (sampled, not a proof).
pub fn majorization_probe(
    n: usize,
    theta: f64,
    samples: usize,
    seed: u64,
) -> Result<MajorizationReport> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    let theta_n = critical_throughput(n);
    if !(theta_n < theta && theta < 1.0) {
        return Err(Error::Domain {
            reason: format!("probe needs theta in (theta_n, 1) = ({theta_n}, 1), got {theta}"),
        });
    }
    let membership = Membership::build(n)?;
    // Interior samples need slack both in throughput (so scaling inward by
    // gamma = theta/T leaves a real margin) and in the smallest component
    // (so the grid certificate at s = 0 holds).
    let gamma_max = match n {
        2 => 0.97,
        3 => 0.90,
        _ => 0.80,
    };
    let need_t = (theta + 0.03).max(theta / gamma_max);
    let mut rng = SplitMix64::stream(seed, 0);
    let mut successes = 0usize;
    for _ in 0..samples {
        let mut found = None;
        for _ in 0..10_000 {
            // Dirichlet(1,..,1) point on the simplex via normalized exponentials.
            let mut g: Vec<f64> = (0..n).map(|_| -(1.0 - rng.next_f64()).ln()).collect();
            let total: f64 = g.iter().sum();
            g.iter_mut().for_each(|v| *v /= total);
            if g.iter().any(|&v| v < 0.05) {
                continue;
            }
            let x = rates_from_control(&ControlVector::new(g).unwrap());
            let t = x.components().iter().sum::<f64>();
            if t >= need_t && t < 1.0 {
                found = Some((x, t));
                break;
            }
        }
        let Some((x, t)) = found else { continue };
        let gamma = theta / t;
        let y: Vec<f64> = x.components().iter().map(|&v| gamma * v).collect();
        if !membership.contains(&y) {
            continue; // sample margin too thin for the grid certificate
        }
        if let Some(b) = boundary_point_toward_center(&y, theta, &membership) {
            let tol = 1e-7 * n as f64;
            if is_majorized_by(&b, &y, tol) {
                successes += 1;
            }
        }
    }

    // Exact boundary points from the two-value family, one per feasible (k, n').
    let mut boundary: Vec<Vec<f64>> = Vec::new();
    for &(k, n_prime) in &feasible_pairs(theta, n)?.pairs {
        if let Some(p_s) = solve_ps(theta, k, n_prime)? {
            let rc = crate::model::RestrictedControl::new(p_s, k, n_prime, n)?;
            let (p, _, _) = expand_restricted(&rc);
            let mut x = rates_from_control(&p).components().to_vec();
            x.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if !boundary
                .iter()
                .any(|b| b.iter().zip(&x).all(|(u, v)| (u - v).abs() < 1e-9))
            {
                boundary.push(x);
            }
        }
    }
    let mut checked = 0usize;
    let mut noncomparable = 0usize;
    for i in 0..boundary.len() {
        for j in i + 1..boundary.len() {
            checked += 1;
            let ij = is_majorized_by(&boundary[i], &boundary[j], 1e-9);
            let ji = is_majorized_by(&boundary[j], &boundary[i], 1e-9);
            if !ij && !ji {
                noncomparable += 1;
            }
        }
    }

    Ok(MajorizationReport {
        n,
        theta,
        samples,
        seed,
        boundary_success_fraction: successes as f64 / samples.max(1) as f64,
        noncomparable_pair_fraction: if checked == 0 {
            1.0
        } else {
            noncomparable as f64 / checked as f64
        },
        checked_pairs: checked,
    })
}
