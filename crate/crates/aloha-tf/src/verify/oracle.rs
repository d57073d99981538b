//! Brute-force fairness maximization over discretized control space.
//!
//! The scan walks the efficient simplex (sum p = 1) at spacing
//! `1/resolution`, keeps points whose realized throughput lies within
//! `band` of the target, and maximizes the fairness measure. Restricting
//! the scan to the simplex is justified by the efficiency reduction; for
//! `n = 2` the full square is scanned as well so that reduction is itself
//! checked.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_reduce, ExecMode};
use crate::model::{ControlVector, FairnessMeasure};

/// Grid resolutions keeping each scan comfortably under a minute:
/// the simplex grid has C(resolution + n - 1, n - 1) points.
pub fn default_resolution(n: usize) -> usize {
    match n {
        2 => 2000,
        3 => 200,
        _ => 60,
    }
}

/// Throughput half-width pairing with [`default_resolution`]; at least the
/// grid-induced throughput slack.
pub fn default_band(n: usize) -> f64 {
    match n {
        2 => 2e-3,
        3 => 1e-2,
        _ => 3e-2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub theta: f64,
    pub n: usize,
    pub measure: FairnessMeasure,
    pub best_control: ControlVector,
    #[serde(rename = "best_F")]
    pub best_f: f64,
    pub constraint_residual: f64,
    pub distinct_nonzero_values: usize,
    /// Best feasible fairness among grid points with at most two distinct
    /// nonzero quantized values. The unrestricted best can exceed this only
    /// by band/grid noise: a sub-resolution extra user can tune throughput
    /// inside the band at no first-order fairness cost, so the unrestricted
    /// argmax itself is not reliably two-valued.
    #[serde(rename = "two_value_best_F")]
    pub two_value_best_f: f64,
    /// Best feasible fairness over the full `[0,1)^2` grid (`n = 2` only);
    /// sanity check that the simplex restriction loses nothing.
    #[serde(rename = "square_best_F", skip_serializing_if = "Option::is_none")]
    pub square_best_f: Option<f64>,
    /// Top candidates by fairness (best first), for optimizer cross-checks.
    #[serde(skip)]
    pub top_candidates: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Debug)]
struct Candidate {
    f: f64,
    control: Vec<f64>,
    residual: f64,
}

/// Total order: higher fairness first, ties broken by lexicographically
/// smaller control so reductions are deterministic under any partition.
fn better(a: &Candidate, b: &Candidate) -> bool {
    if a.f != b.f {
        return a.f > b.f;
    }
    a.control < b.control
}

const TOP_K: usize = 10;

#[derive(Clone, Default)]
struct ScanAcc {
    top: Vec<Candidate>,
    best_two_value: Option<Candidate>,
}

impl ScanAcc {
    fn push(mut self, c: Candidate, two_valued: bool) -> Self {
        if two_valued
            && self
                .best_two_value
                .as_ref()
                .is_none_or(|b| better(&c, b))
        {
            self.best_two_value = Some(c.clone());
        }
        let pos = self.top.iter().position(|t| better(&c, t));
        match pos {
            Some(i) => self.top.insert(i, c),
            None if self.top.len() < TOP_K => self.top.push(c),
            None => return self,
        }
        self.top.truncate(TOP_K);
        self
    }

    fn merge(mut self, mut other: ScanAcc) -> Self {
        if let Some(c) = other.best_two_value.take() {
            if self
                .best_two_value
                .as_ref()
                .is_none_or(|b| better(&c, b))
            {
                self.best_two_value = Some(c);
            }
        }
        other.top.into_iter().fold(self, |acc, c| acc.push(c, false))
    }
}

fn rates_inline(p: &[f64], x: &mut [f64]) -> f64 {
    let n = p.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut v = p[i];
        for (j, &pj) in p.iter().enumerate() {
            if j != i {
                v *= 1.0 - pj;
            }
        }
        x[i] = v;
        total += v;
    }
    total
}

fn eval_measure(x: &[f64], measure: &FairnessMeasure) -> Option<f64> {
    match measure {
        FairnessMeasure::Jain => {
            let sum: f64 = x.iter().sum();
            let sumsq: f64 = x.iter().map(|v| v * v).sum();
            (sumsq > 0.0).then(|| sum * sum / (x.len() as f64 * sumsq))
        }
        FairnessMeasure::Alpha(a) => {
            Some(x.iter().map(|&v| crate::model::alpha_utility(v, *a)).sum())
        }
    }
}

/// All length-`parts` compositions of `total` (orderings included).
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, parts_left: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts_left == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=remaining {
            prefix.push(v);
            rec(remaining - v, parts_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Distinct nonzero values after quantization at `1.5/resolution`: values
/// within the tolerance of zero quantize to zero and are dropped, the rest
/// are clustered by the same tolerance.
fn distinct_nonzero(control: &[f64], resolution: usize) -> usize {
    let tol = 1.5 / resolution as f64;
    let mut vals: Vec<f64> = control.iter().copied().filter(|&v| v > tol).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut count = 0;
    let mut last = f64::NEG_INFINITY;
    for v in vals {
        if v - last > tol {
            count += 1;
        }
        last = v;
    }
    count
}

pub fn oracle_optimum(
    theta: f64,
    n: usize,
    measure: FairnessMeasure,
    resolution: usize,
    band: f64,
) -> Result<OracleResult> {
    oracle_optimum_with(theta, n, measure, resolution, band, ExecMode::default())
}

pub fn oracle_optimum_with(
    theta: f64,
    n: usize,
    measure: FairnessMeasure,
    resolution: usize,
    band: f64,
    mode: ExecMode,
) -> Result<OracleResult> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    if n > 4 {
        return Err(Error::OracleUnsupportedN { n });
    }
    if !(0.0 < theta && theta < 1.0) {
        return Err(Error::ThetaOutOfRange { theta });
    }
    if resolution < 50 {
        return Err(Error::Domain {
            reason: format!("oracle resolution must be >= 50, got {resolution}"),
        });
    }
    if !(band > 0.0) {
        return Err(Error::Domain {
            reason: format!("band must be positive, got {band}"),
        });
    }

    let res_f = resolution as f64;
    let comps = compositions(resolution as u32, n);
    let acc = map_reduce(
        &comps,
        mode,
        ScanAcc::default(),
        |acc, comp| {
            // Corners p_i = 1 are outside the control domain.
            if comp.iter().any(|&c| c as usize == resolution) {
                return acc;
            }
            let p: Vec<f64> = comp.iter().map(|&c| c as f64 / res_f).collect();
            let mut x = [0.0; 4];
            let total = rates_inline(&p, &mut x[..n]);
            let residual = (total - theta).abs();
            if residual > band {
                return acc;
            }
            match eval_measure(&x[..n], &measure) {
                Some(f) => {
                    let two_valued = distinct_nonzero(&p, resolution) <= 2;
                    acc.push(
                        Candidate {
                            f,
                            control: p,
                            residual,
                        },
                        two_valued,
                    )
                }
                None => acc,
            }
        },
        ScanAcc::merge,
    );

    let best = acc
        .top
        .first()
        .cloned()
        .ok_or(Error::NoFeasiblePoint { theta, band })?;
    let best_two_value = acc
        .best_two_value
        .clone()
        .ok_or(Error::NoFeasiblePoint { theta, band })?;

    let square_best_f = (n == 2).then(|| {
        let rows: Vec<u32> = (0..resolution as u32).collect();
        map_reduce(
            &rows,
            mode,
            f64::NEG_INFINITY,
            |mut best, &i| {
                let p0 = i as f64 / res_f;
                let mut x = [0.0; 2];
                for j in 0..resolution as u32 {
                    let p = [p0, j as f64 / res_f];
                    let total = rates_inline(&p, &mut x);
                    if (total - theta).abs() <= band {
                        if let Some(f) = eval_measure(&x, &measure) {
                            if f > best {
                                best = f;
                            }
                        }
                    }
                }
                best
            },
            f64::max,
        )
    });

    let distinct = distinct_nonzero(&best.control, resolution);
    Ok(OracleResult {
        theta,
        n,
        measure,
        best_control: ControlVector::new(best.control.clone())?,
        best_f: best.f,
        constraint_residual: best.residual,
        distinct_nonzero_values: distinct,
        two_value_best_f: best_two_value.f,
        square_best_f,
        top_candidates: acc.top.into_iter().map(|c| (c.control, c.f)).collect(),
    })
}
