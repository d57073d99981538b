//! Half-open throughput grids `[lo, hi)` with optional exact member injection.

use serde::Serialize;

use crate::error::{Error, Result};

/// Grid specification `lo:hi:step`, half-open on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || !step.is_finite() {
            return Err(Error::InvalidGrid {
                reason: "non-finite grid bound or step".to_string(),
            });
        }
        if hi <= lo {
            return Err(Error::InvalidGrid {
                reason: format!("empty grid: hi = {hi} <= lo = {lo}"),
            });
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid {
                reason: format!("step must be positive, got {step}"),
            });
        }
        Ok(Self { lo, hi, step })
    }

    /// Uniform grid points `lo + i*step < hi`.
    pub fn points(&self) -> Vec<f64> {
        self.points_with(&[])
    }

    /// Uniform points plus `inject` values lying in `[lo, hi)` as exact
    /// members. A uniform point colliding with an injected value (within
    /// `step * 1e-6`) is dropped so the injected value appears exactly once.
    pub fn points_with(&self, inject: &[f64]) -> Vec<f64> {
        let collide = self.step * 1e-6;
        let count = ((self.hi - self.lo) / self.step).ceil() as usize + 1;
        let mut pts: Vec<f64> = (0..count)
            .map(|i| self.lo + i as f64 * self.step)
            .filter(|&v| v < self.hi)
            .filter(|&v| inject.iter().all(|&m| (v - m).abs() > collide))
            .collect();
        pts.extend(
            inject
                .iter()
                .copied()
                .filter(|&m| self.lo <= m && m < self.hi),
        );
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_or_backward() {
        assert!(GridSpec::new(0.5, 0.5, 0.1).is_err());
        assert!(GridSpec::new(0.6, 0.5, 0.1).is_err());
        assert!(GridSpec::new(0.4, 0.6, 0.0).is_err());
        assert!(GridSpec::new(0.4, 0.6, -0.1).is_err());
    }

    #[test]
    fn half_open_and_strictly_increasing() {
        let g = GridSpec::new(0.4, 0.5, 0.02).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], 0.4);
        assert!(*pts.last().unwrap() < 0.5);
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn injection_adds_exact_members_once() {
        let g = GridSpec::new(0.4, 0.6, 1e-3).unwrap();
        let th3 = 4.0 / 9.0;
        let pts = g.points_with(&[th3, 0.5, 0.9]);
        assert!(pts.iter().any(|&v| v == th3));
        assert_eq!(pts.iter().filter(|&&v| v == 0.5).count(), 1);
        assert!(!pts.iter().any(|&v| v == 0.9)); // outside [lo, hi)
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}
