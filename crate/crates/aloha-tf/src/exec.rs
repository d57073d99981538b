//! Sequential / data-parallel execution of grid sweeps.
//!
//! With the `parallel` feature enabled the default mode fans work out over
//! rayon's pool; results are assembled in input order either way, so output
//! is identical across modes and worker counts.

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            ExecMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            ExecMode::Sequential
        }
    }
}

/// Map a fallible function over items, preserving order.
pub(crate) fn try_map<I, T, F>(items: &[I], mode: ExecMode, f: F) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(&f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(&f).collect()
        }
    }
}

/// Fold each item into a local accumulator and merge; `merge` must be
/// associative and order-insensitive so the reduction tree shape does not
/// affect the result.
pub(crate) fn map_reduce<I, A, F, M>(items: &[I], mode: ExecMode, init: A, f: F, merge: M) -> A
where
    I: Sync,
    A: Send + Sync + Clone,
    F: Fn(A, &I) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(not(feature = "parallel"))]
    let _ = &merge;
    match mode {
        ExecMode::Sequential => items.iter().fold(init, f),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items
                .par_iter()
                .fold(|| init.clone(), &f)
                .reduce(|| init.clone(), &merge)
        }
    }
}
