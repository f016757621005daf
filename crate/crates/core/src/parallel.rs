//! Index-space maps used by every exhaustive enumeration. Results are
//! always returned in index order, whatever the schedule.

use crate::config::Parallelism;

pub(crate) fn map_range<T, F>(count: u64, mode: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

pub(crate) fn any_in_range<F>(count: u64, mode: Parallelism, f: F) -> bool
where
    F: Fn(u64) -> bool + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().any(f)
        }
        _ => (0..count).any(f),
    }
}
