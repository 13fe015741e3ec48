//! Execution policy for the data-parallel loops.
//!
//! Work is always split into the same ordered items and reduced in item
//! order, so the choice of policy never changes a result.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// rayon; `0` workers means the ambient/global pool.
    Parallel { workers: usize },
}

impl Execution {
    /// `1` forces the sequential path, `0` uses the global pool, anything
    /// else a dedicated pool of that size. Without the `parallel` feature
    /// every hint is sequential.
    pub fn from_hint(worker_hint: usize) -> Self {
        if cfg!(feature = "parallel") && worker_hint != 1 {
            Execution::Parallel {
                workers: worker_hint,
            }
        } else {
            Execution::Sequential
        }
    }

    /// Runs `f` under this policy. Parallel loops inside `f` pick up the
    /// dedicated pool, if any.
    pub fn install<R: Send>(self, f: impl FnOnce() -> R + Send) -> R {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel { workers } if workers > 1 => {
                match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                    Ok(pool) => pool.install(f),
                    Err(_) => f(),
                }
            }
            _ => f(),
        }
    }

    /// `(0..n).map(f)` collected in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel { .. } => (0..n).into_par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel { .. } => (0..n).map(f).collect(),
        }
    }
}

impl Default for Execution {
    fn default() -> Self {
        Execution::from_hint(0)
    }
}
