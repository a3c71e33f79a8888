//! Replication runner: maps a per-replication closure over `0..reps` and
//! returns results in replication order, so the output never depends on
//! how the work was scheduled.

use crate::error::{config_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Data-parallel over replications (rayon). Falls back to sequential
    /// when the `parallel` feature is off.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

pub fn replicate<T, F>(reps: u64, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..reps).into_par_iter().map(f).collect()
        }
        _ => (0..reps).map(f).collect(),
    }
}

/// Runs `job` on a dedicated pool of `threads` workers (sequentially when
/// parallelism is compiled out). Thread count affects speed only.
pub fn with_threads<T, F>(threads: usize, job: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> Result<T> + Send,
{
    if threads == 0 {
        return Err(config_err!("thread count must be positive"));
    }
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| config_err!("cannot start {threads} worker threads: {e}"))?;
        pool.install(job)
    }
    #[cfg(not(feature = "parallel"))]
    job()
}
