//! Query-level parallelism on a rayon pool of fixed size.

use rayon::prelude::*;
use varskip_core::bench::{QueryResult, QueryRunner};

use crate::{AppError, AppResult};

pub struct RayonRunner {
    pool: rayon::ThreadPool,
}

impl RayonRunner {
    /// `None` uses the available hardware parallelism.
    pub fn new(workers: Option<usize>) -> AppResult<Self> {
        if workers == Some(0) {
            return Err(AppError::Usage("workers must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.unwrap_or(0))
            .build()
            .map_err(|e| AppError::Usage(format!("cannot start worker pool: {e}")))?;
        Ok(RayonRunner { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Maps `f` over `0..n` on the pool, keeping index order.
    pub fn map<T, E, F>(&self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

impl QueryRunner for RayonRunner {
    fn run_all(
        &self,
        n: usize,
        f: &(dyn Fn(usize) -> varskip_core::Result<QueryResult> + Sync),
    ) -> varskip_core::Result<Vec<QueryResult>> {
        self.map(n, f)
    }
}
