//! Worker pools shared by the engines.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// A pool of exactly `workers` threads, built once per size and reused.
pub fn pool(workers: usize) -> Result<Arc<ThreadPool>> {
    if workers == 0 {
        return Err(Error::InvalidParameter {
            name: "workers",
            value: 0.0,
            range: ">= 1",
        });
    }
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    if let Some(p) = pools.get(&workers) {
        return Ok(p.clone());
    }
    let p = Arc::new(
        ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(move |i| format!("fractx-{workers}-{i}"))
            .build()
            .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?,
    );
    pools.insert(workers, p.clone());
    Ok(p)
}

/// Runs `f` inside the pool for `workers`.
pub fn install<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(pool(workers)?.install(f))
}
