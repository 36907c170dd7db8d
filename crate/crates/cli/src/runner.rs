//! Parallel execution of verification cells. Results come back in the
//! canonical (check, cell) order no matter how the work was scheduled.

use kappa_core::verify::{check_n_max, run_cell, Check, CheckReport, Params};
use kappa_core::Error;
use rayon::prelude::*;

use crate::shared::SharedEnv;

pub fn work_items(checks: &[Check], n_max: usize) -> Result<Vec<(Check, Params)>, Error> {
    check_n_max(n_max)?;
    Ok(checks.iter().flat_map(|&c| c.cells(n_max).into_iter().map(move |p| (c, p))).collect())
}

/// Runs `checks` over all cells up to `n_max` on `threads` workers
/// (0 = one per core).
pub fn run_parallel(env: &SharedEnv, checks: &[Check], n_max: usize, threads: usize) -> Result<Vec<CheckReport>, Error> {
    let items = work_items(checks, n_max)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Range(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(|(c, p)| run_cell(env, *c, p)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kappa_core::env::LocalEnv;
    use kappa_core::verify::run_all;

    #[test]
    fn parallel_matches_serial() {
        let serial = run_all(&LocalEnv::new(), 5).unwrap();
        let parallel = run_parallel(&SharedEnv::default(), &Check::ALL, 5, 4).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(work_items(&Check::ALL, 9).is_err());
        assert!(work_items(&Check::ALL, 3).is_err());
    }
}
