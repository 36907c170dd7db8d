//! Thread-safe environment: quotients are built at most once per cell and
//! shared read-only between workers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use kappa_core::chowq::QuotientSpace;
use kappa_core::env::{build_quotient_in, Env, Fault};
use kappa_core::Error;

type Slot = Arc<Mutex<Option<Arc<QuotientSpace>>>>;

#[derive(Default)]
pub struct SharedEnv {
    faults: Vec<Fault>,
    cache: RwLock<HashMap<(usize, i32), Slot>>,
}

impl SharedEnv {
    pub fn new(faults: Vec<Fault>) -> Self {
        SharedEnv { faults, cache: RwLock::default() }
    }

    fn slot(&self, key: (usize, i32)) -> Slot {
        if let Some(s) = self.cache.read().unwrap().get(&key) {
            return s.clone();
        }
        self.cache.write().unwrap().entry(key).or_default().clone()
    }
}

impl Env for SharedEnv {
    fn faults(&self) -> &[Fault] {
        &self.faults
    }

    fn quotient(&self, n: usize, d: i32) -> Result<Arc<QuotientSpace>, Error> {
        let slot = self.slot((n, d));
        // holding the per-cell lock while building means concurrent callers
        // wait for one build instead of racing
        let mut guard = slot.lock().unwrap();
        if let Some(q) = guard.as_ref() {
            return Ok(q.clone());
        }
        let q = Arc::new(build_quotient_in(self, n, d)?);
        *guard = Some(q.clone());
        Ok(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rayon::prelude::*;

    #[test]
    fn concurrent_requests_share_one_build() {
        let env = SharedEnv::default();
        let qs: Vec<_> = (0..16).into_par_iter().map(|_| env.quotient(6, 1).unwrap()).collect();
        assert!(qs.iter().all(|q| Arc::ptr_eq(q, &qs[0])));
        assert_eq!(qs[0].dim(), 16);
    }

    #[test]
    fn invalid_cells_are_not_cached() {
        let env = SharedEnv::default();
        assert!(env.quotient(5, 3).is_err());
        assert!(env.quotient(5, 3).is_err());
    }
}
