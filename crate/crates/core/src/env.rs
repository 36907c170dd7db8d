//! The evaluation environment for checks: where quotients come from and
//! which faults, if any, are injected into relations and the pairing.
//!
//! Checks only see relations, the pairing and `φ̃` through an [`Env`], so a
//! single mutated sign or pairing entry propagates to every check that
//! depends on it.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;
use core::str::FromStr;

use crate::chowq::{self, QuotientSpace, SpVector};
use crate::exactlin::{FormalSum, Rational};
use crate::kappa::{self, in_kappa_index, pair_unchecked, KVector};
use crate::setcomb::{SetPartition, Subset};
use crate::Error;

/// A deliberate single-point corruption of the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Negates one term of one relation generator of `R_{d,n}`. Generators
    /// are indexed in the sorted order of `relation_generators`, terms in
    /// label order.
    FlipRelationSign { n: usize, d: i32, generator: usize, term: usize },
    /// Flips `⟨Π,T⟩` for one pair.
    FlipPairing { partition: SetPartition, subset: Subset },
}

impl Fault {
    /// Checks that the fault refers to something that exists.
    pub fn validate(&self) -> Result<(), Error> {
        match self {
            Fault::FlipRelationSign { n, d, generator, term } => {
                let gens = chowq::relation_generators(*n, *d)?;
                let g = gens.get(*generator).ok_or_else(|| {
                    Error::Range(format!("R_({d},{n}) has {} generators, no index {generator}", gens.len()))
                })?;
                if *term >= g.sum().len() {
                    return Err(Error::Range(format!("generator {generator} has {} terms", g.sum().len())));
                }
                Ok(())
            }
            Fault::FlipPairing { partition, subset } => {
                if partition.n() != subset.n() {
                    return Err(Error::GroundSetMismatch { expected: partition.n(), found: subset.n() });
                }
                // only entries that φ̃ can see are meaningful
                let d = partition.num_blocks() as i32 - 3;
                if d < -1 || !in_kappa_index(subset, d) {
                    return Err(Error::Range(format!("{{{subset}}} is not in the kappa index set paired with {partition}")));
                }
                Ok(())
            }
        }
    }
}

/// Text forms: `relation-sign:N:D:GEN:TERM` and `pairing:PARTITION:SUBSET`,
/// e.g. `pairing:1,2|3|4|5:1,3,4,5`.
impl FromStr for Fault {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let bad = || Error::Parse { kind: "fault", text: text.to_string() };
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["relation-sign", n, d, g, t] => Ok(Fault::FlipRelationSign {
                n: n.parse().map_err(|_| bad())?,
                d: d.parse().map_err(|_| bad())?,
                generator: g.parse().map_err(|_| bad())?,
                term: t.parse().map_err(|_| bad())?,
            }),
            ["pairing", p, t] => {
                let partition = SetPartition::parse(p)?;
                let subset = Subset::parse(partition.n(), t)?;
                Ok(Fault::FlipPairing { partition, subset })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::FlipRelationSign { n, d, generator, term } => write!(f, "relation-sign:{n}:{d}:{generator}:{term}"),
            Fault::FlipPairing { partition, subset } => write!(f, "pairing:{partition}:{subset}"),
        }
    }
}

/// Source of relations, quotients, the pairing and `φ̃` for the checks.
pub trait Env {
    fn faults(&self) -> &[Fault];

    /// `Q_{d,n}` for `n ≥ 4`, `1 ≤ d ≤ n−3`, built from
    /// [`Env::relation_generators`]. Implementations may cache.
    fn quotient(&self, n: usize, d: i32) -> Result<Arc<QuotientSpace>, Error>;

    fn relation_generators(&self, n: usize, d: i32) -> Result<Vec<SpVector>, Error> {
        let mut gens = chowq::relation_generators(n, d)?;
        for f in self.faults() {
            if let Fault::FlipRelationSign { n: fn_, d: fd, generator, term } = f {
                if (*fn_, *fd) != (n, d) {
                    continue;
                }
                if let Some(g) = gens.get_mut(*generator) {
                    if let Some((label, c)) = g.sum().iter().nth(*term).map(|(l, c)| (l.clone(), c.clone())) {
                        let mut sum = g.sum().clone();
                        sum.add_term(label, &(-Rational::from(2) * &c));
                        *g = SpVector::new_unchecked(n, d, sum);
                    }
                }
            }
        }
        Ok(gens)
    }

    fn pair(&self, p: &SetPartition, t: &Subset) -> bool {
        let flipped = self
            .faults()
            .iter()
            .any(|f| matches!(f, Fault::FlipPairing { partition, subset } if partition == p && subset == t));
        pair_unchecked(p, t) != flipped
    }

    /// `φ̃` consistent with [`Env::pair`].
    fn phi_tilde(&self, v: &SpVector) -> Result<KVector, Error> {
        let base = kappa::phi_tilde(v)?;
        let mut faults = self.faults().iter().filter_map(|f| match f {
            Fault::FlipPairing { partition, subset }
                if partition.n() == v.n() && v.sum().contains(partition) && in_kappa_index(subset, v.d()) =>
            {
                Some((partition, subset))
            }
            _ => None,
        });
        let Some(first) = faults.next() else {
            return Ok(base);
        };
        let mut sum: FormalSum<Subset> = base.into_sum();
        for (p, t) in core::iter::once(first).chain(faults) {
            let c = v.sum().coeff(p);
            let delta = if pair_unchecked(p, t) { -c } else { c };
            sum.add_term(*t, &delta);
        }
        Ok(KVector::new_unchecked(v.n(), v.d(), sum))
    }
}

/// Builds `Q_{d,n}` from the environment's relations.
pub fn build_quotient_in<E: Env + ?Sized>(env: &E, n: usize, d: i32) -> Result<QuotientSpace, Error> {
    chowq::check_quotient_range(n, d)?;
    let gens = if d <= n as i32 - 4 { env.relation_generators(n, d)? } else { Vec::new() };
    QuotientSpace::from_generators(n, d, &gens)
}

/// Single-threaded environment with a quotient cache.
#[derive(Default)]
pub struct LocalEnv {
    faults: Vec<Fault>,
    cache: RefCell<BTreeMap<(usize, i32), Arc<QuotientSpace>>>,
}

impl LocalEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_faults(faults: Vec<Fault>) -> Self {
        LocalEnv { faults, cache: RefCell::default() }
    }
}

impl Env for LocalEnv {
    fn faults(&self) -> &[Fault] {
        &self.faults
    }

    fn quotient(&self, n: usize, d: i32) -> Result<Arc<QuotientSpace>, Error> {
        if let Some(q) = self.cache.borrow().get(&(n, d)) {
            return Ok(q.clone());
        }
        let q = Arc::new(build_quotient_in(self, n, d)?);
        self.cache.borrow_mut().insert((n, d), q.clone());
        Ok(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_text_roundtrip() {
        for text in ["relation-sign:6:1:3:2", "pairing:1,2|3|4|5:1,3,4,5"] {
            let f: Fault = text.parse().unwrap();
            assert_eq!(alloc::format!("{f}"), text);
            f.validate().unwrap();
        }
        assert!("pairing:1,2|3:9".parse::<Fault>().is_err());
        assert!("relation-sign:6:1".parse::<Fault>().is_err());
        assert!("relation-sign:6:1:100000:0".parse::<Fault>().unwrap().validate().is_err());
        // |T| must have the parity of the block count
        assert!("pairing:1,2|3|4|5:1,3,4".parse::<Fault>().unwrap().validate().is_err());
        assert!("pairing:1,2,3,4:1,2,3,4".parse::<Fault>().unwrap().validate().is_err());
    }

    #[test]
    fn sign_fault_changes_one_generator() {
        let clean = LocalEnv::new().relation_generators(5, 1).unwrap();
        let env = LocalEnv::with_faults(alloc::vec!["relation-sign:5:1:0:1".parse().unwrap()]);
        let dirty = env.relation_generators(5, 1).unwrap();
        let changed: Vec<usize> = (0..clean.len()).filter(|&i| clean[i] != dirty[i]).collect();
        assert_eq!(changed, alloc::vec![0]);
        let (l, c) = clean[0].sum().iter().nth(1).unwrap();
        assert_eq!(dirty[0].sum().coeff(l), -c.clone());
    }

    #[test]
    fn pairing_fault_reaches_phi() {
        let p = SetPartition::parse("1,2|3|4|5").unwrap();
        let t = Subset::parse(5, "1,3,4,5").unwrap();
        let env = LocalEnv::with_faults(alloc::vec![Fault::FlipPairing { partition: p.clone(), subset: t }]);
        assert!(!env.pair(&p, &t));
        let v = SpVector::basis(p.clone());
        let clean = kappa::phi_tilde(&v).unwrap();
        let dirty = env.phi_tilde(&v).unwrap();
        assert_eq!(clean.sum().coeff(&t), Rational::ONE);
        assert_eq!(dirty.sum().coeff(&t), Rational::ZERO);
        assert_eq!(clean.sum().len(), dirty.sum().len() + 1);
    }

    #[test]
    fn quotients_are_cached() {
        let env = LocalEnv::new();
        let a = env.quotient(6, 1).unwrap();
        let b = env.quotient(6, 1).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.dim(), 16);
        assert!(env.quotient(6, 4).is_err());
    }
}
