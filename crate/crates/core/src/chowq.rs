//! The free spaces `ℚSP_{d,n}` on `(d+3)`-block set partitions, the
//! four-term relation subspace `R_{d,n}`, the quotient `Q_{d,n}`, and the
//! lifted forgetful maps `π̃_*`, `π̃^*`.
//!
//! Quotient classes are kept as canonical representatives: vectors reduced
//! against the echelonized relations. Those are supported on the non-pivot
//! partitions, which therefore form the quotient basis.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::exactlin::{echelonize, FormalSum, Rational, SparseMatrix, Subspace};
use crate::setcomb::{enumerate_partitions, SetPartition};
use crate::Error;

/// An element of `ℚSP_{d,n}`: every label has exactly `d+3` blocks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpVector {
    n: usize,
    d: i32,
    sum: FormalSum<SetPartition>,
}

impl SpVector {
    pub fn new(n: usize, d: i32, sum: FormalSum<SetPartition>) -> Result<Self, Error> {
        check_free_range(n, d)?;
        for p in sum.labels() {
            if p.n() != n {
                return Err(Error::GroundSetMismatch { expected: n, found: p.n() });
            }
            if p.num_blocks() as i32 != d + 3 {
                return Err(Error::Range(format!("partition {p} does not have {} blocks", d + 3)));
            }
        }
        Ok(SpVector { n, d, sum })
    }

    pub(crate) fn new_unchecked(n: usize, d: i32, sum: FormalSum<SetPartition>) -> Self {
        SpVector { n, d, sum }
    }

    pub fn zero(n: usize, d: i32) -> Self {
        SpVector { n, d, sum: FormalSum::zero() }
    }

    pub fn basis(p: SetPartition) -> Self {
        let n = p.n();
        let d = p.num_blocks() as i32 - 3;
        SpVector { n, d, sum: FormalSum::basis(p) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> i32 {
        self.d
    }

    pub fn sum(&self) -> &FormalSum<SetPartition> {
        &self.sum
    }

    pub fn into_sum(self) -> FormalSum<SetPartition> {
        self.sum
    }

    pub fn is_zero(&self) -> bool {
        self.sum.is_zero()
    }
}

fn check_free_range(n: usize, d: i32) -> Result<(), Error> {
    if n < 1 || d < -1 {
        return Err(Error::Range(format!("QSP_(d,n) is used for n >= 1 and d >= -1 (got n={n}, d={d})")));
    }
    Ok(())
}

/// `SP_{d,n}` in canonical order; empty when `d+3 > n`.
pub fn partitions(n: usize, d: i32) -> Result<Vec<SetPartition>, Error> {
    check_free_range(n, d)?;
    let parts = (d + 3) as usize;
    if parts > n {
        return Ok(Vec::new());
    }
    enumerate_partitions(n, parts)
}

/// Generators of `R_{d,n}`: for every partition `{P₁,…,P_{d+4}}` and every
/// ordered choice of four distinct parts,
/// `{P₁∪P₂,P₃,P₄,…} + {P₁,P₂,P₃∪P₄,…} − {P₁∪P₃,P₂,P₄,…} − {P₁,P₃,P₂∪P₄,…}`.
///
/// Generators are sign-normalized (leading coefficient +1) and
/// deduplicated, then returned in sorted order.
pub fn relation_generators(n: usize, d: i32) -> Result<Vec<SpVector>, Error> {
    if n < 4 || d < 1 || d > n as i32 - 4 {
        return Err(Error::Range(format!("relations R_(d,n) need n >= 4 and 1 <= d <= n-4 (got n={n}, d={d})")));
    }
    let k = (d + 4) as usize;
    let one = Rational::ONE;
    let minus = -Rational::ONE;
    let mut seen: BTreeSet<FormalSum<SetPartition>> = BTreeSet::new();
    for p in enumerate_partitions(n, k)? {
        for a in 0..k {
            for b in 0..k {
                if b == a {
                    continue;
                }
                for c in 0..k {
                    if c == a || c == b {
                        continue;
                    }
                    for e in 0..k {
                        if e == a || e == b || e == c {
                            continue;
                        }
                        let mut r = FormalSum::zero();
                        r.add_term(p.merge(a, b), &one);
                        r.add_term(p.merge(c, e), &one);
                        r.add_term(p.merge(a, c), &minus);
                        r.add_term(p.merge(b, e), &minus);
                        if !r.is_zero() {
                            seen.insert(r.sign_normalized());
                        }
                    }
                }
            }
        }
    }
    Ok(seen.into_iter().map(|s| SpVector::new_unchecked(n, d, s)).collect())
}

/// `Q_{d,n} = ℚSP_{d,n} / R_{d,n}`.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    n: usize,
    d: i32,
    relations: Subspace<SetPartition>,
}

impl QuotientSpace {
    /// Quotient of `ℚSP_{d,n}` by the span of `generators`.
    pub fn from_generators(n: usize, d: i32, generators: &[SpVector]) -> Result<Self, Error> {
        let universe = partitions(n, d)?;
        for g in generators {
            if g.n != n || g.d != d {
                return Err(Error::Range(format!(
                    "generator lives in QSP_({},{}), expected QSP_({d},{n})",
                    g.d, g.n
                )));
            }
        }
        let sums: Vec<FormalSum<SetPartition>> = generators.iter().map(|g| g.sum.clone()).collect();
        let relations = echelonize(&sums, universe)?;
        Ok(QuotientSpace { n, d, relations })
    }

    /// The zero space at a cell with no `(d+3)`-block partitions.
    pub fn empty(n: usize, d: i32) -> Result<Self, Error> {
        if (d + 3) as usize <= n {
            return Err(Error::Range(format!("SP_({d},{n}) is not empty")));
        }
        Self::from_generators(n, d, &[])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> i32 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.relations.codim()
    }

    pub fn num_partitions(&self) -> usize {
        self.relations.universe().len()
    }

    pub fn rank_relations(&self) -> usize {
        self.relations.rank()
    }

    pub fn relations(&self) -> &Subspace<SetPartition> {
        &self.relations
    }

    /// All of `SP_{d,n}`.
    pub fn partitions(&self) -> &[SetPartition] {
        self.relations.universe()
    }

    /// Partitions whose classes form a basis of the quotient; canonical
    /// representatives are supported on these.
    pub fn basis(&self) -> Vec<SetPartition> {
        self.relations.free_labels()
    }

    /// Canonical representative of the class of `v`.
    pub fn reduce(&self, v: &SpVector) -> Result<SpVector, Error> {
        self.check(v)?;
        Ok(SpVector::new_unchecked(self.n, self.d, self.relations.reduce(&v.sum)?))
    }

    /// Whether `v` is zero in the quotient.
    pub fn is_zero_class(&self, v: &SpVector) -> Result<bool, Error> {
        self.check(v)?;
        self.relations.contains(&v.sum)
    }

    fn check(&self, v: &SpVector) -> Result<(), Error> {
        if v.n != self.n || v.d != self.d {
            return Err(Error::Range(format!(
                "vector in QSP_({},{}) used with Q_({},{})",
                v.d, v.n, self.d, self.n
            )));
        }
        Ok(())
    }
}

/// Builds `Q_{d,n}` for `n ≥ 4`, `1 ≤ d ≤ n−3`. At `d = n−3` there are no
/// relations.
pub fn build_quotient(n: usize, d: i32) -> Result<QuotientSpace, Error> {
    check_quotient_range(n, d)?;
    let gens = if d <= n as i32 - 4 { relation_generators(n, d)? } else { Vec::new() };
    QuotientSpace::from_generators(n, d, &gens)
}

pub fn check_quotient_range(n: usize, d: i32) -> Result<(), Error> {
    if n < 4 || d < 1 || d > n as i32 - 3 {
        return Err(Error::Range(format!("Q_(d,n) needs n >= 4 and 1 <= d <= n-3 (got n={n}, d={d})")));
    }
    Ok(())
}

/// `π̃_*`: `ℚSP_{d,n+1} → ℚSP_{d,n}`. Partitions with `{n+1}` as a block go
/// to zero; otherwise `n+1` is deleted from its block.
pub fn pushforward_lift(v: &SpVector) -> Result<SpVector, Error> {
    if v.n < 2 {
        return Err(Error::Range("pushforward needs n+1 >= 2".into()));
    }
    let sum = v.sum.map_labels(SetPartition::delete_last);
    Ok(SpVector::new_unchecked(v.n - 1, v.d, sum))
}

/// `π̃^*`: `ℚSP_{d,n} → ℚSP_{d+1,n+1}`, `Π ↦ Π ∪ {{n+1}}`.
pub fn pullback_lift(v: &SpVector) -> Result<SpVector, Error> {
    if v.n >= crate::setcomb::MAX_N {
        return Err(Error::Range("pullback would exceed the supported ground set".into()));
    }
    let sum = v.sum.map_labels(|p| Some(p.with_new_singleton()));
    Ok(SpVector::new_unchecked(v.n + 1, v.d + 1, sum))
}

/// The two lifted forgetful maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lift {
    Pushforward,
    Pullback,
}

impl Lift {
    pub fn apply(self, v: &SpVector) -> Result<SpVector, Error> {
        match self {
            Lift::Pushforward => pushforward_lift(v),
            Lift::Pullback => pullback_lift(v),
        }
    }

    /// `(n, d)` of the target given the source.
    pub fn target_cell(self, n: usize, d: i32) -> (usize, i32) {
        match self {
            Lift::Pushforward => (n - 1, d),
            Lift::Pullback => (n + 1, d + 1),
        }
    }
}

/// Matrix of the map induced by `op` between quotients: row `i` is the
/// canonical representative (over the target basis) of the image of the
/// `i`-th source basis partition.
pub fn quotient_map_matrix(
    op: Lift,
    source: &QuotientSpace,
    target: &QuotientSpace,
) -> Result<SparseMatrix<SetPartition>, Error> {
    let (tn, td) = op.target_cell(source.n, source.d);
    if (target.n, target.d) != (tn, td) {
        return Err(Error::Range(format!(
            "target Q_({},{}) does not match Q_({td},{tn})",
            target.d, target.n
        )));
    }
    let rows = source
        .basis()
        .into_iter()
        .map(|p| Ok(target.reduce(&op.apply(&SpVector::basis(p))?)?.into_sum()))
        .collect::<Result<Vec<_>, Error>>()?;
    SparseMatrix::new(target.basis(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rank;
    use alloc::vec;

    fn sp(text: &str) -> SetPartition {
        SetPartition::parse(text).unwrap()
    }

    #[test]
    fn instantiated_relation_is_generated() {
        let gens = relation_generators(5, 1).unwrap();
        let mut expected = FormalSum::zero();
        expected.add_term(sp("1,2|3|4|5"), &Rational::ONE);
        expected.add_term(sp("1|2|3,4|5"), &Rational::ONE);
        expected.add_term(sp("1,3|2|4|5"), &-Rational::ONE);
        expected.add_term(sp("1|2,4|3|5"), &-Rational::ONE);
        let expected = expected.sign_normalized();
        assert!(gens.iter().any(|g| g.sum() == &expected));
        // five 4-subsets of parts, three relations each up to sign
        assert_eq!(gens.len(), 15);
    }

    #[test]
    fn relation_range() {
        assert!(relation_generators(4, 1).is_err());
        assert!(relation_generators(6, 0).is_err());
        assert!(relation_generators(6, 3).is_err());
    }

    #[test]
    fn quotient_dimensions() {
        let q41 = build_quotient(4, 1).unwrap();
        assert_eq!((q41.dim(), q41.num_partitions(), q41.rank_relations()), (1, 1, 0));
        let q51 = build_quotient(5, 1).unwrap();
        assert_eq!((q51.dim(), q51.num_partitions(), q51.rank_relations()), (5, 10, 5));
        let q61 = build_quotient(6, 1).unwrap();
        assert_eq!((q61.dim(), q61.rank_relations()), (16, 49));
        assert_eq!(build_quotient(6, 2).unwrap().dim(), 6);
        assert!(build_quotient(5, 3).is_err());
        assert!(build_quotient(5, 0).is_err());
    }

    #[test]
    fn lift_examples() {
        let v = SpVector::basis(sp("1|2,5|3|4"));
        assert_eq!(pushforward_lift(&v).unwrap(), SpVector::basis(SetPartition::singletons(4)));
        let w = SpVector::basis(sp("1,2|3|4|5"));
        assert!(pushforward_lift(&w).unwrap().is_zero());
        let mut mix = FormalSum::zero();
        mix.add_term(sp("1|2,5|3|4"), &Rational::from(2));
        mix.add_term(sp("1,2|3|4|5"), &Rational::from(7));
        let out = pushforward_lift(&SpVector::new(5, 1, mix).unwrap()).unwrap();
        assert_eq!(out.sum(), &FormalSum::term(SetPartition::singletons(4), Rational::from(2)));

        let s4 = SpVector::basis(SetPartition::singletons(4));
        assert_eq!(pullback_lift(&s4).unwrap(), SpVector::basis(SetPartition::singletons(5)));
        let three = SpVector::new(4, 1, FormalSum::term(SetPartition::singletons(4), Rational::from(3))).unwrap();
        assert_eq!(
            pullback_lift(&three).unwrap().sum(),
            &FormalSum::term(SetPartition::singletons(5), Rational::from(3))
        );
    }

    #[test]
    fn push_after_pull_vanishes() {
        for p in partitions(6, 1).unwrap() {
            let v = SpVector::basis(p);
            assert!(pushforward_lift(&pullback_lift(&v).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn induced_maps() {
        let q51 = build_quotient(5, 1).unwrap();
        let q41 = build_quotient(4, 1).unwrap();
        let q52 = build_quotient(5, 2).unwrap();
        let push = quotient_map_matrix(Lift::Pushforward, &q51, &q41).unwrap();
        assert_eq!(rank(&push), 1);
        let pull = quotient_map_matrix(Lift::Pullback, &q41, &q52).unwrap();
        assert_eq!(rank(&pull), 1);
        assert!(quotient_map_matrix(Lift::Pullback, &q41, &q51).is_err());

        let q42 = QuotientSpace::empty(4, 2).unwrap();
        let comp = quotient_map_matrix(Lift::Pushforward, &q52, &q42).unwrap();
        assert!(comp.is_zero());
        assert_eq!(q42.dim(), 0);
    }

    #[test]
    fn spvector_validation() {
        let mut s = FormalSum::zero();
        s.add_term(sp("1,2|3|4"), &Rational::ONE);
        assert!(SpVector::new(4, 1, s.clone()).is_err());
        assert!(SpVector::new(4, 0, s.clone()).is_ok());
        assert!(SpVector::new(5, 0, s).is_err());
        assert_eq!(partitions(4, 2).unwrap(), vec![]);
    }
}
