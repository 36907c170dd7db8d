//! The kappa side: free spaces `ℚK^d_n`, the pairing `⟨Π,T⟩` with set
//! partitions, the maps `φ̃`, `α`, `β`, and the parity machinery (`odd`,
//! `even`, `γ`, `π̃′_*`) on oriented bipartitions.
//!
//! A `KVector` is read directly as a formal combination of kappa pullback
//! classes, one per index subset.

use alloc::format;
use alloc::vec::Vec;

use crate::chowq::{QuotientSpace, SpVector};
use crate::exactlin::{FormalSum, Rational, SparseMatrix};
use crate::setcomb::{enumerate_kappa_index, enumerate_parity, submasks, OrientedBipartition, SetPartition, Subset};
use crate::Error;

/// An element of `ℚK^d_n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KVector {
    n: usize,
    d: i32,
    sum: FormalSum<Subset>,
}

pub(crate) fn in_kappa_index(t: &Subset, d: i32) -> bool {
    let k = d + 3;
    let len = t.len() as i32;
    len >= k && (len - k) % 2 == 0
}

impl KVector {
    pub fn new(n: usize, d: i32, sum: FormalSum<Subset>) -> Result<Self, Error> {
        if d < -3 {
            return Err(Error::Range(format!("K^d_n needs d >= -3 (got {d})")));
        }
        for t in sum.labels() {
            if t.n() != n {
                return Err(Error::GroundSetMismatch { expected: n, found: t.n() });
            }
            if !in_kappa_index(t, d) {
                return Err(Error::Range(format!("subset {{{t}}} is not in K^{d}_{n}")));
            }
        }
        Ok(KVector { n, d, sum })
    }

    pub(crate) fn new_unchecked(n: usize, d: i32, sum: FormalSum<Subset>) -> Self {
        KVector { n, d, sum }
    }

    pub fn zero(n: usize, d: i32) -> Self {
        KVector { n, d, sum: FormalSum::zero() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> i32 {
        self.d
    }

    pub fn sum(&self) -> &FormalSum<Subset> {
        &self.sum
    }

    pub fn into_sum(self) -> FormalSum<Subset> {
        self.sum
    }

    pub fn is_zero(&self) -> bool {
        self.sum.is_zero()
    }
}

/// An element of `ℚO_n` (`odd`) or `ℚE_n`. The empty set is an even label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParityVector {
    n: usize,
    odd: bool,
    sum: FormalSum<Subset>,
}

impl ParityVector {
    pub fn new(n: usize, odd: bool, sum: FormalSum<Subset>) -> Result<Self, Error> {
        for t in sum.labels() {
            if t.n() != n {
                return Err(Error::GroundSetMismatch { expected: n, found: t.n() });
            }
            if (t.len() % 2 == 1) != odd {
                return Err(Error::Range(format!("subset {{{t}}} has the wrong parity")));
            }
        }
        Ok(ParityVector { n, odd, sum })
    }

    pub fn zero(n: usize, odd: bool) -> Self {
        ParityVector { n, odd, sum: FormalSum::zero() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn sum(&self) -> &FormalSum<Subset> {
        &self.sum
    }

    pub fn into_sum(self) -> FormalSum<Subset> {
        self.sum
    }

    pub fn is_zero(&self) -> bool {
        self.sum.is_zero()
    }
}

/// `⟨Π,T⟩`: whether every block of `p` meets `t`.
pub fn pair(p: &SetPartition, t: &Subset) -> Result<bool, Error> {
    if p.n() != t.n() {
        return Err(Error::GroundSetMismatch { expected: p.n(), found: t.n() });
    }
    Ok(pair_unchecked(p, t))
}

pub(crate) fn pair_unchecked(p: &SetPartition, t: &Subset) -> bool {
    p.block_masks().iter().all(|&b| t.meets(b))
}

/// `φ̃(Π)` as a list of subsets: the `T ∈ K^d_n` met by every block.
///
/// Such `T` are exactly unions of one nonempty subset per block; only the
/// parity filter remains since `|T| ≥ #blocks = d+3` holds automatically.
pub(crate) fn compatible_subsets(p: &SetPartition) -> Vec<Subset> {
    let want_odd = p.num_blocks() % 2 == 1;
    let mut acc: Vec<u32> = alloc::vec![0];
    for &b in p.block_masks() {
        let mut next = Vec::with_capacity(acc.len() << b.count_ones());
        for &m in &acc {
            next.extend(submasks(b).filter(|&s| s != 0).map(|s| m | s));
        }
        acc = next;
    }
    acc.into_iter()
        .filter(|m| (m.count_ones() % 2 == 1) == want_odd)
        .map(|m| Subset::from_mask_unchecked(p.n(), m))
        .collect()
}

/// `φ̃_{d,n}(v) = Σ_Π c_Π Σ_{T ∈ K^d_n} ⟨Π,T⟩ T`.
pub fn phi_tilde(v: &SpVector) -> Result<KVector, Error> {
    if v.d() < -1 {
        return Err(Error::Range(format!("phi_tilde needs d >= -1 (got {})", v.d())));
    }
    let sum = v.sum().map_linear(|p| compatible_subsets(p).into_iter().map(|t| (t, Rational::ONE)).collect());
    Ok(KVector::new_unchecked(v.n(), v.d(), sum))
}

/// `φ̃` by the defining double loop over `K^d_n`; slow, kept as a reference.
pub fn phi_tilde_naive(v: &SpVector) -> Result<KVector, Error> {
    let index = enumerate_kappa_index(v.n(), v.d())?;
    let sum = v.sum().map_linear(|p| {
        index.iter().filter(|t| pair_unchecked(p, t)).map(|t| (*t, Rational::ONE)).collect()
    });
    Ok(KVector::new_unchecked(v.n(), v.d(), sum))
}

/// Matrix of `φ_{d,n}` in quotient coordinates: one row per basis partition
/// of `q` (in basis order), holding `φ̃` of that partition over `K^d_n`.
///
/// Rows are images of canonical representatives; the map is well defined on
/// the quotient exactly when `φ̃` kills the relations, which is checked
/// separately.
pub fn phi_matrix(q: &QuotientSpace) -> Result<SparseMatrix<Subset>, Error> {
    let rows = q
        .basis()
        .into_iter()
        .map(|p| phi_tilde(&SpVector::basis(p)).map(KVector::into_sum))
        .collect::<Result<Vec<_>, _>>()?;
    SparseMatrix::new(enumerate_kappa_index(q.n(), q.d())?, rows)
}

/// `M[Π,T] = ⟨Π,T⟩` for `Π` in the given rows and `T ∈ K^d_n`.
pub fn pairing_rows_with<F>(rows: &[SetPartition], n: usize, d: i32, mut pair: F) -> Result<SparseMatrix<Subset>, Error>
where
    F: FnMut(&SetPartition, &Subset) -> bool,
{
    let index = enumerate_kappa_index(n, d)?;
    let rows = rows
        .iter()
        .map(|p| index.iter().filter(|t| pair(p, t)).map(|t| (*t, Rational::ONE)).collect())
        .collect();
    SparseMatrix::new(index, rows)
}

/// The pairing restricted to the quotient basis of `q`.
pub fn pairing_matrix(q: &QuotientSpace) -> Result<SparseMatrix<Subset>, Error> {
    pairing_rows_with(&q.basis(), q.n(), q.d(), pair_unchecked)
}

/// The pairing on all of `SP_{d,n}`, before passing to the quotient.
pub fn full_pairing_matrix(q: &QuotientSpace) -> Result<SparseMatrix<Subset>, Error> {
    pairing_rows_with(q.partitions(), q.n(), q.d(), pair_unchecked)
}

fn alpha_sum(sum: &FormalSum<Subset>) -> FormalSum<Subset> {
    sum.map_labels(|t| Some(t.extend_with_next()))
}

fn beta_sum(sum: &FormalSum<Subset>) -> FormalSum<Subset> {
    sum.map_labels(|t| if t.contains(t.n()) { None } else { Some(t.restrict()) })
}

/// `α: ℚK^d_n → ℚK^{d+1}_{n+1}`, `T ↦ T ∪ {n+1}`.
pub fn alpha(v: &KVector) -> Result<KVector, Error> {
    check_room(v.n)?;
    Ok(KVector::new_unchecked(v.n + 1, v.d + 1, alpha_sum(&v.sum)))
}

/// `β: ℚK^d_{n+1} → ℚK^d_n`, killing every `T` that contains `n+1`.
pub fn beta(v: &KVector) -> Result<KVector, Error> {
    if v.n < 1 {
        return Err(Error::Range("beta needs n+1 >= 1".into()));
    }
    Ok(KVector::new_unchecked(v.n - 1, v.d, beta_sum(&v.sum)))
}

/// `α` between parity spaces: `ℚE_n → ℚO_{n+1}` and `ℚO_n → ℚE_{n+1}`.
pub fn alpha_parity(v: &ParityVector) -> Result<ParityVector, Error> {
    check_room(v.n)?;
    Ok(ParityVector { n: v.n + 1, odd: !v.odd, sum: alpha_sum(&v.sum) })
}

/// `β` between parity spaces, preserving parity.
pub fn beta_parity(v: &ParityVector) -> Result<ParityVector, Error> {
    if v.n < 1 {
        return Err(Error::Range("beta needs n+1 >= 1".into()));
    }
    Ok(ParityVector { n: v.n - 1, odd: v.odd, sum: beta_sum(&v.sum) })
}

fn check_room(n: usize) -> Result<(), Error> {
    if n >= crate::setcomb::MAX_N {
        return Err(Error::Range("map would exceed the supported ground set".into()));
    }
    Ok(())
}

fn signed_subsets(out: &mut FormalSum<Subset>, n: usize, side: u32, odd: bool, coeff: &Rational) {
    for s in submasks(side) {
        if (s.count_ones() % 2 == 1) == odd {
            out.add_term(Subset::from_mask_unchecked(n, s), coeff);
        }
    }
}

/// `odd_n((P₁,P₂)) = Σ_{T⊆P₁ odd} (−T) + Σ_{T⊆P₂ odd} T`.
pub fn odd_map(b: &OrientedBipartition) -> ParityVector {
    let mut sum = FormalSum::zero();
    signed_subsets(&mut sum, b.n(), b.first_mask(), true, &-Rational::ONE);
    signed_subsets(&mut sum, b.n(), b.second_mask(), true, &Rational::ONE);
    ParityVector { n: b.n(), odd: true, sum }
}

/// `even_n((P₁,P₂)) = Σ_{T⊆P₁ even} (−T) + Σ_{T⊆P₂ even} (−T)`; the empty
/// set occurs once on each side.
pub fn even_map(b: &OrientedBipartition) -> ParityVector {
    let mut sum = FormalSum::zero();
    signed_subsets(&mut sum, b.n(), b.first_mask(), false, &-Rational::ONE);
    signed_subsets(&mut sum, b.n(), b.second_mask(), false, &-Rational::ONE);
    ParityVector { n: b.n(), odd: false, sum }
}

/// `odd_n` or `even_n` extended linearly.
pub fn parity_map_linear(n: usize, odd: bool, v: &FormalSum<OrientedBipartition>) -> ParityVector {
    let f = if odd { odd_map } else { even_map };
    ParityVector { n, odd, sum: v.map_linear(|b| f(b).sum) }
}

/// `γ((P₁,P₂)) = (P₁∪{n+1}, P₂) − (P₁, P₂∪{n+1})` in `ℚF_{n+1}`.
pub fn gamma_f(b: &OrientedBipartition) -> Result<FormalSum<OrientedBipartition>, Error> {
    check_room(b.n())?;
    let n = b.n();
    let new = 1u32 << n;
    let mut out = FormalSum::zero();
    out.add_term(OrientedBipartition::from_first_mask(n + 1, b.first_mask() | new), &Rational::ONE);
    out.add_term(OrientedBipartition::from_first_mask(n + 1, b.first_mask()), &-Rational::ONE);
    Ok(out)
}

/// The unordered version of `γ_F`, landing in `ℚSP_{−1,n+1}`. A term whose
/// second block would be empty is not a 2-block partition and counts as 0.
pub fn gamma_sp(b: &OrientedBipartition) -> Result<SpVector, Error> {
    check_room(b.n())?;
    let n = b.n();
    let new = 1u32 << n;
    let (p1, p2) = (b.first_mask(), b.second_mask());
    let mut out = FormalSum::zero();
    if p2 != 0 {
        out.add_term(SetPartition::from_masks_unchecked(n + 1, alloc::vec![p1 | new, p2]), &Rational::ONE);
    }
    out.add_term(SetPartition::from_masks_unchecked(n + 1, alloc::vec![p1, p2 | new]), &-Rational::ONE);
    Ok(SpVector::new_unchecked(n + 1, -1, out))
}

/// `π̃′_*`: deletes `n+1` from whichever side holds it.
pub fn bipartition_pushforward(b: &OrientedBipartition) -> Result<OrientedBipartition, Error> {
    if b.n() < 2 {
        return Err(Error::Range("bipartition pushforward needs n >= 1".into()));
    }
    let n = b.n() - 1;
    Ok(OrientedBipartition::from_first_mask(n, b.first_mask() & crate::setcomb::full_mask(n)))
}

/// `E_n` or `O_n` in canonical order.
pub fn parity_basis(n: usize, odd: bool) -> Result<Vec<Subset>, Error> {
    enumerate_parity(n, odd)
}
