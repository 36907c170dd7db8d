//! Canonical combinatorial labels on `[n]`: subsets, set partitions and
//! oriented bipartitions, their enumeration, and the action of `S_n`.
//!
//! Elements of the ground set are 1-based. Text encodings:
//! subset `"1,3,4"`, set partition `"1,2|3|4,5"`, oriented bipartition
//! `"1,3||2,4"`, permutation (one-line) `"2,1,3,4"`.

mod bipartition;
mod partition;
mod perm;
mod subset;

use alloc::vec::Vec;
use core::fmt;

pub use bipartition::{enumerate_bipartitions, OrientedBipartition};
pub use partition::{block_members, enumerate_partitions, SetPartition};
pub use perm::Permutation;
pub use subset::Subset;
pub(crate) use subset::submasks;

use crate::Error;

/// Largest supported ground set.
pub const MAX_N: usize = 31;

pub(crate) fn check_n(n: usize) -> Result<(), Error> {
    if n > MAX_N {
        return Err(Error::Range(alloc::format!("n = {n} exceeds the supported maximum {MAX_N}")));
    }
    Ok(())
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn parse_list(text: &str) -> Option<Vec<usize>> {
    let text = text.trim();
    if text.is_empty() {
        return Some(Vec::new());
    }
    text.split(',').map(|t| t.trim().parse::<usize>().ok()).collect()
}

pub(crate) fn write_list(f: &mut fmt::Formatter<'_>, mask: u32) -> fmt::Result {
    for (k, i) in subset::mask_members(mask).enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{i}")?;
    }
    Ok(())
}

/// Labels that `S_n` permutes.
pub trait Act: Sized {
    fn ground_set(&self) -> usize;

    /// Image under `g`, re-canonicalized. Callers check degrees.
    fn act_unchecked(&self, g: &Permutation) -> Self;
}

/// Image of `x` under `g`. `act(g∘h, x) = act(g, act(h, x))`.
pub fn act<X: Act>(g: &Permutation, x: &X) -> Result<X, Error> {
    if g.degree() != x.ground_set() {
        return Err(Error::GroundSetMismatch { expected: x.ground_set(), found: g.degree() });
    }
    Ok(x.act_unchecked(g))
}

impl Act for Subset {
    fn ground_set(&self) -> usize {
        self.n()
    }

    fn act_unchecked(&self, g: &Permutation) -> Self {
        Subset::from_mask_unchecked(self.n(), g.apply_mask(self.mask()))
    }
}

impl Act for SetPartition {
    fn ground_set(&self) -> usize {
        self.n()
    }

    fn act_unchecked(&self, g: &Permutation) -> Self {
        SetPartition::from_masks_unchecked(self.n(), self.block_masks().iter().map(|&b| g.apply_mask(b)).collect())
    }
}

impl Act for OrientedBipartition {
    fn ground_set(&self) -> usize {
        self.n()
    }

    fn act_unchecked(&self, g: &Permutation) -> Self {
        OrientedBipartition::oriented(self.n(), g.apply_mask(self.first_mask()))
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// All subsets of `[n]` whose size is at least `min_size` and has the
/// parity of `parity` (0 even, 1 odd), canonical order.
fn subsets_filtered(n: usize, min_size: usize, parity: usize) -> Result<Vec<Subset>, Error> {
    check_n(n)?;
    let mut out: Vec<Subset> = (0..=full_mask(n))
        .filter(|m| {
            let c = m.count_ones() as usize;
            c >= min_size && c % 2 == parity
        })
        .map(|m| Subset::from_mask_unchecked(n, m))
        .collect();
    out.sort();
    Ok(out)
}

/// The index set `K^d_n = {T ⊆ [n] : |T| ≥ d+3, |T| ≡ d+3 (mod 2)}`.
pub fn enumerate_kappa_index(n: usize, d: i32) -> Result<Vec<Subset>, Error> {
    if n < 1 || d < -3 {
        return Err(Error::Range(alloc::format!("kappa index needs n >= 1 and d >= -3 (got n={n}, d={d})")));
    }
    let k = (d + 3) as usize;
    if k > n {
        return Ok(Vec::new());
    }
    subsets_filtered(n, k, k % 2)
}

/// Closed-form size of `K^d_n`, a sum of binomial coefficients.
pub fn kappa_index_count(n: usize, d: i32) -> u64 {
    if d < -3 {
        return 0;
    }
    let k = (d + 3) as usize;
    (k..=n).step_by(2).map(|j| binomial(n, j)).sum()
}

/// `E_n` (even) or `O_n` (odd): subsets of `[n]` by parity of size. `E_n`
/// contains the empty set.
pub fn enumerate_parity(n: usize, odd: bool) -> Result<Vec<Subset>, Error> {
    subsets_filtered(n, 0, odd as usize)
}

/// Number of `T ∈ K^d_n` fixed by `g`: the permutation character of
/// `ℚK^d_n` at `g`.
pub fn character_fixed_points(n: usize, d: i32, g: &Permutation) -> Result<usize, Error> {
    if n < 4 || d < 1 || d > n as i32 - 3 {
        return Err(Error::Range(alloc::format!("character needs n >= 4 and 1 <= d <= n-3 (got n={n}, d={d})")));
    }
    if g.degree() != n {
        return Err(Error::GroundSetMismatch { expected: n, found: g.degree() });
    }
    Ok(enumerate_kappa_index(n, d)?.iter().filter(|t| t.act_unchecked(g) == **t).count())
}
