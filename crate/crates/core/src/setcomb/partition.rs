use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::subset::{cmp_lex, mask_members};
use super::{check_n, full_mask, parse_list, write_list, Subset};
use crate::Error;

/// A set partition of `[n]` into nonempty blocks.
///
/// Blocks are bitmasks kept sorted by their minimum element; that sorted
/// list is the canonical form and the identity criterion.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: u8,
    blocks: Vec<u32>,
}

fn sort_blocks(blocks: &mut [u32]) {
    blocks.sort_unstable_by_key(|b| b.trailing_zeros());
}

impl SetPartition {
    /// Builds a partition from block bitmasks in any order.
    pub fn from_masks(n: usize, mut blocks: Vec<u32>) -> Result<Self, Error> {
        check_n(n)?;
        let mut seen = 0u32;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::Range("set partition has an empty block".to_string()));
            }
            if b & seen != 0 {
                return Err(Error::Range("set partition blocks overlap".to_string()));
            }
            seen |= b;
        }
        if seen != full_mask(n) {
            return Err(Error::Range(alloc::format!("set partition blocks do not cover [{n}]")));
        }
        sort_blocks(&mut blocks);
        Ok(SetPartition { n: n as u8, blocks })
    }

    pub(crate) fn from_masks_unchecked(n: usize, mut blocks: Vec<u32>) -> Self {
        sort_blocks(&mut blocks);
        SetPartition { n: n as u8, blocks }
    }

    pub fn from_blocks(n: usize, blocks: &[&[usize]]) -> Result<Self, Error> {
        let masks = blocks
            .iter()
            .map(|b| {
                let s = Subset::new(n, b)?;
                if s.len() != b.len() {
                    return Err(Error::Range("repeated element in block".to_string()));
                }
                Ok(s.mask())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_masks(n, masks)
    }

    /// All-singletons partition `{{1}, …, {n}}`.
    pub fn singletons(n: usize) -> Self {
        SetPartition { n: n as u8, blocks: (0..n).map(|i| 1u32 << i).collect() }
    }

    /// Parses the canonical text form `"1,2|3|4,5"`; `n` is the largest
    /// element.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let bad = || Error::Parse { kind: "set partition", text: text.to_string() };
        let mut masks = Vec::new();
        let mut n = 0;
        for part in text.split('|') {
            let members = parse_list(part).ok_or_else(bad)?;
            if members.is_empty() {
                return Err(bad());
            }
            let mut m = 0u32;
            for i in members {
                if i == 0 || i > super::MAX_N {
                    return Err(bad());
                }
                if m >> (i - 1) & 1 == 1 {
                    return Err(bad());
                }
                m |= 1 << (i - 1);
                n = n.max(i);
            }
            masks.push(m);
        }
        Self::from_masks(n, masks).map_err(|_| bad())
    }

    /// Parses and checks the ground set size.
    pub fn parse_n(n: usize, text: &str) -> Result<Self, Error> {
        let p = Self::parse(text)?;
        if p.n() != n {
            return Err(Error::GroundSetMismatch { expected: n, found: p.n() });
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_masks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn blocks(&self) -> Vec<Subset> {
        self.blocks.iter().map(|&b| Subset::from_mask_unchecked(self.n(), b)).collect()
    }

    /// Mask of the block containing `i`.
    pub fn block_of(&self, i: usize) -> u32 {
        let bit = 1u32 << (i - 1);
        *self.blocks.iter().find(|&&b| b & bit != 0).expect("partition covers [n]")
    }

    pub fn has_singleton(&self, i: usize) -> bool {
        self.blocks.contains(&(1u32 << (i - 1)))
    }

    /// `Π ∪ {{n+1}}` over `[n+1]`.
    pub fn with_new_singleton(&self) -> SetPartition {
        let mut blocks = self.blocks.clone();
        blocks.push(1 << self.n);
        SetPartition { n: self.n + 1, blocks }
    }

    /// Deletes the largest element `n` from its block, giving a partition of
    /// `[n-1]`; `None` when `{n}` is a block on its own.
    pub fn delete_last(&self) -> Option<SetPartition> {
        let bit = 1u32 << (self.n - 1);
        if self.blocks.contains(&bit) {
            return None;
        }
        let blocks = self.blocks.iter().map(|&b| b & !bit).collect();
        Some(SetPartition { n: self.n - 1, blocks })
    }

    /// Merges blocks at positions `i` and `j` (positions in canonical order).
    pub fn merge(&self, i: usize, j: usize) -> SetPartition {
        debug_assert!(i != j);
        let merged = self.blocks[i] | self.blocks[j];
        let mut blocks: Vec<u32> = self
            .blocks
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i && *k != j)
            .map(|(_, b)| *b)
            .collect();
        blocks.push(merged);
        sort_blocks(&mut blocks);
        SetPartition { n: self.n, blocks }
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.blocks.iter().map(|b| b.count_ones() as usize).collect();
        sizes.sort_unstable();
        sizes
    }
}

impl Ord for SetPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.blocks.iter().zip(&other.blocks) {
                match cmp_lex(*a, *b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            self.blocks.len().cmp(&other.blocks.len())
        })
    }
}

impl PartialOrd for SetPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write_list(f, *b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            write_list(f, *b)?;
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// All partitions of `[n]` into exactly `parts` blocks, in canonical order.
///
/// Generated as restricted growth strings: element 1 opens block 0 and each
/// later element joins an open block or opens the next one.
pub fn enumerate_partitions(n: usize, parts: usize) -> Result<Vec<SetPartition>, Error> {
    check_n(n)?;
    if parts < 1 || parts > n {
        return Err(Error::Range(alloc::format!("cannot split [{n}] into {parts} nonempty blocks")));
    }
    let mut out = Vec::new();
    let mut blocks = alloc::vec![0u32; parts];
    grow(0, n, parts, 0, &mut blocks, &mut out);
    out.sort();
    Ok(out)
}

fn grow(i: usize, n: usize, k: usize, used: usize, blocks: &mut [u32], out: &mut Vec<SetPartition>) {
    if i == n {
        if used == k {
            out.push(SetPartition { n: n as u8, blocks: blocks.to_vec() });
        }
        return;
    }
    if used + (n - i) < k {
        return;
    }
    let bit = 1u32 << i;
    for b in 0..(used + 1).min(k) {
        blocks[b] |= bit;
        grow(i + 1, n, k, used.max(b + 1), blocks, out);
        blocks[b] &= !bit;
    }
}

/// Convenience for iterating members of a block mask.
pub fn block_members(mask: u32) -> impl Iterator<Item = usize> {
    mask_members(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    #[test]
    fn canonical_text() {
        let p = SetPartition::parse("4,5|1,2|3").unwrap();
        assert_eq!(format!("{p}"), "1,2|3|4,5");
        assert_eq!(p.n(), 5);
        assert!(SetPartition::parse("1|1,2").is_err());
        assert!(SetPartition::parse("1|3").is_err());
        assert!(SetPartition::parse("1||2").is_err());
        assert_eq!(
            SetPartition::parse_n(6, "1|2").unwrap_err(),
            Error::GroundSetMismatch { expected: 6, found: 2 }
        );
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_partitions(3, 3).unwrap(), vec![SetPartition::singletons(3)]);
        assert_eq!(enumerate_partitions(4, 3).unwrap().len(), 6);
        assert_eq!(enumerate_partitions(5, 4).unwrap().len(), 10);
        assert!(enumerate_partitions(3, 4).is_err());
        assert!(enumerate_partitions(3, 0).is_err());
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        let all = enumerate_partitions(6, 3).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|p| p.num_blocks() == 3));
    }

    #[test]
    fn lift_helpers() {
        let p = SetPartition::parse("1|2,5|3|4").unwrap();
        assert_eq!(p.delete_last().unwrap(), SetPartition::singletons(4));
        let q = SetPartition::parse("1,2|3|4|5").unwrap();
        assert!(q.delete_last().is_none());
        assert_eq!(SetPartition::singletons(4).with_new_singleton(), SetPartition::singletons(5));
        assert_eq!(SetPartition::singletons(4).merge(3, 0), SetPartition::parse("1,4|2|3").unwrap());
    }
}
