use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::{check_n, full_mask, parse_list, write_list};
use crate::Error;

/// A subset of `[n] = {1, …, n}`, stored as a bitmask (bit `i-1` for `i`).
///
/// Ordering is lexicographic on the sorted member list, so `{1} < {1,2} < {2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    n: u8,
    mask: u32,
}

/// Lexicographic comparison of two bitmasks read as sorted lists.
pub(crate) fn cmp_lex(a: u32, b: u32) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let t = diff.trailing_zeros();
    let a_has = a >> t & 1 == 1;
    let other = if a_has { b } else { a };
    // the list lacking t either continues with a larger element or ends there
    let ord = if other >> t != 0 { Ordering::Less } else { Ordering::Greater };
    if a_has {
        ord
    } else {
        ord.reverse()
    }
}

impl Subset {
    pub fn from_mask(n: usize, mask: u32) -> Result<Self, Error> {
        check_n(n)?;
        if mask & !full_mask(n) != 0 {
            return Err(Error::Range("subset has an element outside [n]".to_string()));
        }
        Ok(Subset { n: n as u8, mask })
    }

    pub(crate) fn from_mask_unchecked(n: usize, mask: u32) -> Self {
        debug_assert!(mask & !full_mask(n) == 0);
        Subset { n: n as u8, mask }
    }

    pub fn new(n: usize, members: &[usize]) -> Result<Self, Error> {
        check_n(n)?;
        let mut mask = 0u32;
        for &i in members {
            if i == 0 || i > n {
                return Err(Error::Range(alloc::format!("element {i} outside [1, {n}]")));
            }
            mask |= 1 << (i - 1);
        }
        Ok(Subset { n: n as u8, mask })
    }

    pub fn full(n: usize) -> Self {
        Subset { n: n as u8, mask: full_mask(n) }
    }

    pub fn empty(n: usize) -> Self {
        Subset { n: n as u8, mask: 0 }
    }

    /// Parses the canonical text form, e.g. `"1,3,4"`; the empty set is `""`.
    pub fn parse(n: usize, text: &str) -> Result<Self, Error> {
        let members = parse_list(text).ok_or_else(|| Error::Parse { kind: "subset", text: text.to_string() })?;
        let s = Subset::new(n, &members)?;
        if s.len() != members.len() {
            return Err(Error::Parse { kind: "subset", text: text.to_string() });
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.n() && self.mask >> (i - 1) & 1 == 1
    }

    pub fn members(&self) -> Vec<usize> {
        mask_members(self.mask).collect()
    }

    pub fn meets(&self, mask: u32) -> bool {
        self.mask & mask != 0
    }

    /// `T ∪ {n+1}` as a subset of `[n+1]`.
    pub fn extend_with_next(&self) -> Subset {
        Subset { n: self.n + 1, mask: self.mask | 1 << self.n }
    }

    /// `T` as a subset of `[n+1]`.
    pub fn lift(&self) -> Subset {
        Subset { n: self.n + 1, mask: self.mask }
    }

    /// `T ∖ {n}` as a subset of `[n-1]`.
    pub fn restrict(&self) -> Subset {
        let n = self.n - 1;
        Subset { n, mask: self.mask & full_mask(n as usize) }
    }
}

pub(crate) fn mask_members(mut mask: u32) -> impl Iterator<Item = usize> {
    core::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let t = mask.trailing_zeros();
            mask &= mask - 1;
            Some(t as usize + 1)
        }
    })
}

/// Every submask of `mask`, including `0` and `mask` itself.
pub(crate) fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| cmp_lex(self.mask, other.mask))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, self.mask)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn lex_order() {
        let s = |m: &[usize]| Subset::new(5, m).unwrap();
        assert!(s(&[1]) < s(&[1, 2]));
        assert!(s(&[1, 2]) < s(&[2]));
        assert!(s(&[]) < s(&[1]));
        assert!(s(&[1, 3, 4]) < s(&[1, 4]));
        assert!(s(&[2, 5]) > s(&[2, 3, 4, 5]));
    }

    #[test]
    fn text_roundtrip() {
        let t = Subset::parse(6, "1,3,4").unwrap();
        assert_eq!(t.members(), vec![1, 3, 4]);
        assert_eq!(alloc::format!("{t}"), "1,3,4");
        assert_eq!(Subset::parse(3, "").unwrap(), Subset::empty(3));
        assert!(Subset::parse(3, "1,4").is_err());
        assert!(Subset::parse(3, "1,1").is_err());
        assert!(Subset::parse(3, "a").is_err());
    }

    #[test]
    fn submask_enumeration() {
        let mut all: Vec<u32> = submasks(0b1011).collect();
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3, 8, 9, 10, 11]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    proptest! {
        #[test]
        fn lex_matches_vec_order(a in 0u32..(1 << 10), b in 0u32..(1 << 10)) {
            let va: Vec<usize> = mask_members(a).collect();
            let vb: Vec<usize> = mask_members(b).collect();
            prop_assert_eq!(cmp_lex(a, b), va.cmp(&vb));
        }

        #[test]
        fn lex_matches_vec_order_high_bits(a in any::<u32>(), b in any::<u32>()) {
            let va: Vec<usize> = mask_members(a).collect();
            let vb: Vec<usize> = mask_members(b).collect();
            prop_assert_eq!(cmp_lex(a, b), va.cmp(&vb));
        }
    }
}
