use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::subset::cmp_lex;
use super::{check_n, full_mask, write_list, Subset};
use crate::Error;

/// An ordered pair `(P₁, P₂)` with `P₁ ⊔ P₂ = [n]` and `1 ∈ P₁`. `P₂` may
/// be empty.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrientedBipartition {
    n: u8,
    first: u32,
}

impl OrientedBipartition {
    pub fn new(first: Subset, second: Subset) -> Result<Self, Error> {
        let n = first.n();
        if second.n() != n {
            return Err(Error::GroundSetMismatch { expected: n, found: second.n() });
        }
        if first.mask() & second.mask() != 0 || first.mask() | second.mask() != full_mask(n) {
            return Err(Error::Range("bipartition sides must split [n]".to_string()));
        }
        if !first.contains(1) {
            return Err(Error::Range("first side of an oriented bipartition must contain 1".to_string()));
        }
        Ok(OrientedBipartition { n: n as u8, first: first.mask() })
    }

    /// Orients an unordered split: whichever side holds 1 comes first.
    pub fn oriented(n: usize, side: u32) -> Self {
        let first = if side & 1 == 1 { side } else { full_mask(n) & !side };
        OrientedBipartition { n: n as u8, first }
    }

    /// Parses `"1,3||2,4"`.
    pub fn parse(n: usize, text: &str) -> Result<Self, Error> {
        let (a, b) = text
            .split_once("||")
            .ok_or_else(|| Error::Parse { kind: "oriented bipartition", text: text.to_string() })?;
        Self::new(Subset::parse(n, a)?, Subset::parse(n, b)?)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn first(&self) -> Subset {
        Subset::from_mask_unchecked(self.n(), self.first)
    }

    pub fn second(&self) -> Subset {
        Subset::from_mask_unchecked(self.n(), self.second_mask())
    }

    pub fn first_mask(&self) -> u32 {
        self.first
    }

    pub fn second_mask(&self) -> u32 {
        full_mask(self.n()) & !self.first
    }

    pub(crate) fn from_first_mask(n: usize, first: u32) -> Self {
        debug_assert!(first & 1 == 1);
        OrientedBipartition { n: n as u8, first }
    }
}

impl Ord for OrientedBipartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| cmp_lex(self.first, other.first))
            .then_with(|| cmp_lex(self.second_mask(), other.second_mask()))
    }
}

impl PartialOrd for OrientedBipartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OrientedBipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, self.first)?;
        f.write_str("||")?;
        write_list(f, self.second_mask())
    }
}

impl fmt::Debug for OrientedBipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{:?})", self.first(), self.second())
    }
}

/// All `2^(n-1)` oriented bipartitions of `[n]`, canonical order.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<OrientedBipartition>, Error> {
    check_n(n)?;
    if n == 0 {
        return Err(Error::Range("bipartitions need n >= 1".to_string()));
    }
    let mut out: Vec<OrientedBipartition> =
        (0..1u32 << (n - 1)).map(|rest| OrientedBipartition::from_first_mask(n, 1 | rest << 1)).collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn base_enumerations() {
        let f1 = enumerate_bipartitions(1).unwrap();
        assert_eq!(f1.len(), 1);
        assert_eq!(format!("{}", f1[0]), "1||");
        let f2: Vec<_> = enumerate_bipartitions(2).unwrap().iter().map(|b| format!("{b}")).collect();
        assert_eq!(f2, ["1||2", "1,2||"]);
        assert_eq!(enumerate_bipartitions(4).unwrap().len(), 8);
    }

    #[test]
    fn parse_and_validate() {
        let b = OrientedBipartition::parse(4, "1,3||2,4").unwrap();
        assert_eq!(b.first(), Subset::new(4, &[1, 3]).unwrap());
        assert_eq!(b.second(), Subset::new(4, &[2, 4]).unwrap());
        assert!(OrientedBipartition::parse(4, "2,3||1,4").is_err());
        assert!(OrientedBipartition::parse(4, "1,3||2").is_err());
        assert!(OrientedBipartition::parse(4, "1,3|2,4").is_err());
    }
}
