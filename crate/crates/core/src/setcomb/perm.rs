use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use super::check_n;
use crate::Error;

/// A permutation of `[n]` in one-line notation: position `i` holds `g(i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n as u8).collect() }
    }

    pub fn from_images(images: &[usize]) -> Result<Self, Error> {
        let n = images.len();
        check_n(n)?;
        let mut seen = 0u64;
        for &x in images {
            if x == 0 || x > n || seen >> x & 1 == 1 {
                return Err(Error::Range("not a permutation of [n]".to_string()));
            }
            seen |= 1 << x;
        }
        Ok(Permutation { images: images.iter().map(|&x| x as u8).collect() })
    }

    /// The cycle `(c₀ c₁ … c_k)` on `[n]`.
    pub fn cycle(n: usize, cycle: &[usize]) -> Result<Self, Error> {
        let mut images: Vec<usize> = (1..=n).collect();
        for (k, &c) in cycle.iter().enumerate() {
            if c == 0 || c > n {
                return Err(Error::Range(alloc::format!("cycle entry {c} outside [1, {n}]")));
            }
            images[c - 1] = cycle[(k + 1) % cycle.len()];
        }
        Self::from_images(&images)
    }

    /// Parses one-line notation `"2,1,3,4"`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let images = super::parse_list(text).ok_or_else(|| Error::Parse { kind: "permutation", text: text.to_string() })?;
        Self::from_images(&images)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<u8> = (1..=n as u8).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] as usize
    }

    pub fn apply_mask(&self, mask: u32) -> u32 {
        let mut out = 0u32;
        let mut m = mask;
        while m != 0 {
            let t = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= 1 << (self.images[t] - 1);
        }
        out
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degrees differ");
        Permutation { images: other.images.iter().map(|&x| self.images[x as usize - 1]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = alloc::vec![0u8; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize - 1] = i as u8 + 1;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| x as usize == i + 1)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line() {
        let g = Permutation::parse("2,1,3,4").unwrap();
        assert_eq!(g, Permutation::cycle(4, &[1, 2]).unwrap());
        assert_eq!(alloc::format!("{g}"), "2,1,3,4");
        assert!(Permutation::parse("1,1,3").is_err());
        assert!(Permutation::parse("1,4").is_err());
    }

    #[test]
    fn composition_order() {
        let a = Permutation::cycle(3, &[1, 2]).unwrap();
        let b = Permutation::cycle(3, &[2, 3]).unwrap();
        // (a∘b)(2) = a(3) = 3
        assert_eq!(a.compose(&b).apply(2), 3);
        assert!(a.compose(&a.inverse()).is_identity());
        let c = Permutation::cycle(4, &[1, 2, 3, 4]).unwrap();
        assert_eq!(c.apply_mask(0b1001), 0b0011);
    }
}
