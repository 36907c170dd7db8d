use alloc::collections::btree_map::{self, BTreeMap};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use super::Rational;

/// A finite ℚ-linear combination of basis labels.
///
/// No stored coefficient is ever zero, so two sums are equal exactly when
/// their label/coefficient maps agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalSum<L: Ord> {
    terms: BTreeMap<L, Rational>,
}

impl<L: Ord> Default for FormalSum<L> {
    fn default() -> Self {
        FormalSum { terms: BTreeMap::new() }
    }
}

impl<L: Ord + Clone> FormalSum<L> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(label: L) -> Self {
        Self::term(label, Rational::ONE)
    }

    pub fn term(label: L, coeff: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(label, &coeff);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, label: &L) -> Rational {
        self.terms.get(label).cloned().unwrap_or(Rational::ZERO)
    }

    pub fn contains(&self, label: &L) -> bool {
        self.terms.contains_key(label)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, L, Rational> {
        self.terms.iter()
    }

    pub fn labels(&self) -> btree_map::Keys<'_, L, Rational> {
        self.terms.keys()
    }

    /// The smallest label with a nonzero coefficient.
    pub fn leading(&self) -> Option<(&L, &Rational)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, label: L, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(label) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coeff.clone());
            }
            btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + coeff;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &FormalSum<L>) {
        for (l, c) in other.iter() {
            self.add_term(l.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, factor: &Rational, other: &FormalSum<L>) {
        if factor.is_zero() {
            return;
        }
        for (l, c) in other.iter() {
            self.add_term(l.clone(), &(factor * c));
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        FormalSum { terms: self.terms.iter().map(|(l, c)| (l.clone(), factor * c)).collect() }
    }

    /// Linear extension of a map on basis labels.
    pub fn map_linear<M: Ord + Clone, F>(&self, mut f: F) -> FormalSum<M>
    where
        F: FnMut(&L) -> FormalSum<M>,
    {
        let mut out = FormalSum::zero();
        for (l, c) in self.iter() {
            out.add_scaled(c, &f(l));
        }
        out
    }

    /// Linear extension of a label map that may send a label to zero.
    pub fn map_labels<M: Ord + Clone, F>(&self, mut f: F) -> FormalSum<M>
    where
        F: FnMut(&L) -> Option<M>,
    {
        let mut out = FormalSum::zero();
        for (l, c) in self.iter() {
            if let Some(m) = f(l) {
                out.add_term(m, c);
            }
        }
        out
    }

    /// Multiplies by -1 when needed so the leading coefficient is positive.
    pub fn sign_normalized(self) -> Self {
        match self.leading() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self,
        }
    }
}

impl<L: Ord + Clone> FromIterator<(L, Rational)> for FormalSum<L> {
    fn from_iter<I: IntoIterator<Item = (L, Rational)>>(iter: I) -> Self {
        let mut s = FormalSum::zero();
        for (l, c) in iter {
            s.add_term(l, &c);
        }
        s
    }
}

impl<L: Ord + Clone> IntoIterator for FormalSum<L> {
    type Item = (L, Rational);
    type IntoIter = btree_map::IntoIter<L, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<'a, L: Ord + Clone> Add<&'a FormalSum<L>> for &'a FormalSum<L> {
    type Output = FormalSum<L>;
    fn add(self, rhs: &'a FormalSum<L>) -> FormalSum<L> {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl<'a, L: Ord + Clone> Sub<&'a FormalSum<L>> for &'a FormalSum<L> {
    type Output = FormalSum<L>;
    fn sub(self, rhs: &'a FormalSum<L>) -> FormalSum<L> {
        let mut out = self.clone();
        out.add_scaled(&-Rational::ONE, rhs);
        out
    }
}

impl<L: Ord + Clone> Add for FormalSum<L> {
    type Output = FormalSum<L>;
    fn add(mut self, rhs: FormalSum<L>) -> FormalSum<L> {
        self.add_assign(&rhs);
        self
    }
}

impl<L: Ord + Clone> Sub for FormalSum<L> {
    type Output = FormalSum<L>;
    fn sub(mut self, rhs: FormalSum<L>) -> FormalSum<L> {
        self.add_scaled(&-Rational::ONE, &rhs);
        self
    }
}

impl<L: Ord + Clone> Neg for FormalSum<L> {
    type Output = FormalSum<L>;
    fn neg(mut self) -> FormalSum<L> {
        for c in self.terms.values_mut() {
            *c = -&*c;
        }
        self
    }
}

impl<'a, L: Ord + Clone> Mul<&'a FormalSum<L>> for &'a Rational {
    type Output = FormalSum<L>;
    fn mul(self, rhs: &'a FormalSum<L>) -> FormalSum<L> {
        rhs.scale(self)
    }
}

impl<L: Ord + fmt::Display> fmt::Display for FormalSum<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (l, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "[{l}]")?;
        }
        Ok(())
    }
}

impl<L: Ord + fmt::Debug> fmt::Debug for FormalSum<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Collects the labels of several sums, sorted and deduplicated.
pub fn support<'a, L: Ord + Clone + 'a>(sums: impl IntoIterator<Item = &'a FormalSum<L>>) -> Vec<L> {
    let mut all: Vec<L> = sums.into_iter().flat_map(|s| s.labels().cloned()).collect();
    all.sort();
    all.dedup();
    all
}
