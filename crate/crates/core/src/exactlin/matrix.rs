use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{FormalSum, Label, Rational};
use crate::Error;

/// Sparse row over column indices, strictly increasing, no zero entries.
type Row = Vec<(u32, Rational)>;

/// Rows of formal sums over a declared, totally ordered label universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix<L: Ord> {
    universe: Vec<L>,
    rows: Vec<FormalSum<L>>,
}

impl<L: Label> SparseMatrix<L> {
    /// Checks every label of every row against `universe`. The universe is
    /// sorted and deduplicated; its order is the column order.
    pub fn new(universe: Vec<L>, rows: Vec<FormalSum<L>>) -> Result<Self, Error> {
        let universe = sorted_universe(universe);
        for r in &rows {
            for l in r.labels() {
                if universe.binary_search(l).is_err() {
                    return Err(Error::LabelOutsideUniverse(l.to_string()));
                }
            }
        }
        Ok(SparseMatrix { universe, rows })
    }

    pub fn identity(universe: Vec<L>) -> Self {
        let universe = sorted_universe(universe);
        let rows = universe.iter().map(|l| FormalSum::basis(l.clone())).collect();
        SparseMatrix { universe, rows }
    }

    pub fn universe(&self) -> &[L] {
        &self.universe
    }

    pub fn rows(&self) -> &[FormalSum<L>] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.universe.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(FormalSum::is_zero)
    }

    pub fn entry(&self, row: usize, col: &L) -> Rational {
        self.rows[row].coeff(col)
    }

    /// Columns become rows. Column labels of the result are the original
    /// row positions.
    pub fn transpose(&self) -> SparseMatrix<usize> {
        let mut cols: Vec<FormalSum<usize>> = vec![FormalSum::zero(); self.universe.len()];
        for (i, r) in self.rows.iter().enumerate() {
            for (l, c) in r.iter() {
                let j = self.universe.binary_search(l).expect("validated label");
                cols[j].add_term(i, c);
            }
        }
        SparseMatrix { universe: (0..self.rows.len()).collect(), rows: cols }
    }

    /// Dense row-major copy in universe column order.
    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![Rational::ZERO; self.universe.len()];
                for (l, c) in r.iter() {
                    let j = self.universe.binary_search(l).expect("validated label");
                    d[j] = c.clone();
                }
                d
            })
            .collect()
    }
}

/// A subspace of the free space on a label universe, held as the rows of its
/// reduced row-echelon basis.
///
/// Each row has leading coefficient 1, leading labels strictly increase from
/// row to row, and every leading label is absent from all other rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<L: Ord> {
    universe: Vec<L>,
    rows: Vec<Row>,
    // row index of each pivot column, u32::MAX elsewhere
    pivot_row: Vec<u32>,
}

const NO_PIVOT: u32 = u32::MAX;

impl<L: Label> Subspace<L> {
    pub fn zero(universe: Vec<L>) -> Self {
        let universe = sorted_universe(universe);
        let pivot_row = vec![NO_PIVOT; universe.len()];
        Subspace { universe, rows: Vec::new(), pivot_row }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Codimension in the ambient free space.
    pub fn codim(&self) -> usize {
        self.universe.len() - self.rows.len()
    }

    pub fn universe(&self) -> &[L] {
        &self.universe
    }

    pub fn row(&self, i: usize) -> FormalSum<L> {
        self.to_sum(&self.rows[i])
    }

    pub fn rows(&self) -> Vec<FormalSum<L>> {
        self.rows.iter().map(|r| self.to_sum(r)).collect()
    }

    pub fn pivot_labels(&self) -> Vec<L> {
        self.rows.iter().map(|r| self.universe[r[0].0 as usize].clone()).collect()
    }

    /// Labels that are not the leading label of any row, in column order.
    /// Reduced vectors are supported on exactly these labels.
    pub fn free_labels(&self) -> Vec<L> {
        self.universe
            .iter()
            .zip(&self.pivot_row)
            .filter(|(_, p)| **p == NO_PIVOT)
            .map(|(l, _)| l.clone())
            .collect()
    }

    pub fn is_pivot(&self, label: &L) -> bool {
        self.universe
            .binary_search(label)
            .map(|j| self.pivot_row[j] != NO_PIVOT)
            .unwrap_or(false)
    }

    /// Canonical representative of `v` modulo this subspace.
    pub fn reduce(&self, v: &FormalSum<L>) -> Result<FormalSum<L>, Error> {
        let row = to_row(&self.universe, v)?;
        Ok(self.to_sum(&self.reduce_row(&row)))
    }

    pub fn contains(&self, v: &FormalSum<L>) -> Result<bool, Error> {
        let row = to_row(&self.universe, v)?;
        Ok(self.reduce_row(&row).is_empty())
    }

    /// Whether every row of `self` lies in `other`.
    pub fn is_contained_in(&self, other: &Subspace<L>) -> Result<bool, Error> {
        for r in self.rows() {
            if !other.contains(&r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Span of the union of two subspaces of the same universe.
    pub fn join(&self, other: &Subspace<L>) -> Result<Subspace<L>, Error> {
        let mut gens = self.rows();
        gens.extend(other.rows());
        echelonize(&gens, self.universe.clone())
    }

    fn reduce_row(&self, v: &Row) -> Row {
        let mut acc: BTreeMap<u32, Rational> = BTreeMap::new();
        for (j, c) in v {
            let p = self.pivot_row[*j as usize];
            if p == NO_PIVOT {
                add_into(&mut acc, *j, c);
            } else {
                // subtract c * row_p; the pivot entry cancels c exactly
                for (k, e) in self.rows[p as usize].iter().skip(1) {
                    add_into(&mut acc, *k, &-(c * e));
                }
            }
        }
        acc.into_iter().collect()
    }

    fn to_sum(&self, r: &Row) -> FormalSum<L> {
        r.iter().map(|(j, c)| (self.universe[*j as usize].clone(), c.clone())).collect()
    }
}

fn add_into(acc: &mut BTreeMap<u32, Rational>, j: u32, c: &Rational) {
    use alloc::collections::btree_map::Entry;
    match acc.entry(j) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c.clone());
            }
        }
        Entry::Occupied(mut e) => {
            let v = e.get() + c;
            if v.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
}

fn sorted_universe<L: Ord>(mut universe: Vec<L>) -> Vec<L> {
    universe.sort();
    universe.dedup();
    universe
}

fn to_row<L: Label>(universe: &[L], v: &FormalSum<L>) -> Result<Row, Error> {
    v.iter()
        .map(|(l, c)| match universe.binary_search(l) {
            Ok(j) => Ok((j as u32, c.clone())),
            Err(_) => Err(Error::LabelOutsideUniverse(l.to_string())),
        })
        .collect()
}

/// `a - f * b`, both sorted sparse rows.
fn sub_scaled(a: &[(u32, Rational)], f: &Rational, b: &[(u32, Rational)]) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < b.len() {
        let ord = match (a.get(i), b.get(k)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push((b[k].0, -(f * &b[k].1)));
                k += 1;
            }
            Ordering::Equal => {
                let v = a[i].1.sub_mul(f, &b[k].1);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                k += 1;
            }
        }
    }
    out
}

/// Reduced row-echelon basis of the span of `generators`.
///
/// Generators are inserted one at a time into a basis kept fully reduced:
/// a new vector is reduced against the current rows (a single pass, since
/// rows carry no pivot entries besides their own), and if something
/// survives it becomes a row and its leading column is cleared from the
/// others. The reduced row-echelon form of a subspace is unique, so the
/// result does not depend on generator order.
pub fn echelonize<L: Label>(generators: &[FormalSum<L>], universe: Vec<L>) -> Result<Subspace<L>, Error> {
    let universe = sorted_universe(universe);
    let ncols = universe.len();
    let mut b = Builder {
        rows: Vec::new(),
        pivot_row: vec![NO_PIVOT; ncols],
        occurs: vec![0; ncols],
        acc: vec![Rational::ZERO; ncols],
        touched: Vec::new(),
        mark: vec![false; ncols],
    };
    for g in generators {
        let r = to_row(&universe, g)?;
        b.insert(&r);
    }
    let mut rows = b.rows;
    rows.sort_unstable_by_key(|r| r[0].0);
    let mut pivot_row = vec![NO_PIVOT; ncols];
    for (i, r) in rows.iter().enumerate() {
        pivot_row[r[0].0 as usize] = i as u32;
    }
    Ok(Subspace { universe, rows, pivot_row })
}

struct Builder {
    rows: Vec<Row>,
    pivot_row: Vec<u32>,
    // number of rows with a non-pivot entry in each column
    occurs: Vec<u32>,
    acc: Vec<Rational>,
    touched: Vec<u32>,
    mark: Vec<bool>,
}

impl Builder {
    fn bump(&mut self, j: u32, c: &Rational, f: &Rational) {
        let j = j as usize;
        if !self.mark[j] {
            self.mark[j] = true;
            self.touched.push(j as u32);
        }
        self.acc[j] = self.acc[j].sub_mul(f, c);
    }

    /// `v` modulo the current rows, as a sorted sparse row.
    fn reduce(&mut self, v: &Row) -> Row {
        let minus_one = -Rational::ONE;
        for (j, c) in v {
            let p = self.pivot_row[*j as usize];
            if p == NO_PIVOT {
                self.bump(*j, c, &minus_one);
            } else {
                let row = core::mem::take(&mut self.rows[p as usize]);
                for (k, e) in &row[1..] {
                    self.bump(*k, e, c);
                }
                self.rows[p as usize] = row;
            }
        }
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &j in &self.touched {
            let j = j as usize;
            self.mark[j] = false;
            let c = core::mem::replace(&mut self.acc[j], Rational::ZERO);
            if !c.is_zero() {
                out.push((j as u32, c));
            }
        }
        self.touched.clear();
        out
    }

    fn insert(&mut self, v: &Row) {
        let mut r = self.reduce(v);
        let Some(&(p, ref lead)) = r.first() else {
            return;
        };
        if !lead.is_one() {
            let inv = lead.recip();
            for e in r.iter_mut() {
                e.1 = &e.1 * &inv;
            }
        }
        if self.occurs[p as usize] > 0 {
            for i in 0..self.rows.len() {
                let Ok(pos) = self.rows[i].binary_search_by_key(&p, |e| e.0) else {
                    continue;
                };
                let f = self.rows[i][pos].1.clone();
                for (j, _) in &self.rows[i][1..] {
                    self.occurs[*j as usize] -= 1;
                }
                self.rows[i] = sub_scaled(&self.rows[i], &f, &r);
                for (j, _) in &self.rows[i][1..] {
                    self.occurs[*j as usize] += 1;
                }
            }
        }
        for (j, _) in &r[1..] {
            self.occurs[*j as usize] += 1;
        }
        self.pivot_row[p as usize] = self.rows.len() as u32;
        self.rows.push(r);
    }
}

/// Exact rank over ℚ.
pub fn rank<L: Label>(m: &SparseMatrix<L>) -> usize {
    echelonize(&m.rows, m.universe.clone()).expect("validated matrix").rank()
}

/// Right null space: all `x` over the column universe with `row · x = 0`
/// for every row.
pub fn kernel<L: Label>(m: &SparseMatrix<L>) -> Subspace<L> {
    let rref = echelonize(&m.rows, m.universe.clone()).expect("validated matrix");
    let mut basis = Vec::new();
    for (j, l) in m.universe.iter().enumerate() {
        if rref.pivot_row[j] != NO_PIVOT {
            continue;
        }
        let mut x = FormalSum::basis(l.clone());
        for r in &rref.rows {
            if let Ok(pos) = r.binary_search_by_key(&(j as u32), |e| e.0) {
                x.add_term(m.universe[r[0].0 as usize].clone(), &-r[pos].1.clone());
            }
        }
        basis.push(x);
    }
    echelonize(&basis, m.universe.clone()).expect("labels from universe")
}

/// Canonical representative of `v` in the quotient by `s`.
pub fn reduce_mod<L: Label>(v: &FormalSum<L>, s: &Subspace<L>) -> Result<FormalSum<L>, Error> {
    s.reduce(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(terms: &[(char, i64)]) -> FormalSum<char> {
        terms.iter().map(|(l, c)| (*l, Rational::from(*c))).collect()
    }

    #[test]
    fn collinear_vectors() {
        let s = echelonize(&[sum(&[('a', 1)]), sum(&[('a', 2)])], vec!['a']).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.row(0), sum(&[('a', 1)]));
    }

    #[test]
    fn empty_span() {
        let s = echelonize::<char>(&[], vec!['a', 'b']).unwrap();
        assert_eq!(s.rank(), 0);
        assert_eq!(s.free_labels(), vec!['a', 'b']);
    }

    #[test]
    fn label_outside_universe() {
        let err = echelonize(&[sum(&[('z', 1)])], vec!['a']).unwrap_err();
        assert_eq!(err, Error::LabelOutsideUniverse("z".into()));
        assert!(SparseMatrix::new(vec!['a'], vec![sum(&[('q', 1)])]).is_err());
    }

    #[test]
    fn rank_small_cases() {
        let z = SparseMatrix::new(vec!['a', 'b'], vec![FormalSum::zero(), FormalSum::zero()]).unwrap();
        assert_eq!(rank(&z), 0);
        assert!(z.is_zero());
        assert_eq!(rank(&SparseMatrix::identity(vec!['a', 'b', 'c'])), 3);
    }

    #[test]
    fn kernel_of_identity_and_difference() {
        assert_eq!(kernel(&SparseMatrix::identity(vec!['a', 'b'])).rank(), 0);
        let m = SparseMatrix::new(vec!['a', 'b'], vec![sum(&[('a', 1), ('b', -1)])]).unwrap();
        let k = kernel(&m);
        assert_eq!(k.rank(), 1);
        assert_eq!(k.row(0), sum(&[('a', 1), ('b', 1)]));
    }

    #[test]
    fn reduce_members_and_empty() {
        let s = echelonize(&[sum(&[('a', 1), ('b', 2)]), sum(&[('b', 1), ('c', 1)])], vec!['a', 'b', 'c'])
            .unwrap();
        let member = sum(&[('a', 3), ('b', 7), ('c', 1)]);
        assert!(reduce_mod(&member, &s).unwrap().is_zero());
        let zero = Subspace::zero(vec!['a', 'b', 'c']);
        let v = sum(&[('b', 5)]);
        assert_eq!(reduce_mod(&v, &zero).unwrap(), v);
        // reduced vectors avoid pivot labels
        let r = reduce_mod(&sum(&[('a', 1)]), &s).unwrap();
        assert!(r.labels().all(|l| !s.is_pivot(l)));
    }

    #[test]
    fn rref_shape() {
        let gens = [sum(&[('b', 2), ('c', 2)]), sum(&[('a', 1), ('b', 1)]), sum(&[('a', 1), ('c', -1)])];
        let s = echelonize(&gens, vec!['c', 'b', 'a']).unwrap();
        assert_eq!(s.rank(), 2);
        assert_eq!(s.pivot_labels(), vec!['a', 'b']);
        assert_eq!(s.row(0), sum(&[('a', 1), ('c', -1)]));
        assert_eq!(s.row(1), sum(&[('b', 1), ('c', 1)]));
    }

    #[test]
    fn transpose_dense() {
        let m = SparseMatrix::new(vec!['a', 'b'], vec![sum(&[('a', 1), ('b', 2)]), sum(&[('b', 3)])]).unwrap();
        let t = m.transpose();
        assert_eq!(t.nrows(), 2);
        assert_eq!(t.entry(1, &0), Rational::from(2));
        assert_eq!(m.to_dense()[1], vec![Rational::ZERO, Rational::from(3)]);
    }
}
