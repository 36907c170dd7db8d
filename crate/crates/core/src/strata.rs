//! Stable marked trees (dual graphs of boundary strata), the Type I/II
//! classification, the partition `Π_*(σ,v)`, and forgetting the last mark.
//!
//! A stable tree is determined by its set of splits: for every edge, the
//! marks on the side away from mark 1. Equality is leg-fixing isomorphism,
//! i.e. equality of split sets; vertex ids are presentation only.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::setcomb::{full_mask, Act, Permutation, SetPartition, MAX_N};
use crate::Error;

#[derive(Clone, Debug)]
pub struct MarkedTree {
    vertices: Vec<u32>,
    edges: Vec<(u32, u32)>,
    // legs[m-1] is the vertex carrying mark m
    legs: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// Every vertex trivalent: a zero-dimensional stratum.
    Point,
    /// Exactly one vertex of valence at least four.
    TypeI,
    /// Two or more such vertices.
    TypeII,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StratumClass {
    Zero,
    Partition(SetPartition),
}

/// Result of forgetting the last mark.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Forgotten {
    /// Same dimension: the class pushes forward to this stratum.
    Stratum(MarkedTree),
    /// The image has smaller dimension, so the pushforward class is zero.
    Collapsed { image: MarkedTree },
}

impl MarkedTree {
    /// Validates that the data form a stable tree with legs `1..=n`.
    pub fn new(vertices: Vec<u32>, edges: Vec<(u32, u32)>, legs: Vec<u32>) -> Result<Self, Error> {
        let mut vs = vertices.clone();
        vs.sort_unstable();
        vs.dedup();
        if vs.len() != vertices.len() {
            return Err(Error::NotATree("repeated vertex id".into()));
        }
        if vs.is_empty() {
            return Err(Error::NotATree("no vertices".into()));
        }
        if legs.len() < 3 || legs.len() > MAX_N {
            return Err(Error::Range(format!("a stable tree needs 3..={MAX_N} marks (got {})", legs.len())));
        }
        let mut es: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::NotATree(format!("loop at vertex {a}")));
            }
            for x in [a, b] {
                if vs.binary_search(&x).is_err() {
                    return Err(Error::NotATree(format!("edge endpoint {x} is not a vertex")));
                }
            }
            es.push((a.min(b), a.max(b)));
        }
        es.sort_unstable();
        let before = es.len();
        es.dedup();
        if es.len() != before {
            return Err(Error::NotATree("repeated edge".into()));
        }
        if es.len() + 1 != vs.len() {
            return Err(Error::NotATree(format!("{} vertices but {} edges", vs.len(), es.len())));
        }
        for (m, &v) in legs.iter().enumerate() {
            if vs.binary_search(&v).is_err() {
                return Err(Error::NotATree(format!("mark {} sits on unknown vertex {v}", m + 1)));
            }
        }
        let t = MarkedTree { vertices: vs, edges: es, legs };
        if t.component_from(0, usize::MAX).0.count_ones() as usize != t.vertices.len() {
            return Err(Error::NotATree("graph is disconnected".into()));
        }
        for (i, &v) in t.vertices.iter().enumerate() {
            let val = t.valence_at(i);
            if val < 3 {
                return Err(Error::Unstable { vertex: v, valence: val });
            }
        }
        Ok(t)
    }

    /// The one-vertex tree on `[n]`.
    pub fn corolla(n: usize) -> Result<Self, Error> {
        Self::new(vec![0], Vec::new(), vec![0; n])
    }

    /// The canonical tree with the given splits (sets of marks not containing
    /// mark 1, each with at least two marks on both sides, pairwise nested or
    /// disjoint). Vertex 0 carries mark 1; the others are numbered in
    /// preorder with children ordered by their smallest mark.
    pub fn from_splits(n: usize, splits: &[u32]) -> Result<Self, Error> {
        if !(3..=MAX_N).contains(&n) {
            return Err(Error::Range(format!("a stable tree needs 3..={MAX_N} marks (got {n})")));
        }
        let all = full_mask(n);
        let mut ss: Vec<u32> = splits.to_vec();
        ss.sort_unstable_by_key(|s| (s.count_ones(), *s));
        ss.dedup();
        for (i, &s) in ss.iter().enumerate() {
            let c = s.count_ones() as usize;
            if s & 1 != 0 || s & !all != 0 || c < 2 || c + 2 > n {
                return Err(Error::Range(format!("{s:#b} is not a split of [{n}]")));
            }
            for &t in &ss[..i] {
                if t & s != 0 && t & s != t {
                    return Err(Error::Range("splits are not compatible".into()));
                }
            }
        }
        // parent of split i: the smallest split strictly containing it (ss is
        // sorted by size, so the first later one that contains it)
        let k = ss.len();
        let parent: Vec<usize> = (0..k)
            .map(|i| (i + 1..k).find(|&j| ss[j] & ss[i] == ss[i]).map_or(0, |j| j + 1))
            .collect();
        let home = |m: usize| -> usize {
            let bit = 1u32 << (m - 1);
            ss.iter().position(|s| s & bit != 0).map_or(0, |i| i + 1)
        };
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
        for (i, &p) in parent.iter().enumerate() {
            children[p].push(i + 1);
        }
        for c in &mut children {
            c.sort_unstable_by_key(|&x| ss[x - 1].trailing_zeros());
        }
        let mut order = vec![0u32; k + 1];
        let mut stack = vec![0usize];
        let mut next = 0u32;
        while let Some(x) = stack.pop() {
            order[x] = next;
            next += 1;
            stack.extend(children[x].iter().rev());
        }
        let edges = (0..k).map(|i| (order[parent[i]], order[i + 1])).collect();
        let legs = (1..=n).map(|m| order[home(m)]).collect();
        Self::new((0..=k as u32).collect(), edges, legs)
    }

    pub fn n(&self) -> usize {
        self.legs.len()
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// `legs()[m-1]` is the vertex carrying mark `m`.
    pub fn legs(&self) -> &[u32] {
        &self.legs
    }

    fn index(&self, v: u32) -> Result<usize, Error> {
        self.vertices.binary_search(&v).map_err(|_| Error::Range(format!("no vertex {v}")))
    }

    fn valence_at(&self, i: usize) -> usize {
        let v = self.vertices[i];
        self.edges.iter().filter(|(a, b)| *a == v || *b == v).count() + self.legs.iter().filter(|&&x| x == v).count()
    }

    pub fn valence(&self, v: u32) -> Result<usize, Error> {
        Ok(self.valence_at(self.index(v)?))
    }

    /// `Σ_v (val(v) − 3)`.
    pub fn dimension(&self) -> usize {
        (0..self.vertices.len()).map(|i| self.valence_at(i) - 3).sum()
    }

    pub fn classify(&self) -> Kind {
        match (0..self.vertices.len()).filter(|&i| self.valence_at(i) >= 4).count() {
            0 => Kind::Point,
            1 => Kind::TypeI,
            _ => Kind::TypeII,
        }
    }

    /// Vertices reachable from index `start` without passing index `avoid`,
    /// as a bitmask over vertex indices, together with the marks they carry.
    fn component_from(&self, start: usize, avoid: usize) -> (u64, u32) {
        let mut seen = 1u64 << start;
        let mut stack = vec![start];
        let mut marks = 0u32;
        while let Some(i) = stack.pop() {
            let v = self.vertices[i];
            for (m, &x) in self.legs.iter().enumerate() {
                if x == v {
                    marks |= 1 << m;
                }
            }
            for &(a, b) in &self.edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                let j = self.vertices.binary_search(&other).expect("validated edge");
                if j != avoid && seen >> j & 1 == 0 {
                    seen |= 1 << j;
                    stack.push(j);
                }
            }
        }
        (seen, marks)
    }

    /// `Π_*(σ,v)`: marks grouped by the component of `σ ∖ v` holding their
    /// legs; legs on `v` are singletons.
    pub fn partition_at_vertex(&self, v: u32) -> Result<SetPartition, Error> {
        let i = self.index(v)?;
        let mut blocks: Vec<u32> = Vec::new();
        for (m, &x) in self.legs.iter().enumerate() {
            if x == v {
                blocks.push(1 << m);
            }
        }
        for &(a, b) in &self.edges {
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            let j = self.vertices.binary_search(&other).expect("validated edge");
            blocks.push(self.component_from(j, i).1);
        }
        SetPartition::from_masks(self.n(), blocks)
    }

    /// The unique vertex of valence at least four of a Type I tree.
    pub fn big_vertex(&self) -> Option<u32> {
        let mut big = (0..self.vertices.len()).filter(|&i| self.valence_at(i) >= 4);
        match (big.next(), big.next()) {
            (Some(i), None) => Some(self.vertices[i]),
            _ => None,
        }
    }

    /// The class in `Q_{d,n}`: Type II strata vanish, a Type I stratum is
    /// represented by the partition at its big vertex.
    pub fn stratum_class(&self) -> Result<StratumClass, Error> {
        match self.classify() {
            Kind::Point => Err(Error::Range("stratum class needs dimension >= 1".into())),
            Kind::TypeII => Ok(StratumClass::Zero),
            Kind::TypeI => {
                let v = self.big_vertex().expect("Type I");
                Ok(StratumClass::Partition(self.partition_at_vertex(v)?))
            }
        }
    }

    /// Sorted split masks, one per edge.
    pub fn splits(&self) -> Vec<u32> {
        let root = self.index(self.legs[0]).expect("validated leg");
        let mut out: Vec<u32> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let ia = self.vertices.binary_search(&a).expect("validated edge");
                let ib = self.vertices.binary_search(&b).expect("validated edge");
                // the side of b away from a; flip if it holds mark 1
                let (seen, marks) = self.component_from(ib, ia);
                if seen >> root & 1 == 1 {
                    full_mask(self.n()) & !marks
                } else {
                    marks
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// The canonically numbered tree isomorphic to this one.
    pub fn canonical(&self) -> MarkedTree {
        MarkedTree::from_splits(self.n(), &self.splits()).expect("splits of a stable tree")
    }

    /// Removes the leg of the last mark and stabilizes. At most one vertex
    /// drops below valence three, and it is contracted into a neighbour.
    pub fn forget_mark(&self, mark: usize) -> Result<Forgotten, Error> {
        let n = self.n();
        if mark != n {
            return Err(Error::Range(format!("only the last mark {n} can be forgotten (got {mark})")));
        }
        if n < 4 {
            return Err(Error::Range("forgetting a mark needs at least 4 marks".into()));
        }
        let v = self.legs[n - 1];
        let mut legs = self.legs[..n - 1].to_vec();
        let i = self.index(v)?;
        if self.valence_at(i) > 3 {
            let image = MarkedTree::new(self.vertices.clone(), self.edges.clone(), legs)?;
            debug_assert_eq!(image.dimension() + 1, self.dimension());
            return Ok(Forgotten::Collapsed { image });
        }
        // v drops to valence 2: one edge and one leg, or two edges
        let nbrs: Vec<u32> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        let mut edges: Vec<(u32, u32)> = self.edges.iter().copied().filter(|&(a, b)| a != v && b != v).collect();
        match nbrs.as_slice() {
            [w] => {
                for x in legs.iter_mut().filter(|x| **x == v) {
                    *x = *w;
                }
            }
            [w1, w2] => edges.push((*w1, *w2)),
            _ => unreachable!("a trivalent vertex holding a leg has at most two edges"),
        }
        let vertices: Vec<u32> = self.vertices.iter().copied().filter(|&x| x != v).collect();
        let image = MarkedTree::new(vertices, edges, legs)?;
        assert_eq!(image.dimension(), self.dimension(), "a single contraction keeps the dimension");
        Ok(Forgotten::Stratum(image))
    }
}

impl PartialEq for MarkedTree {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n() && self.splits() == other.splits()
    }
}

impl Eq for MarkedTree {}

impl Act for MarkedTree {
    fn ground_set(&self) -> usize {
        self.n()
    }

    fn act_unchecked(&self, g: &Permutation) -> Self {
        let mut legs = vec![0; self.n()];
        for (m, &v) in self.legs.iter().enumerate() {
            legs[g.apply(m + 1) - 1] = v;
        }
        MarkedTree { vertices: self.vertices.clone(), edges: self.edges.clone(), legs }
    }
}

/// Largest ground set for which trees are enumerated.
pub const ENUMERATION_MAX_N: usize = 8;

/// All stable trees on `[n]` of the given dimension, canonical form, sorted
/// by split set.
pub fn enumerate_trees(n: usize, dim: usize) -> Result<Vec<MarkedTree>, Error> {
    if !(3..=ENUMERATION_MAX_N).contains(&n) {
        return Err(Error::Range(format!("tree enumeration supports 3 <= n <= {ENUMERATION_MAX_N} (got {n})")));
    }
    if dim > n - 3 {
        return Ok(Vec::new());
    }
    let edges = n - 3 - dim;
    let all = full_mask(n);
    let candidates: Vec<u32> = (0..=all)
        .filter(|s| s & 1 == 0 && s.count_ones() >= 2 && s.count_ones() as usize + 2 <= n)
        .collect();
    let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut chosen: Vec<u32> = Vec::with_capacity(edges);
    cliques(&candidates, 0, edges, &mut chosen, &mut found);
    found.into_iter().map(|s| MarkedTree::from_splits(n, &s)).collect()
}

fn compatible(a: u32, b: u32) -> bool {
    a & b == 0 || a & b == a || a & b == b
}

fn cliques(cands: &[u32], from: usize, left: usize, chosen: &mut Vec<u32>, out: &mut BTreeSet<Vec<u32>>) {
    if left == 0 {
        let mut s = chosen.clone();
        s.sort_unstable();
        out.insert(s);
        return;
    }
    for i in from..cands.len() {
        let c = cands[i];
        if chosen.iter().all(|&x| compatible(x, c)) {
            chosen.push(c);
            cliques(cands, i + 1, left - 1, chosen, out);
            chosen.pop();
        }
    }
}
