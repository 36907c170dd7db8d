//! Independent oracles: everything on the expected side is recomputed here
//! from block lists and text encodings, without the library's
//! combinatorics or its rational elimination.

use std::collections::{BTreeSet, HashMap};

use kappa_core::chowq::{build_quotient, partitions, pushforward_lift, SpVector};
use kappa_core::exactlin::{kernel, rank, SparseMatrix};
use kappa_core::kappa::{pairing_matrix, phi_tilde};
use kappa_core::setcomb::{enumerate_kappa_index, enumerate_partitions, SetPartition};
use kappa_core::strata::{enumerate_trees, Kind};

type Blocks = Vec<Vec<usize>>;

fn canon(mut b: Blocks) -> Blocks {
    for x in &mut b {
        x.sort();
    }
    b.sort();
    b
}

/// Restricted growth strings: position i gets a block label at most one
/// above the largest so far.
fn rgs_partitions(n: usize, k: usize) -> Vec<Blocks> {
    fn go(i: usize, n: usize, k: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Blocks>) {
        if i == n {
            if max == k {
                let mut b = vec![Vec::new(); k];
                for (e, &l) in cur.iter().enumerate() {
                    b[l].push(e + 1);
                }
                out.push(canon(b));
            }
            return;
        }
        for l in 0..=max.min(k - 1) {
            cur.push(l);
            go(i + 1, n, k, cur, max.max(l + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), 0, &mut out);
    out
}

fn text(b: &Blocks) -> String {
    b.iter().map(|x| x.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")).collect::<Vec<_>>().join("|")
}

fn blocks_of(p: &SetPartition) -> Blocks {
    p.to_string().split('|').map(|b| b.split(',').map(|e| e.parse().unwrap()).collect()).collect()
}

const P: u64 = 2_305_843_009_213_693_951; // 2^61 - 1

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, pivot);
        let inv = powmod(rows[r][c], P - 2);
        let prow: Vec<u64> = rows[r].iter().map(|&x| mulmod(x, inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for j in c..cols {
                    row[j] = (row[j] + P - mulmod(f, prow[j])) % P;
                }
            }
        }
        rows[r] = prow;
        r += 1;
    }
    r
}

/// Rank of the four-term relations of `(d+3)`-block partitions of `[n]`,
/// built from scratch.
fn relation_rank_oracle(n: usize, d: usize) -> usize {
    let cols: HashMap<Blocks, usize> = rgs_partitions(n, d + 3).into_iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut rows = Vec::new();
    for base in rgs_partitions(n, d + 4) {
        let k = base.len();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for e in 0..k {
                        if BTreeSet::from([a, b, c, e]).len() < 4 {
                            continue;
                        }
                        let merged = |x: usize, y: usize| {
                            let mut out: Blocks = Vec::new();
                            out.push([base[x].clone(), base[y].clone()].concat());
                            out.extend((0..k).filter(|&i| i != x && i != y).map(|i| base[i].clone()));
                            cols[&canon(out)]
                        };
                        let mut row = vec![0u64; cols.len()];
                        for (idx, sign) in [(merged(a, b), 1), (merged(c, e), 1), (merged(a, c), -1), (merged(b, e), -1)] {
                            row[idx] = (row[idx] + if sign > 0 { 1 } else { P - 1 }) % P;
                        }
                        rows.push(row);
                    }
                }
            }
        }
    }
    rank_mod_p(rows, cols.len())
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn kappa_size(n: usize, d: i32) -> usize {
    (0..=n).filter(|&k| k as i32 >= d + 3 && (k as i32 - d - 3) % 2 == 0).map(|k| binom(n, k)).sum()
}

#[test]
fn quotient_dimensions_against_independent_elimination() {
    for n in 4..=7 {
        for d in 1..=n - 3 {
            let expected = rgs_partitions(n, d + 3).len() - if d + 4 <= n { relation_rank_oracle(n, d) } else { 0 };
            let q = build_quotient(n, d as i32).unwrap();
            assert_eq!(q.dim(), expected, "(n,d) = ({n},{d})");
            assert_eq!(expected, kappa_size(n, d as i32), "(n,d) = ({n},{d})");
        }
    }
}

#[test]
fn partition_enumeration_matches_rgs_and_stirling() {
    for n in 1..=9usize {
        for k in 1..=n {
            let mine: Vec<Blocks> = enumerate_partitions(n, k).unwrap().iter().map(blocks_of).collect();
            let oracle = rgs_partitions(n, k);
            assert_eq!(mine.len(), oracle.len());
            assert_eq!(mine.iter().collect::<BTreeSet<_>>(), oracle.iter().collect::<BTreeSet<_>>());
            // explicit formula k! S(n,k) = Σ (-1)^j C(k,j) (k-j)^n
            let surj: i128 = (0..=k).map(|j| (if j % 2 == 0 { 1 } else { -1 }) * binom(k, j) as i128 * ((k - j) as i128).pow(n as u32)).sum();
            let fact: i128 = (1..=k as i128).product();
            assert_eq!(surj / fact, oracle.len() as i128);
        }
    }
}

#[test]
fn phi_tilde_by_brute_force() {
    for n in 2..=6usize {
        for d in -1..=n as i32 - 3 {
            for p in partitions(n, d).unwrap() {
                let blocks = blocks_of(&p);
                let mut expected = BTreeSet::new();
                for mask in 0u32..(1 << n) {
                    let t: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                    let meets_all = blocks.iter().all(|b| b.iter().any(|e| t.contains(e)));
                    if meets_all && t.len() as i32 >= d + 3 && (t.len() as i32 - d - 3) % 2 == 0 {
                        expected.insert(t.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","));
                    }
                }
                let got = phi_tilde(&SpVector::basis(p.clone())).unwrap();
                assert!(got.sum().iter().all(|(_, c)| c.is_one()));
                let got: BTreeSet<String> = got.sum().labels().map(|t| t.to_string()).collect();
                assert_eq!(got, expected, "{p}");
            }
        }
    }
}

fn det_bareiss(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(s) = (k + 1..n).find(|&i| m[i][k] != 0) else { return 0 };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

#[test]
fn pairing_determinants_are_nonzero() {
    for (n, d) in [(4, 1), (5, 1), (5, 2), (6, 1), (6, 2), (7, 2)] {
        let q = build_quotient(n, d).unwrap();
        let ts: Vec<Vec<usize>> = enumerate_kappa_index(n, d).unwrap().iter().map(|t| t.members()).collect();
        assert_eq!(ts.len(), kappa_size(n, d));
        let rows: Vec<Vec<i128>> = q
            .basis()
            .iter()
            .map(|p| {
                let blocks = blocks_of(p);
                ts.iter().map(|t| blocks.iter().all(|b| b.iter().any(|e| t.contains(e))) as i128).collect()
            })
            .collect();
        assert_eq!(rows.len(), ts.len());
        assert_ne!(det_bareiss(rows.clone()), 0, "(n,d) = ({n},{d})");
        // and the library matrix agrees entry by entry
        let lib = pairing_matrix(&q).unwrap().to_dense();
        let lib: Vec<Vec<i128>> = lib.iter().map(|r| r.iter().map(|c| c.to_i64_pair().unwrap().0 as i128).collect()).collect();
        assert_eq!(lib, rows);
    }
    let q = build_quotient(7, 2).unwrap();
    assert_eq!(q.dim(), 22);
}

#[test]
fn pushforward_kernel_on_five_points() {
    let src = partitions(5, 1).unwrap();
    let rows = src.iter().map(|p| pushforward_lift(&SpVector::basis(p.clone())).unwrap().into_sum()).collect();
    let m = SparseMatrix::new(partitions(4, 1).unwrap(), rows).unwrap();
    // six of the ten have {5} as a block; the other four all land on {1}{2}{3}{4}
    let killed = src.iter().filter(|p| text(&blocks_of(p)).split('|').any(|b| b == "5")).count();
    assert_eq!(killed, 6);
    assert_eq!(rank(&m), 1);
    assert_eq!(kernel(&m.transpose()).rank(), 10 - 1);
}

#[test]
fn tree_counts() {
    let double_factorial = |k: usize| (1..=k).rev().step_by(2).product::<usize>();
    for n in 3..=8 {
        assert_eq!(enumerate_trees(n, 0).unwrap().len(), double_factorial(2 * n - 5), "points, n={n}");
        if n >= 4 {
            // one edge: a split {A, B} with |A|, |B| ≥ 2
            let one_edge = (1usize << (n - 1)) - n - 1;
            assert_eq!(enumerate_trees(n, n - 4).unwrap().len(), one_edge, "n={n}");
        }
        let corolla = enumerate_trees(n, n - 3).unwrap();
        assert_eq!(corolla.len(), 1);
        assert_eq!(corolla[0].classify(), if n == 3 { Kind::Point } else { Kind::TypeI });
    }
}
