//! The verification suite: named checks, each run per cell (`(n, d)`, a
//! single `n`, or a whole range) and producing a report with a witness.
//!
//! Every check reads relations, quotients, the pairing and `φ̃` from an
//! [`Env`], so injected faults surface as failures.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chowq::{partitions, pushforward_lift, pullback_lift, quotient_map_matrix, Lift, QuotientSpace, SpVector};
use crate::env::Env;
use crate::exactlin::{echelonize, kernel, rank, FormalSum, Rational, SparseMatrix};
use crate::kappa::{
    alpha, alpha_parity, beta, beta_parity, bipartition_pushforward, even_map, gamma_f, gamma_sp, odd_map,
    pairing_rows_with, parity_map_linear, KVector, ParityVector,
};
use crate::setcomb::{
    act, binomial, character_fixed_points, enumerate_bipartitions, enumerate_kappa_index, enumerate_parity,
    kappa_index_count, Act, OrientedBipartition, Permutation, SetPartition, Subset,
};
use crate::strata::{enumerate_trees, Forgotten, Kind, StratumClass};
use crate::Error;

/// Largest `n_max` the suite accepts.
pub const MAX_VERIFY_N: usize = 8;

/// Default `n_max`.
pub const DEFAULT_N_MAX: usize = 7;

/// Random triples per cell in the equivariance check.
pub const EQUIVARIANCE_TRIPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    DimensionFormula,
    TheoremRoot,
    PerfectPairing,
    ExactSequences,
    CommutingSquares,
    SurjectivityLemmas,
    StrataConsistency,
    BaseCases,
    RelationsAnnihilated,
    RelationsInvariant,
    PairingEquivariance,
    Characters,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::DimensionFormula,
        Check::TheoremRoot,
        Check::PerfectPairing,
        Check::ExactSequences,
        Check::CommutingSquares,
        Check::SurjectivityLemmas,
        Check::StrataConsistency,
        Check::BaseCases,
        Check::RelationsAnnihilated,
        Check::RelationsInvariant,
        Check::PairingEquivariance,
        Check::Characters,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::DimensionFormula => "dimension_formula",
            Check::TheoremRoot => "theorem_root",
            Check::PerfectPairing => "perfect_pairing",
            Check::ExactSequences => "exact_sequences",
            Check::CommutingSquares => "commuting_squares",
            Check::SurjectivityLemmas => "surjectivity_lemmas",
            Check::StrataConsistency => "strata_consistency",
            Check::BaseCases => "base_cases",
            Check::RelationsAnnihilated => "relations_annihilated",
            Check::RelationsInvariant => "relations_invariant",
            Check::PairingEquivariance => "pairing_equivariance",
            Check::Characters => "characters",
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }

    /// The work items of this check for ground sets up to `n_max`, in
    /// canonical order. Every cell touches only ground sets `≤ n_max`.
    pub fn cells(self, n_max: usize) -> Vec<Params> {
        let quotient_cells = |lo_extra: usize| -> Vec<Params> {
            (4..=n_max.saturating_sub(lo_extra))
                .flat_map(|n| (1..=n as i32 - 3).map(move |d| Params::Cell { n, d }))
                .collect()
        };
        match self {
            Check::ExactSequences => quotient_cells(1),
            Check::CommutingSquares => (2..n_max)
                .flat_map(|n| (-1..=n as i32 - 3).map(move |d| Params::Cell { n, d }))
                .collect(),
            Check::SurjectivityLemmas => (1..=n_max).map(|n| Params::Size { n }).collect(),
            Check::StrataConsistency => (4..=n_max).map(|n| Params::Size { n }).collect(),
            Check::BaseCases => vec![Params::UpTo { n_max }],
            _ => quotient_cells(0),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Params {
    Cell { n: usize, d: i32 },
    Size { n: usize },
    UpTo { n_max: usize },
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::Cell { n, d } => write!(f, "n={n},d={d}"),
            Params::Size { n } => write!(f, "n={n}"),
            Params::UpTo { n_max } => write!(f, "n<={n_max}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
}

/// A witness value: counts, flags, and text encodings of counterexamples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Int(i64),
    Bool(bool),
    Text(String),
    List(Vec<Witness>),
}

impl From<usize> for Witness {
    fn from(v: usize) -> Self {
        Witness::Int(v as i64)
    }
}

impl From<i64> for Witness {
    fn from(v: i64) -> Self {
        Witness::Int(v)
    }
}

impl From<bool> for Witness {
    fn from(v: bool) -> Self {
        Witness::Bool(v)
    }
}

impl From<String> for Witness {
    fn from(v: String) -> Self {
        Witness::Text(v)
    }
}

impl From<&str> for Witness {
    fn from(v: &str) -> Self {
        Witness::Text(v.to_string())
    }
}

impl<T: Into<Witness>> From<Vec<T>> for Witness {
    fn from(v: Vec<T>) -> Self {
        Witness::List(v.into_iter().map(Into::into).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub check: Check,
    pub params: Params,
    pub status: Status,
    /// The cell has nothing to check; such reports always pass.
    pub vacuous: bool,
    pub witness: Vec<(String, Witness)>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn witness(&self, key: &str) -> Option<&Witness> {
        self.witness.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

/// True when every report passes. Vacuous reports pass by construction.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(CheckReport::passed)
}

pub fn check_n_max(n_max: usize) -> Result<(), Error> {
    if !(4..=MAX_VERIFY_N).contains(&n_max) {
        return Err(Error::Range(format!("n_max must lie in 4..={MAX_VERIFY_N} (got {n_max})")));
    }
    Ok(())
}

/// Runs one check on every cell up to `n_max`, sequentially.
pub fn run_check<E: Env + ?Sized>(env: &E, check: Check, n_max: usize) -> Result<Vec<CheckReport>, Error> {
    check_n_max(n_max)?;
    Ok(check.cells(n_max).iter().map(|p| run_cell(env, check, p)).collect())
}

/// The whole suite, in `Check::ALL` order.
pub fn run_all<E: Env + ?Sized>(env: &E, n_max: usize) -> Result<Vec<CheckReport>, Error> {
    check_n_max(n_max)?;
    let mut out = Vec::new();
    for c in Check::ALL {
        out.extend(run_check(env, c, n_max)?);
    }
    Ok(out)
}

pub fn check_dimension_formula<E: Env + ?Sized>(env: &E, n_max: usize) -> Result<Vec<CheckReport>, Error> {
    run_check(env, Check::DimensionFormula, n_max)
}

pub fn check_theorem_root<E: Env + ?Sized>(env: &E, n_max: usize) -> Result<Vec<CheckReport>, Error> {
    run_check(env, Check::TheoremRoot, n_max)
}

pub fn check_exact_sequences<E: Env + ?Sized>(env: &E, n_max: usize) -> Result<Vec<CheckReport>, Error> {
    run_check(env, Check::ExactSequences, n_max)
}

pub fn check_commuting_squares<E: Env + ?Sized>(env: &E, n_max: usize) -> Result<Vec<CheckReport>, Error> {
    run_check(env, Check::CommutingSquares, n_max)
}

pub fn check_surjectivity_lemmas<E: Env + ?Sized>(env: &E, n_max: usize) -> Result<Vec<CheckReport>, Error> {
    run_check(env, Check::SurjectivityLemmas, n_max)
}

pub fn check_strata_consistency<E: Env + ?Sized>(env: &E, n_max: usize) -> Result<Vec<CheckReport>, Error> {
    run_check(env, Check::StrataConsistency, n_max)
}

/// Runs one check on one cell. Errors raised while checking become failing
/// reports carrying the error text.
pub fn run_cell<E: Env + ?Sized>(env: &E, check: Check, params: &Params) -> CheckReport {
    let mut rec = Rec::default();
    let outcome = match (check, *params) {
        (Check::DimensionFormula, Params::Cell { n, d }) => dimension_formula(env, n, d, &mut rec),
        (Check::TheoremRoot, Params::Cell { n, d }) => theorem_root(env, n, d, &mut rec),
        (Check::PerfectPairing, Params::Cell { n, d }) => perfect_pairing(env, n, d, &mut rec),
        (Check::ExactSequences, Params::Cell { n, d }) => exact_sequences(env, n, d, &mut rec),
        (Check::CommutingSquares, Params::Cell { n, d }) => commuting_squares(env, n, d, &mut rec),
        (Check::SurjectivityLemmas, Params::Size { n }) => surjectivity_lemmas(env, n, &mut rec),
        (Check::StrataConsistency, Params::Size { n }) => strata_consistency(n, &mut rec),
        (Check::BaseCases, Params::UpTo { n_max }) => base_cases(env, n_max, &mut rec),
        (Check::RelationsAnnihilated, Params::Cell { n, d }) => relations_annihilated(env, n, d, &mut rec),
        (Check::RelationsInvariant, Params::Cell { n, d }) => relations_invariant(env, n, d, &mut rec),
        (Check::PairingEquivariance, Params::Cell { n, d }) => pairing_equivariance(env, n, d, &mut rec),
        (Check::Characters, Params::Cell { n, d }) => characters(env, n, d, &mut rec),
        (c, p) => Err(Error::Range(format!("{c} does not run on cell {p}"))),
    };
    if let Err(e) = outcome {
        rec.fail("error", e.to_string());
    }
    CheckReport {
        check,
        params: *params,
        status: if rec.ok { Status::Pass } else { Status::Fail },
        vacuous: rec.vacuous,
        witness: rec.witness,
    }
}

struct Rec {
    ok: bool,
    vacuous: bool,
    witness: Vec<(String, Witness)>,
}

impl Default for Rec {
    fn default() -> Self {
        Rec { ok: true, vacuous: false, witness: Vec::new() }
    }
}

impl Rec {
    fn put(&mut self, key: &str, v: impl Into<Witness>) {
        self.witness.push((key.to_string(), v.into()));
    }

    /// Records `got`; on mismatch also records the expected value and fails.
    fn expect_eq(&mut self, key: &str, got: usize, want: usize) {
        self.put(key, got);
        if got != want {
            self.ok = false;
            self.put(&format!("{key}_expected"), want);
        }
    }

    fn require(&mut self, key: &str, cond: bool) {
        self.put(key, cond);
        self.ok &= cond;
    }

    fn fail(&mut self, key: &str, text: String) {
        self.ok = false;
        self.put(key, text);
    }

    /// Counts how many items pass `test`, reporting the first failure.
    fn tally<T>(&mut self, key: &str, items: impl IntoIterator<Item = T>, mut test: impl FnMut(&T) -> Result<Option<String>, Error>) -> Result<(), Error> {
        let mut checked = 0usize;
        let mut bad = 0usize;
        let mut first = None;
        for it in items {
            checked += 1;
            if let Some(why) = test(&it)? {
                bad += 1;
                first.get_or_insert(why);
            }
        }
        self.put(&format!("{key}_checked"), checked);
        if let Some(why) = first {
            self.put(&format!("{key}_failures"), bad);
            self.fail(&format!("{key}_counterexample"), why);
        }
        Ok(())
    }
}

fn basis_image<E: Env + ?Sized>(env: &E, p: &SetPartition) -> Result<FormalSum<Subset>, Error> {
    Ok(env.phi_tilde(&SpVector::basis(p.clone()))?.into_sum())
}

/// `φ` in quotient coordinates, through the environment.
pub fn env_phi_matrix<E: Env + ?Sized>(env: &E, q: &QuotientSpace) -> Result<SparseMatrix<Subset>, Error> {
    let rows = q.basis().iter().map(|p| basis_image(env, p)).collect::<Result<Vec<_>, _>>()?;
    SparseMatrix::new(enumerate_kappa_index(q.n(), q.d())?, rows)
}

/// The pairing on the quotient basis, through the environment.
pub fn env_pairing_matrix<E: Env + ?Sized>(env: &E, q: &QuotientSpace) -> Result<SparseMatrix<Subset>, Error> {
    pairing_rows_with(&q.basis(), q.n(), q.d(), |p, t| env.pair(p, t))
}

fn dimension_formula<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    let q = env.quotient(n, d)?;
    let index = enumerate_kappa_index(n, d)?.len();
    rec.put("num_partitions", q.num_partitions());
    rec.put("rank_relations", q.rank_relations());
    rec.expect_eq("dim", q.dim(), index);
    rec.expect_eq("kappa_index_size", kappa_index_count(n, d) as usize, index);
    if d == 1 {
        let closed = (1usize << (n - 1)) - binomial(n, 2) as usize - 1;
        rec.expect_eq("closed_form", closed, q.dim());
    }
    Ok(())
}

fn theorem_root<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    let q = env.quotient(n, d)?;
    let m = env_phi_matrix(env, &q)?;
    rec.put("rows", m.nrows());
    rec.put("cols", m.ncols());
    rec.require("square", m.nrows() == m.ncols());
    rec.expect_eq("rank", rank(&m), q.dim());
    rec.expect_eq("rank_vs_index", rank(&m), m.ncols());
    Ok(())
}

fn perfect_pairing<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    let q = env.quotient(n, d)?;
    let m = env_pairing_matrix(env, &q)?;
    rec.put("rows", m.nrows());
    rec.put("cols", m.ncols());
    rec.require("square", m.nrows() == m.ncols());
    let r = rank(&m);
    rec.expect_eq("rank", r, m.ncols());
    let full = pairing_rows_with(q.partitions(), n, d, |p, t| env.pair(p, t))?;
    rec.expect_eq("rank_all_partitions", rank(&full), q.dim());
    Ok(())
}

/// The space a `(d, n)` cell of an exact sequence refers to, which is zero
/// when there are no `(d+3)`-block partitions.
fn quotient_or_zero<E: Env + ?Sized>(env: &E, n: usize, d: i32) -> Result<Arc<QuotientSpace>, Error> {
    if (d + 3) as usize > n {
        Ok(Arc::new(QuotientSpace::empty(n, d)?))
    } else {
        env.quotient(n, d)
    }
}

fn kappa_map_matrix(
    source: &[Subset],
    universe: Vec<Subset>,
    f: impl Fn(&KVector) -> Result<KVector, Error>,
    d: i32,
) -> Result<SparseMatrix<Subset>, Error> {
    let rows = source
        .iter()
        .map(|t| Ok(f(&KVector::new(t.n(), d, FormalSum::basis(*t))?)?.into_sum()))
        .collect::<Result<Vec<_>, Error>>()?;
    SparseMatrix::new(universe, rows)
}

/// `Q_{d,n} → Q_{d+1,n+1} → Q_{d+1,n} → 0` with `0 →` on the left, the dual
/// kappa-index sequence, and the partition-level statement behind
/// exactness in the middle.
fn exact_sequences<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    let src = env.quotient(n, d)?;
    let mid = env.quotient(n + 1, d + 1)?;
    let tgt = quotient_or_zero(env, n, d + 1)?;
    rec.put("dim_source", src.dim());
    rec.put("dim_middle", mid.dim());
    rec.put("dim_target", tgt.dim());

    let pull = quotient_map_matrix(Lift::Pullback, &src, &mid)?;
    let push = quotient_map_matrix(Lift::Pushforward, &mid, &tgt)?;
    let (rp, rq) = (rank(&pull), rank(&push));
    // (a), (b)
    rec.expect_eq("rank_pullback", rp, src.dim());
    rec.expect_eq("rank_pushforward", rq, tgt.dim());
    // (c)
    rec.tally("composite", pull.rows().iter().enumerate(), |(i, row)| {
        let v = SpVector::new(n + 1, d + 1, (*row).clone())?;
        let img = tgt.reduce(&pushforward_lift(&v)?)?;
        Ok((!img.is_zero()).then(|| format!("pushforward of pullback of basis vector {i} is {}", img.sum())))
    })?;
    rec.expect_eq("middle_kernel_dim", mid.dim() - rq, rp);

    let lift_universe = partitions(n + 1, d + 1)?;
    let lift_push = SparseMatrix::new(
        partitions(n, d + 1)?,
        lift_universe
            .iter()
            .map(|p| Ok(pushforward_lift(&SpVector::basis(p.clone()))?.into_sum()))
            .collect::<Result<Vec<_>, Error>>()?,
    )?;
    let lift_kernel: Vec<FormalSum<SetPartition>> = kernel(&lift_push.transpose())
        .rows()
        .into_iter()
        .map(|x| x.map_labels(|&i| Some(lift_universe[i].clone())))
        .collect();
    let mut span = mid.relations().rows();
    for p in partitions(n, d)? {
        span.push(pullback_lift(&SpVector::basis(p))?.into_sum());
    }
    let span = echelonize(&span, lift_universe.clone())?;
    rec.put("lift_kernel_dim", lift_kernel.len());
    rec.tally("lift_kernel", lift_kernel.iter(), |x| {
        Ok((!span.contains(x)?).then(|| format!("{x} is not in im(pullback) + relations")))
    })?;
    // relations of the middle space exist once d+1 ≤ (n+1)−4
    let gens = if d <= n as i32 - 4 { env.relation_generators(n + 1, d + 1)? } else { Vec::new() };
    rec.tally("pushed_relations", gens.iter(), |g| {
        let img = pushforward_lift(g)?;
        Ok((!tgt.is_zero_class(&img)?).then(|| format!("pushforward of {} is not a relation", g.sum())))
    })?;

    // (d)
    let k_src = enumerate_kappa_index(n, d)?;
    let k_mid = enumerate_kappa_index(n + 1, d + 1)?;
    let k_tgt = enumerate_kappa_index(n, d + 1)?;
    let a = kappa_map_matrix(&k_src, k_mid.clone(), alpha, d)?;
    let b = kappa_map_matrix(&k_mid, k_tgt.clone(), beta, d + 1)?;
    let (ra, rb) = (rank(&a), rank(&b));
    rec.expect_eq("rank_alpha", ra, k_src.len());
    rec.expect_eq("rank_beta", rb, k_tgt.len());
    rec.expect_eq("kappa_middle_size", k_mid.len(), ra + rb);
    rec.tally("beta_alpha", k_src.iter(), |t| {
        let v = KVector::new(n, d, FormalSum::basis(**t))?;
        let img = beta(&alpha(&v)?)?;
        Ok((!img.is_zero()).then(|| format!("beta(alpha({{{t}}})) = {}", img.sum())))
    })?;

    // (e)
    rec.expect_eq("dim_middle_vs_sides", mid.dim(), src.dim() + tgt.dim());
    rec.expect_eq("dim_middle_vs_index", mid.dim(), k_mid.len());
    Ok(())
}

fn commuting_squares<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    rec.tally("left", partitions(n, d)?, |p| {
        let v = SpVector::basis(p.clone());
        let lhs = env.phi_tilde(&pullback_lift(&v)?)?;
        let rhs = alpha(&env.phi_tilde(&v)?)?;
        Ok((lhs != rhs).then(|| format!("{p}: {} != {}", lhs.sum(), rhs.sum())))
    })?;
    let upper = partitions(n + 1, d + 1)?;
    let with_singleton = upper.iter().filter(|p| p.has_singleton(n + 1)).count();
    rec.put("right_case1", with_singleton);
    rec.put("right_case2", upper.len() - with_singleton);
    rec.tally("right", upper, |p| {
        let v = SpVector::basis(p.clone());
        let lhs = env.phi_tilde(&pushforward_lift(&v)?)?;
        let rhs = beta(&env.phi_tilde(&v)?)?;
        Ok((lhs != rhs).then(|| format!("{p}: {} != {}", lhs.sum(), rhs.sum())))
    })?;
    Ok(())
}

fn parity_matrix(n: usize, odd: bool, f: fn(&OrientedBipartition) -> ParityVector) -> Result<SparseMatrix<Subset>, Error> {
    let rows = enumerate_bipartitions(n)?.iter().map(|b| f(b).into_sum()).collect();
    SparseMatrix::new(enumerate_parity(n, odd)?, rows)
}

fn surjectivity_lemmas<E: Env + ?Sized>(env: &E, n: usize, rec: &mut Rec) -> Result<(), Error> {
    let half = 1usize << (n - 1);
    rec.expect_eq("odd_size", enumerate_parity(n, true)?.len(), half);
    rec.expect_eq("even_size", enumerate_parity(n, false)?.len(), half);
    rec.expect_eq("rank_odd", rank(&parity_matrix(n, true, odd_map)?), half);
    rec.expect_eq("rank_even", rank(&parity_matrix(n, false, even_map)?), half);
    for d in [-1, 0] {
        if (d + 3) as usize > n {
            continue;
        }
        let rows = partitions(n, d)?.iter().map(|p| basis_image(env, p)).collect::<Result<Vec<_>, _>>()?;
        let m = SparseMatrix::new(enumerate_kappa_index(n, d)?, rows)?;
        let key = if d == -1 { "rank_phi_minus1" } else { "rank_phi_0" };
        rec.expect_eq(key, rank(&m), kappa_index_count(n, d) as usize);
    }
    if n < 2 {
        return Ok(());
    }

    // the auxiliary squares from F_{n-1} into F_n and back
    let lower = enumerate_bipartitions(n - 1)?;
    let upper = enumerate_bipartitions(n)?;
    rec.tally("odd_gamma", lower.iter(), |b| {
        let lhs = parity_map_linear(n, true, &gamma_f(b)?);
        let rhs = alpha_parity(&even_map(b))?;
        Ok((lhs != rhs).then(|| format!("({b}): {} != {}", lhs.sum(), rhs.sum())))
    })?;
    rec.tally("even_gamma", lower.iter(), |b| {
        let lhs = parity_map_linear(n, false, &gamma_f(b)?);
        let rhs = alpha_parity(&odd_map(b))?;
        Ok((lhs != rhs).then(|| format!("({b}): {} != {}", lhs.sum(), rhs.sum())))
    })?;
    rec.tally("odd_pushforward", upper.iter(), |b| {
        let lhs = odd_map(&bipartition_pushforward(b)?);
        let rhs = beta_parity(&odd_map(b))?;
        Ok((lhs != rhs).then(|| format!("({b}): {} != {}", lhs.sum(), rhs.sum())))
    })?;
    rec.tally("even_pushforward", upper.iter(), |b| {
        let lhs = even_map(&bipartition_pushforward(b)?);
        let rhs = beta_parity(&even_map(b))?;
        Ok((lhs != rhs).then(|| format!("({b}): {} != {}", lhs.sum(), rhs.sum())))
    })?;
    rec.tally("pushforward_gamma", lower.iter(), |b| {
        let g = gamma_f(b)?;
        let mut img: FormalSum<OrientedBipartition> = FormalSum::zero();
        for (x, c) in g.iter() {
            img.add_term(bipartition_pushforward(x)?, c);
        }
        Ok((!img.is_zero()).then(|| format!("({b}): {img}")))
    })?;
    rec.tally("phi_gamma_sp", lower.iter(), |b| {
        let lhs = env.phi_tilde(&gamma_sp(b)?)?;
        let rhs = alpha_parity(&odd_map(b))?;
        Ok((lhs.sum() != rhs.sum()).then(|| format!("({b}): {} != {}", lhs.sum(), rhs.sum())))
    })?;
    rec.tally("pushforward_gamma_sp", lower.iter(), |b| {
        let img = pushforward_lift(&gamma_sp(b)?)?;
        Ok((!img.is_zero()).then(|| format!("({b}): {}", img.sum())))
    })?;
    Ok(())
}

fn strata_consistency(n: usize, rec: &mut Rec) -> Result<(), Error> {
    let (mut type_i, mut type_ii, mut matched, mut collapsed) = (0usize, 0usize, 0usize, 0usize);
    let mut first_bad: Option<String> = None;
    let mut note = |why: String| {
        first_bad.get_or_insert(why);
    };
    for dim in 1..=n - 3 {
        let mut by_partition: BTreeMap<SetPartition, StratumClass> = BTreeMap::new();
        let mut bad_blocks = 0usize;
        for t in enumerate_trees(n, dim)? {
            let forgotten = t.forget_mark(n)?;
            match t.classify() {
                Kind::TypeI => {
                    type_i += 1;
                    let class = t.stratum_class()?;
                    let StratumClass::Partition(p) = &class else {
                        note(format!("Type I tree {:?} has zero class", t.splits()));
                        continue;
                    };
                    if p.num_blocks() != dim + 3 {
                        bad_blocks += 1;
                    }
                    // (a) equal partitions give equal classes
                    let canon = t.canonical().stratum_class()?;
                    let prev = by_partition.entry(p.clone()).or_insert_with(|| class.clone());
                    if *prev != class || canon != class {
                        note(format!("trees with partition {p} give different classes"));
                    }
                    // (b) forgetting the last mark matches the partition-level pushforward
                    let pushed = pushforward_lift(&SpVector::basis(p.clone()))?;
                    let ok = match &forgotten {
                        Forgotten::Collapsed { .. } => {
                            collapsed += 1;
                            pushed.is_zero()
                        }
                        Forgotten::Stratum(s) => {
                            s.classify() == Kind::TypeI
                                && s.stratum_class()?
                                    == pushed
                                        .sum()
                                        .leading()
                                        .map_or(StratumClass::Zero, |(q, _)| StratumClass::Partition(q.clone()))
                                && pushed.sum().len() == 1
                        }
                    };
                    if ok {
                        matched += 1;
                    } else {
                        note(format!("forgetting {n} from the tree with splits {:?} disagrees with {}", t.splits(), pushed.sum()));
                    }
                }
                Kind::TypeII => {
                    type_ii += 1;
                    if t.stratum_class()? != StratumClass::Zero {
                        note(format!("Type II tree {:?} has a nonzero class", t.splits()));
                    }
                    // (c)
                    if let Forgotten::Stratum(s) = &forgotten {
                        if s.classify() != Kind::TypeII {
                            note(format!("Type II tree {:?} pushes forward to a Type I stratum", t.splits()));
                        }
                    }
                }
                Kind::Point => note(format!("positive-dimensional tree {:?} classified as a point", t.splits())),
            }
        }
        if bad_blocks > 0 {
            note(format!("{bad_blocks} Type I trees of dimension {dim} have the wrong number of blocks"));
        }
        // every partition with enough blocks is realized by a Type I tree
        let all = partitions(n, dim as i32)?;
        if by_partition.len() != all.len() {
            note(format!("{} of {} partitions with {} blocks are realized", by_partition.len(), all.len(), dim + 3));
        }
    }
    rec.put("type_i", type_i);
    rec.put("type_ii", type_ii);
    rec.put("collapsed", collapsed);
    rec.expect_eq("matched", matched, type_i);
    if let Some(why) = first_bad {
        rec.fail("counterexample", why);
    }
    Ok(())
}

fn base_cases<E: Env + ?Sized>(env: &E, n_max: usize, rec: &mut Rec) -> Result<(), Error> {
    let expect_text = |rec: &mut Rec, key: &str, got: String, want: &str| {
        let ok = got == want;
        rec.put(key, got);
        if !ok {
            rec.fail(&format!("{key}_expected"), want.to_string());
        }
    };
    let b1 = OrientedBipartition::parse(1, "1||")?;
    expect_text(rec, "odd_1", format!("{}", odd_map(&b1).sum()), "-[1]");
    expect_text(rec, "even_1", format!("{}", even_map(&b1).sum()), "-2*[]");
    expect_text(rec, "phi_minus1_2", format!("{}", env.phi_tilde(&SpVector::basis(SetPartition::singletons(2)))?.sum()), "[1,2]");
    expect_text(rec, "phi_0_3", format!("{}", env.phi_tilde(&SpVector::basis(SetPartition::singletons(3)))?.sum()), "[1,2,3]");
    for n in 4..=n_max {
        let d = n as i32 - 3;
        let q = env.quotient(n, d)?;
        rec.expect_eq(&format!("dim_top_{n}"), q.dim(), 1);
        let s = SetPartition::singletons(n);
        rec.require(&format!("basis_top_{n}"), q.basis() == vec![s.clone()]);
        let img = basis_image(env, &s)?;
        rec.require(&format!("phi_top_{n}"), img == FormalSum::basis(Subset::full(n)));
    }
    Ok(())
}

fn relations_annihilated<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    if d > n as i32 - 4 {
        rec.vacuous = true;
        rec.put("generators", 0usize);
        return Ok(());
    }
    let gens = env.relation_generators(n, d)?;
    rec.tally("generators", gens.iter().enumerate(), |(i, g)| {
        let img = env.phi_tilde(g)?;
        Ok((!img.is_zero()).then(|| format!("generator {i} = {} maps to {}", g.sum(), img.sum())))
    })
}

fn relations_invariant<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    if d > n as i32 - 4 {
        rec.vacuous = true;
        rec.put("generators", 0usize);
        return Ok(());
    }
    let q = env.quotient(n, d)?;
    let gens = env.relation_generators(n, d)?;
    // a transposition and an n-cycle generate S_n
    let perms = [Permutation::cycle(n, &[1, 2])?, Permutation::cycle(n, &(1..=n).collect::<Vec<_>>())?];
    rec.tally("images", gens.iter().flat_map(|g| perms.iter().map(move |p| (g, p))), |(g, p)| {
        let moved = SpVector::new(n, d, g.sum().map_labels(|x| Some(x.act_unchecked(p))))?;
        Ok((!q.is_zero_class(&moved)?).then(|| format!("[{p}] applied to {} leaves the relations", g.sum())))
    })
}

fn pairing_equivariance<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    let seed = 0x6b61_7070_6100_0000u64 ^ ((n as u64) << 8) ^ (d as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps = partitions(n, d)?;
    let ts = enumerate_kappa_index(n, d)?;
    rec.put("seed", seed as i64);
    let triples: Vec<(Permutation, usize, usize)> = (0..EQUIVARIANCE_TRIPLES)
        .map(|_| (Permutation::random(n, &mut rng), rng.gen_range(0..ps.len()), rng.gen_range(0..ts.len())))
        .collect();
    rec.tally("triples", triples.iter(), |(g, i, j)| {
        let (p, t) = (&ps[*i], &ts[*j]);
        let moved = env.pair(&act(g, p)?, &act(g, t)?);
        let orig = env.pair(p, t);
        Ok((moved != orig).then(|| format!("g=[{g}], partition {p}, subset {{{t}}}: {moved} vs {orig}")))
    })
}

/// One permutation per cycle type of `S_n`, types in reverse lexicographic
/// order starting from the identity.
pub fn cycle_type_representatives(n: usize) -> Result<Vec<(Vec<usize>, Permutation)>, Error> {
    fn parts(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            cur.push(k);
            parts(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut types = Vec::new();
    parts(n, n, &mut Vec::new(), &mut types);
    types.reverse();
    types
        .into_iter()
        .map(|ty| {
            let mut images = Vec::with_capacity(n);
            let mut start = 1;
            for &k in &ty {
                for i in 0..k {
                    images.push(start + (i + 1) % k);
                }
                start += k;
            }
            Ok((ty, Permutation::from_images(&images)?))
        })
        .collect()
}

/// Trace of `g` acting on `Q_{d,n}` in quotient coordinates.
pub fn quotient_trace(q: &QuotientSpace, g: &Permutation) -> Result<Rational, Error> {
    let mut tr = Rational::ZERO;
    for p in q.basis() {
        let img = q.reduce(&SpVector::basis(act(g, &p)?))?;
        tr += &img.sum().coeff(&p);
    }
    Ok(tr)
}

fn characters<E: Env + ?Sized>(env: &E, n: usize, d: i32, rec: &mut Rec) -> Result<(), Error> {
    let q = env.quotient(n, d)?;
    let reps = cycle_type_representatives(n)?;
    let mut traces = Vec::new();
    rec.tally("cycle_types", reps.iter(), |(ty, g)| {
        let tr = quotient_trace(&q, g)?;
        let want = character_fixed_points(n, d, g)?;
        traces.push(format!("{tr}"));
        Ok((tr != Rational::from(want as i64)).then(|| format!("cycle type {ty:?}: trace {tr}, fixed points {want}")))
    })?;
    rec.put("traces", traces);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Fault, LocalEnv};

    fn cell(check: Check, n: usize, d: i32) -> CheckReport {
        run_cell(&LocalEnv::new(), check, &Params::Cell { n, d })
    }

    #[test]
    fn names_roundtrip() {
        for c in Check::ALL {
            assert_eq!(Check::from_name(c.name()), Some(c));
        }
        assert_eq!(Check::from_name("nope"), None);
    }

    #[test]
    fn cell_ranges() {
        assert_eq!(Check::DimensionFormula.cells(5).len(), 3);
        assert_eq!(Check::ExactSequences.cells(5), vec![Params::Cell { n: 4, d: 1 }]);
        // base n from 2 to 4 with -1 <= d <= n-3
        assert_eq!(Check::CommutingSquares.cells(5).len(), 1 + 2 + 3);
        assert!(run_check(&LocalEnv::new(), Check::BaseCases, 3).is_err());
        assert!(run_check(&LocalEnv::new(), Check::BaseCases, 9).is_err());
    }

    #[test]
    fn dimension_cells() {
        let r = cell(Check::DimensionFormula, 6, 1);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.witness("dim"), Some(&Witness::Int(16)));
        assert_eq!(r.witness("closed_form"), Some(&Witness::Int(16)));
        assert!(cell(Check::DimensionFormula, 5, 1).passed());
    }

    #[test]
    fn small_cells_pass() {
        for check in Check::ALL {
            let reports = run_check(&LocalEnv::new(), check, 5).unwrap();
            assert!(!reports.is_empty());
            for r in &reports {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn exact_sequence_degenerate_target() {
        let r = cell(Check::ExactSequences, 4, 1);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.witness("dim_target"), Some(&Witness::Int(0)));
        assert_eq!(r.witness("rank_pullback"), Some(&Witness::Int(1)));
        assert_eq!(r.witness("dim_middle"), Some(&Witness::Int(1)));
    }

    #[test]
    fn vacuous_cells() {
        let r = cell(Check::RelationsAnnihilated, 5, 2);
        assert!(r.vacuous && r.passed());
        assert!(!cell(Check::RelationsAnnihilated, 5, 1).vacuous);
    }

    #[test]
    fn cycle_types() {
        let reps = cycle_type_representatives(4).unwrap();
        assert_eq!(reps.len(), 5);
        assert!(reps[0].1.is_identity());
        assert_eq!(reps[0].0, vec![1, 1, 1, 1]);
        assert_eq!(cycle_type_representatives(8).unwrap().len(), 22);
    }

    #[test]
    fn relation_sign_fault_is_caught() {
        let env = LocalEnv::with_faults(vec!["relation-sign:5:1:3:0".parse::<Fault>().unwrap()]);
        let reports = run_all(&env, 5).unwrap();
        let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.passed()).collect();
        assert!(failed.iter().any(|r| r.check == Check::RelationsAnnihilated));
        assert!(failed.iter().all(|r| !r.witness.is_empty()));
    }

    #[test]
    fn pairing_fault_is_caught() {
        let env = LocalEnv::with_faults(vec!["pairing:1,2|3|4|5:1,3,4,5".parse::<Fault>().unwrap()]);
        let reports = run_all(&env, 5).unwrap();
        assert!(!all_passed(&reports));
        let top = LocalEnv::with_faults(vec!["pairing:1|2|3|4:1,2,3,4".parse::<Fault>().unwrap()]);
        let r = run_cell(&top, Check::TheoremRoot, &Params::Cell { n: 4, d: 1 });
        assert!(!r.passed());
        assert_eq!(r.witness("rank"), Some(&Witness::Int(0)));
    }
}
