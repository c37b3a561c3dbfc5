//! Non-normality witnesses in `F_p[G_k]`.
//!
//! A normal element `W` satisfies `y_c W in W A` and `W y_c in A W`, so
//! `[y_c, W]` must lie in both one-sided ideals generated by `W`. Each membership
//! is a linear system over `F_p`; an infeasible one is a witness.
//! Truncated mode works modulo `J^(D+1)`, spanned by PBW monomials of degree `> D`.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp;
use crate::groupalg::{y_gen, AlgElem, Basis};
use crate::linalg::{solvable, DenseMatrix};
use crate::matgroup::{compose, factorize, mat_inv, mat_mul, tuple_mul, ExpTuple, NUM_GENERATORS};
use crate::padic::Ctx;

/// Default bound on the group order for exact mode (`3^8`, i.e. `p = 3, k = 2`).
pub const DEFAULT_DIM_CAP: u128 = 6561;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Truncated(u64),
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Truncated(d) => write!(f, "truncated mod J^{}", d + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    MemberBothSides,
    WitnessLeft(usize),
    WitnessRight(usize),
}

impl Outcome {
    pub fn is_witness(self) -> bool {
        self != Outcome::MemberBothSides
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Unit,
    NonNormalWitnessed,
    /// Every system was solvable at this precision; this never certifies normality.
    InconclusiveAtThisPrecision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub candidate: AlgElem,
    pub mode: Mode,
    /// One entry per generator `c = 1..=8`; empty for units.
    pub outcomes: Vec<Outcome>,
    pub verdict: Verdict,
}

/// In the local ring `F_p[G_k]`, `W` is a unit iff its augmentation is nonzero.
pub fn is_unit(w: &AlgElem) -> bool {
    w.augmentation() != 0
}

/// Arithmetic in `F_p[G_k] / J^(D+1)` on the PBW monomials of degree `<= D`.
#[derive(Debug, Clone)]
pub struct PbwTruncation {
    ctx: Ctx,
    max_degree: u64,
    basis: Vec<ExpTuple>,
    index: HashMap<ExpTuple, usize>,
    /// `left[i-1][b]` is `y_i * y^b` for basis monomials of degree `< D`.
    left: Vec<Vec<Vec<(usize, u32)>>>,
}

impl PbwTruncation {
    pub fn new(ctx: &Ctx, max_degree: u64) -> Self {
        let cap = ctx.gen_order() - 1;
        let mut basis = Vec::new();
        let mut cur = [0u64; NUM_GENERATORS];
        enumerate_bounded(0, max_degree, cap, &mut cur, &mut basis);
        basis.sort_by_key(|t| (t.degree(), *t));
        let index: HashMap<ExpTuple, usize> =
            basis.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let lower = basis.partition_point(|t| t.degree() < max_degree);

        let left = (1..=NUM_GENERATORS)
            .map(|i| {
                basis[..lower]
                    .par_iter()
                    .map(|b| {
                        let prod = if b.0[..i - 1].iter().all(|&a| a == 0) {
                            // already in PBW order
                            let mut t = *b;
                            t.0[i - 1] += 1;
                            if t.0[i - 1] > cap {
                                AlgElem::zero(ctx, Basis::Pbw)
                            } else {
                                AlgElem::monomial(t, ctx)
                            }
                        } else {
                            let y = y_gen(i, 1, ctx).expect("valid generator index");
                            y.mul(&AlgElem::monomial(*b, ctx))
                                .expect("same context")
                                .to_pbw_truncated(max_degree)
                        };
                        let mut row: Vec<(usize, u32)> =
                            prod.terms().iter().map(|(t, c)| (index[t], *c)).collect();
                        row.sort_unstable();
                        row
                    })
                    .collect()
            })
            .collect();
        PbwTruncation {
            ctx: *ctx,
            max_degree,
            basis,
            index,
            left,
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn max_degree(&self) -> u64 {
        self.max_degree
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ExpTuple] {
        &self.basis
    }

    pub fn index_of(&self, t: &ExpTuple) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Coordinates of `a mod J^(D+1)`.
    pub fn to_vector(&self, a: &AlgElem) -> Vec<u32> {
        let mut v = vec![0u32; self.dim()];
        for (t, c) in a.to_pbw_truncated(self.max_degree).terms() {
            v[self.index[t]] = *c;
        }
        v
    }

    pub fn from_vector(&self, v: &[u32]) -> AlgElem {
        AlgElem::from_terms(
            &self.ctx,
            Basis::Pbw,
            v.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| (self.basis[i], *c as i64)),
        )
    }

    fn unit_vector(&self, idx: usize) -> Vec<u32> {
        let mut v = vec![0u32; self.dim()];
        v[idx] = 1;
        v
    }

    /// `y_i * v`.
    fn apply_letter(&self, i: usize, v: &[u32]) -> Vec<u32> {
        let p = self.ctx.p32();
        let table = &self.left[i - 1];
        let mut out = vec![0u32; v.len()];
        for (b, &c) in v.iter().enumerate().take(table.len()) {
            if c == 0 {
                continue;
            }
            for &(j, d) in &table[b] {
                out[j] = fp::add(out[j], fp::mul(c, d, p), p);
            }
        }
        out
    }

    /// `y^alpha * v`, applying the letters of the ordered monomial right to left.
    fn apply_word(&self, alpha: &ExpTuple, v: &[u32]) -> Vec<u32> {
        let mut cur = v.to_vec();
        for i in (1..=NUM_GENERATORS).rev() {
            for _ in 0..alpha.0[i - 1] {
                cur = self.apply_letter(i, &cur);
            }
        }
        cur
    }

    /// Truncated product `u * v`.
    pub fn mul(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        let p = self.ctx.p32();
        let mut out = vec![0u32; v.len()];
        for (a, &c) in u.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.apply_word(&self.basis[a], v)) {
                *o = fp::add(*o, fp::mul(c, x, p), p);
            }
        }
        out
    }

    /// Matrix of `delta -> w * delta`.
    pub fn left_matrix(&self, w: &[u32]) -> DenseMatrix {
        let columns: Vec<Vec<u32>> = (0..self.dim())
            .into_par_iter()
            .map(|b| self.mul(w, &self.unit_vector(b)))
            .collect();
        dense_from_columns(&columns, self.ctx.p32())
    }

    /// Matrix of `delta -> delta * w`.
    pub fn right_matrix(&self, w: &[u32]) -> DenseMatrix {
        let columns: Vec<Vec<u32>> = (0..self.dim())
            .into_par_iter()
            .map(|b| self.apply_word(&self.basis[b], w))
            .collect();
        dense_from_columns(&columns, self.ctx.p32())
    }
}

fn enumerate_bounded(
    i: usize,
    budget: u64,
    cap: u64,
    cur: &mut [u64; NUM_GENERATORS],
    out: &mut Vec<ExpTuple>,
) {
    if i == NUM_GENERATORS {
        out.push(ExpTuple(*cur));
        return;
    }
    for a in 0..=budget.min(cap) {
        cur[i] = a;
        enumerate_bounded(i + 1, budget - a, cap, cur, out);
    }
    cur[i] = 0;
}

fn dense_from_columns(columns: &[Vec<u32>], p: u32) -> DenseMatrix {
    let rows = columns.first().map_or(0, Vec::len);
    let mut m = DenseMatrix::zeros(rows, columns.len(), p);
    for (c, col) in columns.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            if *v != 0 {
                m.set(r, c, *v);
            }
        }
    }
    m
}

/// The group basis of `F_p[G_k]` for exact mode, indexed in mixed radix.
#[derive(Debug, Clone)]
struct GroupBasis {
    ctx: Ctx,
    dim: usize,
}

impl GroupBasis {
    fn index(&self, t: &ExpTuple) -> usize {
        let o = self.ctx.gen_order();
        t.0.iter().rev().fold(0u64, |acc, &a| acc * o + a) as usize
    }

    fn tuple(&self, mut idx: usize) -> ExpTuple {
        let o = self.ctx.gen_order() as usize;
        let mut t = [0u64; NUM_GENERATORS];
        for a in &mut t {
            *a = (idx % o) as u64;
            idx /= o;
        }
        ExpTuple(t)
    }

    fn to_vector(&self, a: &AlgElem) -> Vec<u32> {
        let mut v = vec![0u32; self.dim];
        for (t, c) in a.to_group().terms() {
            v[self.index(t)] = *c;
        }
        v
    }

    fn matrix(&self, w: &AlgElem, left: bool) -> DenseMatrix {
        let w = w.to_group();
        let terms: Vec<(ExpTuple, u32)> = w.sorted_terms();
        let columns: Vec<Vec<(usize, u32)>> = (0..self.dim)
            .into_par_iter()
            .map(|b| {
                let g = self.tuple(b);
                terms
                    .iter()
                    .map(|(a, c)| {
                        let prod = if left {
                            tuple_mul(a, &g, &self.ctx)
                        } else {
                            tuple_mul(&g, a, &self.ctx)
                        };
                        (self.index(&prod), *c)
                    })
                    .collect()
            })
            .collect();
        let p = self.ctx.p32();
        let mut m = DenseMatrix::zeros(self.dim, self.dim, p);
        for (c, col) in columns.iter().enumerate() {
            for &(r, v) in col {
                m.set(r, c, fp::add(m.get(r, c), v, p));
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
enum Backend {
    Exact(GroupBasis),
    Truncated(PbwTruncation),
}

/// Solves the membership systems for one mode; build once and reuse across candidates.
#[derive(Debug, Clone)]
pub struct NormalityChecker {
    ctx: Ctx,
    mode: Mode,
    backend: Backend,
}

impl NormalityChecker {
    pub fn new(ctx: &Ctx, mode: Mode, dim_cap: u128) -> Result<Self> {
        let backend = match mode {
            Mode::Truncated(d) => Backend::Truncated(PbwTruncation::new(ctx, d)),
            Mode::Exact => {
                let dim = (ctx.gen_order() as u128).pow(NUM_GENERATORS as u32);
                if dim > dim_cap {
                    return Err(Error::DimensionCapExceeded { dim, cap: dim_cap });
                }
                Backend::Exact(GroupBasis {
                    ctx: *ctx,
                    dim: dim as usize,
                })
            }
        };
        Ok(NormalityChecker {
            ctx: *ctx,
            mode,
            backend,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn truncation(&self) -> Option<&PbwTruncation> {
        match &self.backend {
            Backend::Truncated(t) => Some(t),
            Backend::Exact(_) => None,
        }
    }

    /// Matrix of `delta -> W delta` in the mode's basis.
    pub fn left_multiplication_matrix(&self, w: &AlgElem) -> Result<DenseMatrix> {
        self.check_ctx(w)?;
        Ok(match &self.backend {
            Backend::Truncated(t) => t.left_matrix(&t.to_vector(w)),
            Backend::Exact(g) => g.matrix(w, true),
        })
    }

    pub fn right_multiplication_matrix(&self, w: &AlgElem) -> Result<DenseMatrix> {
        self.check_ctx(w)?;
        Ok(match &self.backend {
            Backend::Truncated(t) => t.right_matrix(&t.to_vector(w)),
            Backend::Exact(g) => g.matrix(w, false),
        })
    }

    fn check_ctx(&self, w: &AlgElem) -> Result<()> {
        if *w.ctx() != self.ctx {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    /// The right-hand sides `[y_c, W]` for `c = 1..=8`.
    fn brackets(&self, w: &AlgElem) -> Result<Vec<Vec<u32>>> {
        match &self.backend {
            Backend::Truncated(t) => {
                let wv = t.to_vector(w);
                let p = self.ctx.p32();
                Ok((1..=NUM_GENERATORS)
                    .map(|c| {
                        let yc = t.unit_vector(t.index[&ExpTuple::unit(c, 1, &self.ctx)]);
                        let a = t.apply_letter(c, &wv);
                        let b = t.mul(&wv, &yc);
                        a.iter().zip(&b).map(|(x, y)| fp::sub(*x, *y, p)).collect()
                    })
                    .collect())
            }
            Backend::Exact(g) => (1..=NUM_GENERATORS)
                .map(|c| Ok(g.to_vector(&y_gen(c, 1, &self.ctx)?.bracket(w)?)))
                .collect(),
        }
    }

    pub fn check(&self, w: &AlgElem) -> Result<NormalityReport> {
        self.check_ctx(w)?;
        if w.is_zero() {
            return Err(Error::ZeroElement);
        }
        let candidate = w.clone();
        if is_unit(w) {
            return Ok(NormalityReport {
                candidate,
                mode: self.mode,
                outcomes: Vec::new(),
                verdict: Verdict::Unit,
            });
        }
        let rhs = self.brackets(w)?;
        let (left, right) = if rhs.iter().all(|b| b.iter().all(|&x| x == 0)) {
            (vec![true; NUM_GENERATORS], vec![true; NUM_GENERATORS])
        } else {
            let left = solvable(&self.left_multiplication_matrix(w)?, &rhs);
            let right = solvable(&self.right_multiplication_matrix(w)?, &rhs);
            (left, right)
        };
        let outcomes: Vec<Outcome> = (0..NUM_GENERATORS)
            .map(|i| match (left[i], right[i]) {
                (false, _) => Outcome::WitnessLeft(i + 1),
                (true, false) => Outcome::WitnessRight(i + 1),
                (true, true) => Outcome::MemberBothSides,
            })
            .collect();
        let verdict = if outcomes.iter().any(|o| o.is_witness()) {
            Verdict::NonNormalWitnessed
        } else {
            Verdict::InconclusiveAtThisPrecision
        };
        Ok(NormalityReport {
            candidate,
            mode: self.mode,
            outcomes,
            verdict,
        })
    }
}

/// One-shot convenience around [`NormalityChecker`].
pub fn normality_witness(w: &AlgElem, mode: Mode, dim_cap: u128) -> Result<NormalityReport> {
    NormalityChecker::new(w.ctx(), mode, dim_cap)?.check(w)
}

/// Matrix of `delta -> W delta`, truncated or exact.
pub fn left_multiplication_matrix(w: &AlgElem, mode: Mode, dim_cap: u128) -> Result<DenseMatrix> {
    if w.is_zero() {
        return Err(Error::ZeroElement);
    }
    NormalityChecker::new(w.ctx(), mode, dim_cap)?.left_multiplication_matrix(w)
}

/// Sum of the conjugacy class of `g_t`, found by closing under conjugation by the generators.
pub fn conjugacy_class_sum(t: &ExpTuple, ctx: &Ctx) -> AlgElem {
    let gens: Vec<_> = (1..=NUM_GENERATORS)
        .map(|i| compose(&ExpTuple::unit(i, 1, ctx), ctx))
        .collect();
    let mut seen: HashSet<ExpTuple> = HashSet::from([*t]);
    let mut queue = VecDeque::from([*t]);
    while let Some(u) = queue.pop_front() {
        let m = compose(&u, ctx);
        for g in &gens {
            let conj = mat_mul(&mat_mul(g, &m, ctx), &mat_inv(g, ctx), ctx);
            let v = factorize(&conj, ctx).expect("conjugates stay in the group");
            if seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    AlgElem::from_terms(ctx, Basis::Group, seen.into_iter().map(|v| (v, 1)))
}

/// `C - |C|`: a central element of the augmentation ideal built from a class sum.
pub fn central_non_unit(t: &ExpTuple, ctx: &Ctx) -> AlgElem {
    let class = conjugacy_class_sum(t, ctx);
    let size = class.len() as i64;
    class
        .sub(&AlgElem::from_terms(
            ctx,
            Basis::Group,
            [(ExpTuple::ZERO, size)],
        ))
        .expect("same context")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub mode: Mode,
    /// Monomials of degree `1..=degree_cap` are scanned exhaustively and used for random candidates.
    pub degree_cap: u64,
    pub support_cap: usize,
    pub sample_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub p: u64,
    pub k: u32,
    pub mode: Mode,
    pub scanned: usize,
    pub witnessed: usize,
    pub inconclusive: usize,
    /// Full reports of the inconclusive candidates.
    pub details: Vec<NormalityReport>,
}

/// All PBW monomials of degree `1..=degree_cap` followed by `sample_count` random sparse non-units.
pub fn scan_candidate_list(ctx: &Ctx, cfg: &ScanConfig) -> Vec<AlgElem> {
    let cap = ctx.gen_order() - 1;
    let mut monomials = Vec::new();
    let mut cur = [0u64; NUM_GENERATORS];
    enumerate_bounded(0, cfg.degree_cap, cap, &mut cur, &mut monomials);
    monomials.retain(|t| !t.is_zero());
    monomials.sort_by_key(|t| (t.degree(), *t));

    let mut out: Vec<AlgElem> = monomials
        .iter()
        .map(|t| AlgElem::monomial(*t, ctx))
        .collect();
    if monomials.is_empty() {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = ctx.p32();
    while out.len() < monomials.len() + cfg.sample_count {
        let support = rng.gen_range(1..=cfg.support_cap.max(1));
        let elem = AlgElem::from_terms(
            ctx,
            Basis::Pbw,
            (0..support).map(|_| {
                (
                    monomials[rng.gen_range(0..monomials.len())],
                    rng.gen_range(1..p) as i64,
                )
            }),
        );
        if !elem.is_zero() && !is_unit(&elem) {
            out.push(elem);
        }
    }
    out
}

/// Runs [`NormalityChecker::check`] on every scan candidate, in parallel and in a fixed order.
pub fn scan_candidates(ctx: &Ctx, cfg: &ScanConfig, dim_cap: u128) -> Result<ScanSummary> {
    let checker = NormalityChecker::new(ctx, cfg.mode, dim_cap)?;
    let candidates = scan_candidate_list(ctx, cfg);
    let reports = candidates
        .par_iter()
        .map(|w| checker.check(w))
        .collect::<Result<Vec<_>>>()?;
    let witnessed = reports
        .iter()
        .filter(|r| r.verdict == Verdict::NonNormalWitnessed)
        .count();
    let details: Vec<NormalityReport> = reports
        .into_iter()
        .filter(|r| r.verdict == Verdict::InconclusiveAtThisPrecision)
        .collect();
    Ok(ScanSummary {
        p: ctx.p(),
        k: ctx.k(),
        mode: cfg.mode,
        scanned: candidates.len(),
        witnessed,
        inconclusive: details.len(),
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, k: u32) -> Ctx {
        Ctx::new(p, k).unwrap()
    }

    fn mono(v: [u64; 8], c: &Ctx) -> AlgElem {
        AlgElem::monomial(ExpTuple(v), c)
    }

    #[test]
    fn unit_examples() {
        let c = ctx(3, 2);
        assert!(is_unit(&AlgElem::one(&c)));
        assert!(!is_unit(&y_gen(1, 1, &c).unwrap()));
        let w = mono([0; 8], &c)
            .add(&mono([1, 1, 0, 0, 0, 0, 0, 0], &c))
            .unwrap();
        assert!(is_unit(&w));
        let rep =
            normality_witness(&AlgElem::one(&c), Mode::Truncated(2), DEFAULT_DIM_CAP).unwrap();
        assert_eq!(rep.verdict, Verdict::Unit);
    }

    #[test]
    fn truncated_products_match_the_algebra() {
        let c = ctx(3, 3);
        let t = PbwTruncation::new(&c, 4);
        let a = mono([0, 0, 1, 0, 0, 0, 0, 0], &c)
            .add(&mono([0, 0, 0, 0, 0, 0, 1, 1], &c))
            .unwrap();
        let b = mono([1, 0, 0, 0, 0, 1, 0, 0], &c)
            .add(&mono([2, 0, 0, 0, 0, 0, 0, 0], &c))
            .unwrap();
        let got = t.from_vector(&t.mul(&t.to_vector(&a), &t.to_vector(&b)));
        assert_eq!(got, a.mul(&b).unwrap().to_pbw_truncated(4));
    }

    #[test]
    fn left_matrix_examples() {
        let c = ctx(3, 2);
        let m = left_multiplication_matrix(&AlgElem::one(&c), Mode::Truncated(2), DEFAULT_DIM_CAP)
            .unwrap();
        assert_eq!(m, DenseMatrix::identity(m.rows(), 3));

        let chk = NormalityChecker::new(&c, Mode::Truncated(2), DEFAULT_DIM_CAP).unwrap();
        let t = chk.truncation().unwrap();
        let y1 = mono([1, 0, 0, 0, 0, 0, 0, 0], &c);
        let m = chk.left_multiplication_matrix(&y1).unwrap();
        for (b, mono_b) in t.basis().iter().enumerate() {
            let expect = t.to_vector(&y1.mul(&AlgElem::monomial(*mono_b, &c)).unwrap());
            assert_eq!(m.column(b), expect);
        }
        // nilpotent, so not injective
        let w = mono([2, 0, 0, 0, 0, 0, 0, 0], &c);
        assert!(chk.left_multiplication_matrix(&w).unwrap().rank() < m.rows());
    }

    #[test]
    fn exact_mode_respects_the_cap() {
        let err = NormalityChecker::new(&ctx(3, 3), Mode::Exact, DEFAULT_DIM_CAP).unwrap_err();
        assert!(matches!(err, Error::DimensionCapExceeded { .. }));
        assert!(NormalityChecker::new(&ctx(3, 2), Mode::Exact, DEFAULT_DIM_CAP).is_ok());
    }

    #[test]
    fn generators_are_witnessed_at_level_three() {
        let c = ctx(3, 3);
        let chk = NormalityChecker::new(&c, Mode::Truncated(4), DEFAULT_DIM_CAP).unwrap();
        let rep = chk.check(&mono([1, 0, 0, 0, 0, 0, 0, 0], &c)).unwrap();
        assert_eq!(rep.verdict, Verdict::NonNormalWitnessed);
        let w = mono([0, 0, 0, 1, 0, 0, 0, 0], &c)
            .add(&mono([0, 0, 0, 0, 1, 0, 0, 0], &c))
            .unwrap();
        assert_eq!(chk.check(&w).unwrap().verdict, Verdict::NonNormalWitnessed);
    }

    #[test]
    fn central_elements_are_never_witnessed() {
        for k in [2, 3] {
            let c = ctx(3, k);
            let chk = NormalityChecker::new(&c, Mode::Truncated(4), DEFAULT_DIM_CAP).unwrap();
            for i in [1, 4, 7] {
                let z = central_non_unit(&ExpTuple::unit(i, 1, &c), &c);
                for g in 1..=8 {
                    assert!(y_gen(g, 1, &c).unwrap().bracket(&z).unwrap().is_zero());
                }
                let rep = chk.check(&z).unwrap();
                assert!(rep.outcomes.iter().all(|o| *o == Outcome::MemberBothSides));
            }
        }
        assert_eq!(
            conjugacy_class_sum(&ExpTuple::unit(1, 1, &ctx(3, 3)), &ctx(3, 3)).len(),
            81
        );
    }

    #[test]
    fn witnesses_persist_under_refinement() {
        let c = ctx(3, 3);
        let coarse = NormalityChecker::new(&c, Mode::Truncated(3), DEFAULT_DIM_CAP).unwrap();
        let fine = NormalityChecker::new(&c, Mode::Truncated(4), DEFAULT_DIM_CAP).unwrap();
        for w in [
            mono([1, 0, 0, 0, 0, 0, 0, 0], &c),
            mono([0, 0, 1, 0, 0, 1, 0, 0], &c),
        ] {
            let a = coarse.check(&w).unwrap();
            let b = fine.check(&w).unwrap();
            for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
                if let Outcome::WitnessLeft(_) = x {
                    assert!(matches!(y, Outcome::WitnessLeft(_)));
                }
            }
        }
    }

    #[test]
    fn scan_excludes_units_and_is_deterministic() {
        let c = ctx(3, 2);
        let cfg = ScanConfig {
            mode: Mode::Truncated(2),
            degree_cap: 1,
            support_cap: 3,
            sample_count: 5,
            seed: 9,
        };
        let list = scan_candidate_list(&c, &cfg);
        assert_eq!(list.len(), 13);
        assert!(list.iter().all(|w| !is_unit(w)));
        assert_eq!(list, scan_candidate_list(&c, &cfg));
        let a =
            serde_json::to_string(&scan_candidates(&c, &cfg, DEFAULT_DIM_CAP).unwrap()).unwrap();
        let b =
            serde_json::to_string(&scan_candidates(&c, &cfg, DEFAULT_DIM_CAP).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(r#"{"p":3,"k":2,"mode":{"truncated":2},"scanned":13"#));
    }
}
