//! The group algebra `F_p[G_k]` with two bases: group elements `g_alpha` and
//! ordered PBW monomials `y^alpha = (x_1 - 1)^alpha_1 ... (x_8 - 1)^alpha_8`.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp;
use crate::graded::Poly;
use crate::identities::{self, IdentityItem, IdentityPart, IdentityReport, PartCheck, Status};
use crate::matgroup::{tuple_mul, ExpTuple, NUM_GENERATORS};
use crate::padic::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Basis {
    Group,
    Pbw,
}

/// A sparse element of `F_p[G_k]`. Coefficients are stored in `[1, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgElem {
    ctx: Ctx,
    basis: Basis,
    terms: HashMap<ExpTuple, u32>,
}

impl AlgElem {
    pub fn zero(ctx: &Ctx, basis: Basis) -> Self {
        AlgElem {
            ctx: *ctx,
            basis,
            terms: HashMap::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::group_element(ExpTuple::ZERO, ctx)
    }

    pub fn group_element(t: ExpTuple, ctx: &Ctx) -> Self {
        Self::from_terms(ctx, Basis::Group, [(t, 1)])
    }

    pub fn monomial(t: ExpTuple, ctx: &Ctx) -> Self {
        Self::from_terms(ctx, Basis::Pbw, [(t, 1)])
    }

    /// Builds an element from `(tuple, coefficient)` pairs; coefficients are reduced
    /// modulo `p` and repeated tuples accumulate.
    pub fn from_terms<I>(ctx: &Ctx, basis: Basis, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExpTuple, i64)>,
    {
        let p = ctx.p32();
        let mut out = Self::zero(ctx, basis);
        for (t, c) in terms {
            out.add_term(t, fp::from_i64(c, p));
        }
        out
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn terms(&self) -> &HashMap<ExpTuple, u32> {
        &self.terms
    }

    pub fn coeff(&self, t: &ExpTuple) -> u32 {
        self.terms.get(t).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending tuple order.
    pub fn sorted_terms(&self) -> Vec<(ExpTuple, u32)> {
        let mut v: Vec<_> = self.terms.iter().map(|(t, c)| (*t, *c)).collect();
        v.sort_unstable();
        v
    }

    fn add_term(&mut self, t: ExpTuple, c: u32) {
        if c == 0 {
            return;
        }
        let p = self.ctx.p32();
        let e = self.terms.entry(t).or_insert(0);
        *e = fp::add(*e, c, p);
        if *e == 0 {
            self.terms.remove(&t);
        }
    }

    fn check_compatible(&self, other: &AlgElem) -> Result<()> {
        if self.ctx != other.ctx || self.basis != other.basis {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &AlgElem) -> Result<AlgElem> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(*t, *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &AlgElem) -> Result<AlgElem> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> AlgElem {
        self.scale(self.ctx.p32() - 1)
    }

    pub fn scale(&self, c: u32) -> AlgElem {
        let p = self.ctx.p32();
        let c = c % p;
        let mut out = Self::zero(&self.ctx, self.basis);
        if c != 0 {
            out.terms = self
                .terms
                .iter()
                .map(|(t, a)| (*t, fp::mul(*a, c, p)))
                .collect();
        }
        out
    }

    /// The same element expressed in the group basis.
    pub fn to_group(&self) -> AlgElem {
        match self.basis {
            Basis::Group => self.clone(),
            Basis::Pbw => self.from_pbw(),
        }
    }

    /// Convolution product, returned in the group basis.
    pub fn mul(&self, other: &AlgElem) -> Result<AlgElem> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        let (a, b) = (self.to_group(), other.to_group());
        let p = self.ctx.p32();
        let mut out = Self::zero(&self.ctx, Basis::Group);
        for (ta, ca) in &a.terms {
            for (tb, cb) in &b.terms {
                out.add_term(tuple_mul(ta, tb, &self.ctx), fp::mul(*ca, *cb, p));
            }
        }
        Ok(out)
    }

    /// `ab - ba`.
    pub fn bracket(&self, other: &AlgElem) -> Result<AlgElem> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `epsilon(sum c_alpha g_alpha) = sum c_alpha`.
    pub fn augmentation(&self) -> u32 {
        match self.basis {
            Basis::Group => self
                .terms
                .values()
                .fold(0, |acc, c| fp::add(acc, *c, self.ctx.p32())),
            // every y^alpha with alpha != 0 lies in the augmentation ideal
            Basis::Pbw => self.coeff(&ExpTuple::ZERO),
        }
    }

    /// Membership in the Jacobson radical, which is the augmentation ideal.
    pub fn in_radical(&self) -> bool {
        self.augmentation() == 0
    }

    /// The PBW expansion restricted to total degree `<= max_degree`.
    pub fn to_pbw_truncated(&self, max_degree: u64) -> AlgElem {
        let mut out = Self::zero(&self.ctx, Basis::Pbw);
        match self.basis {
            Basis::Pbw => {
                out.terms = self
                    .terms
                    .iter()
                    .filter(|(t, _)| t.degree() <= max_degree)
                    .map(|(t, c)| (*t, *c))
                    .collect();
            }
            // g_beta = prod_i (1 + y_i)^beta_i
            Basis::Group => {
                let field = self.ctx.field();
                out.terms = separable_transform(&self.terms, field.p(), max_degree, |b| {
                    (0..=b.min(max_degree))
                        .filter_map(|a| {
                            let v = field.binom(b, a);
                            (v != 0).then_some((a, v))
                        })
                        .collect()
                });
            }
        }
        out
    }

    /// The full PBW expansion.
    pub fn to_pbw(&self) -> AlgElem {
        self.to_pbw_truncated(max_pbw_degree(&self.ctx))
    }

    /// Inverse of the PBW expansion: `y^alpha = prod_i sum_b C(alpha_i, b) (-1)^(alpha_i - b) x_i^b`.
    pub fn from_pbw(&self) -> AlgElem {
        if self.basis == Basis::Group {
            return self.clone();
        }
        let field = self.ctx.field();
        let p = field.p();
        let mut out = Self::zero(&self.ctx, Basis::Group);
        out.terms = separable_transform(&self.terms, p, u64::MAX, |a| {
            (0..=a)
                .filter_map(|b| {
                    let v = field.binom(a, b);
                    (v != 0).then(|| (b, if (a - b) % 2 == 0 { v } else { fp::neg(v, p) }))
                })
                .collect()
        });
        out
    }

    /// The homogeneous part of degree `d` of the PBW expansion.
    pub fn degree_part(&self, d: u64) -> AlgElem {
        let pbw = self.to_pbw_truncated(d);
        let mut out = Self::zero(&self.ctx, Basis::Pbw);
        out.terms = pbw
            .terms
            .into_iter()
            .filter(|(t, _)| t.degree() == d)
            .collect();
        out
    }

    /// Total degree of a homogeneous PBW element.
    pub fn homogeneous_degree(&self) -> Result<Option<u64>> {
        if self.basis != Basis::Pbw {
            return Err(Error::Precondition(
                "homogeneity is a property of PBW elements".into(),
            ));
        }
        let mut degrees = self.terms.keys().map(ExpTuple::degree);
        let Some(d) = degrees.next() else {
            return Ok(None);
        };
        if degrees.all(|e| e == d) {
            Ok(Some(d))
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    /// The minimal-degree nonzero homogeneous part of the PBW expansion, searched up to `max_degree`.
    pub fn lowest_term(&self, max_degree: u64) -> Result<LowestTerm> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let pbw = self.to_pbw_truncated(max_degree);
        let Some(d) = pbw.terms.keys().map(ExpTuple::degree).min() else {
            return Err(Error::DegreeExceedsBound { bound: max_degree });
        };
        let mut part = Self::zero(&self.ctx, Basis::Pbw);
        part.terms = pbw
            .terms
            .into_iter()
            .filter(|(t, _)| t.degree() == d)
            .collect();
        Ok(LowestTerm {
            degree: d,
            certified: d < self.ctx.gen_order(),
            part,
        })
    }

    /// A random element with at most `support` terms in the given basis.
    pub fn random_sparse<R: Rng>(ctx: &Ctx, basis: Basis, support: usize, rng: &mut R) -> AlgElem {
        let o = ctx.gen_order();
        let p = ctx.p32();
        let mut out = Self::zero(ctx, basis);
        for _ in 0..support {
            let mut t = [0u64; NUM_GENERATORS];
            for a in &mut t {
                *a = rng.gen_range(0..o);
            }
            out.add_term(ExpTuple(t), rng.gen_range(1..p));
        }
        out
    }

    pub fn to_doc(&self) -> AlgElemDoc {
        AlgElemDoc {
            p: self.ctx.p(),
            k: self.ctx.k(),
            basis: self.basis,
            terms: self
                .sorted_terms()
                .into_iter()
                .map(|(alpha, coeff)| TermDoc { alpha, coeff })
                .collect(),
        }
    }

    pub fn from_doc(doc: &AlgElemDoc) -> Result<AlgElem> {
        let ctx = Ctx::new(doc.p, doc.k)?;
        let mut out = Self::zero(&ctx, doc.basis);
        for term in &doc.terms {
            term.alpha.check_range(&ctx)?;
            if term.coeff == 0 || term.coeff as u64 >= ctx.p() {
                return Err(Error::Malformed(format!(
                    "coefficient {} outside [1, p)",
                    term.coeff
                )));
            }
            if out.terms.insert(term.alpha, term.coeff).is_some() {
                return Err(Error::Malformed(format!("repeated tuple {}", term.alpha)));
            }
        }
        Ok(out)
    }
}

/// Largest total degree of a nonzero PBW monomial.
pub fn max_pbw_degree(ctx: &Ctx) -> u64 {
    NUM_GENERATORS as u64 * (ctx.gen_order() - 1)
}

/// Applies the one-variable transform `a -> sum (b, v)` to every coordinate in turn,
/// dropping terms whose transformed coordinates already exceed `budget`.
/// `one_dim` must list its targets in increasing order.
fn separable_transform<F>(
    input: &HashMap<ExpTuple, u32>,
    p: u32,
    budget: u64,
    one_dim: F,
) -> HashMap<ExpTuple, u32>
where
    F: Fn(u64) -> Vec<(u64, u32)>,
{
    let mut cache: HashMap<u64, Vec<(u64, u32)>> = HashMap::new();
    let mut cur = input.clone();
    for i in 0..NUM_GENERATORS {
        let mut next: HashMap<ExpTuple, u32> = HashMap::with_capacity(cur.len());
        for (t, c) in &cur {
            let done: u64 = t.0[..i].iter().sum();
            let list = cache.entry(t.0[i]).or_insert_with(|| one_dim(t.0[i]));
            for &(b, v) in list.iter() {
                if done + b > budget {
                    break;
                }
                let mut nt = *t;
                nt.0[i] = b;
                let slot = next.entry(nt).or_insert(0);
                *slot = fp::add(*slot, fp::mul(*c, v, p), p);
            }
        }
        next.retain(|_, c| *c != 0);
        cur = next;
    }
    cur
}

/// `x_i^e - 1`.
pub fn y_gen(i: usize, e: u64, ctx: &Ctx) -> Result<AlgElem> {
    if !(1..=NUM_GENERATORS).contains(&i) {
        return Err(Error::InvalidParameter(format!(
            "generator index {i} outside 1..=8"
        )));
    }
    Ok(AlgElem::from_terms(
        ctx,
        Basis::Group,
        [(ExpTuple::unit(i, e, ctx), 1), (ExpTuple::ZERO, -1)],
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub alpha: ExpTuple,
    pub coeff: u32,
}

/// JSON interchange form of an [`AlgElem`], terms sorted by tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgElemDoc {
    pub p: u64,
    pub k: u32,
    pub basis: Basis,
    pub terms: Vec<TermDoc>,
}

impl Serialize for AlgElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = AlgElemDoc::deserialize(d)?;
        AlgElem::from_doc(&doc).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowestTerm {
    pub degree: u64,
    pub part: AlgElem,
    /// False when `degree >= p^(k-1)`: terms that vanish in `G_k` through
    /// `y_i^(p^(k-1)) = 0` could then sit below the reported degree.
    pub certified: bool,
}

/// Lowest terms of `[y_i^(p^r), y_j^(p^s)]` for `i < j`, as `(t, c)` meaning
/// `c * y_t^(p^(r+s+1))`. Pairs absent from the list commute.
pub const LOWEST_TABLE: &[((usize, usize), &[(usize, i64)])] = &[
    ((1, 3), &[(2, 1)]),
    ((1, 4), &[(1, -2)]),
    ((1, 5), &[(1, 1)]),
    ((1, 6), &[(4, 1)]),
    ((1, 7), &[(8, -1)]),
    ((2, 4), &[(2, -1)]),
    ((2, 5), &[(2, -1)]),
    ((2, 6), &[(3, -1)]),
    ((2, 7), &[(4, 1), (5, 1)]),
    ((2, 8), &[(1, 1)]),
    ((3, 4), &[(3, 1)]),
    ((3, 5), &[(3, -2)]),
    ((3, 7), &[(6, 1)]),
    ((3, 8), &[(5, 1)]),
    ((4, 6), &[(6, -2)]),
    ((4, 7), &[(7, -1)]),
    ((4, 8), &[(8, 1)]),
    ((5, 6), &[(6, 1)]),
    ((5, 7), &[(7, -1)]),
    ((5, 8), &[(8, -2)]),
    ((6, 8), &[(7, -1)]),
];

/// Table entry for any ordered pair, using antisymmetry for `i > j`.
pub fn lowest_table_entry(i: usize, j: usize) -> Vec<(usize, i64)> {
    let (lo, hi, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
    LOWEST_TABLE
        .iter()
        .find(|(pair, _)| *pair == (lo, hi))
        .map(|(_, e)| e.iter().map(|&(t, c)| (t, sign * c)).collect())
        .unwrap_or_default()
}

/// Algebra-level detail: GROUP-basis terms of `LHS - RHS` for the derived form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraDetail {
    pub lhs_terms: usize,
    pub difference: Vec<TermDoc>,
}

pub type AlgIdentityReport = IdentityReport<AlgebraDetail>;

/// `x_left^a (1 - C) x_j^b` for one reading of a part.
fn rhs(reading: &identities::Reading, j: usize, a: u64, b: u64, ctx: &Ctx) -> Result<AlgElem> {
    let left = ExpTuple::unit(reading.left, a, ctx);
    let right = ExpTuple::unit(j, b, ctx);
    let inner = reading.tuple(ctx)?;
    let lr = tuple_mul(&left, &right, ctx);
    let lcr = tuple_mul(&tuple_mul(&left, &inner, ctx), &right, ctx);
    Ok(AlgElem::from_terms(ctx, Basis::Group, [(lr, 1), (lcr, -1)]))
}

fn check_part_alg(
    part: &IdentityPart,
    a: u64,
    b: u64,
    ctx: &Ctx,
) -> Result<PartCheck<AlgebraDetail>> {
    let lhs = y_gen(part.i, a, ctx)?.bracket(&y_gen(part.j, b, ctx)?)?;
    let diff = lhs.sub(&rhs(&part.proof, part.j, a, b, ctx)?)?;
    let readings = part
        .variants
        .iter()
        .map(|v| Ok((v.clone(), rhs(&v.reading, part.j, a, b, ctx)? == lhs)))
        .collect::<Result<Vec<_>>>()?;
    let detail = AlgebraDetail {
        lhs_terms: lhs.len(),
        difference: diff.to_doc().terms,
    };
    Ok(PartCheck::from_outcomes(
        part,
        diff.is_zero(),
        readings,
        detail,
    ))
}

/// Checks one item of the commutator theorem as an identity in `F_p[G_k]`.
pub fn verify_bracket_identity_alg(id: u8, r: u32, s: u32, ctx: &Ctx) -> Result<AlgIdentityReport> {
    let item: IdentityItem = identities::item(id, r, s, ctx)?;
    let (a, b) = (ctx.p_pow_exp(r), ctx.p_pow_exp(s));
    let parts = item
        .parts
        .iter()
        .map(|part| check_part_alg(part, a, b, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentityReport::assemble("algebra", &item, ctx, parts))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowestPairCheck {
    pub i: usize,
    pub j: usize,
    pub expected: Poly,
    /// The PBW expansion of the bracket up to the expected degree.
    pub found: Poly,
    pub bracket_is_zero: bool,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowestTableReport {
    pub p: u64,
    pub k: u32,
    pub r: u32,
    pub s: u32,
    pub degree: u64,
    pub status: Status,
    pub pairs: Vec<LowestPairCheck>,
}

/// The expected lowest term `sum c * Y_t^(p^(r+s+1))` of `[y_i^(p^r), y_j^(p^s)]`.
pub fn expected_lowest(i: usize, j: usize, r: u32, s: u32, p: u64) -> Poly {
    let d = p.pow(r + s + 1);
    Poly::from_terms(
        p,
        lowest_table_entry(i, j).into_iter().map(|(t, c)| {
            let mut e = [0u64; NUM_GENERATORS];
            e[t - 1] = d;
            (e, c)
        }),
    )
}

/// Checks every ordered generator pair against [`LOWEST_TABLE`].
pub fn verify_lowest_table(ctx: &Ctx, r: u32, s: u32) -> Result<LowestTableReport> {
    let p = ctx.p();
    if r + s + 1 >= ctx.k() - 1 {
        return Err(Error::PrecisionTooLow(format!(
            "p^(r+s+1) = {p}^{} is not below p^(k-1) = {p}^{}",
            r + s + 1,
            ctx.k() - 1
        )));
    }
    let d = p.pow(r + s + 1);
    let (a, b) = (ctx.p_pow_exp(r), ctx.p_pow_exp(s));
    let mut pairs = Vec::with_capacity(64);
    for i in 1..=NUM_GENERATORS {
        for j in 1..=NUM_GENERATORS {
            let br = y_gen(i, a, ctx)?.bracket(&y_gen(j, b, ctx)?)?;
            let found = Poly::from_pbw(&br.to_pbw_truncated(d))?;
            let expected = expected_lowest(i, j, r, s, p);
            let status = if found == expected {
                Status::Pass
            } else {
                Status::Fail
            };
            pairs.push(LowestPairCheck {
                i,
                j,
                expected,
                found,
                bracket_is_zero: br.is_zero(),
                status,
            });
        }
    }
    let status = pairs.iter().map(|c| c.status).max().unwrap_or(Status::Pass);
    Ok(LowestTableReport {
        p,
        k: ctx.k(),
        r,
        s,
        degree: d,
        status,
        pairs,
    })
}
