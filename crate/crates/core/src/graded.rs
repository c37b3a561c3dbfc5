//! The commutative polynomial ring `F_p[Y_1, ..., Y_8]` modelling the associated
//! graded ring, with the derivation operators that describe lowest-degree brackets.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp;
use crate::groupalg::{AlgElem, Basis};
use crate::identities::Status;
use crate::matgroup::{ExpTuple, NUM_GENERATORS};
use crate::padic::Ctx;

pub type Exponent = [u64; NUM_GENERATORS];

/// A sparse polynomial over `F_p`. Terms are kept in lexicographic order with
/// `Y_1 > ... > Y_8`, so the last entry is the leading term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    p: u64,
    terms: BTreeMap<Exponent, u32>,
}

impl Poly {
    pub fn zero(p: u64) -> Self {
        Poly {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(p: u64) -> Self {
        Self::monomial(p, [0; NUM_GENERATORS], 1)
    }

    pub fn monomial(p: u64, exp: Exponent, c: i64) -> Self {
        Self::from_terms(p, [(exp, c)])
    }

    /// `Y_j^e`.
    pub fn var(p: u64, j: usize, e: u64) -> Self {
        let mut exp = [0; NUM_GENERATORS];
        exp[j - 1] = e;
        Self::monomial(p, exp, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, i64)>>(p: u64, terms: I) -> Self {
        let mut out = Self::zero(p);
        for (e, c) in terms {
            out.add_term(e, fp::from_i64(c, p as u32));
        }
        out
    }

    fn add_term(&mut self, e: Exponent, c: u32) {
        if c == 0 {
            return;
        }
        let p = self.p as u32;
        let slot = self.terms.entry(e).or_insert(0);
        *slot = fp::add(*slot, c, p);
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> u32 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(Exponent, u32)> {
        self.terms.last_key_value().map(|(e, c)| (*e, *c))
    }

    /// Total degree of a homogeneous polynomial; `None` for zero.
    pub fn homogeneous_degree(&self) -> Result<Option<u64>> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u64>());
        let Some(d) = degs.next() else {
            return Ok(None);
        };
        if degs.all(|x| x == d) {
            Ok(Some(d))
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, *c);
        }
        out
    }

    pub fn scale(&self, c: i64) -> Poly {
        let p = self.p as u32;
        let c = fp::from_i64(c, p);
        Poly::from_terms(
            self.p,
            self.terms
                .iter()
                .map(|(e, a)| (*e, fp::mul(*a, c, p) as i64)),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let p = self.p as u32;
        let mut out = Poly::zero(self.p);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = *ea;
                for (x, y) in e.iter_mut().zip(eb) {
                    *x += y;
                }
                out.add_term(e, fp::mul(*ca, *cb, p));
            }
        }
        out
    }

    /// True iff every exponent is divisible by `p^s`, i.e. `w` lies in `F_p[Y_1^(p^s), ..., Y_8^(p^s)]`.
    pub fn p_power_membership(&self, s: u32) -> bool {
        let q = self.p.pow(s);
        self.terms.keys().flatten().all(|&e| e % q == 0)
    }

    /// The largest `s` with [`Poly::p_power_membership`]; `None` for constants.
    pub fn max_p_power(&self) -> Option<u32> {
        self.terms
            .keys()
            .flatten()
            .filter(|&&e| e > 0)
            .map(|&e| {
                let mut v = 0;
                let mut e = e;
                while e % self.p == 0 {
                    e /= self.p;
                    v += 1;
                }
                v
            })
            .min()
    }

    /// `dw / d(Y_j^(p^s))`: write `Z_j = Y_j^(p^s)` and differentiate in `Z_j`.
    pub fn partial(&self, j: usize, s: u32) -> Result<Poly> {
        let q = self.p.pow(s);
        let p = self.p as u32;
        let mut out = Poly::zero(self.p);
        for (e, c) in &self.terms {
            let ej = e[j - 1];
            if ej % q != 0 {
                return Err(Error::NotAPthPowerPolynomial { var: j, s });
            }
            let z = ej / q;
            if z == 0 {
                continue;
            }
            let mut ne = *e;
            ne[j - 1] = ej - q;
            out.add_term(ne, fp::mul(*c, (z % self.p) as u32, p));
        }
        Ok(out)
    }

    /// The PBW-basis element `sum c y^alpha` read as a commutative polynomial.
    pub fn from_pbw(a: &AlgElem) -> Result<Poly> {
        if a.basis() != Basis::Pbw {
            return Err(Error::Precondition(
                "expected an element in the PBW basis".into(),
            ));
        }
        Ok(Poly::from_terms(
            a.ctx().p(),
            a.terms().iter().map(|(t, c)| (t.0, *c as i64)),
        ))
    }

    /// Each monomial realized as the ordered PBW product in `F_p[G_k]`.
    pub fn to_alg(&self, ctx: &Ctx) -> Result<AlgElem> {
        if ctx.p() != self.p {
            return Err(Error::ContextMismatch);
        }
        if let Some(e) = self.terms.keys().flatten().find(|&&e| e >= ctx.gen_order()) {
            return Err(Error::PrecisionTooLow(format!(
                "exponent {e} is not below p^(k-1) = {}",
                ctx.gen_order()
            )));
        }
        Ok(AlgElem::from_terms(
            ctx,
            Basis::Pbw,
            self.terms.iter().map(|(e, c)| (ExpTuple(*e), *c as i64)),
        ))
    }

    /// A random homogeneous polynomial of the given degree with at most `n_terms` terms.
    pub fn random_homogeneous<R: Rng>(p: u64, degree: u64, n_terms: usize, rng: &mut R) -> Poly {
        let mut out = Poly::zero(p);
        for _ in 0..n_terms {
            let mut e = [0u64; NUM_GENERATORS];
            for _ in 0..degree {
                e[rng.gen_range(0..NUM_GENERATORS)] += 1;
            }
            out.add_term(e, rng.gen_range(1..p as u32));
        }
        out
    }

    pub fn to_doc(&self) -> PolyDoc {
        PolyDoc {
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| PolyTermDoc { exp: *e, coeff: *c })
                .collect(),
        }
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        format!("Y{}", i + 1)
                    } else {
                        format!("Y{}^{x}", i + 1)
                    }
                })
                .collect();
            match (vars.is_empty(), *c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{}", vars.join("*"))?,
                (false, c) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTermDoc {
    pub exp: Exponent,
    pub coeff: u32,
}

/// JSON form: `{"p":3,"terms":[{"exp":[3,0,0,0,0,0,0,0],"coeff":1}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyDoc {
    pub p: u64,
    pub terms: Vec<PolyTermDoc>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = PolyDoc::deserialize(d)?;
        if !crate::padic::is_prime(doc.p) || doc.p == 2 {
            return Err(D::Error::custom(format!("{} is not an odd prime", doc.p)));
        }
        let mut out = Poly::zero(doc.p);
        for t in &doc.terms {
            if t.coeff == 0 || t.coeff as u64 >= doc.p {
                return Err(D::Error::custom(format!(
                    "coefficient {} outside [1, p)",
                    t.coeff
                )));
            }
            if out.terms.insert(t.exp, t.coeff).is_some() {
                return Err(D::Error::custom("repeated exponent"));
            }
        }
        Ok(out)
    }
}

/// One row `(c, j, t, coeff)`: the formula for generator `c` contains
/// `coeff * dw/d(Y_j^(p^s)) * Y_t^(p^(r+s+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormulaRow {
    pub c: usize,
    pub j: usize,
    pub t: usize,
    pub coeff: i64,
}

const fn row(c: usize, j: usize, t: usize, coeff: i64) -> FormulaRow {
    FormulaRow { c, j, t, coeff }
}

/// The eight lowest-degree bracket formulas `[y_c^(p^r), w]_lowest`.
pub const FORMULA: &[FormulaRow] = &[
    row(1, 3, 2, 1),
    row(1, 4, 1, -2),
    row(1, 5, 1, 1),
    row(1, 6, 4, 1),
    row(1, 7, 8, -1),
    row(2, 4, 2, -1),
    row(2, 5, 2, -1),
    row(2, 6, 3, -1),
    row(2, 7, 4, 1),
    row(2, 7, 5, 1),
    row(2, 8, 1, 1),
    row(3, 1, 2, -1),
    row(3, 4, 3, 1),
    row(3, 5, 3, -2),
    row(3, 7, 6, 1),
    row(3, 8, 5, 1),
    row(4, 1, 1, 2),
    row(4, 2, 2, 1),
    row(4, 3, 3, -1),
    row(4, 6, 6, -2),
    row(4, 7, 7, -1),
    row(4, 8, 8, 1),
    row(5, 1, 1, -1),
    row(5, 2, 2, 1),
    row(5, 3, 3, 2),
    row(5, 6, 6, 1),
    row(5, 7, 7, -1),
    row(5, 8, 8, -2),
    row(6, 1, 4, -1),
    row(6, 2, 3, 1),
    row(6, 4, 6, 2),
    row(6, 5, 6, -1),
    row(6, 8, 7, -1),
    row(7, 1, 8, 1),
    row(7, 2, 4, -1),
    row(7, 2, 5, -1),
    row(7, 3, 6, -1),
    row(7, 4, 7, 1),
    row(7, 5, 7, 1),
    row(8, 2, 1, -1),
    row(8, 3, 5, -1),
    row(8, 4, 8, -1),
    row(8, 5, 8, 2),
    row(8, 6, 7, 1),
];

fn first_offending_var(w: &Poly, s: u32) -> Option<usize> {
    let q = w.p.pow(s);
    w.terms
        .keys()
        .find_map(|e| e.iter().position(|&x| x % q != 0).map(|i| i + 1))
}

/// The model of `[y_c^(p^r), w]_lowest` for `w` in `F_p[Y^(p^s)]`.
pub fn bracket_lowest_formula(c: usize, r: u32, s: u32, w: &Poly) -> Result<Poly> {
    if !(1..=NUM_GENERATORS).contains(&c) {
        return Err(Error::InvalidParameter(format!(
            "generator index {c} outside 1..=8"
        )));
    }
    if let Some(var) = first_offending_var(w, s) {
        return Err(Error::NotAPthPowerPolynomial { var, s });
    }
    let d = w.p.pow(r + s + 1);
    let mut out = Poly::zero(w.p);
    for rw in FORMULA.iter().filter(|rw| rw.c == c) {
        let term = w
            .partial(rw.j, s)?
            .mul(&Poly::var(w.p, rw.t, d))
            .scale(rw.coeff);
        out = out.add(&term);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub c: usize,
    pub r: u32,
    pub s: u32,
    pub w: Poly,
    /// Degree at which the formula predicts the lowest term.
    pub degree: u64,
    pub formula: Poly,
    /// The PBW expansion of the true bracket through `degree`.
    pub computed: Poly,
    pub status: Status,
}

/// Compares [`bracket_lowest_formula`] with the bracket computed in `F_p[G_k]`,
/// `w` embedded through ordered PBW monomials.
pub fn cross_check_lowest(
    c: usize,
    r: u32,
    s: u32,
    w: &Poly,
    ctx: &Ctx,
    max_degree: u64,
) -> Result<CrossCheckReport> {
    let formula = bracket_lowest_formula(c, r, s, w)?;
    let o = ctx.gen_order();
    if r + s + 1 >= ctx.k() - 1 {
        return Err(Error::PrecisionTooLow(format!(
            "p^(r+s+1) is not below p^(k-1) = {o}"
        )));
    }
    let q = w.p.pow(s);
    let computed_degree = match w.homogeneous_degree()? {
        Some(d) => (d + w.p.pow(r + s + 1)).saturating_sub(q),
        None => 0,
    };
    if computed_degree >= o {
        return Err(Error::PrecisionTooLow(format!(
            "predicted degree {computed_degree} is not below p^(k-1) = {o}"
        )));
    }
    if computed_degree > max_degree {
        return Err(Error::PrecisionTooLow(format!(
            "predicted degree {computed_degree} exceeds the bound {max_degree}"
        )));
    }
    let y = crate::groupalg::y_gen(c, ctx.p_pow_exp(r), ctx)?;
    let bracket = y.bracket(&w.to_alg(ctx)?)?;
    let computed = Poly::from_pbw(&bracket.to_pbw_truncated(computed_degree))?;
    let status = if computed == formula {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(CrossCheckReport {
        c,
        r,
        s,
        w: w.clone(),
        degree: computed_degree,
        formula,
        computed,
        status,
    })
}

/// True iff some `dw / d(Y_j^(p^s))` is nonzero, for `w` in `F_p[Y^(p^s)]` but not in `F_p[Y^(p^(s+1))]`.
pub fn check_nonvanishing_partials(w: &Poly, s: u32) -> Result<bool> {
    if !w.p_power_membership(s) || w.p_power_membership(s + 1) {
        return Err(Error::Precondition(format!(
            "w must be a polynomial in the p^{s}-th powers and not in the p^{}-th",
            s + 1
        )));
    }
    for j in 1..=NUM_GENERATORS {
        if !w.partial(j, s)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact division `b / a` by lexicographic long division.
pub fn poly_divides(a: &Poly, b: &Poly) -> Result<Option<Poly>> {
    let Some((la, ca)) = a.leading() else {
        return Err(Error::ZeroDivisor);
    };
    let p = a.p as u32;
    let ca_inv = fp::inv(ca, p);
    let mut rem = b.clone();
    let mut q = Poly::zero(a.p);
    while let Some((lr, cr)) = rem.leading() {
        if la.iter().zip(&lr).any(|(x, y)| x > y) {
            return Ok(None);
        }
        let mut e = [0u64; NUM_GENERATORS];
        for i in 0..NUM_GENERATORS {
            e[i] = lr[i] - la[i];
        }
        let t = Poly::monomial(a.p, e, fp::mul(cr, ca_inv, p) as i64);
        rem = rem.sub(&a.mul(&t));
        q = q.add(&t);
    }
    Ok(Some(q))
}

/// Splits `w_d = w_m * u + v` with `u` collecting every monomial whose
/// `p^s`-exponents are not all divisible by `p`, and `v` in `F_p[Y^(p^(s+1))]`.
pub fn decompose_wd(w_d: &Poly, w_m: &Poly, s: u32) -> Result<(Poly, Poly)> {
    if let Some(var) = first_offending_var(w_d, s) {
        return Err(Error::NotAPthPowerPolynomial { var, s });
    }
    let p = w_d.p;
    let q = p.pow(s);
    let mut h: BTreeMap<Exponent, Poly> = BTreeMap::new();
    for (e, c) in &w_d.terms {
        let mut idx = [0u64; NUM_GENERATORS];
        let mut rest = *e;
        for i in 0..NUM_GENERATORS {
            idx[i] = (e[i] / q) % p;
            rest[i] -= idx[i] * q;
        }
        h.entry(idx)
            .or_insert_with(|| Poly::zero(p))
            .add_term(rest, *c);
    }
    let v = h
        .remove(&[0; NUM_GENERATORS])
        .unwrap_or_else(|| Poly::zero(p));
    let mut u = Poly::zero(p);
    for (idx, hi) in &h {
        let Some(qi) = poly_divides(w_m, hi)? else {
            return Err(Error::HypothesisFailed(format!(
                "{w_m} does not divide {hi}"
            )));
        };
        let shift: Exponent = std::array::from_fn(|i| idx[i] * q);
        u = u.add(&qi.mul(&Poly::monomial(p, shift, 1)));
    }
    if w_m.mul(&u).add(&v) != *w_d {
        return Err(Error::HypothesisFailed(
            "w_m * u + v does not reproduce w_d".into(),
        ));
    }
    Ok((u, v))
}
