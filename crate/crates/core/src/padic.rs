//! Residues modulo `p^k`, the discrete logarithm to base `1 + p`, and the
//! p-adic digits of the exponent `beta` with `(1 + p)^beta = (1 + p^m)^(-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{self, Fp};

/// Largest modulus accepted; keeps every product of two residues inside `u128`
/// with plenty of headroom and every residue inside `i64`.
const MAX_MODULUS: u64 = 1 << 62;
/// Coefficients in F_p are stored as `u32` and the factorial tables are dense.
const MAX_PRIME: u64 = 1 << 20;

/// The ambient arithmetic context: an odd prime `p` and a precision `k >= 2`.
///
/// Matrices live in `Z / p^k`, generator exponents in `Z / p^(k-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CtxParams", into = "CtxParams")]
pub struct Ctx {
    p: u64,
    k: u32,
    modulus: u64,
    gen_order: u64,
}

#[derive(Serialize, Deserialize)]
struct CtxParams {
    p: u64,
    k: u32,
}

impl TryFrom<CtxParams> for Ctx {
    type Error = Error;
    fn try_from(v: CtxParams) -> Result<Self> {
        Ctx::new(v.p, v.k)
    }
}

impl From<Ctx> for CtxParams {
    fn from(c: Ctx) -> Self {
        CtxParams { p: c.p, k: c.k }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Ctx {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidParameter(format!(
                "p = {p} is not an odd prime"
            )));
        }
        if p >= MAX_PRIME {
            return Err(Error::InvalidParameter(format!("p = {p} is too large")));
        }
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "precision k = {k} must be at least 2"
            )));
        }
        let modulus = p
            .checked_pow(k)
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or_else(|| Error::InvalidParameter(format!("p^k = {p}^{k} overflows")))?;
        Ok(Ctx {
            p,
            k,
            modulus,
            gen_order: modulus / p,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `p` as a field characteristic.
    pub fn p32(&self) -> u32 {
        self.p as u32
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `p^k`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p^(k-1)`, the order of every generator of `G_k`.
    pub fn gen_order(&self) -> u64 {
        self.gen_order
    }

    /// `p^e` as an exact integer, if it fits.
    pub fn p_pow(&self, e: u32) -> Option<u64> {
        self.p.checked_pow(e)
    }

    /// `p^e` reduced into the exponent ring `Z / p^(k-1)`; zero once `e >= k-1`.
    pub fn p_pow_exp(&self, e: u32) -> u64 {
        if e >= self.k - 1 {
            0
        } else {
            self.p.pow(e)
        }
    }

    pub fn field(&self) -> Fp {
        Fp::new(self.p32())
    }

    // --- arithmetic mod p^k -------------------------------------------------

    #[inline]
    pub fn reduce(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + self.modulus as u128 - b as u128) % self.modulus as u128) as u64
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, base: u64, e: u64) -> u64 {
        pow_mod(base, e, self.modulus)
    }

    /// `(1 + p)^e` for a signed exponent.
    pub fn one_plus_p_pow(&self, e: i128) -> u64 {
        let base = 1 + self.p;
        // (1+p) has order p^(k-1), so reducing the exponent keeps it nonnegative.
        let e = e.rem_euclid(self.gen_order as i128) as u64;
        self.pow(base, e)
    }

    // --- arithmetic in the exponent ring Z / p^(k-1) ------------------------

    #[inline]
    pub fn exp_reduce(&self, v: i128) -> u64 {
        v.rem_euclid(self.gen_order as i128) as u64
    }

    #[inline]
    pub fn exp_mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.gen_order as u128) as u64
    }
}

/// An element of `Z / p^k`, always reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Residue(u64);

impl Residue {
    pub fn new(v: i128, ctx: &Ctx) -> Self {
        Residue(ctx.reduce(v))
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

/// p-adic digits `(d_0, d_1, ...)`, least significant first, each in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PadicDigits(Vec<u32>);

impl PadicDigits {
    pub fn new(digits: Vec<u32>, p: u64) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d as u64 >= p) {
            return Err(Error::InvalidParameter(format!(
                "digit {d} out of range for p = {p}"
            )));
        }
        Ok(PadicDigits(digits))
    }

    /// Base-p digits of a nonnegative integer, padded or cut to `len` digits.
    pub fn of_integer(mut n: u64, p: u64, len: usize) -> Self {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push((n % p) as u32);
            n /= p;
        }
        PadicDigits(out)
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The integer `sum d_j p^j` (i.e. the value modulo `p^len`).
    pub fn value(&self, p: u64) -> u128 {
        self.0
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * p as u128 + d as u128)
    }
}

pub(crate) fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = base as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

/// Inverse of a unit modulo an arbitrary modulus, by the extended Euclidean algorithm.
pub(crate) fn inv_mod_raw(u: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (u % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Inverse modulo `p^k`.
pub fn inv_mod(u: Residue, ctx: &Ctx) -> Result<Residue> {
    if u.0 % ctx.p == 0 {
        return Err(Error::NotAUnit {
            value: u.0,
            modulus: ctx.modulus,
        });
    }
    let v = inv_mod_raw(u.0, ctx.modulus).expect("units are invertible");
    Ok(Residue(v))
}

/// Discrete logarithm to base `1 + p`: the `a in [0, p^(k-1))` with `(1+p)^a = u mod p^k`.
///
/// Digit extraction: if `v = u (1+p)^(-a_j) = 1 + t p^(j+1) mod p^(j+2)` then the
/// next digit is `t mod p`, because `(1+p)^(p^j) = 1 + p^(j+1) mod p^(j+2)` for odd `p`.
pub fn dlog_1p(u: Residue, ctx: &Ctx) -> Result<u64> {
    let p = ctx.p;
    if u.0 % p != 1 % p {
        return Err(Error::NotOnePlusP { value: u.0, p });
    }
    let inv_base = inv_mod_raw(1 + p, ctx.modulus).expect("1+p is a unit");
    let mut acc = 0u64;
    // invariant: v = u (1+p)^(-acc) = 1 mod p^(j+1)
    let mut v = u.0;
    for j in 0..(ctx.k - 1) {
        let pj = p.pow(j);
        let level = pj * p;
        let next = level * p;
        let d = ((v % next) - 1) / level % p;
        if d != 0 {
            acc += d * pj;
            v = ctx.mul(v, ctx.pow(inv_base, d * pj));
        }
    }
    debug_assert_eq!(v, 1);
    Ok(acc)
}

/// The first `n_digits` p-adic digits of `beta`, where `(1 + p)^beta = (1 + p^m)^(-1)`.
///
/// Runs at precision `n_digits + 1`, which is exactly what the last digit needs.
pub fn beta_digits(m: u32, n_digits: usize, p: u64) -> Result<PadicDigits> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "m = {m} must be at least 2"
        )));
    }
    if n_digits == 0 {
        return Err(Error::InvalidParameter(
            "at least one digit must be requested".into(),
        ));
    }
    let k = u32::try_from(n_digits + 1)
        .map_err(|_| Error::InvalidParameter("too many digits".into()))?;
    let ctx = Ctx::new(p, k)?;
    let pm = if m >= k { 0 } else { p.pow(m) };
    let target = inv_mod(Residue::new(1 + pm as i128, &ctx), &ctx)?;
    let beta = dlog_1p(target, &ctx)?;
    Ok(PadicDigits::of_integer(beta, p, n_digits))
}

/// The digits of `beta` that are given in closed form: `0` up to index `m-2`,
/// `p-1` at index `m-1` and `((p^(m-1) - 1)/2 - 1) mod p` at index `m`.
/// Entries beyond index `m` are unknown (`None`).
pub fn beta_stated_digits(m: u32, n_digits: usize, p: u64) -> Vec<Option<u32>> {
    (0..n_digits)
        .map(|j| {
            let j = j as u32;
            if j + 1 < m {
                Some(0)
            } else if j + 1 == m {
                Some((p - 1) as u32)
            } else if j == m {
                // p^(m-1) mod 2p determines (p^(m-1) - 1)/2 mod p.
                let x = pow_mod(p, (m - 1) as u64, 2 * p) as i128;
                let half = (x - 1).rem_euclid(2 * p as i128) / 2;
                Some((half - 1).rem_euclid(p as i128) as u32)
            } else {
                None
            }
        })
        .collect()
}

/// Computed digits of `beta` next to the closed-form ones, with the positions where they differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaComparison {
    pub p: u64,
    pub m: u32,
    pub computed: PadicDigits,
    pub stated: Vec<Option<u32>>,
    pub discrepancies: Vec<usize>,
}

impl BetaComparison {
    pub fn flagged(&self) -> bool {
        !self.discrepancies.is_empty()
    }
}

pub fn compare_beta_digits(m: u32, n_digits: usize, p: u64) -> Result<BetaComparison> {
    let computed = beta_digits(m, n_digits, p)?;
    let stated = beta_stated_digits(m, n_digits, p);
    let discrepancies = computed
        .digits()
        .iter()
        .zip(&stated)
        .enumerate()
        .filter_map(|(j, (c, s))| match s {
            Some(s) if s != c => Some(j),
            _ => None,
        })
        .collect();
    Ok(BetaComparison {
        p,
        m,
        computed,
        stated,
        discrepancies,
    })
}

/// `C(beta, n) mod p` from the digits of `beta` (Lucas).
pub fn binom_mod_p(beta: &PadicDigits, n: u64, p: u64) -> Result<u32> {
    let mut n_digits = Vec::new();
    let mut rest = n;
    while rest > 0 {
        n_digits.push((rest % p) as u32);
        rest /= p;
    }
    if n_digits.len() > beta.len() {
        return Err(Error::InsufficientDigits {
            needed: n_digits.len(),
            available: beta.len(),
        });
    }
    let field = Fp::new(p as u32);
    Ok(n_digits
        .iter()
        .zip(beta.digits())
        .fold(1u32, |acc, (&nd, &bd)| {
            fp::mul(acc, field.small_binom(bd, nd), p as u32)
        }))
}
