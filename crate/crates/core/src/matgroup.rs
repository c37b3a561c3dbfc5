//! The finite group `G_k = Γ₁(SL₃(Z/p^k))`: exact 3×3 matrices, the eight
//! generators, commutator words and canonical coordinates.
//!
//! Generators are ordered uppers, diagonals, lowers:
//! `x1 = x12, x2 = x13, x3 = x23, x4 = x1122, x5 = x2233, x6 = x21, x7 = x31, x8 = x32`.
//! Every element factors uniquely as `x1^a1 x2^a2 ... x8^a8` with `a_i in [0, p^(k-1))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::{self, IdentityPart, MatrixDetail, MatrixIdentityReport, PartCheck};
use crate::padic::{dlog_1p, inv_mod_raw, Ctx, Residue};

pub const NUM_GENERATORS: usize = 8;

/// Matrix position `(row, col)` of the off-diagonal generators, by generator index 1..8.
const UNIPOTENT_POSITION: [Option<(usize, usize)>; NUM_GENERATORS] = [
    Some((0, 1)),
    Some((0, 2)),
    Some((1, 2)),
    None,
    None,
    Some((1, 0)),
    Some((2, 0)),
    Some((2, 1)),
];

/// Human-readable generator names in the fixed order.
pub const GENERATOR_NAMES: [&str; NUM_GENERATORS] =
    ["x12", "x13", "x23", "x1122", "x2233", "x21", "x31", "x32"];

/// A 3×3 matrix over `Z/p^k`. The context is carried separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat3(pub [[u64; 3]; 3]);

impl Mat3 {
    pub const fn identity() -> Self {
        Mat3([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn from_row_major(entries: &[i128], ctx: &Ctx) -> Result<Self> {
        if entries.len() != 9 {
            return Err(Error::Malformed(format!(
                "expected 9 entries, got {}",
                entries.len()
            )));
        }
        let mut m = [[0u64; 3]; 3];
        for (idx, &v) in entries.iter().enumerate() {
            m[idx / 3][idx % 3] = ctx.reduce(v);
        }
        Ok(Mat3(m))
    }

    pub fn row_major(&self) -> [u64; 9] {
        let mut out = [0u64; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.0[i][j];
            }
        }
        out
    }

    pub fn det(&self, ctx: &Ctx) -> u64 {
        let m = &self.0;
        let term = |a: usize, b: usize, c: usize| ctx.mul(m[0][a], ctx.mul(m[1][b], m[2][c]));
        let pos = ctx.add(ctx.add(term(0, 1, 2), term(1, 2, 0)), term(2, 0, 1));
        let neg = ctx.add(ctx.add(term(2, 1, 0), term(0, 2, 1)), term(1, 0, 2));
        ctx.sub(pos, neg)
    }

    /// Checks `det = 1` and `M = I mod p`.
    pub fn check_membership(&self, ctx: &Ctx) -> Result<()> {
        let p = ctx.p();
        for i in 0..3 {
            for j in 0..3 {
                let want = u64::from(i == j);
                if self.0[i][j] >= ctx.modulus() || self.0[i][j] % p != want {
                    return Err(Error::NotInGroup(format!(
                        "entry ({},{}) = {} is not {} mod p",
                        i + 1,
                        j + 1,
                        self.0[i][j],
                        want
                    )));
                }
            }
        }
        let d = self.det(ctx);
        if d != 1 {
            return Err(Error::NotInGroup(format!("determinant is {d}, not 1")));
        }
        Ok(())
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.0;
        write!(
            f,
            "[[{},{},{}],[{},{},{}],[{},{},{}]]",
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2]
        )
    }
}

/// JSON form of a matrix: `{"p":3,"k":3,"entries":[...9 row-major...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub p: u64,
    pub k: u32,
    pub entries: Vec<i128>,
}

impl MatrixDoc {
    pub fn new(m: &Mat3, ctx: &Ctx) -> Self {
        MatrixDoc {
            p: ctx.p(),
            k: ctx.k(),
            entries: m.row_major().iter().map(|&v| v as i128).collect(),
        }
    }

    pub fn decode(&self) -> Result<(Ctx, Mat3)> {
        let ctx = Ctx::new(self.p, self.k)?;
        let m = Mat3::from_row_major(&self.entries, &ctx)?;
        Ok((ctx, m))
    }
}

/// Exponent vector in the fixed generator order, each entry in `[0, p^(k-1))`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct ExpTuple(pub [u64; NUM_GENERATORS]);

impl ExpTuple {
    pub const ZERO: ExpTuple = ExpTuple([0; NUM_GENERATORS]);

    /// `e * e_i` for generator index `i` in 1..=8.
    pub fn unit(i: usize, e: u64, ctx: &Ctx) -> Self {
        let mut t = [0u64; NUM_GENERATORS];
        t[i - 1] = e % ctx.gen_order();
        ExpTuple(t)
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn check_range(&self, ctx: &Ctx) -> Result<()> {
        match self.0.iter().find(|&&a| a >= ctx.gen_order()) {
            Some(a) => Err(Error::Malformed(format!(
                "exponent {a} outside [0, {})",
                ctx.gen_order()
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for ExpTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

fn check_index(i: usize) -> Result<()> {
    if (1..=NUM_GENERATORS).contains(&i) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "generator index {i} outside 1..=8"
        )))
    }
}

/// The generator `x_i`.
pub fn generator(i: usize, ctx: &Ctx) -> Result<Mat3> {
    check_index(i)?;
    Ok(generator_power(i, 1, ctx))
}

/// `x_i^e` in closed form; `e` is taken modulo the generator order.
pub fn generator_power(i: usize, e: i128, ctx: &Ctx) -> Mat3 {
    let e = ctx.exp_reduce(e);
    let mut m = Mat3::identity();
    match UNIPOTENT_POSITION[i - 1] {
        Some((r, c)) => m.0[r][c] = ctx.mul(e, ctx.p()),
        None => {
            let up = ctx.one_plus_p_pow(e as i128);
            let down = ctx.one_plus_p_pow(-(e as i128));
            let first = if i == 4 { 0 } else { 1 };
            m.0[first][first] = up;
            m.0[first + 1][first + 1] = down;
        }
    }
    m
}

pub fn mat_mul(a: &Mat3, b: &Mat3, ctx: &Ctx) -> Mat3 {
    let mut out = [[0u64; 3]; 3];
    let m = ctx.modulus() as u128;
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let s: u128 = (0..3)
                .map(|t| a.0[i][t] as u128 * b.0[t][j] as u128 % m)
                .sum();
            *cell = (s % m) as u64;
        }
    }
    Mat3(out)
}

/// Inverse of a determinant-one matrix (its adjugate).
pub fn mat_inv(a: &Mat3, ctx: &Ctx) -> Mat3 {
    let m = &a.0;
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
        ctx.sub(ctx.mul(m[r0][c0], m[r1][c1]), ctx.mul(m[r0][c1], m[r1][c0]))
    };
    let mut adj = [[0u64; 3]; 3];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            // cofactor of entry (j, i)
            let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
            let v = minor(rows[0], rows[1], cols[0], cols[1]);
            *cell = if (i + j) % 2 == 0 { v } else { ctx.sub(0, v) };
        }
    }
    let adj = Mat3(adj);
    let d = a.det(ctx);
    if d == 1 {
        adj
    } else {
        let dinv = inv_mod_raw(d, ctx.modulus()).expect("determinant must be a unit");
        let mut out = adj;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v = ctx.mul(*v, dinv);
            }
        }
        out
    }
}

/// `a^e` for any integer `e`; the exponent is reduced modulo `p^(k-1)` first.
pub fn mat_pow(a: &Mat3, e: i128, ctx: &Ctx) -> Mat3 {
    let mut e = ctx.exp_reduce(e);
    let mut base = *a;
    let mut acc = Mat3::identity();
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base, ctx);
        }
        base = mat_mul(&base, &base, ctx);
        e >>= 1;
    }
    acc
}

/// `x_i^(-a) x_j^b x_i^a x_j^(-b)`.
pub fn inner_word(i: usize, j: usize, a: i128, b: i128, ctx: &Ctx) -> Result<Mat3> {
    check_index(i)?;
    check_index(j)?;
    let xi = generator_power(i, a, ctx);
    let xi_inv = generator_power(i, -a, ctx);
    let xj = generator_power(j, b, ctx);
    let xj_inv = generator_power(j, -b, ctx);
    let m = mat_mul(
        &mat_mul(&xi_inv, &xj, ctx),
        &mat_mul(&xi, &xj_inv, ctx),
        ctx,
    );
    Ok(m)
}

/// The canonical product `x1^a1 ... x8^a8`.
///
/// Uses the closed forms of the three factors: the upper part is
/// `I + p(a1 E12 + a3 E23) + (p a2 + p^2 a1 a3) E13`, the lower part is
/// `I + p(a6 E21 + a7 E31 + a8 E32)`.
pub fn compose(t: &ExpTuple, ctx: &Ctx) -> Mat3 {
    let p = ctx.p();
    let a: Vec<u64> = t.0.iter().map(|&x| x % ctx.gen_order()).collect();
    let upper = Mat3([
        [
            1,
            ctx.mul(p, a[0]),
            ctx.add(
                ctx.mul(p, a[1]),
                ctx.mul(ctx.mul(p, p), ctx.mul(a[0], a[2])),
            ),
        ],
        [0, 1, ctx.mul(p, a[2])],
        [0, 0, 1],
    ]);
    let l1 = ctx.one_plus_p_pow(a[3] as i128);
    let l2 = ctx.one_plus_p_pow(a[4] as i128 - a[3] as i128);
    let l3 = ctx.one_plus_p_pow(-(a[4] as i128));
    let lower = Mat3([
        [1, 0, 0],
        [ctx.mul(p, a[5]), 1, 0],
        [ctx.mul(p, a[6]), ctx.mul(p, a[7]), 1],
    ]);
    // U * D * L with D diagonal: scale the columns of U, then multiply.
    let mut ud = upper;
    for row in ud.0.iter_mut() {
        row[0] = ctx.mul(row[0], l1);
        row[1] = ctx.mul(row[1], l2);
        row[2] = ctx.mul(row[2], l3);
    }
    mat_mul(&ud, &lower, ctx)
}

fn div_by_p(v: u64, ctx: &Ctx) -> Result<u64> {
    if v % ctx.p() != 0 {
        return Err(Error::NotInGroup(format!("{v} is not divisible by p")));
    }
    Ok((v / ctx.p()) % ctx.gen_order())
}

/// Canonical coordinates of a group element via `g = U D L`.
pub fn factorize(g: &Mat3, ctx: &Ctx) -> Result<ExpTuple> {
    g.check_membership(ctx)?;
    let m = &g.0;
    let inv = |v: u64| inv_mod_raw(v, ctx.modulus()).expect("diagonal pivots are units");

    // Peel the last row/column: row 3 of g is D33 * (L31, L32, 1), column 3 is D33 * U_{.3}.
    let d33 = m[2][2];
    let d33_inv = inv(d33);
    let l31 = ctx.mul(m[2][0], d33_inv);
    let l32 = ctx.mul(m[2][1], d33_inv);
    let u13 = ctx.mul(m[0][2], d33_inv);
    let u23 = ctx.mul(m[1][2], d33_inv);

    // Remaining 2x2 block: g_ab - U_a3 D33 L_3b.
    let rem = |a: usize, b: usize, u: u64, l: u64| ctx.sub(m[a][b], ctx.mul(u, ctx.mul(d33, l)));
    let b11 = rem(0, 0, u13, l31);
    let b12 = rem(0, 1, u13, l32);
    let b21 = rem(1, 0, u23, l31);
    let b22 = rem(1, 1, u23, l32);
    let d22 = b22;
    let d22_inv = inv(d22);
    let l21 = ctx.mul(b21, d22_inv);
    let u12 = ctx.mul(b12, d22_inv);
    let d11 = ctx.sub(b11, ctx.mul(u12, ctx.mul(d22, l21)));

    let a1 = div_by_p(u12, ctx)?;
    let a3 = div_by_p(u23, ctx)?;
    let p2a1a3 = ctx.mul(ctx.mul(ctx.p(), ctx.p()), ctx.mul(a1, a3));
    let a2 = div_by_p(ctx.sub(u13, p2a1a3), ctx)?;
    let a4 = dlog_1p(Residue::new(d11 as i128, ctx), ctx)?;
    let a5 = ctx.exp_reduce(-(dlog_1p(Residue::new(d33 as i128, ctx), ctx)? as i128));
    let a6 = div_by_p(l21, ctx)?;
    let a7 = div_by_p(l31, ctx)?;
    let a8 = div_by_p(l32, ctx)?;
    let t = ExpTuple([a1, a2, a3, a4, a5, a6, a7, a8]);

    // D22 is forced by det = 1; a mismatch means the input was not in the group.
    let want_d22 = ctx.one_plus_p_pow(a5 as i128 - a4 as i128);
    if want_d22 != d22 {
        return Err(Error::NotInGroup(
            "diagonal part is not in the torus".into(),
        ));
    }
    Ok(t)
}

/// Product of group elements given by coordinates, returned in coordinates.
pub fn tuple_mul(a: &ExpTuple, b: &ExpTuple, ctx: &Ctx) -> ExpTuple {
    let m = mat_mul(&compose(a, ctx), &compose(b, ctx), ctx);
    factorize(&m, ctx).expect("G_k is closed under multiplication")
}

/// Checks one item of the commutator theorem at the matrix level: factorizes the
/// inner word and compares it with the closed forms of every reading of the item.
pub fn verify_matrix_identity(id: u8, r: u32, s: u32, ctx: &Ctx) -> Result<MatrixIdentityReport> {
    let item = identities::item(id, r, s, ctx)?;
    let a = ctx.p_pow_exp(r);
    let b = ctx.p_pow_exp(s);
    let mut parts = Vec::with_capacity(item.parts.len());
    for part in &item.parts {
        parts.push(check_part(part, a, b, ctx)?);
    }
    Ok(MatrixIdentityReport::new(&item, ctx, parts))
}

fn check_part(part: &IdentityPart, a: u64, b: u64, ctx: &Ctx) -> Result<PartCheck<MatrixDetail>> {
    let computed = factorize(&inner_word(part.i, part.j, a as i128, b as i128, ctx)?, ctx)?;
    let expected = part.proof.tuple(ctx)?;
    let readings = part
        .variants
        .iter()
        .map(|v| Ok((v.clone(), v.reading.tuple(ctx)? == computed)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PartCheck::new(part, computed, expected, readings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, k: u32) -> Ctx {
        Ctx::new(p, k).unwrap()
    }

    #[test]
    fn generator_examples() {
        let c = ctx(3, 2);
        assert_eq!(
            generator(1, &c).unwrap(),
            Mat3([[1, 3, 0], [0, 1, 0], [0, 0, 1]])
        );
        assert_eq!(
            generator(4, &c).unwrap(),
            Mat3([[4, 0, 0], [0, 7, 0], [0, 0, 1]])
        );
        let c5 = ctx(5, 2);
        assert_eq!(
            generator(8, &c5).unwrap(),
            Mat3([[1, 0, 0], [0, 1, 0], [0, 5, 1]])
        );
        assert!(generator(0, &c).is_err());
        assert!(generator(9, &c).is_err());
    }

    #[test]
    fn generator_orders_are_exact() {
        for (p, k) in [(3, 2), (3, 3), (5, 2), (5, 3), (7, 2)] {
            let c = ctx(p, k);
            for i in 1..=8 {
                let x = generator(i, &c).unwrap();
                let mut acc = Mat3::identity();
                for step in 1..=c.gen_order() {
                    acc = mat_mul(&acc, &x, &c);
                    let is_id = acc == Mat3::identity();
                    assert_eq!(is_id, step == c.gen_order(), "x{i} p={p} k={k} step={step}");
                }
            }
        }
    }

    #[test]
    fn power_and_inverse() {
        let c = ctx(3, 3);
        let x1 = generator(1, &c).unwrap();
        assert_eq!(mat_pow(&x1, c.gen_order() as i128, &c), Mat3::identity());
        assert_eq!(mat_mul(&x1, &mat_inv(&x1, &c), &c), Mat3::identity());
        for i in 1..=8 {
            let x = generator(i, &c).unwrap();
            for e in [-7i128, -1, 0, 2, 5, 13] {
                assert_eq!(mat_pow(&x, e, &c), generator_power(i, e, &c));
            }
        }
    }

    #[test]
    fn swapping_x3_and_x1_produces_x2_correction() {
        let c = ctx(3, 3);
        let x1 = generator(1, &c).unwrap();
        let x2 = generator(2, &c).unwrap();
        let x3 = generator(3, &c).unwrap();
        let lhs = mat_mul(&x3, &x1, &c);
        let rhs = mat_mul(&mat_mul(&x1, &x3, &c), &mat_pow(&x2, -3, &c), &c);
        assert_eq!(lhs, rhs);
        let t = ExpTuple([1, 6, 1, 0, 0, 0, 0, 0]);
        assert_eq!(compose(&t, &c), lhs);
        assert_eq!(factorize(&lhs, &c).unwrap(), t);
    }

    #[test]
    fn inner_word_examples() {
        let c = ctx(3, 3);
        for i in 1..=8 {
            assert_eq!(inner_word(i, i, 4, 7, &c).unwrap(), Mat3::identity());
        }
        // a = b = p: the x2^(-27) correction vanishes up to k = 4 and appears at k = 5.
        assert_eq!(
            inner_word(1, 3, 3, 3, &ctx(3, 4)).unwrap(),
            Mat3::identity()
        );
        let c5 = ctx(3, 5);
        let w = inner_word(1, 3, 3, 3, &c5).unwrap();
        assert_ne!(w, Mat3::identity());
        assert_eq!(w, generator_power(2, -27, &c5));
        let x2 = generator(2, &c).unwrap();
        assert_eq!(inner_word(1, 3, 1, 1, &c).unwrap(), mat_pow(&x2, -3, &c));
    }

    #[test]
    fn compose_matches_naive_product() {
        let c = ctx(5, 3);
        let t = ExpTuple([3, 17, 4, 9, 22, 1, 12, 24]);
        let naive = (1..=8).fold(Mat3::identity(), |acc, i| {
            mat_mul(
                &acc,
                &mat_pow(&generator(i, &c).unwrap(), t.0[i - 1] as i128, &c),
                &c,
            )
        });
        assert_eq!(compose(&t, &c), naive);
    }

    #[test]
    fn factorize_examples() {
        let c = ctx(3, 3);
        assert_eq!(factorize(&Mat3::identity(), &c).unwrap(), ExpTuple::ZERO);
        assert_eq!(
            factorize(&generator(7, &c).unwrap(), &c).unwrap(),
            ExpTuple([0, 0, 0, 0, 0, 0, 1, 0])
        );
        assert!(matches!(
            factorize(&Mat3([[2, 0, 0], [0, 1, 0], [0, 0, 1]]), &c),
            Err(Error::NotInGroup(_))
        ));
        // congruent to I mod p but determinant 4
        assert!(matches!(
            factorize(&Mat3([[4, 0, 0], [0, 1, 0], [0, 0, 1]]), &c),
            Err(Error::NotInGroup(_))
        ));
    }

    #[test]
    fn exhaustive_bijection_at_3_2() {
        use std::collections::HashSet;
        let c = ctx(3, 2);
        let mut seen = HashSet::new();
        for code in 0..3u64.pow(8) {
            let mut t = [0u64; 8];
            let mut rest = code;
            for slot in t.iter_mut() {
                *slot = rest % 3;
                rest /= 3;
            }
            let t = ExpTuple(t);
            let m = compose(&t, &c);
            assert_eq!(factorize(&m, &c).unwrap(), t);
            seen.insert(m);
        }
        assert_eq!(seen.len(), 6561);
    }

    #[test]
    fn commutators_land_one_level_deeper() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (p, k) in [(3u64, 4u32), (5, 3), (7, 3)] {
            let c = ctx(p, k);
            for _ in 0..300 {
                let i = rng.gen_range(1..=8);
                let j = rng.gen_range(1..=8);
                let a: u64 = rng.gen_range(1..c.gen_order());
                let b: u64 = rng.gen_range(1..c.gen_order());
                let w = inner_word(i, j, a as i128, b as i128, &c).unwrap();
                let v = |x: u64| (0..).take_while(|e| x % p.pow(*e + 1) == 0).count() as u32;
                let depth = (v(a) + v(b) + 2).min(k);
                let q = p.pow(depth);
                for r in 0..3 {
                    for s in 0..3 {
                        assert_eq!(w.0[r][s] % q, u64::from(r == s) % q);
                    }
                }
            }
        }
    }
}
