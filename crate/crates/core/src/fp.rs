//! Arithmetic in the prime field F_p on plain `u32` representatives.

/// Factorial tables for a fixed odd prime, used for small binomials and Lucas products.
#[derive(Debug, Clone)]
pub struct Fp {
    p: u32,
    fact: Vec<u32>,
    inv_fact: Vec<u32>,
}

impl Fp {
    pub fn new(p: u32) -> Self {
        let n = p as usize;
        let mut fact = vec![1u32; n];
        for i in 1..n {
            fact[i] = mul(fact[i - 1], i as u32, p);
        }
        let mut inv_fact = vec![1u32; n];
        inv_fact[n - 1] = inv(fact[n - 1], p);
        for i in (1..n).rev() {
            inv_fact[i - 1] = mul(inv_fact[i], i as u32, p);
        }
        Fp { p, fact, inv_fact }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `C(a, b) mod p` for `a, b < p`.
    pub fn small_binom(&self, a: u32, b: u32) -> u32 {
        if b > a {
            return 0;
        }
        let p = self.p;
        mul(
            mul(self.fact[a as usize], self.inv_fact[b as usize], p),
            self.inv_fact[(a - b) as usize],
            p,
        )
    }

    /// `C(n, m) mod p` by Lucas' theorem.
    pub fn binom(&self, mut n: u64, mut m: u64) -> u32 {
        let p = self.p as u64;
        let mut acc = 1u32;
        while m > 0 {
            let (nd, md) = ((n % p) as u32, (m % p) as u32);
            if md > nd {
                return 0;
            }
            acc = mul(acc, self.small_binom(nd, md), self.p);
            n /= p;
            m /= p;
        }
        acc
    }
}

#[inline]
pub fn add(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

#[inline]
pub fn sub(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + p as u64 - b as u64) % p as u64) as u32
}

#[inline]
pub fn neg(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn pow(mut base: u32, mut e: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero element by Fermat.
pub fn inv(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow(a, p as u64 - 2, p)
}

/// Reduces a signed integer into `[0, p)`.
#[inline]
pub fn from_i64(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

/// Lift to the symmetric range `(-p/2, p/2]`, handy for printing signs.
pub fn signed(a: u32, p: u32) -> i64 {
    if a > p / 2 {
        a as i64 - p as i64
    } else {
        a as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_binom(n: u64, m: u64) -> u128 {
        if m > n {
            return 0;
        }
        let mut acc: u128 = 1;
        for i in 0..m {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc
    }

    #[test]
    fn lucas_agrees_with_integer_binomials() {
        for p in [3u32, 5, 7] {
            let f = Fp::new(p);
            for n in 0..60u64 {
                for m in 0..=n {
                    assert_eq!(
                        f.binom(n, m) as u128,
                        int_binom(n, m) % p as u128,
                        "p={p} C({n},{m})"
                    );
                }
            }
        }
    }

    #[test]
    fn inverses() {
        for p in [3u32, 5, 7, 11, 13] {
            for a in 1..p {
                assert_eq!(mul(a, inv(a, p), p), 1);
            }
        }
        assert_eq!(signed(2, 3), -1);
        assert_eq!(from_i64(-1, 5), 4);
    }
}
