//! Prime fields `F_p` and binomial coefficients mod `p`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A prime modulus, checked by trial division at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub const TWO: Prime = Prime(2);

    pub fn new(p: u32) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p as u64))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 != 2
    }

    /// `a + b mod p` on already reduced residues.
    pub(crate) fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    pub(crate) fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub(crate) fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub(crate) fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub(crate) fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    /// Multiplicative inverse of a nonzero residue (Fermat).
    pub(crate) fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0));
        self.pow(a, (self.0 - 2) as u64)
    }

    pub(crate) fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of `F_p`. The value is always fully reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    p: Prime,
}

impl Fp {
    pub fn new(value: i64, p: Prime) -> Self {
        Fp {
            value: p.reduce(value),
            p,
        }
    }

    pub fn zero(p: Prime) -> Self {
        Fp { value: 0, p }
    }

    pub fn one(p: Prime) -> Self {
        Fp { value: 1, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Prime {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: Fp) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: other.p.get(),
            })
        }
    }

    pub fn try_add(self, other: Fp) -> Result<Fp> {
        self.check(other)?;
        Ok(Fp {
            value: self.p.add(self.value, other.value),
            p: self.p,
        })
    }

    pub fn try_sub(self, other: Fp) -> Result<Fp> {
        self.check(other)?;
        Ok(Fp {
            value: self.p.sub(self.value, other.value),
            p: self.p,
        })
    }

    pub fn try_mul(self, other: Fp) -> Result<Fp> {
        self.check(other)?;
        Ok(Fp {
            value: self.p.mul(self.value, other.value),
            p: self.p,
        })
    }

    /// `None` for zero.
    pub fn inverse(self) -> Option<Fp> {
        (!self.is_zero()).then(|| Fp {
            value: self.p.inv(self.value),
            p: self.p,
        })
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.p)
    }
}

impl std::ops::Neg for Fp {
    type Output = Fp;

    fn neg(self) -> Fp {
        Fp {
            value: self.p.neg(self.value),
            p: self.p,
        }
    }
}

pub fn fp_add(a: Fp, b: Fp) -> Result<Fp> {
    a.try_add(b)
}

pub fn fp_mul(a: Fp, b: Fp) -> Result<Fp> {
    a.try_mul(b)
}

/// `C(n, k) mod p` by Lucas' theorem: the product of digit-wise binomials in
/// base `p`. Returns zero when `k > n`.
pub fn binom_mod_p(n: u64, k: u64, p: Prime) -> Fp {
    Fp {
        value: binom_residue(n, k, p),
        p,
    }
}

pub(crate) fn binom_residue(mut n: u64, mut k: u64, p: Prime) -> u32 {
    if k > n {
        return 0;
    }
    let base = p.get() as u64;
    if base == 2 {
        // every digit binomial is 0 or 1
        return u32::from(n & k == k);
    }
    let mut acc = 1u32;
    while k > 0 {
        let (nd, kd) = ((n % base) as u32, (k % base) as u32);
        if kd > nd {
            return 0;
        }
        acc = p.mul(acc, small_binom(nd, kd, p));
        n /= base;
        k /= base;
    }
    acc
}

/// `C(n, k) mod p` for digits `k <= n < p`.
fn small_binom(n: u32, k: u32, p: Prime) -> u32 {
    let k = k.min(n - k);
    let (mut num, mut den) = (1u32, 1u32);
    for i in 0..k {
        num = p.mul(num, n - i);
        den = p.mul(den, i + 1);
    }
    p.mul(num, p.inv(den))
}

/// `C(n, k) mod p` for signed arguments, zero whenever `k < 0`, `n < 0` or `k > n`.
pub(crate) fn binom_signed(n: i64, k: i64, p: Prime) -> u32 {
    if n < 0 || k < 0 || k > n {
        0
    } else {
        binom_residue(n as u64, k as u64, p)
    }
}
