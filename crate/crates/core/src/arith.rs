//! Scalar fields used by the condition builders.
//!
//! Everything user-visible is computed over [`Q`]. The prime field [`Fp`]
//! exists only as a fast certificate: the rank of a rational matrix is at
//! least the rank of its reduction modulo a prime, so a full-rank reduction
//! proves full rank over the rationals.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Q = BigRational;

/// Minimal field interface shared by [`Q`] and [`Fp`].
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// `None` when the rational cannot be represented (denominator not invertible).
    fn from_rational(q: &Q) -> Option<Self>;
    /// `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Q) -> Option<Self> {
        Some(q.clone())
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// The Mersenne prime 2^61 - 1.
pub const FP_MODULUS: u64 = (1u64 << 61) - 1;

/// Element of the prime field of order [`FP_MODULUS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp(u64);

impl Fp {
    pub fn new(v: u64) -> Self {
        Fp(v % FP_MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce_bigint(v: &BigInt) -> Fp {
        let m = BigInt::from(FP_MODULUS);
        let r = v.mod_floor(&m);
        Fp(r.to_u64().expect("residue fits in u64"))
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= FP_MODULUS { s - FP_MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        if self.0 >= rhs.0 {
            Fp(self.0 - rhs.0)
        } else {
            Fp(self.0 + FP_MODULUS - rhs.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        let p = (self.0 as u128) * (rhs.0 as u128);
        let lo = (p as u64) & FP_MODULUS;
        let hi = (p >> 61) as u64;
        let s = lo + hi;
        Fp(if s >= FP_MODULUS { s - FP_MODULUS } else { s })
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(FP_MODULUS - self.0)
        }
    }
}

impl Scalar for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Fp::new(v as u64)
        } else {
            -Fp::new(v.unsigned_abs())
        }
    }
    fn from_rational(q: &Q) -> Option<Self> {
        let den = Fp::reduce_bigint(q.denom());
        let inv = den.inv()?;
        Some(Fp::reduce_bigint(q.numer()) * inv)
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow_u64(FP_MODULUS - 2))
        }
    }
}

impl Fp {
    fn pow_u64(self, mut e: u64) -> Fp {
        let mut b = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b;
            }
            b = b * b;
            e >>= 1;
        }
        acc
    }
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `"p/q"` (or `"p"` for integers).
pub fn format_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"` or `"p"`. Rejects zero and negative denominators and
/// non-reduced fractions.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = |why: &str| Error::Parse(format!("invalid rational {s:?}: {why}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad("numerator"))?;
    let d: BigInt = d.parse().map_err(|_| bad("denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    if d.sign() == Sign::Minus {
        return Err(bad("negative denominator"));
    }
    if !n.gcd(&d).is_one() && !(n.is_zero() && d.is_one()) {
        return Err(bad("not reduced"));
    }
    Ok(Q::new(n, d))
}

/// Uniform draw of `p/q` with `|p| <= height`, `1 <= q <= height`.
pub fn random_q<R: Rng + ?Sized>(rng: &mut R, height: u32) -> Q {
    let h = height.max(1) as i64;
    let p = rng.gen_range(-h..=h);
    let q = rng.gen_range(1..=h);
    q_frac(p, q)
}

/// Nonzero variant of [`random_q`].
pub fn random_nonzero_q<R: Rng + ?Sized>(rng: &mut R, height: u32) -> Q {
    loop {
        let q = random_q(rng, height);
        if !Zero::is_zero(&q) {
            return q;
        }
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Q>>(it: I) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Absolute value helper for rationals.
pub fn abs_q(q: &Q) -> Q {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_inverse_roundtrip() {
        for v in [1u64, 2, 3, 12345, FP_MODULUS - 1] {
            let a = Fp::new(v);
            assert_eq!(a * a.inv().unwrap(), Fp::one());
        }
        assert!(Fp::zero().inv().is_none());
    }

    #[test]
    fn fp_from_rational_matches_field_ops() {
        let q = q_frac(-7, 3);
        let a = Fp::from_rational(&q).unwrap();
        assert_eq!(a * Fp::from_i64(3), Fp::from_i64(-7));
    }

    #[test]
    fn parse_rejects_bad_rationals() {
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("2/4").is_err());
        assert!(parse_q("1/-2").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(parse_q("-3/4").unwrap(), q_frac(-3, 4));
        assert_eq!(parse_q("5").unwrap(), q_int(5));
        assert_eq!(parse_q("0").unwrap(), q_int(0));
    }

    #[test]
    fn format_roundtrip() {
        for q in [q_frac(-3, 4), q_int(0), q_int(17), q_frac(1, 100)] {
            assert_eq!(parse_q(&format_q(&q)).unwrap(), q);
        }
    }
}
