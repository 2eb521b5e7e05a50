//! Univariate polynomials over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{format_q, Q};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    c: Vec<Q>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        UPoly::new(vec![c])
    }

    /// The monic linear polynomial `t - r`.
    pub fn linear_root(r: &Q) -> Self {
        UPoly::new(vec![-r.clone(), Q::one()])
    }

    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.c.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        UPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, s: &Q) -> Self {
        UPoly::new(self.c.iter().map(|x| x * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UPoly::new(v)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(UPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn deriv(&self) -> Self {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Euclidean division. Panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.lead().recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![Q::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] * &lead_inv;
            if !coef.is_zero() {
                for (j, dc) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * dc;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Multiplies by a rational so that the coefficients are coprime
    /// integers with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let den = self
            .c
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = self
            .c
            .iter()
            .map(|q| (q * Q::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        UPoly::new(
            ints.into_iter()
                .map(|v| Q::from_integer(v / &g * &sign))
                .collect(),
        )
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = o.primitive();
        while !b.is_zero() {
            let r = a.rem(&b).primitive();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree part, monic.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return UPoly::one();
        }
        let g = self.gcd(&self.deriv());
        self.div_rem(&g).0.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree().unwrap_or(0) == 0 || self.gcd(&self.deriv()).degree() == Some(0)
    }

    /// Multiplicity of `r` as a root.
    pub fn root_multiplicity(&self, r: &Q) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = UPoly::linear_root(r);
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, rem) = p.div_rem(&lin);
            if !rem.is_zero() {
                return k;
            }
            p = q;
            k += 1;
        }
    }

    /// Inverse modulo `h`, if `self` is a unit there.
    pub fn inverse_mod(&self, h: &Self) -> Option<Self> {
        // extended Euclid on (h, self): track s with s * self = r (mod h)
        let mut r0 = h.clone();
        let mut r1 = self.rem(h);
        let mut s0 = UPoly::zero();
        let mut s1 = UPoly::one();
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        Some(s0.scale(&r0.lead().recip()).rem(h))
    }

    /// Interpolating polynomial through `(x_k, y_k)` (distinct nodes).
    pub fn interpolate(points: &[(Q, Q)]) -> Self {
        // Newton divided differences
        let n = points.len();
        let mut coef: Vec<Q> = points.iter().map(|(_, y)| y.clone()).collect();
        for level in 1..n {
            for k in (level..n).rev() {
                let num = &coef[k] - &coef[k - 1];
                let den = &points[k].0 - &points[k - level].0;
                coef[k] = num / den;
            }
        }
        let mut acc = UPoly::zero();
        for k in (0..n).rev() {
            acc = acc
                .mul(&UPoly::linear_root(&points[k].0))
                .add(&UPoly::constant(coef[k].clone()));
        }
        acc
    }

    /// Rational roots, found by the rational root test when the extreme
    /// coefficients are small enough to factor by trial division; returns
    /// `None` when that bound is exceeded.
    pub fn rational_roots(&self, limit: u64) -> Option<Vec<Q>> {
        let p = self.squarefree_part().primitive();
        let mut roots = Vec::new();
        let mut p = p;
        // strip zero roots
        if p.coeff(0).is_zero() {
            roots.push(Q::zero());
            p = p.div_rem(&UPoly::linear_root(&Q::zero())).0;
        }
        let Some(deg) = p.degree() else {
            return Some(roots);
        };
        if deg == 0 {
            return Some(roots);
        }
        let a0 = p.coeff(0).to_integer().abs();
        let an = p.lead().to_integer().abs();
        let nums = small_divisors(&a0, limit)?;
        let dens = small_divisors(&an, limit)?;
        let mut seen = Vec::new();
        for n in &nums {
            for d in &dens {
                for sign in [1i64, -1] {
                    let cand = Q::new(n * BigInt::from(sign), d.clone());
                    if seen.contains(&cand) {
                        continue;
                    }
                    seen.push(cand.clone());
                    if p.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        Some(roots)
    }
}

fn small_divisors(n: &BigInt, limit: u64) -> Option<Vec<BigInt>> {
    if n > &BigInt::from(limit) {
        return None;
    }
    let n: u64 = n.try_into().ok()?;
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(BigInt::from(k));
            if k * k != n {
                out.push(BigInt::from(n / k));
            }
        }
        k += 1;
    }
    Some(out)
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_q(c))?,
                1 => write!(f, "({})*t", format_q(c))?,
                _ => write!(f, "({})*t^{}", format_q(c), i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q_frac, q_int};

    fn p(v: &[i64]) -> UPoly {
        UPoly::new(v.iter().map(|&x| q_int(x)).collect())
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (t-1)(t-2) and (t-1)(t+3)
        let a = p(&[2, -3, 1]);
        let b = p(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
    }

    #[test]
    fn squarefree_detection() {
        let a = p(&[1, -2, 1]); // (t-1)^2
        assert!(!a.is_squarefree());
        assert_eq!(a.squarefree_part(), p(&[-1, 1]));
        assert!(p(&[-1, 0, 1]).is_squarefree());
    }

    #[test]
    fn rational_roots_found() {
        // (2t-1)(t+3) t
        let a = p(&[-1, 2]).mul(&p(&[3, 1])).mul(&p(&[0, 1]));
        let r = a.rational_roots(1_000_000).unwrap();
        assert_eq!(r, vec![q_int(-3), q_int(0), q_frac(1, 2)]);
        assert_eq!(p(&[1, 0, 1]).rational_roots(100).unwrap(), vec![]);
    }

    #[test]
    fn inverse_and_interpolation() {
        let h = p(&[-2, 0, 1]);
        let a = p(&[1, 1]);
        let inv = a.inverse_mod(&h).unwrap();
        assert_eq!(a.mul(&inv).rem(&h), UPoly::one());
        assert!(p(&[-2, 0, 1]).mul(&p(&[1, 1])).inverse_mod(&h).is_none());
        let f = p(&[3, -1, 0, 2]);
        let pts: Vec<(Q, Q)> = (0..4).map(|k| (q_int(k), f.eval(&q_int(k)))).collect();
        assert_eq!(UPoly::interpolate(&pts), f);
    }

    #[test]
    fn division_identity() {
        let a = p(&[5, 0, 3, 1]);
        let d = p(&[1, 2]);
        let (q, r) = a.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert_eq!(a.root_multiplicity(&q_int(0)), 0);
        assert_eq!(p(&[0, 0, 1]).root_multiplicity(&q_int(0)), 2);
    }
}
