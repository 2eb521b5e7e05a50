//! Dense bivariate polynomials in graded monomial order.
//!
//! Monomial `x^a y^b` sits at index `n(n+1)/2 + b` with `n = a + b`, so the
//! coefficients of total degree `< k` are exactly the first
//! `mono_count(k - 1)` entries.

use std::collections::BTreeMap;

use crate::arith::{Scalar, Q};

/// Number of monomials of total degree `<= deg`.
pub fn mono_count(deg: usize) -> usize {
    (deg + 1) * (deg + 2) / 2
}

/// Number of monomials of total degree `< deg` (zero for `deg == 0`).
pub fn mono_count_below(deg: usize) -> usize {
    deg * (deg + 1) / 2
}

pub fn mono_index(a: usize, b: usize) -> usize {
    let n = a + b;
    n * (n + 1) / 2 + b
}

pub fn mono_at(idx: usize) -> (usize, usize) {
    // largest n with n(n+1)/2 <= idx
    let mut n = (8 * idx + 1).isqrt().saturating_sub(1) / 2;
    while (n + 1) * (n + 2) / 2 <= idx {
        n += 1;
    }
    let b = idx - n * (n + 1) / 2;
    (n - b, b)
}

/// Exponent pairs in graded order, starting at index 0.
pub fn monomials() -> impl Iterator<Item = (usize, usize)> {
    (0usize..).flat_map(|n| (0..=n).map(move |b| (n - b, b)))
}

fn binomial_row(n: usize) -> Vec<i64> {
    let mut row = vec![1i64; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n - k + 1) as i64 / k as i64;
    }
    row
}

/// Binomial coefficients as field elements, `table[n][k] = C(n, k)`.
pub fn binomials<F: Scalar>(max_n: usize) -> Vec<Vec<F>> {
    let mut table: Vec<Vec<F>> = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        let mut row = vec![F::one(); n + 1];
        for k in 1..n {
            row[k] = table[n - 1][k - 1].clone() + table[n - 1][k].clone();
        }
        table.push(row);
    }
    table
}

/// Polynomial in `x, y` with coefficients in `F`, stored densely up to a
/// total-degree cap.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> Poly2<F> {
    pub fn zero() -> Self {
        Poly2 { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        let mut p = Poly2::zero();
        p.set(0, 0, c);
        p
    }

    pub fn monomial(a: usize, b: usize, c: F) -> Self {
        let mut p = Poly2::zero();
        p.set(a, b, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, usize, F)>>(terms: I) -> Self {
        let mut p = Poly2::zero();
        for (a, b, c) in terms {
            let cur = p.get(a, b);
            p.set(a, b, cur + c);
        }
        p
    }

    /// Builds from a coefficient vector in graded order.
    pub fn from_dense(coeffs: Vec<F>) -> Self {
        let mut p = Poly2 { coeffs };
        p.trim();
        p
    }

    pub fn dense(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient vector padded or truncated to all monomials of degree `<= deg`.
    pub fn dense_to(&self, deg: usize) -> Vec<F> {
        let n = mono_count(deg);
        let mut v: Vec<F> = self.coeffs.iter().take(n).cloned().collect();
        v.resize(n, F::zero());
        v
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn get(&self, a: usize, b: usize) -> F {
        self.coeffs
            .get(mono_index(a, b))
            .cloned()
            .unwrap_or_else(F::zero)
    }

    pub fn set(&mut self, a: usize, b: usize, c: F) {
        let i = mono_index(a, b);
        if i >= self.coeffs.len() {
            if c.is_zero() {
                return;
            }
            self.coeffs.resize(i + 1, F::zero());
        }
        self.coeffs[i] = c;
        self.trim();
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            let (a, b) = mono_at(self.coeffs.len() - 1);
            Some(a + b)
        }
    }

    /// Lowest total degree of a nonzero term (multiplicity at the origin).
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| {
            let (a, b) = mono_at(i);
            a + b
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        self.coeffs
            .iter()
            .zip(monomials())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, (a, b))| (a, b, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(F::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(F::zero);
            v.push(a + b);
        }
        Poly2::from_dense(v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    pub fn scale(&self, c: &F) -> Self {
        Poly2::from_dense(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return Poly2::zero();
        };
        let mut v = vec![F::zero(); mono_count(da + db)];
        for (a1, b1, c1) in self.terms() {
            for (a2, b2, c2) in other.terms() {
                let i = mono_index(a1 + a2, b1 + b2);
                v[i] = v[i].clone() + c1.clone() * c2.clone();
            }
        }
        Poly2::from_dense(v)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Poly2::constant(F::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &F, y: &F) -> F {
        let mut acc = F::zero();
        for (a, b, c) in self.terms() {
            acc = acc + c.clone() * x.pow(a as u32) * y.pow(b as u32);
        }
        acc
    }

    pub fn deriv_x(&self) -> Self {
        Poly2::from_terms(
            self.terms()
                .filter(|(a, _, _)| *a > 0)
                .map(|(a, b, c)| (a - 1, b, c.clone() * F::from_i64(a as i64))),
        )
    }

    pub fn deriv_y(&self) -> Self {
        Poly2::from_terms(
            self.terms()
                .filter(|(_, b, _)| *b > 0)
                .map(|(a, b, c)| (a, b - 1, c.clone() * F::from_i64(b as i64))),
        )
    }

    /// `p(x + x0, y + y0)`, keeping only terms of degree `< keep_below` when given.
    pub fn translate(&self, x0: &F, y0: &F, keep_below: Option<usize>) -> Self {
        let Some(deg) = self.degree() else {
            return Poly2::zero();
        };
        let bin = binomials::<F>(deg);
        let px: Vec<F> = (0..=deg).map(|k| x0.pow(k as u32)).collect();
        let py: Vec<F> = (0..=deg).map(|k| y0.pow(k as u32)).collect();
        let cap = keep_below.unwrap_or(deg + 1).min(deg + 1);
        if cap == 0 {
            return Poly2::zero();
        }
        let mut v = vec![F::zero(); mono_count(cap - 1)];
        for (a, b, c) in self.terms() {
            for i in 0..=a {
                let ca = c.clone() * bin[a][i].clone() * px[a - i].clone();
                for j in 0..=b {
                    if i + j >= cap {
                        break;
                    }
                    let idx = mono_index(i, j);
                    v[idx] = v[idx].clone() + ca.clone() * bin[b][j].clone() * py[b - j].clone();
                }
            }
        }
        Poly2::from_dense(v)
    }

    /// `p(x + c*y, y)`.
    pub fn shear_x(&self, c: &F) -> Self {
        let Some(deg) = self.degree() else {
            return Poly2::zero();
        };
        let bin = binomials::<F>(deg);
        let pc: Vec<F> = (0..=deg).map(|k| c.pow(k as u32)).collect();
        let mut v = vec![F::zero(); mono_count(deg)];
        for (a, b, coef) in self.terms() {
            for i in 0..=a {
                let idx = mono_index(i, b + a - i);
                v[idx] = v[idx].clone() + coef.clone() * bin[a][i].clone() * pc[a - i].clone();
            }
        }
        Poly2::from_dense(v)
    }

    /// Homogeneous component of degree `k`, as coefficients of `x^{k-b} y^b`
    /// indexed by `b`.
    pub fn form(&self, k: usize) -> Vec<F> {
        (0..=k).map(|b| self.get(k - b, b)).collect()
    }

    /// Coefficients in `y` with coefficients univariate in `x`:
    /// `result[b][a]` is the coefficient of `x^a y^b`.
    pub fn by_y_powers(&self) -> Vec<Vec<F>> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let mut out = vec![vec![F::zero(); deg + 1]; deg + 1];
        for (a, b, c) in self.terms() {
            out[b][a] = c.clone();
        }
        out
    }
}

impl Poly2<Q> {
    /// Sparse map from exponent pair to coefficient.
    pub fn to_map(&self) -> BTreeMap<(usize, usize), Q> {
        self.terms().map(|(a, b, c)| ((a, b), c.clone())).collect()
    }

    /// Converts into another field; `None` if some coefficient does not reduce.
    pub fn convert<G: Scalar>(&self) -> Option<Poly2<G>> {
        let v: Option<Vec<G>> = self.coeffs.iter().map(G::from_rational).collect();
        v.map(Poly2::from_dense)
    }
}

/// `C(n, k)` for small arguments.
pub fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        0
    } else {
        binomial_row(n)[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_int;

    #[test]
    fn monomial_index_roundtrip() {
        for i in 0..500 {
            let (a, b) = mono_at(i);
            assert_eq!(mono_index(a, b), i);
        }
        assert_eq!(mono_index(0, 0), 0);
        assert_eq!(mono_index(1, 0), 1);
        assert_eq!(mono_index(0, 1), 2);
        assert_eq!(mono_count(2), 6);
        assert_eq!(mono_count_below(2), 3);
    }

    #[test]
    fn translate_matches_expansion() {
        // (x+1)^2 y
        let p = Poly2::from_terms([(2usize, 1usize, q_int(1))]);
        let t = p.translate(&q_int(1), &q_int(0), None);
        let expect = Poly2::from_terms([(2, 1, q_int(1)), (1, 1, q_int(2)), (0, 1, q_int(1))]);
        assert_eq!(t, expect);
    }

    #[test]
    fn order_and_degree() {
        let p = Poly2::from_terms([(0usize, 2usize, q_int(1)), (3, 0, q_int(-1))]);
        assert_eq!(p.order(), Some(2));
        assert_eq!(p.degree(), Some(3));
        assert_eq!(Poly2::<Q>::zero().order(), None);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }
}
