//! Exact elimination: fraction-free (Bareiss) rank over the rationals,
//! Gauss-Jordan reduced echelon forms and nullspaces over any [`Scalar`].

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{common_denominator, Fp, Scalar, Q};

/// Reduced row-echelon form: nonzero rows only, each pivot normalized to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<F> {
    pub cols: usize,
    pub rows: Vec<Vec<F>>,
    pub pivots: Vec<usize>,
}

impl<F: Scalar> Rref<F> {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Basis of `{v : rows * v = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                v[p] = -row[free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Whether `v` lies in the row space.
    pub fn contains(&self, v: &[F]) -> bool {
        let mut w: Vec<F> = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let f = w[p].clone();
                for (wi, ri) in w.iter_mut().zip(row) {
                    *wi = wi.clone() - f.clone() * ri.clone();
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }
}

/// Gauss-Jordan elimination.
pub fn rref<F: Scalar>(rows: &[Vec<F>], cols: usize) -> Rref<F> {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Rref {
        cols,
        rows: m,
        pivots,
    }
}

/// Rank over a field by forward elimination only.
pub fn rank_generic<F: Scalar>(rows: &[Vec<F>], cols: usize) -> usize {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].inv().expect("nonzero pivot");
        let pivot_row = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone() * inv.clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
        r += 1;
    }
    r
}

pub fn rank_fp(rows: &[Vec<Fp>], cols: usize) -> usize {
    rank_generic(rows, cols)
}

/// Clears denominators row by row.
pub fn integer_rows(rows: &[Vec<Q>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let den = common_denominator(row.iter());
            row.iter()
                .map(|q| (q * Q::from_integer(den.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) elimination; returns the rank.
pub fn rank_q(rows: &[Vec<Q>], cols: usize) -> usize {
    let mut m = integer_rows(rows);
    bareiss_rank(&mut m, cols)
}

fn bareiss_rank(m: &mut [Vec<BigInt>], cols: usize) -> usize {
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let (top, bottom) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = pivot_row[c].clone();
        for row in bottom.iter_mut() {
            let f = row[c].clone();
            for k in c..cols {
                let v = &piv * &row[k] - &f * &pivot_row[k];
                row[k] = v / &prev;
            }
        }
        prev = piv;
        r += 1;
    }
    r
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn det_bigint(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigInt::zero();
        };
        if pr != c {
            m.swap(pr, c);
            sign = -sign;
        }
        let (top, bottom) = m.split_at_mut(c + 1);
        let pivot_row = &top[c];
        let piv = pivot_row[c].clone();
        for row in bottom.iter_mut() {
            let f = row[c].clone();
            for k in c + 1..n {
                let v = &piv * &row[k] - &f * &pivot_row[k];
                row[k] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = piv;
    }
    sign * prev
}

/// Matrix product `a * b` with `a: n x k`, `b: k x m` given as row vectors.
pub fn mat_mul<F: Scalar>(a: &[Vec<F>], b: &[Vec<F>], m: usize) -> Vec<Vec<F>> {
    a.iter()
        .map(|row| {
            let mut out = vec![F::zero(); m];
            for (aik, brow) in row.iter().zip(b) {
                if aik.is_zero() {
                    continue;
                }
                for (o, bkj) in out.iter_mut().zip(brow) {
                    if !bkj.is_zero() {
                        *o = o.clone() + aik.clone() * bkj.clone();
                    }
                }
            }
            out
        })
        .collect()
}

/// Applies each row functional to `v`.
pub fn apply_rows<F: Scalar>(rows: &[Vec<F>], v: &[F]) -> Vec<F> {
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_int;
    use proptest::prelude::*;

    fn qm(v: &[&[i64]]) -> Vec<Vec<Q>> {
        v.iter()
            .map(|r| r.iter().map(|&x| q_int(x)).collect())
            .collect()
    }

    #[test]
    fn rank_small() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank_q(&m, 3), 2);
        assert_eq!(rref(&m, 3).rank(), 2);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = qm(&[&[1, 2, 3, 4], &[0, 1, 1, 1]]);
        let r = rref(&m, 4);
        for v in r.nullspace() {
            assert!(apply_rows(&m, &v).iter().all(|x| Scalar::is_zero(x)));
        }
        assert_eq!(r.nullspace().len(), 2);
    }

    #[test]
    fn determinant() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(7), BigInt::from(4)],
        ];
        assert_eq!(det_bigint(m), BigInt::from(1));
        let z = vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        assert_eq!(det_bigint(z), BigInt::from(-1));
    }

    proptest! {
        #[test]
        fn bareiss_agrees_with_gauss_jordan(entries in proptest::collection::vec(-3i64..=3, 20)) {
            let m: Vec<Vec<Q>> = entries.chunks(5).map(|r| r.iter().map(|&x| q_int(x)).collect()).collect();
            prop_assert_eq!(rank_q(&m, 5), rref(&m, 5).rank());
            let mp: Vec<Vec<Fp>> = entries.chunks(5).map(|r| r.iter().map(|&x| Fp::from_i64(x)).collect()).collect();
            prop_assert!(rank_fp(&mp, 5) <= rank_q(&m, 5));
        }
    }
}
