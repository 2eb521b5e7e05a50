//! Arithmetic modulo word-size primes and Chinese remaindering, used to
//! compute integer resultants of bivariate polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

/// Primes below `2^31`, largest first.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n: u64 = (1 << 31) - 1;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// Primes below `2^31`, largest first, generated lazily.
pub fn prime_iter() -> impl Iterator<Item = u64> {
    (0..)
        .map(|k| ((1u64 << 31) - 1) - 2 * k)
        .take_while(|&n| n > 2)
        .filter(|&n| is_prime(n))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn reduce(v: &BigInt, p: u64) -> u64 {
    v.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("reduced below p")
}

/// `a / b mod p`, or `None` if `b` vanishes.
pub fn reduce_frac(a: &BigInt, b: &BigInt, p: u64) -> Option<u64> {
    let d = reduce(b, p);
    (d != 0).then(|| reduce(a, p) * inv_mod(d, p) % p)
}

pub fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if piv != c {
            m.swap(piv, c);
            det = (p - det) % p;
        }
        det = det * m[c][c] % p;
        let inv = inv_mod(m[c][c], p);
        for r in c + 1..n {
            if m[r][c] == 0 {
                continue;
            }
            let f = m[r][c] * inv % p;
            for k in c..n {
                m[r][k] = (m[r][k] + p - f * m[c][k] % p) % p;
            }
        }
    }
    det
}

fn eval_mod(coeffs: &[u64], t: u64, p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| (acc * t + c) % p)
}

/// Coefficients of the polynomial of degree `<= n` taking `values[t]` at
/// `t = 0..=n`.
pub fn interpolate_mod(values: &[u64], p: u64) -> Vec<u64> {
    let n = values.len();
    // divided differences at the nodes 0, 1, ..., n-1
    let mut dd = values.to_vec();
    for k in 1..n {
        let inv = inv_mod(k as u64, p);
        for i in (k..n).rev() {
            dd[i] = (dd[i] + p - dd[i - 1]) % p * inv % p;
        }
    }
    // Horner on the Newton form
    let mut out = vec![0u64; n];
    for k in (0..n).rev() {
        // out = out * (x - k) + dd[k]
        let mut next = vec![0u64; n];
        for i in 0..n {
            if out[i] == 0 {
                continue;
            }
            if i + 1 < n {
                next[i + 1] = (next[i + 1] + out[i]) % p;
            }
            next[i] = (next[i] + p - out[i] * (k as u64 % p) % p) % p;
        }
        next[0] = (next[0] + dd[k]) % p;
        out = next;
    }
    out
}

/// Sylvester determinant of polynomials in `y` given by their coefficient
/// lists (lowest degree first), with formal degrees `len - 1`.
fn sylvester_det_mod(a: &[u64], b: &[u64], p: u64) -> u64 {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    if size == 0 {
        return 1;
    }
    let mut mat = vec![vec![0u64; size]; size];
    for r in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            mat[r][r + k] = *c;
        }
    }
    for r in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            mat[n + r][r + k] = *c;
        }
    }
    det_mod(mat, p)
}

fn norm1_bits(v: &[BigInt]) -> f64 {
    let s: BigInt = v.iter().map(|c| c.abs()).sum();
    if s.is_zero() {
        0.0
    } else {
        s.bits() as f64
    }
}

/// `Res_y(f, g)` for `f, g` in `Z[x][y]` with formal `y`-degrees
/// `f.len() - 1` and `g.len() - 1`; `f[b]` lists the coefficients in `x` of
/// `y^b`. `x_degree` bounds the degree of the result in `x`.
pub fn resultant_y(f: &[Vec<BigInt>], g: &[Vec<BigInt>], x_degree: usize) -> Vec<BigInt> {
    let m = f.len() - 1;
    let n = g.len() - 1;
    // ||det||_1 is at most the product over the Sylvester rows of the sum
    // of the 1-norms of their entries
    let row_f: f64 = f.iter().map(|c| norm1_bits(c)).fold(0.0, f64::max) + (f.len() as f64).log2();
    let row_g: f64 = g.iter().map(|c| norm1_bits(c)).fold(0.0, f64::max) + (g.len() as f64).log2();
    let bits = n as f64 * row_f.max(0.0) + m as f64 * row_g.max(0.0) + 2.0;
    let count = (bits / 30.0).ceil() as usize + 1;
    let ps = primes(count);
    let residues: Vec<Vec<u64>> = ps
        .par_iter()
        .map(|&p| {
            let fr: Vec<Vec<u64>> = f
                .iter()
                .map(|c| c.iter().map(|v| reduce(v, p)).collect())
                .collect();
            let gr: Vec<Vec<u64>> = g
                .iter()
                .map(|c| c.iter().map(|v| reduce(v, p)).collect())
                .collect();
            let values: Vec<u64> = (0..=x_degree as u64)
                .map(|t| {
                    let a: Vec<u64> = fr.iter().map(|c| eval_mod(c, t, p)).collect();
                    let b: Vec<u64> = gr.iter().map(|c| eval_mod(c, t, p)).collect();
                    sylvester_det_mod(&a, &b, p)
                })
                .collect();
            interpolate_mod(&values, p)
        })
        .collect();
    (0..=x_degree)
        .map(|k| {
            let r: Vec<u64> = residues.iter().map(|v| v[k]).collect();
            crt_symmetric(&r, &ps)
        })
        .collect()
}

/// The integer of least absolute value with the given residues.
pub fn crt_symmetric(residues: &[u64], moduli: &[u64]) -> BigInt {
    let mut x = BigInt::zero();
    let mut m = BigInt::from(1);
    for (&r, &p) in residues.iter().zip(moduli) {
        let xr = reduce(&x, p);
        let mr = reduce(&m, p);
        let t = (r + p - xr) % p * inv_mod(mr, p) % p;
        x += &m * t;
        m *= p;
    }
    if &x * 2 > m {
        x -= m;
    }
    x
}

/// Degree of `gcd(a, b)` over `F_p` (coefficients lowest first, already
/// reduced); `None` when both are zero.
pub fn gcd_degree_mod(a: &[u64], b: &[u64], p: u64) -> Option<usize> {
    let mut x = trimmed(a.to_vec());
    let mut y = trimmed(b.to_vec());
    while !y.is_empty() {
        let r = rem_mod(&x, &y, p);
        x = y;
        y = r;
    }
    (!x.is_empty()).then(|| x.len() - 1)
}

/// Monic gcd over `F_p`.
pub fn gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = trimmed(a.to_vec());
    let mut y = trimmed(b.to_vec());
    while !y.is_empty() {
        let r = rem_mod(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&l) = x.last() {
        let inv = inv_mod(l, p);
        for c in &mut x {
            *c = *c * inv % p;
        }
    }
    x
}

/// Exact quotient `a / b` over `Z` when `b` divides `a` (coefficients
/// lowest first, `b` nonzero).
pub fn exact_div_int(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let b = trimmed_int(b.to_vec());
    let mut r = trimmed_int(a.to_vec());
    let lb = b.last()?.clone();
    if r.len() < b.len() {
        return r.is_empty().then(Vec::new);
    }
    let mut q = vec![BigInt::zero(); r.len() + 1 - b.len()];
    while r.len() >= b.len() {
        let (c, rem) = r.last().unwrap().div_rem(&lb);
        if !rem.is_zero() {
            return None;
        }
        let k = r.len() - b.len();
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
        r.pop();
        r = trimmed_int(r);
    }
    r.is_empty().then_some(q)
}

fn trimmed_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn primitive_int(v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return v;
    }
    if v.last().is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    v.into_iter().map(|c| c / &g).collect()
}

/// Primitive gcd over `Z` of two nonzero integer polynomials, from gcds
/// modulo primes lifted by Chinese remaindering and confirmed by exact
/// division.
pub fn gcd_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let a = trimmed_int(a.to_vec());
    let b = trimmed_int(b.to_vec());
    assert!(!a.is_empty() && !b.is_empty(), "gcd of the zero polynomial");
    let gamma = a.last().unwrap().gcd(b.last().unwrap());
    let mut moduli: Vec<u64> = Vec::new();
    let mut images: Vec<Vec<u64>> = Vec::new();
    let mut degree = usize::MAX;
    let mut target = 2;
    let mut candidates = prime_iter();
    loop {
        while moduli.len() < target {
            let p = candidates.next().expect("primes below 2^31");
            let (ar, br): (Vec<u64>, Vec<u64>) = (
                a.iter().map(|c| reduce(c, p)).collect(),
                b.iter().map(|c| reduce(c, p)).collect(),
            );
            if ar.last() == Some(&0) || br.last() == Some(&0) {
                continue;
            }
            let g = gcd_mod(&ar, &br, p);
            let k = g.len() - 1;
            if k > degree {
                continue;
            }
            if k < degree {
                degree = k;
                moduli.clear();
                images.clear();
            }
            let gm = reduce(&gamma, p);
            moduli.push(p);
            images.push(g.into_iter().map(|c| c * gm % p).collect());
        }
        if degree == 0 {
            return vec![BigInt::from(1)];
        }
        let lifted: Vec<BigInt> = (0..=degree)
            .map(|k| {
                let r: Vec<u64> = images.iter().map(|v| v[k]).collect();
                crt_symmetric(&r, &moduli)
            })
            .collect();
        let h = primitive_int(lifted);
        if exact_div_int(&a, &h).is_some() && exact_div_int(&b, &h).is_some() {
            return h;
        }
        target *= 2;
    }
}

fn trimmed(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn rem_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = inv_mod(*b.last().unwrap(), p);
    while r.len() > db {
        let f = r.last().unwrap() * inv % p;
        let k = r.len() - 1 - db;
        for (j, &c) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p - f * c % p) % p;
        }
        r.pop();
        r = trimmed(r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn small_primes_and_determinants() {
        let ps = primes(3);
        assert_eq!(ps[0], 2147483647);
        assert!(ps.iter().all(|&p| is_prime(p)));
        let p = ps[0];
        assert_eq!(det_mod(vec![vec![2, 1], vec![1, 3]], p), 5);
        assert_eq!(det_mod(vec![vec![0, 1], vec![1, 0]], p), p - 1);
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let p = primes(1)[0];
        let coeffs = [5u64, 0, 7, 1];
        let vals: Vec<u64> = (0..6).map(|t| eval_mod(&coeffs, t, p)).collect();
        let c = interpolate_mod(&vals, p);
        assert_eq!(&c[..4], &coeffs);
        assert!(c[4..].iter().all(|&x| x == 0));
    }

    #[test]
    fn crt_handles_signs() {
        let ps = primes(4);
        for v in [-123456789012345678i64, 0, 42, -1] {
            let b = BigInt::from(v);
            let r: Vec<u64> = ps.iter().map(|&p| reduce(&b, p)).collect();
            assert_eq!(crt_symmetric(&r, &ps), b);
        }
    }

    #[test]
    fn resultant_of_the_cuspidal_cubic() {
        // f = y^2 - x^3, f_y = 2y: Res_y = 4 * (-x^3) up to the sign convention
        let f = vec![ints(&[0, 0, 0, -1]), ints(&[0]), ints(&[1])];
        let g = vec![ints(&[0]), ints(&[2])];
        let r = resultant_y(&f, &g, 6);
        // Res(y^2 + c, 2y) = 4c
        assert_eq!(r, ints(&[0, 0, 0, -4, 0, 0, 0]));
        // a circle and a line y = x: Res_y(x^2 + y^2 - 1, y - x) = 2x^2 - 1
        let f = vec![ints(&[-1, 0, 1]), ints(&[0]), ints(&[1])];
        let g = vec![ints(&[0, -1]), ints(&[1])];
        let r = resultant_y(&f, &g, 2);
        assert_eq!(r, ints(&[-1, 0, 2]));
        let _ = gcd_degree_mod(&[1, 1], &[1], 7);
        // (x - 1)(2x + 3) and (x - 1)(x + 5) have gcd x - 1
        let g = gcd_int(&ints(&[-3, 1, 2]), &ints(&[-5, 4, 1]));
        assert_eq!(g, ints(&[-1, 1]));
        assert_eq!(exact_div_int(&ints(&[-3, 1, 2]), &g), Some(ints(&[3, 2])));
        assert_eq!(exact_div_int(&ints(&[1, 0, 1]), &g), None);
        let big = BigInt::from(10).pow(60);
        let a = vec![-&big * 3, big.clone() * 0 + BigInt::from(1), big.clone()];
        let b: Vec<BigInt> = vec![BigInt::from(7), BigInt::from(1)];
        let prod_a: Vec<BigInt> = mul_int(&a, &[BigInt::from(-2), BigInt::from(9)]);
        let prod_b: Vec<BigInt> = mul_int(&b, &[BigInt::from(-2), BigInt::from(9)]);
        assert_eq!(gcd_int(&prod_a, &prod_b), ints(&[-2, 9]));
        assert_eq!(gcd_mod(&[6, 5, 1], &[2, 1], 7), vec![2, 1]);
    }
}
