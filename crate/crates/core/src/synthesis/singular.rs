//! Singular points of a plane curve, by elimination.
//!
//! After a shear `x -> x + c y` that makes the curve monic in `y`, the
//! x-coordinates of singular points are roots of
//! `gcd(Res_y(C, C_y), Res_y(C, C_x))`. Factors of that eliminant are
//! examined by gcd computations in `(Q[x]/h)[y]`, splitting `h` whenever a
//! leading coefficient turns out to be a zero divisor. Points at infinity
//! are found with univariate gcds on the two top homogeneous parts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{common_denominator, format_q, q_int, Q};

use crate::error::{Error, Result};
use crate::modp;
use crate::poly::Poly2;
use crate::upoly::UPoly;

/// Bound on the extreme coefficients for the rational root test.
const ROOT_TEST_LIMIT: u64 = 1 << 40;

const SHEARS: [i64; 12] = [0, 1, -1, 2, -2, 3, -3, 5, -5, 7, 11, -13];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularPoint {
    pub x: String,
    pub y: String,
    pub multiplicity: usize,
    #[serde(skip)]
    pub coords: (Q, Q),
}

/// Singular points over the roots of `factor` (in sheared coordinates),
/// counted but not located.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnlocatedSingularities {
    pub factor: String,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularLocus {
    pub affine: Vec<SingularPoint>,
    pub unlocated: Vec<UnlocatedSingularities>,
    /// Number of singular points on the line at infinity.
    pub at_infinity: usize,
    /// Shear used for the affine elimination.
    pub shear: String,
}

impl SingularLocus {
    pub fn total(&self) -> usize {
        self.affine.len() + self.unlocated.iter().map(|u| u.count).sum::<usize>() + self.at_infinity
    }

    /// Exactly the given affine points are singular, and nothing else.
    pub fn equals_points(&self, points: &[(Q, Q)]) -> bool {
        self.unlocated.is_empty()
            && self.at_infinity == 0
            && self.affine.len() == points.len()
            && points
                .iter()
                .all(|p| self.affine.iter().any(|s| &s.coords == p))
    }
}

/// Coefficients of the powers of `y`, each a polynomial in `x`.
fn y_coeffs(p: &Poly2<Q>) -> Vec<UPoly> {
    p.by_y_powers().into_iter().map(UPoly::new).collect()
}

#[cfg(test)]
fn eval_y(coeffs: &[UPoly], x: &Q) -> Vec<Q> {
    coeffs.iter().map(|c| c.eval(x)).collect()
}

/// Polynomial in `y` over `Q[x]/(h)`, coefficients reduced, no zero top.
type YPoly = Vec<UPoly>;

fn reduce(p: &[UPoly], h: &UPoly) -> YPoly {
    let mut v: YPoly = p.iter().map(|c| c.rem(h)).collect();
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn mulmod(a: &UPoly, b: &UPoly, h: &UPoly) -> UPoly {
    a.mul(b).rem(h)
}

/// `a mod b` where the leading coefficient of `b` has inverse `inv`.
fn yrem(a: &YPoly, b: &YPoly, inv: &UPoly, h: &UPoly) -> YPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let f = mulmod(r.last().unwrap(), inv, h);
        for (j, bc) in b.iter().enumerate() {
            r[k + j] = r[k + j].sub(&mulmod(&f, bc, h)).rem(h);
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// Monic gcd of `a` and `b` over each component of `Q[x]/(h)`.
fn dyn_gcd(h: UPoly, a: YPoly, b: YPoly) -> Vec<(UPoly, YPoly)> {
    let a = reduce(&a, &h);
    let b = reduce(&b, &h);
    if b.is_empty() {
        return dyn_monic(h, a);
    }
    let lead = b.last().unwrap();
    let g = lead.gcd(&h);
    if g.degree() == Some(0) {
        let inv = lead.inverse_mod(&h).expect("unit");
        let r = yrem(&a, &b, &inv, &h);
        return dyn_gcd(h, b, r);
    }
    let (other, _) = h.div_rem(&g);
    let mut out = dyn_gcd(g, a.clone(), b.clone());
    out.extend(dyn_gcd(other.monic(), a, b));
    out
}

fn dyn_monic(h: UPoly, a: YPoly) -> Vec<(UPoly, YPoly)> {
    let Some(lead) = a.last() else {
        return vec![(h, a)];
    };
    let g = lead.gcd(&h);
    if g.degree() == Some(0) {
        let inv = lead.inverse_mod(&h).expect("unit");
        let v = a.iter().map(|c| mulmod(c, &inv, &h)).collect();
        return vec![(h, v)];
    }
    let (other, _) = h.div_rem(&g);
    let mut out = dyn_monic(g, a.clone());
    out.extend(dyn_monic(other.monic(), a));
    out
}

/// Integer coefficients in `x` of each power of `y`, with `y`-degree
/// padded to `len - 1`.
fn int_y_coeffs(p: &Poly2<Q>, len: usize) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = p
        .by_y_powers()
        .into_iter()
        .map(|c| c.into_iter().map(|q| q.to_integer()).collect())
        .collect();
    out.resize(len, vec![BigInt::zero()]);
    out
}

/// `p` scaled to integer coefficients.
fn integral(p: &Poly2<Q>) -> Poly2<Q> {
    let den = common_denominator(p.terms().map(|(_, _, c)| c));
    p.scale(&Q::from_integer(den))
}

fn trim_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Divides by `b x - a` if it is a factor (integer synthetic division).
fn divide_linear(p: &[BigInt], a: &BigInt, b: &BigInt) -> Option<Vec<BigInt>> {
    let n = p.len().checked_sub(1)?;
    if n == 0 {
        return None;
    }
    let mut q = vec![BigInt::zero(); n];
    let mut carry = BigInt::zero(); // q_k
    for k in (1..=n).rev() {
        let num = &p[k] + a * &carry;
        let (qk, r) = num.div_rem(b);
        if !r.is_zero() {
            return None;
        }
        q[k - 1] = qk.clone();
        carry = qk;
    }
    (&p[0] + a * &carry).is_zero().then_some(q)
}

/// Removes every factor `b x - a` from `p`.
fn strip_root(p: Vec<BigInt>, r: &Q) -> Vec<BigInt> {
    let (a, b) = (r.numer(), r.denom());
    let mut p = trim_int(p);
    while let Some(q) = divide_linear(&p, a, b) {
        p = q;
    }
    p
}

fn reduce_poly(p: &[BigInt], prime: u64) -> Vec<u64> {
    p.iter().map(|c| modp::reduce(c, prime)).collect()
}

/// Certificate that two integer polynomials are coprime: their leading
/// coefficients survive modulo a prime and the reductions are coprime, so
/// their resultant is a nonzero integer.
fn coprime_by_reduction(a: &[BigInt], b: &[BigInt]) -> bool {
    for prime in modp::primes(4) {
        let (ar, br) = (reduce_poly(a, prime), reduce_poly(b, prime));
        if ar.last() == Some(&0) || br.last() == Some(&0) {
            continue;
        }
        if modp::gcd_degree_mod(&ar, &br, prime) == Some(0) {
            return true;
        }
    }
    false
}

/// Degree over `F_p` of the gcd of the given polynomials in `y` after
/// substituting `x = r`, for a prime keeping `lead` and the denominator
/// of `r`; an upper bound for the degree over `Q`.
fn line_gcd_degree(polys: &[&[Vec<BigInt>]], r: &Q, lead: &BigInt) -> Option<usize> {
    for prime in modp::primes(4) {
        let Some(x) = modp::reduce_frac(r.numer(), r.denom(), prime) else {
            continue;
        };
        if modp::reduce(lead, prime) == 0 {
            continue;
        }
        let mut g: Vec<u64> = Vec::new();
        for p in polys {
            let v: Vec<u64> = p
                .iter()
                .map(|c| {
                    reduce_poly(c, prime)
                        .iter()
                        .rev()
                        .fold(0, |acc, &k| (acc * x + k) % prime)
                })
                .collect();
            g = modp::gcd_mod(&g, &v, prime);
        }
        return Some(g.len().saturating_sub(1));
    }
    None
}

/// Outcome of the fast path for one shear.
enum Fast {
    /// The singular points, in sheared coordinates.
    Located(Vec<(Q, Q)>),
    /// Two singular points share a sheared x-coordinate.
    Collision,
    Inconclusive,
}

/// Singular points when every singular x-coordinate is the sheared
/// x-coordinate of a hint: the resultants with those roots removed are
/// certified coprime, and each vertical line through a hint carries at
/// most one singular point, which is the hint itself.
fn fast_affine(
    f: &[Vec<BigInt>],
    fy: &[Vec<BigInt>],
    fx: &[Vec<BigInt>],
    disc: &[BigInt],
    r2: &[BigInt],
    hints: &[(Q, Q)],
    original: &Poly2<Q>,
    shear: &Q,
) -> Fast {
    let r2t = trim_int(r2.to_vec());
    if r2t.is_empty() {
        return Fast::Inconclusive;
    }
    let mut xs: Vec<Q> = hints.iter().map(|(x0, y0)| x0 - shear * y0).collect();
    xs.sort();
    xs.dedup();
    let mut d1 = trim_int(disc.to_vec());
    let mut d2 = r2t;
    for x in &xs {
        d1 = strip_root(d1, x);
        d2 = strip_root(d2, x);
    }
    let trivial = d1.len() <= 1 || d2.len() <= 1;
    if !trivial && !coprime_by_reduction(&d1, &d2) {
        return Fast::Inconclusive;
    }
    let lead = f
        .last()
        .and_then(|c| c.first())
        .cloned()
        .unwrap_or_default();
    let (cx, cy) = (original.deriv_x(), original.deriv_y());
    let mut out = Vec::new();
    for x in &xs {
        let on_line: Vec<&(Q, Q)> = hints
            .iter()
            .filter(|(x0, y0)| &(x0 - shear * y0) == x)
            .collect();
        let singular: Vec<&&(Q, Q)> = on_line
            .iter()
            .filter(|(x0, y0)| {
                original.eval(x0, y0).is_zero()
                    && cx.eval(x0, y0).is_zero()
                    && cy.eval(x0, y0).is_zero()
            })
            .collect();
        let Some(k) = line_gcd_degree(&[f, fy, fx], x, &lead) else {
            return Fast::Inconclusive;
        };
        match (k, singular.len()) {
            (0, _) => {}
            (1, 1) => out.push((x.clone(), singular[0].1.clone())),
            (1, 0) => return Fast::Inconclusive,
            _ => return Fast::Collision,
        }
    }
    Fast::Located(out)
}

fn as_upoly(v: &[BigInt]) -> UPoly {
    UPoly::new(v.iter().map(|c| Q::from_integer(c.clone())).collect())
}

fn located_point(c: &Poly2<Q>, x: Q, y: Q) -> SingularPoint {
    let m = c.translate(&x, &y, None).order().unwrap_or(0);
    SingularPoint {
        x: format_q(&x),
        y: format_q(&y),
        multiplicity: m,
        coords: (x, y),
    }
}

/// Points at infinity where the projective closure is singular.
fn singular_at_infinity(c: &Poly2<Q>, d: usize) -> usize {
    let top = c.form(d); // top[b] = coeff of x^{d-b} y^b
    let next = if d >= 1 { c.form(d - 1) } else { Vec::new() };
    // chart Y = 1: t(x) = C_d(x, 1)
    let t = UPoly::new((0..=d).map(|k| top[d - k].clone()).collect());
    let u = UPoly::new((0..d).map(|k| next[d - 1 - k].clone()).collect());
    let g = t.gcd(&t.deriv()).gcd(&u);
    let mut count = if t.is_zero() {
        // the whole line at infinity is a component: not reduced-affine
        usize::MAX
    } else {
        g.squarefree_part().degree().unwrap_or(0)
    };
    // the point (1:0:0)
    let c0 = top[0].clone();
    let c1 = if d >= 1 { top[1].clone() } else { Q::zero() };
    let n0 = next.first().cloned().unwrap_or_else(Q::zero);
    if c0.is_zero() && c1.is_zero() && n0.is_zero() && count != usize::MAX {
        count += 1;
    }
    count
}

/// Singular points of the curve `C = 0`. `hints` are points expected to be
/// singular; they are split off the eliminant first so that they are
/// located even when the rest of the eliminant is large.
pub fn singular_locus(c: &Poly2<Q>, hints: &[(Q, Q)]) -> Result<SingularLocus> {
    let Some(d) = c.degree() else {
        return Err(Error::Precondition(
            "the zero polynomial is not a curve".into(),
        ));
    };
    if d <= 1 {
        return Ok(SingularLocus {
            affine: Vec::new(),
            unlocated: Vec::new(),
            at_infinity: 0,
            shear: "0".into(),
        });
    }
    let at_infinity = singular_at_infinity(c, d);
    if at_infinity == usize::MAX {
        return Err(Error::Precondition(
            "the line at infinity is a component".into(),
        ));
    }
    let cint = integral(c);
    for &sh in &SHEARS {
        let cq = q_int(sh);
        let cs = cint.shear_x(&cq);
        let lead = cs.get(0, d);
        if lead.is_zero() {
            continue;
        }
        let f = int_y_coeffs(&cs, d + 1);
        let fy = int_y_coeffs(&cs.deriv_y(), d);
        let fx = int_y_coeffs(&cs.deriv_x(), d);
        let disc = modp::resultant_y(&f, &fy, d * (d - 1));
        if disc.iter().all(|c| c.is_zero()) {
            return Err(Error::Precondition("the curve is not reduced".into()));
        }
        let r2 = modp::resultant_y(&f, &fx, d * (d - 1));
        match fast_affine(&f, &fy, &fx, &disc, &r2, hints, c, &cq) {
            Fast::Collision => continue,
            Fast::Located(pts) => {
                let mut affine: Vec<SingularPoint> = pts
                    .into_iter()
                    .map(|(xs, y)| located_point(c, &xs + &cq * &y, y))
                    .collect();
                affine.sort_by(|p, q| p.coords.cmp(&q.coords));
                return Ok(SingularLocus {
                    affine,
                    unlocated: Vec::new(),
                    at_infinity,
                    shear: sh.to_string(),
                });
            }
            Fast::Inconclusive => {}
        }
        let a = cs.scale(&lead.recip());
        let ac = y_coeffs(&a);
        let ay = y_coeffs(&a.deriv_y());
        let ax = y_coeffs(&a.deriv_x());
        let r2t = trim_int(r2);
        let mut elim = if r2t.is_empty() {
            as_upoly(&disc).squarefree_part()
        } else {
            as_upoly(&modp::gcd_int(&disc, &r2t)).squarefree_part()
        };
        let mut pieces: Vec<UPoly> = Vec::new();
        for (x0, y0) in hints {
            let xs = x0 - &cq * y0;
            if elim.degree().unwrap_or(0) >= 1 && elim.eval(&xs).is_zero() {
                let lin = UPoly::linear_root(&xs);
                elim = elim.div_rem(&lin).0;
                pieces.push(lin);
            }
        }
        if elim.degree().unwrap_or(0) >= 1 {
            if let Some(roots) = elim.rational_roots(ROOT_TEST_LIMIT) {
                for r in roots {
                    let lin = UPoly::linear_root(&r);
                    elim = elim.div_rem(&lin).0;
                    pieces.push(lin);
                }
            }
        }
        if elim.degree().unwrap_or(0) >= 1 {
            pieces.push(elim.monic());
        }
        let mut affine = Vec::new();
        let mut unlocated = Vec::new();
        let mut collision = false;
        'pieces: for h in pieces {
            for (hk, g) in dyn_gcd(h.clone(), ac.clone(), ay.clone()) {
                for (hj, g2) in dyn_gcd(hk, g, ax.clone()) {
                    let k = g2.len().saturating_sub(1);
                    if k == 0 {
                        continue;
                    }
                    if k >= 2 {
                        collision = true;
                        break 'pieces;
                    }
                    if hj.degree() == Some(1) {
                        let xs = -hj.coeff(0) / hj.lead();
                        let y = -g2[0].eval(&xs);
                        affine.push(located_point(c, &xs + &cq * &y, y));
                    } else {
                        unlocated.push(UnlocatedSingularities {
                            factor: hj.to_string(),
                            count: hj.degree().unwrap_or(0),
                        });
                    }
                }
            }
        }
        if collision {
            continue;
        }
        affine.sort_by(|p, q| p.coords.cmp(&q.coords));
        return Ok(SingularLocus {
            affine,
            unlocated,
            at_infinity,
            shear: sh.to_string(),
        });
    }
    Err(Error::Internal(
        "no shear separates the singular points".into(),
    ))
}

/// Whether `C` is squarefree, via its discriminant after a shear.
pub fn is_squarefree(c: &Poly2<Q>) -> bool {
    let Some(d) = c.degree() else { return false };
    if d <= 1 {
        return true;
    }
    let cint = integral(c);
    for sh in SHEARS {
        let cs = cint.shear_x(&q_int(sh));
        if cs.get(0, d).is_zero() {
            continue;
        }
        let disc = modp::resultant_y(
            &int_y_coeffs(&cs, d + 1),
            &int_y_coeffs(&cs.deriv_y(), d),
            d * (d - 1),
        );
        return disc.iter().any(|c| !c.is_zero());
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(usize, usize, i64)]) -> Poly2<Q> {
        Poly2::from_terms(terms.iter().map(|&(a, b, c)| (a, b, q_int(c))))
    }

    #[test]
    fn cuspidal_cubic() {
        let c = poly(&[(0, 2, 1), (3, 0, -1)]);
        let s = singular_locus(&c, &[]).unwrap();
        assert_eq!(s.affine.len(), 1);
        assert_eq!(s.affine[0].coords, (q_int(0), q_int(0)));
        assert_eq!(s.affine[0].multiplicity, 2);
        assert_eq!(s.at_infinity, 0);
        assert!(s.equals_points(&[(q_int(0), q_int(0))]));
    }

    #[test]
    fn smooth_conic_and_tacnode() {
        let c = poly(&[(2, 0, 1), (0, 2, 1), (0, 0, -1)]);
        assert_eq!(singular_locus(&c, &[]).unwrap().total(), 0);
        // the affine tacnode; its closure is also singular at (0 : 1 : 0)
        let t = poly(&[(0, 2, 1), (4, 0, -1)]);
        let s = singular_locus(&t, &[]).unwrap();
        assert_eq!(s.affine.len(), 1);
        assert_eq!(s.affine[0].coords, (q_int(0), q_int(0)));
        assert!(s.unlocated.is_empty());
        assert_eq!(s.at_infinity, 1);
    }

    #[test]
    fn irrational_nodes_are_counted() {
        // two lines through (sqrt 2, 0) and (-sqrt 2, 0) style: (x^2 - 2)(y - x) ... use
        // the product of the conic x^2 + y^2 - 3 and the line y = 1, meeting at (+-sqrt2, 1)
        let conic = poly(&[(2, 0, 1), (0, 2, 1), (0, 0, -3)]);
        let line = poly(&[(0, 1, 1), (0, 0, -1)]);
        let s = singular_locus(&conic.mul(&line), &[]).unwrap();
        assert!(s.affine.is_empty());
        assert_eq!(s.unlocated.iter().map(|u| u.count).sum::<usize>(), 2);
    }

    #[test]
    fn singular_point_at_infinity() {
        // x y = 1 meets the line at infinity at two smooth points
        let c = poly(&[(1, 1, 1), (0, 0, -1)]);
        assert_eq!(singular_locus(&c, &[]).unwrap().total(), 0);
        // two parallel lines meet at infinity
        let c = poly(&[(0, 2, 1), (0, 0, -1)]);
        assert_eq!(singular_locus(&c, &[]).unwrap().at_infinity, 1);
        // y = x^4 is singular at (0 : 1 : 0), x = y^4 at (1 : 0 : 0)
        let c = poly(&[(0, 1, 1), (4, 0, -1)]);
        let s = singular_locus(&c, &[]).unwrap();
        assert_eq!((s.at_infinity, s.affine.len()), (1, 0));
        let c = poly(&[(1, 0, 1), (0, 4, -1)]);
        let s = singular_locus(&c, &[]).unwrap();
        assert_eq!((s.at_infinity, s.affine.len()), (1, 0));
        // the cuspidal cubic is smooth at infinity
        let c = poly(&[(0, 2, 1), (3, 0, -1)]);
        assert_eq!(singular_locus(&c, &[]).unwrap().at_infinity, 0);
    }

    use crate::linalg::det_bigint;
    use num_bigint::BigInt;
    use num_traits::One;

    /// Resultant in `y` of univariate polynomials with formal degrees
    /// `a.len() - 1` and `b.len() - 1`.
    fn resultant_q(a: &[Q], b: &[Q]) -> Q {
        let m = a.len() - 1;
        let n = b.len() - 1;
        if m + n == 0 {
            return Q::one();
        }
        let da = common_denominator(a.iter());
        let db = common_denominator(b.iter());
        let ai: Vec<BigInt> = a
            .iter()
            .map(|q| (q * Q::from_integer(da.clone())).to_integer())
            .collect();
        let bi: Vec<BigInt> = b
            .iter()
            .map(|q| (q * Q::from_integer(db.clone())).to_integer())
            .collect();
        let size = m + n;
        let mut mat = vec![vec![BigInt::zero(); size]; size];
        // rows hold coefficients from the top degree down
        for r in 0..n {
            for (k, c) in ai.iter().rev().enumerate() {
                mat[r][r + k] = c.clone();
            }
        }
        for r in 0..m {
            for (k, c) in bi.iter().rev().enumerate() {
                mat[n + r][r + k] = c.clone();
            }
        }
        let det = det_bigint(mat);
        let scale = num_traits::pow(da, n) * num_traits::pow(db, m);
        Q::new(det, scale)
    }
    #[test]
    fn multimodular_resultant_matches_exact_evaluation() {
        let c = poly(&[
            (0, 3, 2),
            (2, 1, -3),
            (1, 0, 5),
            (3, 0, 1),
            (0, 0, -7),
            (1, 1, 4),
        ]);
        let f = int_y_coeffs(&c, 4);
        let fy = int_y_coeffs(&c.deriv_y(), 3);
        let disc = modp::resultant_y(&f, &fy, 6);
        let ac = y_coeffs(&c);
        let mut ay = y_coeffs(&c.deriv_y());
        ay.resize(3, UPoly::zero());
        for x in -3..4 {
            let x = q_int(x);
            let exact = resultant_q(&eval_y(&ac, &x), &eval_y(&ay, &x));
            assert_eq!(as_upoly(&disc).eval(&x), exact);
        }
    }

    #[test]
    fn non_reduced_rejected() {
        let l = poly(&[(0, 1, 1), (1, 0, -1)]);
        assert!(singular_locus(&l.mul(&l), &[]).is_err());
        assert!(!is_squarefree(&l.mul(&l)));
        assert!(is_squarefree(&l));
    }
}
