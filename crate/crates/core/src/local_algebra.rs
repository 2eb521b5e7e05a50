//! The local ring at a point of the plane: ideals of weighted clusters as
//! explicit subspaces of truncated polynomials.
//!
//! A germ goes virtually through `(K, m)` when each successive virtual
//! transform has multiplicity at least `m_i` at `p_i`. Blowing up is done in
//! a normalized frame: at `p_i` (local coordinates `u, v`), the divisor
//! `E_{i-1}` is `{u = 0}`, and when `p_i` is a satellite of `p_t` the divisor
//! `E_t` is `{v = 0}`. The next point is reached by one of two charts:
//!
//! * affine, `(u, v) = (x, x (y + lambda))`, which covers every direction
//!   except the one of `E_{i-1}`; `lambda = 0` is the direction of `E_t`;
//! * corner, `(u, v) = (x y, x)`, the direction of `E_{i-1}`.
//!
//! In both cases the new divisor `E_i` is `{x = 0}` and the frame invariant
//! holds again at the new point. Every step is a linear map on coefficient
//! vectors, so conditions are computed column by column.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{random_q, Fp, Scalar, Q};
use crate::cluster::{Chain, Cluster, Multiplicities, WeightedCluster};
use crate::error::{Error, Result};
use crate::linalg::{rank_fp, rank_q, rref, Rref};
use crate::poly::{binomials, mono_at, mono_count, mono_count_below, mono_index, monomials, Poly2};

/// How the next point is reached from the current frame.
#[derive(Clone, Debug, PartialEq)]
pub enum Chart<F> {
    Affine(F),
    Corner,
}

/// A single-chain weighted cluster placed in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedCluster {
    pub weighted: WeightedCluster,
    pub base: (Q, Q),
    /// `lambdas[i]` is the direction parameter of the free point `p_i`
    /// (`None` for the root and for satellites).
    pub lambdas: Vec<Option<Q>>,
}

impl EmbeddedCluster {
    pub fn new(weighted: WeightedCluster, base: (Q, Q), lambdas: Vec<Option<Q>>) -> Result<Self> {
        let ec = EmbeddedCluster {
            weighted,
            base,
            lambdas,
        };
        ec.check()?;
        Ok(ec)
    }

    /// Free chain along the horizontal direction through `base`.
    pub fn free_chain(mults: &[i64], base: (Q, Q)) -> Self {
        let r = mults.len();
        let lambdas = (0..r).map(|i| (i > 0).then(Q::zero)).collect();
        EmbeddedCluster::new(WeightedCluster::chain(mults, &[]), base, lambdas)
            .expect("a free chain along y = 0 is admissible")
    }

    /// Embeds a single-chain cluster with random admissible directions.
    pub fn random<R: Rng + ?Sized>(
        wc: &WeightedCluster,
        base: (Q, Q),
        rng: &mut R,
        height: u32,
    ) -> Result<Self> {
        let chain = single_chain(&wc.cluster)?;
        let lambdas = (0..chain.len())
            .map(|i| {
                if i == 0 || chain.is_satellite(i) {
                    None
                } else {
                    let forbid_zero = chain.is_satellite(i - 1);
                    loop {
                        let l = random_q(rng, height);
                        if !(forbid_zero && l.is_zero()) {
                            break Some(l);
                        }
                    }
                }
            })
            .collect();
        EmbeddedCluster::new(wc.clone(), base, lambdas)
    }

    fn check(&self) -> Result<()> {
        let chain = single_chain(&self.weighted.cluster)?;
        self.weighted.cluster.ensure_valid()?;
        if self.lambdas.len() != chain.len() {
            return Err(Error::InvalidCluster(format!(
                "{} points but {} direction entries",
                chain.len(),
                self.lambdas.len()
            )));
        }
        if self.lambdas[0].is_some() {
            return Err(Error::InvalidCluster(
                "the root carries no direction".into(),
            ));
        }
        for i in 1..chain.len() {
            match (&self.lambdas[i], chain.is_satellite(i)) {
                (Some(_), true) => {
                    return Err(Error::InvalidCluster(format!(
                        "satellite p{} carries no direction",
                        i + 1
                    )))
                }
                (None, false) => {
                    return Err(Error::InvalidCluster(format!(
                        "free point p{} needs a direction",
                        i + 1
                    )))
                }
                (Some(l), false) if l.is_zero() && chain.is_satellite(i - 1) => {
                    return Err(Error::ForbiddenDirection(format!(
                        "lambda = 0 at p{} is the satellite position of p{}",
                        i + 1,
                        chain.extra_prox(i - 1).unwrap() + 1
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn chain(&self) -> &Chain {
        &self.weighted.cluster.chains()[0]
    }

    pub fn mults(&self) -> &[i64] {
        self.weighted.mults.as_slice()
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Same points, other multiplicities.
    pub fn with_mults(&self, mults: &[i64]) -> Result<Self> {
        let wc = WeightedCluster::new(
            self.weighted.cluster.clone(),
            Multiplicities(mults.to_vec()),
        )?;
        EmbeddedCluster::new(wc, self.base.clone(), self.lambdas.clone())
    }

    /// Appends a free point with direction `lambda`.
    pub fn push_free(&self, lambda: Q, mult: i64) -> Result<Self> {
        let mut chain = self.chain().clone();
        chain.push(None);
        let mut m = self.mults().to_vec();
        m.push(mult);
        let mut lambdas = self.lambdas.clone();
        lambdas.push(Some(lambda));
        let wc = WeightedCluster::new(Cluster::single(chain), Multiplicities(m))?;
        EmbeddedCluster::new(wc, self.base.clone(), lambdas)
    }

    /// Appends a satellite proximate to `p_target` (0-based).
    pub fn push_satellite(&self, target: usize, mult: i64) -> Result<Self> {
        let mut chain = self.chain().clone();
        chain.push(Some(target));
        let mut m = self.mults().to_vec();
        m.push(mult);
        let mut lambdas = self.lambdas.clone();
        lambdas.push(None);
        let wc = WeightedCluster::new(Cluster::single(chain), Multiplicities(m))?;
        EmbeddedCluster::new(wc, self.base.clone(), lambdas)
    }

    /// Keeps the first `r` points.
    pub fn prefix(&self, r: usize) -> Self {
        let mut chain = self.chain().clone();
        chain.truncate(r);
        EmbeddedCluster {
            weighted: WeightedCluster {
                cluster: Cluster::single(chain),
                mults: Multiplicities(self.mults()[..r].to_vec()),
            },
            base: self.base.clone(),
            lambdas: self.lambdas[..r].to_vec(),
        }
    }

    /// The chart leading from `p_{i-1}` to `p_i` (`i >= 1`).
    pub fn chart(&self, i: usize) -> Chart<Q> {
        let chain = self.chain();
        match chain.extra_prox(i) {
            None => Chart::Affine(self.lambdas[i].clone().expect("checked")),
            Some(t) if t + 2 == i => Chart::Corner,
            Some(_) => Chart::Affine(Q::zero()),
        }
    }

    fn charts<F: Scalar>(&self) -> Option<Vec<Chart<F>>> {
        (1..self.len())
            .map(|i| match self.chart(i) {
                Chart::Affine(l) => F::from_rational(&l).map(Chart::Affine),
                Chart::Corner => Some(Chart::Corner),
            })
            .collect()
    }

    /// `max_{j >= i} sum_{l=i..j} m_l` for each `i`: a term of local degree
    /// at least this bound at `p_i` cannot reach any later condition.
    pub fn degree_bounds(&self) -> Vec<usize> {
        let m = self.mults();
        let mut out = vec![0usize; m.len()];
        let mut best: i64 = 0;
        for i in (0..m.len()).rev() {
            // best suffix sum starting at i, at least the empty sum
            best = (m[i] + best).max(0);
            out[i] = best as usize;
        }
        out
    }

    /// Local degree below which the conditions are determined.
    pub fn degree_bound(&self) -> usize {
        self.degree_bounds().first().copied().unwrap_or(0)
    }
}

fn single_chain(c: &Cluster) -> Result<&Chain> {
    if c.chains().len() != 1 {
        return Err(Error::InvalidCluster(format!(
            "expected a single chain, found {}",
            c.chains().len()
        )));
    }
    Ok(&c.chains()[0])
}

/// Transform of `g` through one blowup, dividing by `x^m`; terms that would
/// need a negative power of `x` are dropped and only degrees below
/// `keep_below` are kept.
pub fn blowup_transform<F: Scalar>(
    g: &Poly2<F>,
    m: i64,
    chart: &Chart<F>,
    keep_below: usize,
    bin: &[Vec<F>],
    lambda_pows: &[F],
) -> Poly2<F> {
    if keep_below == 0 || g.is_zero() {
        return Poly2::zero();
    }
    let mut v = vec![F::zero(); mono_count(keep_below - 1)];
    for (a, b, c) in g.terms() {
        let e = (a + b) as i64 - m;
        if e < 0 {
            continue;
        }
        let e = e as usize;
        match chart {
            Chart::Corner => {
                if e + a < keep_below {
                    let idx = mono_index(e, a);
                    v[idx] = v[idx].clone() + c.clone();
                }
            }
            Chart::Affine(lambda) => {
                if lambda.is_zero() {
                    if e + b < keep_below {
                        let idx = mono_index(e, b);
                        v[idx] = v[idx].clone() + c.clone();
                    }
                    continue;
                }
                for j in 0..=b {
                    if e + j >= keep_below {
                        break;
                    }
                    let idx = mono_index(e, j);
                    v[idx] =
                        v[idx].clone() + c.clone() * bin[b][j].clone() * lambda_pows[b - j].clone();
                }
            }
        }
    }
    Poly2::from_dense(v)
}

/// Pushes the germs `columns` (local equations at `p_1`) through the cluster
/// and collects the condition rows. Row `k` lists, for each column, the
/// coefficient recorded in `labels[k] = (point, (a, b))`.
pub fn push_conditions<F: Scalar>(
    ec: &EmbeddedCluster,
    columns: Vec<Poly2<F>>,
) -> Option<(Vec<Vec<F>>, Vec<(usize, (usize, usize))>)> {
    let charts = ec.charts::<F>()?;
    let m = ec.mults();
    let bounds = ec.degree_bounds();
    let top = bounds.iter().copied().max().unwrap_or(0);
    let bin = binomials::<F>(top.max(1));
    let mut cols: Vec<Poly2<F>> = columns
        .into_par_iter()
        .map(|c| truncate(&c, bounds.first().copied().unwrap_or(0)))
        .collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..m.len() {
        if m[i] > 0 {
            let k = mono_count_below(m[i] as usize);
            for (idx, ab) in monomials().take(k).enumerate() {
                rows.push(
                    cols.iter()
                        .map(|c| c.dense().get(idx).cloned().unwrap_or_else(F::zero))
                        .collect(),
                );
                labels.push((i, ab));
            }
        }
        if i + 1 == m.len() {
            break;
        }
        let chart = &charts[i];
        let keep = bounds[i + 1];
        let pows: Vec<F> = match chart {
            Chart::Affine(l) => (0..=top).map(|k| l.pow(k as u32)).collect(),
            Chart::Corner => Vec::new(),
        };
        cols = cols
            .par_iter()
            .map(|c| blowup_transform(c, m[i], chart, keep, &bin, &pows))
            .collect();
    }
    Some((rows, labels))
}

fn truncate<F: Scalar>(p: &Poly2<F>, below: usize) -> Poly2<F> {
    if below == 0 {
        return Poly2::zero();
    }
    let n = mono_count(below - 1).min(p.dense().len());
    Poly2::from_dense(p.dense()[..n].to_vec())
}

/// The condition rows of a cluster on germs of degree `<= d_loc`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalConditionSystem {
    pub d_loc: usize,
    #[serde(skip)]
    pub rows: Vec<Vec<Q>>,
    /// `(point, (a, b))`: the coefficient of `x^a y^b` in the virtual
    /// transform at that point.
    pub labels: Vec<(usize, (usize, usize))>,
}

impl LocalConditionSystem {
    pub fn cols(&self) -> usize {
        mono_count(self.d_loc)
    }

    pub fn rank(&self) -> usize {
        rank_q(&self.rows, self.cols())
    }
}

fn local_columns<F: Scalar>(d: usize) -> Vec<Poly2<F>> {
    (0..mono_count(d))
        .map(|i| {
            let (a, b) = mono_at(i);
            Poly2::monomial(a, b, F::one())
        })
        .collect()
}

fn check_truncation(ec: &EmbeddedCluster, d: usize) -> Result<()> {
    let need = ec.degree_bound();
    if d + 1 < need {
        return Err(Error::Truncation(format!(
            "degree {d} is below the bound {} needed by {}",
            need.saturating_sub(1),
            ec.weighted.mults
        )));
    }
    Ok(())
}

pub fn local_conditions(ec: &EmbeddedCluster, d_loc: usize) -> Result<LocalConditionSystem> {
    check_truncation(ec, d_loc)?;
    let (rows, labels) = push_conditions(ec, local_columns::<Q>(d_loc)).expect("rational charts");
    Ok(LocalConditionSystem {
        d_loc,
        rows,
        labels,
    })
}

/// `dim O / H_{K,m}`.
pub fn colength(ec: &EmbeddedCluster) -> usize {
    let d = ec.degree_bound();
    if d == 0 {
        return 0;
    }
    let cols = mono_count(d - 1);
    if let Some((rows, _)) = push_conditions(ec, local_columns::<Fp>(d - 1)) {
        let r = rank_fp(&rows, cols);
        if r == rows.len().min(cols) {
            return r;
        }
    }
    let (rows, _) = push_conditions(ec, local_columns::<Q>(d - 1)).expect("rational charts");
    rank_q(&rows, cols)
}

/// An ideal of the local ring, cut down to polynomials of degree `<= trunc`
/// and stored through its annihilator.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealSubspace {
    pub trunc: usize,
    pub annihilator: Rref<Q>,
}

impl IdealSubspace {
    /// Subspace cut out by the given functionals.
    pub fn from_conditions(rows: &[Vec<Q>], trunc: usize) -> Self {
        IdealSubspace {
            trunc,
            annihilator: rref(rows, mono_count(trunc)),
        }
    }

    /// Subspace spanned by the given coefficient vectors.
    pub fn from_span(vectors: &[Vec<Q>], trunc: usize) -> Self {
        let n = mono_count(trunc);
        let ann = rref(vectors, n).nullspace();
        IdealSubspace::from_conditions(&ann, trunc)
    }

    pub fn ambient_dim(&self) -> usize {
        mono_count(self.trunc)
    }

    pub fn codim(&self) -> usize {
        self.annihilator.rank()
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim() - self.codim()
    }

    /// Basis of the subspace (as coefficient vectors in graded order).
    pub fn basis(&self) -> Vec<Vec<Q>> {
        self.annihilator.nullspace()
    }

    pub fn contains(&self, f: &Poly2<Q>) -> Result<bool> {
        if f.degree().unwrap_or(0) > self.trunc {
            return Err(Error::Truncation(format!(
                "degree {} exceeds the truncation {}",
                f.degree().unwrap_or(0),
                self.trunc
            )));
        }
        let v = f.dense_to(self.trunc);
        Ok(self.annihilator.rows.iter().all(|row| {
            row.iter()
                .zip(&v)
                .fold(Q::zero(), |acc, (a, b)| acc + a * b)
                .is_zero()
        }))
    }

    /// Whether `self` is contained in `other` (same truncation).
    pub fn is_subspace_of(&self, other: &IdealSubspace) -> bool {
        self.trunc == other.trunc
            && other
                .annihilator
                .rows
                .iter()
                .all(|row| self.annihilator.contains(row))
    }

    /// Sum with the span of extra vectors.
    pub fn plus_span(&self, vectors: &[Vec<Q>]) -> IdealSubspace {
        let mut span = self.basis();
        span.extend(vectors.iter().cloned());
        IdealSubspace::from_span(&span, self.trunc)
    }
}

/// `H_{K,m}` restricted to polynomials of degree `<= trunc`.
pub fn ideal_subspace(ec: &EmbeddedCluster, trunc: usize) -> Result<IdealSubspace> {
    let sys = local_conditions(ec, trunc)?;
    Ok(IdealSubspace::from_conditions(&sys.rows, trunc))
}

/// `{g : f g in H_{K,m}}` restricted to degree `<= trunc`, where `ec`
/// carries `(K, m)`. The result is labeled with `m - e`.
pub fn colon_subspace(
    ec: &EmbeddedCluster,
    f: &Poly2<Q>,
    e: &[i64],
    trunc: usize,
) -> Result<(EmbeddedCluster, IdealSubspace)> {
    if f.is_zero() {
        return Err(Error::Precondition("colon by the zero germ".into()));
    }
    if e.len() != ec.len() {
        return Err(Error::Precondition(format!(
            "{} multiplicities of f for {} points",
            e.len(),
            ec.len()
        )));
    }
    let residual: Vec<i64> = ec.mults().iter().zip(e).map(|(m, e)| m - e).collect();
    let rec = ec.with_mults(&residual)?;
    check_truncation(&rec, trunc)?;
    let columns: Vec<Poly2<Q>> = local_columns::<Q>(trunc).iter().map(|g| g.mul(f)).collect();
    let (rows, _) = push_conditions(ec, columns).expect("rational charts");
    Ok((rec, IdealSubspace::from_conditions(&rows, trunc)))
}

/// Multiplicities of the strict transforms of the germ `f` at the points of
/// the cluster, together with the strict transform at the last point.
pub fn strict_multiplicities(ec: &EmbeddedCluster, f: &Poly2<Q>) -> (Vec<i64>, Poly2<Q>) {
    let mut g = f.clone();
    let mut e = Vec::with_capacity(ec.len());
    for i in 0..ec.len() {
        let k = g.order().unwrap_or(0);
        e.push(k as i64);
        if i + 1 < ec.len() {
            g = exact_transform(&g, k as i64, &ec.chart(i + 1));
        }
    }
    (e, g)
}

/// Transform without truncation (`g` must have order `>= m` when `m > 0`).
pub fn exact_transform(g: &Poly2<Q>, m: i64, chart: &Chart<Q>) -> Poly2<Q> {
    let deg = g.degree().unwrap_or(0);
    let cap = 2 * deg + m.unsigned_abs() as usize + 2;
    let bin = binomials::<Q>(deg.max(1));
    let pows: Vec<Q> = match chart {
        Chart::Affine(l) => (0..=deg).map(|k| Scalar::pow(l, k as u32)).collect(),
        Chart::Corner => Vec::new(),
    };
    blowup_transform(g, m, chart, cap, &bin, &pows)
}

/// Virtual transforms of `f` at every point for the multiplicities of `ec`.
/// Returns `None` if `f` fails to go virtually through the cluster.
pub fn virtual_transforms(ec: &EmbeddedCluster, f: &Poly2<Q>) -> Option<Vec<Poly2<Q>>> {
    let m = ec.mults();
    let mut g = f.clone();
    let mut out = Vec::with_capacity(ec.len());
    for i in 0..ec.len() {
        if m[i] > 0 && g.order().is_some_and(|o| (o as i64) < m[i]) {
            return None;
        }
        out.push(g.clone());
        if i + 1 < ec.len() {
            g = exact_transform(&g, m[i], &ec.chart(i + 1));
        }
    }
    Some(out)
}

/// Position of a new point on the last exceptional divisor.
#[derive(Clone, Debug, PartialEq)]
pub enum NextPoint {
    Free(Q),
    Satellite(usize),
}

impl EmbeddedCluster {
    pub fn push_point(&self, q: &NextPoint, mult: i64) -> Result<Self> {
        match q {
            NextPoint::Free(l) => self.push_free(l.clone(), mult),
            NextPoint::Satellite(t) => self.push_satellite(*t, mult),
        }
    }
}

/// The point of the first neighbourhood of the last point that a germ
/// smooth there passes through.
pub fn tangent_point(ec: &EmbeddedCluster, g: &Poly2<Q>) -> Result<NextPoint> {
    let r = ec.len();
    let a = g.get(1, 0);
    let b = g.get(0, 1);
    if !g.get(0, 0).is_zero() || (a.is_zero() && b.is_zero()) {
        return Err(Error::Precondition(
            "transform is not smooth at the last point".into(),
        ));
    }
    if b.is_zero() {
        if r < 2 {
            return Err(Error::Precondition(
                "vertical direction at the root is outside the chart".into(),
            ));
        }
        return Ok(NextPoint::Satellite(r - 2));
    }
    let lambda = -a / b;
    if lambda.is_zero() {
        if let Some(t) = ec.chain().extra_prox(r - 1) {
            return Ok(NextPoint::Satellite(t));
        }
    }
    Ok(NextPoint::Free(lambda))
}

/// Result of [`filtra_witness`].
#[derive(Clone, Debug, PartialEq)]
pub struct FiltraWitness {
    pub point: NextPoint,
    pub gap: usize,
}

/// Given `H_{K,m+} < I < H_{K,m-}` with `m- = (m1, 2^i, 1^j)` and
/// `m+ = (m1, 2^{i+1}, 1^{j-1})`, finds the point `q` on the last divisor
/// with `I = H_{K_q, (m1, 2^i, 1^{j+1})}` and checks the equality.
pub fn filtra_witness(
    k: &EmbeddedCluster,
    m1: i64,
    i: usize,
    j: usize,
    ideal: &IdealSubspace,
) -> Result<FiltraWitness> {
    if j == 0 || k.len() != i + j + 1 {
        return Err(Error::Precondition(format!(
            "need j >= 1 and r = i + j + 1 points, got r = {}",
            k.len()
        )));
    }
    let minus = Multiplicities::m2i1j(m1, i, j).0;
    let plus = Multiplicities::m2i1j(m1, i + 1, j - 1).0;
    let zero = Multiplicities::m2i1j(m1, i, j + 1).0;
    let trunc = ideal.trunc;
    let ec_minus = k.with_mults(&minus)?;
    let ec_plus = k.with_mults(&plus)?;
    let h_minus = ideal_subspace(&ec_minus, trunc)?;
    let h_plus = ideal_subspace(&ec_plus, trunc)?;
    let gap = h_minus.dim() - h_plus.dim();
    if gap > 2 {
        return Err(Error::Internal(format!("dim H-/H+ = {gap} exceeds 2")));
    }
    let strictly_between = h_plus.is_subspace_of(ideal)
        && ideal.is_subspace_of(&h_minus)
        && h_plus.dim() < ideal.dim()
        && ideal.dim() < h_minus.dim();
    if !strictly_between {
        return Err(Error::Precondition(
            "the ideal is not strictly between H(m+) and H(m-)".into(),
        ));
    }
    let f = ideal
        .basis()
        .into_iter()
        .find(|v| {
            !h_plus
                .annihilator
                .rows
                .iter()
                .all(|row| dot(row, v).is_zero())
        })
        .map(Poly2::from_dense)
        .ok_or_else(|| Error::Internal("no element outside H(m+)".into()))?;
    let transforms = virtual_transforms(&ec_minus, &f)
        .ok_or_else(|| Error::Internal("element of I outside H(m-)".into()))?;
    let last = transforms.last().expect("nonempty chain");
    let point = tangent_point(&ec_minus, last)?;
    let kq = ec_minus.push_point(&point, 1)?.with_mults(&zero)?;
    let h0 = ideal_subspace(&kq, trunc)?;
    if h0 != *ideal {
        return Err(Error::Internal(
            "ideal differs from the cluster ideal at the witness point".into(),
        ));
    }
    Ok(FiltraWitness { point, gap })
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Ideal generated by `H` and `g`, truncated.
pub fn ideal_plus_germ(h: &IdealSubspace, g: &Poly2<Q>) -> IdealSubspace {
    let extra: Vec<Vec<Q>> = (0..mono_count(h.trunc))
        .filter_map(|i| {
            let (a, b) = mono_at(i);
            let p = g.mul(&Poly2::monomial(a, b, Q::one()));
            (p.degree().unwrap_or(0) <= h.trunc).then(|| p.dense_to(h.trunc))
        })
        .collect();
    h.plus_span(&extra)
}
