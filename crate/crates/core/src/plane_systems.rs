//! Linear systems of plane curves of degree `d` through unions of cluster
//! schemes at distinct points of the affine chart.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{random_q, Fp, Scalar, Q};
use crate::cluster::{Chain, Cluster, Multiplicities, WeightedCluster};
use crate::error::{Error, Result};
use crate::linalg::{rank_fp, rank_q};
use crate::local_algebra::{push_conditions, EmbeddedCluster};
use crate::poly::{mono_at, mono_count, Poly2};
use crate::unloading::{delta, length};

/// Default height of the random rationals used for general position.
pub const DEFAULT_HEIGHT: u32 = 100;

/// `Z = Z_1 u ... u Z_k` with the `Z_i` supported at distinct points.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeUnion {
    pub components: Vec<EmbeddedCluster>,
}

impl SchemeUnion {
    pub fn new(components: Vec<EmbeddedCluster>) -> Result<Self> {
        for (a, ca) in components.iter().enumerate() {
            for cb in &components[a + 1..] {
                if ca.base == cb.base {
                    return Err(Error::Precondition(format!(
                        "two components share the base point ({}, {})",
                        ca.base.0, ca.base.1
                    )));
                }
            }
        }
        Ok(SchemeUnion { components })
    }

    pub fn empty() -> Self {
        SchemeUnion {
            components: Vec::new(),
        }
    }

    pub fn total_length(&self) -> Result<u64> {
        self.components.iter().map(|c| length(&c.weighted)).sum()
    }

    /// Every component replaced by its consistent form.
    pub fn normalized(&self) -> Result<SchemeUnion> {
        let components = self
            .components
            .iter()
            .map(|c| c.with_mults(&delta(&c.weighted)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(SchemeUnion { components })
    }

    pub fn with_component(&self, c: EmbeddedCluster) -> Result<SchemeUnion> {
        let mut v = self.components.clone();
        v.push(c);
        SchemeUnion::new(v)
    }
}

/// Number of monomials of degree `<= d`, i.e. `(d+1)(d+2)/2`.
pub fn forms(d: usize) -> usize {
    mono_count(d)
}

fn component_rows<F: Scalar>(ec: &EmbeddedCluster, d: usize) -> Option<Vec<Vec<F>>> {
    let x0 = F::from_rational(&ec.base.0)?;
    let y0 = F::from_rational(&ec.base.1)?;
    let keep = ec.degree_bound();
    let columns: Vec<Poly2<F>> = (0..mono_count(d))
        .map(|i| {
            let (a, b) = mono_at(i);
            Poly2::monomial(a, b, F::one()).translate(&x0, &y0, Some(keep))
        })
        .collect();
    push_conditions(ec, columns).map(|(rows, _)| rows)
}

fn union_rows<F: Scalar>(z: &SchemeUnion, d: usize) -> Option<Vec<Vec<F>>> {
    let mut rows = Vec::new();
    for c in &z.components {
        rows.extend(component_rows::<F>(c, d)?);
    }
    Some(rows)
}

/// The map from degree-`d` polynomials to the conditions of `Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalConditionMatrix {
    pub degree: usize,
    pub rows: Vec<Vec<Q>>,
}

impl GlobalConditionMatrix {
    pub fn cols(&self) -> usize {
        forms(self.degree)
    }

    pub fn rank(&self) -> usize {
        rank_q(&self.rows, self.cols())
    }
}

/// Condition matrix of `Z` exactly as given (no unloading).
pub fn condition_matrix(z: &SchemeUnion, d: usize) -> GlobalConditionMatrix {
    GlobalConditionMatrix {
        degree: d,
        rows: union_rows::<Q>(z, d).expect("rational arithmetic"),
    }
}

/// Rank of the condition matrix of `Z` in degree `d`. A full rank modulo
/// a large prime is a certificate; otherwise the rank is computed over Q.
pub fn condition_rank(z: &SchemeUnion, d: usize) -> usize {
    let cols = forms(d);
    if let Some(rows) = union_rows::<Fp>(z, d) {
        let r = rank_fp(&rows, cols);
        if r == rows.len().min(cols) {
            return r;
        }
    }
    condition_matrix(z, d).rank()
}

/// `dim L_d(Z)` as a projective space (`-1` when empty).
pub fn ell(z: &SchemeUnion, d: usize) -> i64 {
    forms(d) as i64 - 1 - condition_rank(z, d) as i64
}

pub fn expected_dimension(total_length: u64, d: usize) -> i64 {
    (forms(d) as i64 - 1 - total_length as i64).max(-1)
}

/// Per-degree maximal-rank data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeVerdict {
    pub degree: usize,
    pub rank: usize,
    pub expected: usize,
    pub ell: i64,
    pub expected_dimension: i64,
    pub defect: usize,
}

impl DegreeVerdict {
    pub fn ok(&self) -> bool {
        self.defect == 0
    }
}

fn verdict_from_rank(rank: usize, total_length: u64, d: usize) -> DegreeVerdict {
    let expected = forms(d).min(total_length as usize);
    DegreeVerdict {
        degree: d,
        rank,
        expected,
        ell: forms(d) as i64 - 1 - rank as i64,
        expected_dimension: expected_dimension(total_length, d),
        defect: expected.saturating_sub(rank),
    }
}

/// Maximal rank in one degree, after unloading every component.
pub fn max_rank_in_degree(z: &SchemeUnion, d: usize) -> Result<DegreeVerdict> {
    let n = z.normalized()?;
    let len = n.total_length()?;
    Ok(verdict_from_rank(condition_rank(&n, d), len, d))
}

/// Largest `d` with `(d+1)(d+2)/2 <= n` (zero when `n < 1`).
pub fn level_floor(n: u64) -> usize {
    let mut d = 0;
    while forms(d + 1) as u64 <= n {
        d += 1;
    }
    d
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxRankReport {
    pub total_length: u64,
    pub degrees: Vec<DegreeVerdict>,
    pub failing: Vec<usize>,
    /// Whether the top audited degree has full rank.
    pub full_at_top: bool,
    pub ok: bool,
    /// Set when two independent general-position draws disagreed.
    pub draws_disagree: bool,
}

impl MaxRankReport {
    fn from_verdicts(total_length: u64, degrees: Vec<DegreeVerdict>) -> Self {
        let failing: Vec<usize> = degrees
            .iter()
            .filter(|v| !v.ok())
            .map(|v| v.degree)
            .collect();
        let full_at_top = degrees.last().is_none_or(|v| v.rank == v.expected);
        MaxRankReport {
            total_length,
            ok: failing.is_empty(),
            failing,
            degrees,
            full_at_top,
            draws_disagree: false,
        }
    }

    pub fn defect_at(&self, d: usize) -> Option<usize> {
        self.degrees
            .iter()
            .find(|v| v.degree == d)
            .map(|v| v.defect)
    }
}

/// Degrees audited by [`max_rank`]: `[d_low, d_low + 2]`, or `0..=up_to`.
pub fn audit_window(total_length: u64, all_degrees_up_to: Option<usize>) -> Vec<usize> {
    match all_degrees_up_to {
        Some(top) => (0..=top).collect(),
        None => {
            let lo = level_floor(total_length);
            (lo..=lo + 2).collect()
        }
    }
}

/// Maximal rank of `Z` on the audit window.
pub fn max_rank(z: &SchemeUnion, all_degrees_up_to: Option<usize>) -> Result<MaxRankReport> {
    let n = z.normalized()?;
    let len = n.total_length()?;
    let degrees = audit_window(len, all_degrees_up_to)
        .into_iter()
        .map(|d| verdict_from_rank(condition_rank(&n, d), len, d))
        .collect();
    Ok(MaxRankReport::from_verdicts(len, degrees))
}

/// Random base point and directions for each single-chain cluster.
pub fn place_general<R: Rng + ?Sized>(
    clusters: &[WeightedCluster],
    rng: &mut R,
    height: u32,
) -> Result<SchemeUnion> {
    let mut comps: Vec<EmbeddedCluster> = Vec::with_capacity(clusters.len());
    for wc in clusters {
        let base = loop {
            let b = (random_q(rng, height), random_q(rng, height));
            if comps.iter().all(|c| c.base != b) {
                break b;
            }
        };
        comps.push(EmbeddedCluster::random(wc, base, rng, height)?);
    }
    SchemeUnion::new(comps)
}

/// [`max_rank`] at general position: a defective draw is repeated once
/// with fresh parameters and the larger rank per degree is kept.
pub fn max_rank_general(
    clusters: &[WeightedCluster],
    seed: u64,
    height: u32,
    all_degrees_up_to: Option<usize>,
) -> Result<MaxRankReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = place_general(clusters, &mut rng, height)?;
    let first = max_rank(&z, all_degrees_up_to)?;
    if first.ok {
        return Ok(first);
    }
    let z2 = place_general(clusters, &mut rng, height)?;
    let second = max_rank(&z2, all_degrees_up_to)?;
    let mut merged = Vec::with_capacity(first.degrees.len());
    let mut disagree = false;
    for (a, b) in first.degrees.iter().zip(&second.degrees) {
        if a.rank != b.rank {
            disagree = true;
        }
        merged.push(verdict_from_rank(
            a.rank.max(b.rank),
            first.total_length,
            a.degree,
        ));
    }
    let mut report = MaxRankReport::from_verdicts(first.total_length, merged);
    report.draws_disagree = disagree;
    Ok(report)
}

/// `ell` at general position, with the same redraw rule.
pub fn ell_general(clusters: &[WeightedCluster], d: usize, seed: u64, height: u32) -> Result<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = place_general(clusters, &mut rng, height)?.normalized()?;
    let e1 = ell(&z, d);
    let len = z.total_length()?;
    if e1 == expected_dimension(len, d) {
        return Ok(e1);
    }
    let z2 = place_general(clusters, &mut rng, height)?.normalized()?;
    Ok(e1.min(ell(&z2, d)))
}

/// The single-chain cluster `(m, 2^i, 1^j)` in the stratum `U_s`.
pub fn stratum_cluster(s: usize, m: i64, i: usize, j: usize) -> Result<WeightedCluster> {
    let mults = Multiplicities::m2i1j(m, i, j);
    let r = mults.len();
    if s < 2 || s > r {
        return Err(Error::Precondition(format!(
            "U_{s} needs between 2 and {r} points"
        )));
    }
    WeightedCluster::new(Cluster::single(Chain::stratum(r, s, 1)), mults)
}

/// `m(m+1)/2 + 3i + j`.
pub fn n_of(m: i64, i: usize, j: usize) -> u64 {
    (m * (m + 1) / 2) as u64 + 3 * i as u64 + j as u64
}

/// The two level schemes around `(m, 2^i, 1^j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSplit {
    pub minus: Vec<i64>,
    pub plus: Vec<i64>,
    pub degree: usize,
    pub epsilon: u64,
}

/// Systems `m- <= m <= m+` of levels `d` and `d + 1`.
pub fn level_split(m: i64, i: usize, j: usize, s: usize) -> Result<LevelSplit> {
    let wc = stratum_cluster(s, m, i, j)?;
    if !wc.is_consistent() {
        return Err(Error::Precondition(format!(
            "{} is not consistent in U_{s}",
            wc.mults
        )));
    }
    Ok(level_numbers(m, i, j))
}

/// The arithmetic of [`level_split`] without the consistency check.
pub fn level_numbers(m: i64, i: usize, j: usize) -> LevelSplit {
    let n = n_of(m, i, j);
    let d = level_floor(n);
    let eps = n - forms(d) as u64;
    let e = eps as usize;
    let plus = Multiplicities::m2i1j(m, i, j + d + 2 - e).0;
    let minus = if i >= e {
        Multiplicities::m2i1j(m, i - e, j + 2 * e).0
    } else {
        Multiplicities::m2i1j(m, 0, j + 3 * i - e).0
    };
    LevelSplit {
        minus,
        plus,
        degree: d,
        epsilon: eps,
    }
}

/// One row of the exception catalog.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    /// Multiplicity of each point (distinct general points).
    pub points: Vec<i64>,
    pub failing_degree: usize,
    pub report: MaxRankReport,
}

impl CatalogEntry {
    /// Fails at exactly the listed degree with the given defect and
    /// nowhere else in the window.
    pub fn matches(&self, defect: usize) -> bool {
        self.report.failing == vec![self.failing_degree]
            && self.report.defect_at(self.failing_degree) == Some(defect)
    }
}

/// The systems of a point of multiplicity at most 5 plus double points
/// (and the small numbers of double points) without maximal rank.
pub fn exception_list() -> Vec<(&'static str, Vec<i64>, usize)> {
    vec![
        ("(3,2)", vec![3, 2], 3),
        ("(4,2)", vec![4, 2], 4),
        ("(4,2^2)", vec![4, 2, 2], 4),
        ("(5,2)", vec![5, 2], 5),
        ("(5,2^2)", vec![5, 2, 2], 5),
        ("(4,2^6)", vec![4, 2, 2, 2, 2, 2, 2], 6),
        ("(2^2)", vec![2, 2], 2),
        ("(2^5)", vec![2, 2, 2, 2, 2], 4),
    ]
}

pub fn exception_catalog(seed: u64, height: u32) -> Result<Vec<CatalogEntry>> {
    exception_list()
        .into_iter()
        .enumerate()
        .map(|(k, (name, points, deg))| {
            let clusters: Vec<WeightedCluster> = points
                .iter()
                .map(|&m| WeightedCluster::chain(&[m], &[]))
                .collect();
            let report = max_rank_general(&clusters, seed.wrapping_add(k as u64), height, None)?;
            Ok(CatalogEntry {
                name: name.to_string(),
                points,
                failing_degree: deg,
                report,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_int;

    fn doubles(n: usize) -> Vec<WeightedCluster> {
        (0..n).map(|_| WeightedCluster::chain(&[2], &[])).collect()
    }

    #[test]
    fn one_double_point() {
        let ec = EmbeddedCluster::free_chain(&[2], (q_int(1), q_int(2)));
        let z = SchemeUnion::new(vec![ec]).unwrap();
        let m = condition_matrix(&z, 2);
        assert_eq!((m.rows.len(), m.cols()), (3, 6));
        assert_eq!(m.rank(), 3);
        assert_eq!(ell(&z, 2), 2);
        assert_eq!(condition_matrix(&SchemeUnion::empty(), 3).rows.len(), 0);
    }

    #[test]
    fn small_double_point_unions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = place_general(&doubles(2), &mut rng, 100).unwrap();
        assert_eq!(condition_rank(&z, 1), 3);
        assert_eq!(ell(&z, 2), 0);
        let z = place_general(&doubles(5), &mut rng, 100).unwrap();
        assert_eq!(ell(&z, 4), 0);
    }

    #[test]
    fn expected_dimensions() {
        assert_eq!(expected_dimension(9, 3), 0);
        assert_eq!(expected_dimension(15, 4), -1);
        assert_eq!(expected_dimension(0, 1), 2);
    }

    #[test]
    fn duplicate_bases_rejected() {
        let a = EmbeddedCluster::free_chain(&[2], (q_int(0), q_int(0)));
        assert!(SchemeUnion::new(vec![a.clone(), a]).is_err());
    }

    #[test]
    fn level_split_examples() {
        let l = level_numbers(0, 0, 6);
        assert!(level_split(0, 0, 6, 2).is_err());
        assert_eq!((l.degree, l.epsilon), (2, 0));
        assert_eq!(l.plus, Multiplicities::m2i1j(0, 0, 10).0);
        assert_eq!(l.minus, Multiplicities::m2i1j(0, 0, 6).0);
        let l = level_split(2, 1, 0, 2).unwrap();
        assert_eq!((l.degree, l.epsilon), (2, 0));
        assert_eq!(l.minus, vec![2, 2]);
        assert_eq!(l.plus, vec![2, 2, 1, 1, 1, 1]);
        for (m, i, j, s) in [(3, 2, 3, 2), (4, 3, 5, 3), (5, 1, 7, 2), (2, 4, 0, 2)] {
            let l = level_split(m, i, j, s).unwrap();
            let lm = WeightedCluster::chain(&l.minus, &[]);
            let lp = WeightedCluster::chain(&l.plus, &[]);
            assert_eq!(length(&lm).unwrap(), forms(l.degree) as u64);
            assert_eq!(length(&lp).unwrap(), forms(l.degree + 1) as u64);
        }
    }

    #[test]
    fn mixed_union_has_max_rank() {
        let mut cl = vec![WeightedCluster::chain(&[2, 2], &[])];
        cl.extend(doubles(4));
        let r = max_rank_general(&cl, 3, 100, None).unwrap();
        assert_eq!(r.total_length, 18);
        assert!(r.ok, "{r:?}");
    }
}
