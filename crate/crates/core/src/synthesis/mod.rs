//! Plane curves with prescribed tacnodes and cusps: the singularity
//! schemes, the degree bound, the construction of a general member of the
//! linear system, and certificates for what that member looks like.

mod singular;

pub use singular::{
    is_squarefree, singular_locus, SingularLocus, SingularPoint, UnlocatedSingularities,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{common_denominator, format_q, random_nonzero_q, Q};
use crate::cluster::WeightedCluster;
use crate::error::{Error, Result};
use crate::linalg::rref;
use crate::local_algebra::{exact_transform, Chart, EmbeddedCluster};
use crate::plane_systems::{condition_matrix, condition_rank, forms, place_general, SchemeUnion};
use crate::poly::{mono_at, Poly2};
use crate::unloading;
use crate::upoly::UPoly;

/// Height of the random coefficients used to pick a member of the kernel.
pub const MEMBER_HEIGHT: u32 = 100;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularitySpec {
    #[serde(default)]
    pub tacnodes: Vec<usize>,
    #[serde(default)]
    pub cusps: Vec<usize>,
}

impl SingularitySpec {
    pub fn new(tacnodes: Vec<usize>, cusps: Vec<usize>) -> Result<Self> {
        let s = SingularitySpec { tacnodes, cusps };
        if s.tacnodes.iter().chain(&s.cusps).any(|&o| o == 0) {
            return Err(Error::Precondition(
                "singularity orders must be positive".into(),
            ));
        }
        Ok(s)
    }

    /// `sum t_i + sum (n_i + 1)`; the union of the schemes has length `3M`.
    pub fn weight(&self) -> usize {
        self.tacnodes.iter().sum::<usize>() + self.cusps.iter().map(|n| n + 1).sum::<usize>()
    }

    /// The clusters in order: tacnodes first, then extended cusps.
    pub fn clusters(&self) -> Vec<WeightedCluster> {
        let mut out: Vec<WeightedCluster> =
            self.tacnodes.iter().map(|&t| tacnode_cluster(t)).collect();
        out.extend(self.cusps.iter().map(|&n| cusp_cluster(n, true)));
        out
    }
}

/// `(2^t)` on a free chain.
pub fn tacnode_cluster(t: usize) -> WeightedCluster {
    WeightedCluster::chain(&vec![2; t], &[])
}

/// `(2^n, 1, 1)` with the last point satellite; `extended` appends a free
/// simple point after it.
pub fn cusp_cluster(n: usize, extended: bool) -> WeightedCluster {
    let mut m = vec![2i64; n];
    m.extend([1, 1]);
    if extended {
        m.push(1);
    }
    WeightedCluster::chain(&m, &[(n + 1, n - 1)])
}

/// The cluster for a `D_k` point: `(3, 2^{k/2-2})` free for even `k`, and
/// `(3, 2^{r-3}, 1, 1)` with the last point satellite for `k = 2r - 1`.
pub fn dk_cluster(k: usize) -> Result<WeightedCluster> {
    if k < 4 {
        return Err(Error::Precondition(format!("D_k needs k >= 4, got {k}")));
    }
    let mut m = vec![3i64];
    if k % 2 == 0 {
        m.extend(std::iter::repeat_n(2, k / 2 - 2));
        Ok(WeightedCluster::chain(&m, &[]))
    } else {
        let r = k.div_ceil(2);
        m.extend(std::iter::repeat_n(2, r - 3));
        m.extend([1, 1]);
        Ok(WeightedCluster::chain(&m, &[(r - 1, r - 3)]))
    }
}

pub fn tacnode_scheme<R: Rng + ?Sized>(
    t: usize,
    base: (Q, Q),
    rng: &mut R,
    height: u32,
) -> Result<EmbeddedCluster> {
    if t == 0 {
        return Err(Error::Precondition("tacnode order must be positive".into()));
    }
    EmbeddedCluster::random(&tacnode_cluster(t), base, rng, height)
}

pub fn cusp_scheme<R: Rng + ?Sized>(
    n: usize,
    extended: bool,
    base: (Q, Q),
    rng: &mut R,
    height: u32,
) -> Result<EmbeddedCluster> {
    if n == 0 {
        return Err(Error::Precondition("cusp order must be positive".into()));
    }
    EmbeddedCluster::random(&cusp_cluster(n, extended), base, rng, height)
}

pub fn dk_scheme<R: Rng + ?Sized>(
    k: usize,
    base: (Q, Q),
    rng: &mut R,
    height: u32,
) -> Result<EmbeddedCluster> {
    EmbeddedCluster::random(&dk_cluster(k)?, base, rng, height)
}

/// The extended cusp with its last point moved to the satellite position
/// proximate to the simple free point.
pub fn specialized_cusp_cluster(n: usize) -> WeightedCluster {
    let mut m = vec![2i64; n];
    m.extend([1, 1, 1]);
    WeightedCluster::chain(&m, &[(n + 1, n - 1), (n + 2, n)])
}

/// Smallest `d` with `d(d+1) >= 6M`.
pub fn min_degree(spec: &SingularitySpec) -> Result<usize> {
    let m = spec.weight();
    if m < 3 || m == 5 {
        return Err(Error::Precondition(format!(
            "weight M = {m} is outside the range covered (M >= 3, M != 5)"
        )));
    }
    Ok((1..).find(|d| d * (d + 1) >= 6 * m).unwrap())
}

/// A plane curve in the affine chart, with coprime integer coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneCurve {
    pub degree: usize,
    pub poly: Poly2<Q>,
}

impl PlaneCurve {
    pub fn new(poly: Poly2<Q>) -> Result<Self> {
        let Some(degree) = poly.degree() else {
            return Err(Error::Precondition(
                "the zero polynomial is not a curve".into(),
            ));
        };
        Ok(PlaneCurve {
            degree,
            poly: primitive(&poly),
        })
    }

    /// Equation in local coordinates centred at `p`.
    pub fn local_at(&self, p: &(Q, Q)) -> Poly2<Q> {
        self.poly.translate(&p.0, &p.1, None)
    }

    /// Largest number of decimal digits among the coefficients.
    pub fn coefficient_digits(&self) -> usize {
        self.poly
            .terms()
            .map(|(_, _, c)| {
                c.numer()
                    .abs()
                    .to_string()
                    .len()
                    .max(c.denom().to_string().len())
            })
            .max()
            .unwrap_or(0)
    }

    pub fn terms_as_strings(&self) -> Vec<((usize, usize), String)> {
        self.poly
            .terms()
            .map(|(a, b, c)| ((a, b), format_q(c)))
            .collect()
    }
}

/// Integer coefficients without common factor, positive leading term.
fn primitive(p: &Poly2<Q>) -> Poly2<Q> {
    let den = common_denominator(p.terms().map(|(_, _, c)| c));
    let ints: Vec<BigInt> = p
        .terms()
        .map(|(_, _, c)| (c * Q::from_integer(den.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return p.clone();
    }
    let lead_negative = ints.last().is_some_and(|v| v.is_negative());
    if lead_negative {
        g = -g;
    }
    p.scale(&Q::new(den, g))
}

/// The union of schemes placed at random and a general curve through it.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub curve: PlaneCurve,
    pub union: SchemeUnion,
    /// Number of placements tried before the independence check passed.
    pub placements: usize,
}

/// Places the schemes of `spec` and checks that they impose independent
/// conditions in degree `d - 1`; one resampling is allowed.
pub fn place_independent<R: Rng + ?Sized>(
    spec: &SingularitySpec,
    d: usize,
    rng: &mut R,
    height: u32,
) -> Result<(SchemeUnion, usize)> {
    let clusters = spec.clusters();
    let len = 3 * spec.weight();
    for attempt in 1..=2 {
        let z = place_general(&clusters, rng, height)?;
        if d >= 1 && condition_rank(&z, d - 1) == len {
            return Ok((z, attempt));
        }
    }
    Err(Error::Precondition(format!(
        "the schemes do not impose independent conditions in degree {}",
        d.saturating_sub(1)
    )))
}

/// A random member of `L_d(Z)`, with coefficients drawn from the kernel of
/// the degree-`d` condition matrix.
pub fn general_member<R: Rng + ?Sized>(
    z: &SchemeUnion,
    d: usize,
    rng: &mut R,
) -> Result<PlaneCurve> {
    let mat = condition_matrix(z, d);
    let kernel = rref(&mat.rows, forms(d)).nullspace();
    if kernel.is_empty() {
        return Err(Error::Internal(format!(
            "no curve of degree {d} through the schemes"
        )));
    }
    let mut coeffs = vec![Q::zero(); forms(d)];
    for v in &kernel {
        let c = random_nonzero_q(rng, MEMBER_HEIGHT);
        for (acc, x) in coeffs.iter_mut().zip(v) {
            *acc += &c * x;
        }
    }
    let poly = Poly2::from_terms(coeffs.into_iter().enumerate().map(|(i, c)| {
        let (a, b) = mono_at(i);
        (a, b, c)
    }));
    PlaneCurve::new(poly)
}

pub fn synthesize(spec: &SingularitySpec, d: usize, seed: u64, height: u32) -> Result<Synthesis> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (union, placements) = place_independent(spec, d, &mut rng, height)?;
    let curve = general_member(&union, d, &mut rng)?;
    Ok(Synthesis {
        curve,
        union,
        placements,
    })
}

/// Result of following a curve through the blowups of a cluster.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpnessCertificate {
    pub expected: Vec<i64>,
    /// Multiplicity of the strict transform at each point.
    pub actual: Vec<i64>,
    pub normal_crossings: bool,
    pub ok: bool,
    /// First problem found, if any.
    pub failure: Option<String>,
}

/// Tangent cone of a form of degree `e` as a polynomial in the slope
/// `lambda` (tangent `v = lambda u`); the missing degree is the
/// multiplicity of the direction `u = 0`.
fn tangent_cone(g: &Poly2<Q>, e: usize) -> (UPoly, usize) {
    let t = UPoly::new(g.form(e));
    let inf = e - t.degree().unwrap_or(0);
    (t, inf)
}

/// Checks the tangent cone at `p_i`: apart from the direction of the next
/// point (if any), every direction is simple and avoids the corners.
fn check_stage(
    ec: &EmbeddedCluster,
    i: usize,
    g: &Poly2<Q>,
    e: usize,
    next: Option<&Chart<Q>>,
) -> std::result::Result<(), String> {
    if e == 0 {
        return Ok(());
    }
    let (mut t, mut inf) = tangent_cone(g, e);
    match next {
        Some(Chart::Corner) => inf = 0,
        Some(Chart::Affine(l)) => {
            let k = t.root_multiplicity(l);
            t = t.div_rem(&UPoly::linear_root(l).pow(k)).0;
        }
        None => {}
    }
    if !t.is_squarefree() {
        return Err(format!("repeated tangent at p{}", i + 1));
    }
    if inf > 1 {
        return Err(format!("repeated tangent at p{}", i + 1));
    }
    if i >= 1 && inf > 0 {
        return Err(format!(
            "tangent to the previous exceptional divisor at p{}",
            i + 1
        ));
    }
    if ec.chain().is_satellite(i) && t.eval(&Q::zero()).is_zero() {
        return Err(format!(
            "tangent to the earlier exceptional divisor at p{}",
            i + 1
        ));
    }
    Ok(())
}

/// Follows `C` through the actual blowups of the cluster of `ec`, dividing
/// by the attained multiplicity at each point.
pub fn verify_sharp(c: &PlaneCurve, ec: &EmbeddedCluster) -> Result<SharpnessCertificate> {
    let mut g = c.local_at(&ec.base);
    if g.is_zero() {
        return Err(Error::Precondition("the curve vanishes identically".into()));
    }
    let m = ec.mults().to_vec();
    let r = ec.len();
    let mut actual = Vec::with_capacity(r);
    let mut failure = None;
    let mut normal_crossings = true;
    for i in 0..r {
        let e = g.order().unwrap_or(0);
        actual.push(e as i64);
        if failure.is_none() && e as i64 != m[i] {
            failure = Some(format!(
                "multiplicity {e} at p{} instead of {}",
                i + 1,
                m[i]
            ));
        }
        let next = (i + 1 < r).then(|| ec.chart(i + 1));
        if let Err(msg) = check_stage(ec, i, &g, e, next.as_ref()) {
            if i + 1 == r {
                normal_crossings = false;
            }
            failure.get_or_insert(msg);
        }
        if let Some(ch) = next {
            g = exact_transform(&g, e as i64, &ch);
        }
    }
    Ok(SharpnessCertificate {
        ok: failure.is_none(),
        expected: m,
        actual,
        normal_crossings,
        failure,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentCertificate {
    pub base: (String, String),
    pub multiplicities: Vec<i64>,
    pub certificate: SharpnessCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExistenciaAttempt {
    pub components: Vec<ComponentCertificate>,
    pub singular_locus: SingularLocus,
    pub locus_matches: bool,
    pub coefficient_digits: usize,
    pub ok: bool,
}

/// Hypotheses under which a general member is irreducible.
#[derive(Clone, Debug, Serialize)]
pub struct IrreducibilityHypotheses {
    pub independent_in_degree_below: bool,
    pub not_single_point_of_multiplicity_d_plus_1: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExistenciaReport {
    pub spec: SingularitySpec,
    pub weight: usize,
    pub degree: usize,
    pub total_length: u64,
    pub length_matches: bool,
    pub placements: usize,
    pub hypotheses: IrreducibilityHypotheses,
    pub attempts: Vec<ExistenciaAttempt>,
    pub ok: bool,
    #[serde(skip)]
    pub curve: Option<PlaneCurve>,
    #[serde(skip)]
    pub union: Option<SchemeUnion>,
}

/// Sharpness at every component and the exact singular locus of `curve`.
pub fn certify(curve: &PlaneCurve, z: &SchemeUnion) -> Result<ExistenciaAttempt> {
    let mut components = Vec::new();
    for ec in &z.components {
        components.push(ComponentCertificate {
            base: (format_q(&ec.base.0), format_q(&ec.base.1)),
            multiplicities: ec.mults().to_vec(),
            certificate: verify_sharp(curve, ec)?,
        });
    }
    let bases: Vec<(Q, Q)> = z.components.iter().map(|c| c.base.clone()).collect();
    let locus = singular_locus(&curve.poly, &bases)?;
    let locus_matches = locus.equals_points(&bases);
    let ok = locus_matches && components.iter().all(|c| c.certificate.ok);
    Ok(ExistenciaAttempt {
        components,
        singular_locus: locus,
        locus_matches,
        coefficient_digits: curve.coefficient_digits(),
        ok,
    })
}

/// Builds a curve of degree `min_degree(spec)` with the prescribed
/// singularities and certifies it. A failed certificate triggers one more
/// draw from the same linear system; both attempts are reported.
pub fn existencia_driver(
    spec: &SingularitySpec,
    seed: u64,
    height: u32,
) -> Result<ExistenciaReport> {
    let d = min_degree(spec)?;
    existencia_in_degree(spec, d, seed, height)
}

/// As [`existencia_driver`] at a given degree.
pub fn existencia_in_degree(
    spec: &SingularitySpec,
    d: usize,
    seed: u64,
    height: u32,
) -> Result<ExistenciaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (z, placements) = place_independent(spec, d, &mut rng, height)?;
    let total_length = z.total_length()?;
    let weight = spec.weight();
    let single_big_point = z.components.len() == 1
        && z.components[0].len() == 1
        && z.components[0].mults()[0] == d as i64 + 1;
    let hypotheses = IrreducibilityHypotheses {
        independent_in_degree_below: true,
        not_single_point_of_multiplicity_d_plus_1: !single_big_point,
    };
    let mut attempts = Vec::new();
    let mut curve = None;
    for _ in 0..2 {
        let c = general_member(&z, d, &mut rng)?;
        let a = certify(&c, &z)?;
        let done = a.ok;
        attempts.push(a);
        curve = Some(c);
        if done {
            break;
        }
    }
    let length_matches = total_length == 3 * weight as u64;
    let ok = length_matches && attempts.last().is_some_and(|a| a.ok);
    Ok(ExistenciaReport {
        spec: spec.clone(),
        weight,
        degree: d,
        total_length,
        length_matches,
        placements,
        hypotheses,
        attempts,
        ok,
        curve,
        union: Some(z),
    })
}

/// Whether the specialized extended cusp unloads to the tacnode of the
/// next order (up to trailing zeros).
pub fn cusp_specializes_to_tacnode(n: usize) -> Result<bool> {
    let d = unloading::delta(&specialized_cusp_cluster(n))?;
    let t = tacnode_cluster(n + 1);
    let trimmed: Vec<i64> = {
        let mut v = d.clone();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    Ok(trimmed == t.mults.0)
}
