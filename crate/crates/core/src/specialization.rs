//! Moving free points into satellite positions, and the checkable
//! consequences for lengths and dimensions of the resulting schemes.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{format_q, random_q, Q};
use crate::cluster::{Chain, Cluster, Multiplicities, WeightedCluster};
use crate::error::{Error, Result};
use crate::local_algebra::{colength, EmbeddedCluster, NextPoint};
use crate::plane_systems::ell_general;
use crate::unloading;

/// Satellite positions on the divisor through `p_i`: the targets `t` for
/// which `p_i` may be made proximate to `p_t`.
pub fn satellite_targets(chain: &Chain, i: usize) -> Vec<usize> {
    if i < 2 {
        return Vec::new();
    }
    let mut out = vec![i - 2];
    if let Some(t) = chain.extra_prox(i - 1) {
        if t != i - 2 {
            out.push(t);
        }
    }
    out
}

/// Places the free point `p_i` at a satellite position. The default is the
/// position proximate to the target of `p_{i-1}` when that point is a
/// satellite, and to `p_{i-2}` otherwise.
pub fn specialize_to_satellite(
    ec: &EmbeddedCluster,
    i: usize,
    target: Option<usize>,
) -> Result<EmbeddedCluster> {
    let chain = ec.chain();
    if i >= chain.len() {
        return Err(Error::Precondition(format!("no point p{}", i + 1)));
    }
    if chain.is_satellite(i) {
        return Err(Error::Precondition(format!(
            "p{} is already a satellite",
            i + 1
        )));
    }
    let targets = satellite_targets(chain, i);
    let Some(&default) = targets.last() else {
        return Err(Error::Precondition(format!(
            "p{} lies on a single exceptional divisor",
            i + 1
        )));
    };
    let t = target.unwrap_or(default);
    if !targets.contains(&t) {
        return Err(Error::Precondition(format!(
            "p{} has no satellite position proximate to p{}",
            i + 1,
            t + 1
        )));
    }
    let mut chain = chain.clone();
    chain.set_extra_prox(i, Some(t));
    let mut lambdas = ec.lambdas.clone();
    lambdas[i] = None;
    let wc = WeightedCluster::new(Cluster::single(chain), ec.weighted.mults.clone())?;
    EmbeddedCluster::new(wc, ec.base.clone(), lambdas)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemicontinuityTrial {
    pub point: usize,
    pub target: usize,
    pub free_colength: usize,
    pub special_colength: usize,
    pub free_length: u64,
    pub special_length: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemicontinuityReport {
    pub mults: Vec<i64>,
    pub trials: Vec<SemicontinuityTrial>,
    pub note: Option<String>,
    pub ok: bool,
}

fn trial_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(k as u64)
}

/// Colength at a free embedding of `m` and at one satellite specialization
/// of it, per trial; the specialization must not increase the colength.
pub fn semicontinuity_experiment(
    mults: &[i64],
    trials: usize,
    seed: u64,
    height: u32,
) -> Result<SemicontinuityReport> {
    let r = mults.len();
    if r < 3 {
        return Ok(SemicontinuityReport {
            mults: mults.to_vec(),
            trials: Vec::new(),
            note: Some("fewer than three points: no satellite position".into()),
            ok: true,
        });
    }
    let base = WeightedCluster::chain(mults, &[]);
    let trials: Vec<SemicontinuityTrial> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, k));
            let origin = (random_q(&mut rng, height), random_q(&mut rng, height));
            let free = EmbeddedCluster::random(&base, origin, &mut rng, height)?;
            let i = rng.gen_range(2..r);
            // a following free point in direction 0 would land on the new
            // satellite position; move it off
            let mut free = free;
            if i + 1 < r
                && free.lambdas[i + 1]
                    .as_ref()
                    .is_some_and(|l| l == &Q::from_integer(0.into()))
            {
                free.lambdas[i + 1] = Some(Q::from_integer(1.into()));
            }
            let special = specialize_to_satellite(&free, i, None)?;
            let target = special.chain().extra_prox(i).expect("satellite");
            let fc = colength(&free);
            let sc = colength(&special);
            Ok(SemicontinuityTrial {
                point: i,
                target,
                free_colength: fc,
                special_colength: sc,
                free_length: unloading::length(&free.weighted)?,
                special_length: unloading::length(&special.weighted)?,
                ok: sc <= fc,
            })
        })
        .collect::<Result<_>>()?;
    let ok = trials.iter().all(|t| t.ok);
    Ok(SemicontinuityReport {
        mults: mults.to_vec(),
        trials,
        note: None,
        ok,
    })
}

/// `(m, 2^i, 1^j)` on the stratum `U_s`, padded with points of
/// multiplicity zero so that the stratum exists.
pub fn stratum_system(s: usize, m: i64, i: usize, j: usize) -> WeightedCluster {
    let mut mults = Multiplicities::m2i1j(m, i, j).0;
    if mults.len() < s + 1 {
        mults.resize(s + 1, 0);
    }
    let r = mults.len();
    WeightedCluster::new(
        Cluster::single(Chain::stratum(r, s, 1)),
        Multiplicities(mults),
    )
    .expect("strata are valid clusters")
}

fn trimmed(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Whether `(m, 2^i, 1^j)` is consistent in `U_s` and its length drops when
/// the cluster moves to `U_{s+1}`.
pub fn length_drops(s: usize, m: i64, i: usize, j: usize) -> Result<bool> {
    let a = stratum_system(s, m, i, j);
    if !a.is_consistent() {
        return Ok(false);
    }
    let b = stratum_system(s + 1, m, i, j);
    Ok(unloading::length(&b)? < unloading::length(&a)?)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LimitIdentitiesReport {
    pub bounds: (usize, i64, usize, usize),
    /// Tuples where the length drops from `U_s` to `U_{s+1}`.
    pub dropping: usize,
    pub first_part_counterexamples: Vec<(usize, i64, usize, usize)>,
    pub third_part_checked: usize,
    pub third_part_counterexamples: Vec<(usize, usize, usize)>,
    pub length_identities_checked: usize,
    pub length_identity_counterexamples: Vec<(usize, i64, usize, usize)>,
    pub note: String,
    pub ok: bool,
}

/// The equivalent system of `(2s-1, 2^{i-s+1}, 1^{j+s-2})` in `U_{s+1}`
/// according to the third part: itself when `i <= 2s-2`, and
/// `(2s, 2^{i-2s+1}, 1^{j+2s-2})` otherwise.
pub fn predicted_limit_form(s: usize, i: usize, j: usize) -> (bool, Vec<i64>) {
    if i <= 2 * s - 2 {
        (
            true,
            Multiplicities::m2i1j(2 * s as i64 - 1, i + 1 - s, j + s - 2).0,
        )
    } else {
        (
            false,
            Multiplicities::m2i1j(2 * s as i64, i + 1 - 2 * s, j + 2 * s - 2).0,
        )
    }
}

/// Exhaustive check of the exact statements about `(m, 2^i, 1^j)` moving
/// from `U_s` to `U_{s+1}`, for `2 <= s <= max_s`, `m <= max_m`,
/// `i <= max_i`, `j <= max_j`.
pub fn limit_identities(
    max_s: usize,
    max_m: i64,
    max_i: usize,
    max_j: usize,
) -> Result<LimitIdentitiesReport> {
    let mut rep = LimitIdentitiesReport {
        bounds: (max_s, max_m, max_i, max_j),
        note: "the hypothesis on the open set is read as a drop in length from U_s to U_{s+1}"
            .into(),
        ..Default::default()
    };
    for s in 2..=max_s {
        for m in 0..=max_m {
            for i in 0..=max_i {
                for j in 0..=max_j {
                    if length_drops(s, m, i, j)? {
                        rep.dropping += 1;
                        if !(m == 2 * s as i64 - 2 && i >= s) {
                            rep.first_part_counterexamples.push((s, m, i, j));
                        }
                    }
                    // the two cases excluded in the proof of the first part
                    // keep the length constant
                    let a = stratum_system(s, m, i, j);
                    if a.is_consistent() {
                        let b = stratum_system(s + 1, m, i, j);
                        let excluded =
                            (i < s && m == (s + i) as i64 - 1) || (i >= s && m == 2 * s as i64 - 1);
                        if excluded {
                            rep.length_identities_checked += 1;
                            let n = unloading::length(&a)?;
                            let formula = if i < s {
                                ((m + 1) * (m + 2) / 2) as u64 + (2 * i + j) as u64 - s as u64
                            } else {
                                ((m + 1) * (m + 2) / 2) as u64 + 3 * (i - s) as u64 + (j + s) as u64
                            };
                            if unloading::length(&b)? != n || formula != n {
                                rep.length_identity_counterexamples.push((s, m, i, j));
                            }
                        }
                    }
                }
            }
        }
        for i in s..=max_i {
            for j in 0..=max_j {
                rep.third_part_checked += 1;
                let mp = stratum_system(s + 1, 2 * s as i64 - 1, i + 1 - s, j + s - 2);
                let (consistent, form) = predicted_limit_form(s, i, j);
                let delta = trimmed(unloading::delta(&mp)?);
                if mp.is_consistent() != consistent || delta != trimmed(form) {
                    rep.third_part_counterexamples.push((s, i, j));
                }
            }
        }
    }
    rep.ok = rep.first_part_counterexamples.is_empty()
        && rep.third_part_counterexamples.is_empty()
        && rep.length_identity_counterexamples.is_empty()
        && rep.dropping > 0;
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitDimensionReport {
    pub s: usize,
    pub i: usize,
    pub j: usize,
    pub degree: usize,
    pub general: Vec<i64>,
    pub special: Vec<i64>,
    pub ell_general: i64,
    pub ell_special: i64,
    pub note: String,
    pub ok: bool,
}

/// `ell_d` at a general cluster of `U_s` with `(2s-2, 2^i, 1^j)` against a
/// general cluster of `U_{s+1}` with `(2s-1, 2^{i-s+1}, 1^{j+s-2})`; the
/// specialization can only raise the dimension.
pub fn limit_dimension_experiment(
    s: usize,
    i: usize,
    j: usize,
    d: usize,
    seed: u64,
    height: u32,
) -> Result<LimitDimensionReport> {
    if s < 2 || i < s || ((i + j) as i64) < (s * s) as i64 - 3 * s as i64 + 1 {
        return Err(Error::Precondition(format!(
            "need s >= 2, i >= s and i + j >= s^2 - 3s + 1 (s={s}, i={i}, j={j})"
        )));
    }
    let m = 2 * s as i64 - 2;
    let general = stratum_system(s, m, i, j);
    if !general.is_consistent() {
        return Err(Error::Precondition(format!(
            "{} is not consistent in U_{s}",
            general.mults
        )));
    }
    let special = stratum_system(s + 1, m + 1, i + 1 - s, j + s - 2);
    let eg = ell_general(std::slice::from_ref(&general), d, seed, height)?;
    let es = ell_general(
        std::slice::from_ref(&special),
        d,
        seed.wrapping_add(1),
        height,
    )?;
    Ok(LimitDimensionReport {
        s,
        i,
        j,
        degree: d,
        general: general.mults.0,
        special: special.mults.0,
        ell_general: eg,
        ell_special: es,
        note: "only the dimension inequality implied by the specialization is tested".into(),
        ok: eg <= es,
    })
}

/// [`limit_dimension_experiment`] on `count` admissible tuples with
/// `2 <= s <= 4`, in a degree at or just above the level of the general
/// system.
pub fn limit_dimension_sweep(
    count: usize,
    seed: u64,
    height: u32,
) -> Result<Vec<LimitDimensionReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tuples = Vec::with_capacity(count);
    while tuples.len() < count {
        let s = rng.gen_range(2..=4usize);
        let i = rng.gen_range(s..=s + 4);
        let j = rng.gen_range(0..=8usize);
        if (i + j) as i64 >= (s * s) as i64 - 3 * s as i64 + 1
            && stratum_system(s, 2 * s as i64 - 2, i, j).is_consistent()
        {
            let n = crate::plane_systems::n_of(2 * s as i64 - 2, i, j);
            let d = crate::plane_systems::level_floor(n) + rng.gen_range(0..=1usize);
            tuples.push((s, i, j, d));
        }
    }
    tuples
        .into_par_iter()
        .enumerate()
        .map(|(k, (s, i, j, d))| {
            limit_dimension_experiment(s, i, j, d, trial_seed(seed, k), height)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatFamilyPoint {
    pub position: String,
    pub colength: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatFamilyReport {
    pub mults: Vec<i64>,
    pub base_length: u64,
    pub points: Vec<FlatFamilyPoint>,
    pub ok: bool,
}

/// Adds a simple point `q` on the last exceptional divisor of a consistent
/// cluster, at `samples` free positions and at every satellite position;
/// the colength must be one more than that of the cluster each time.
pub fn one_more_point_experiment<R: Rng + ?Sized>(
    ec: &EmbeddedCluster,
    samples: usize,
    rng: &mut R,
    height: u32,
) -> Result<FlatFamilyReport> {
    if !ec.weighted.is_consistent() {
        return Err(Error::Precondition("the cluster must be consistent".into()));
    }
    let base_length = unloading::length(&ec.weighted)?;
    let r = ec.len();
    let mut positions: Vec<NextPoint> = Vec::new();
    for t in satellite_targets_after(ec.chain(), r) {
        positions.push(NextPoint::Satellite(t));
    }
    let last_is_satellite = ec.chain().is_satellite(r - 1);
    while positions.len() < samples {
        let l = random_q(rng, height);
        if last_is_satellite && l == Q::from_integer(0.into()) {
            continue;
        }
        positions.push(NextPoint::Free(l));
    }
    let mut points = Vec::with_capacity(positions.len());
    let mut ok = true;
    for q in &positions {
        let e = ec.push_point(q, 1)?;
        let c = colength(&e);
        ok &= c as u64 == base_length + 1;
        points.push(FlatFamilyPoint {
            position: match q {
                NextPoint::Free(l) => format!("free {}", format_q(l)),
                NextPoint::Satellite(t) => format!("satellite of p{}", t + 1),
            },
            colength: c,
        });
    }
    Ok(FlatFamilyReport {
        mults: ec.mults().to_vec(),
        base_length,
        points,
        ok,
    })
}

/// Satellite positions for a point appended after `p_{r-1}` (0-based).
fn satellite_targets_after(chain: &Chain, r: usize) -> Vec<usize> {
    let mut c = chain.clone();
    c.push(None);
    satellite_targets(&c, r)
}
