//! Maximal rank of unions of unibranched schemes `(m, 2^i, 1^j)`: the
//! level-`d` vanishing statements, the general theorem with its two
//! exceptional families, and `D_k` clusters.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{Chain, Cluster, Multiplicities, WeightedCluster};
use crate::error::Result;
use crate::plane_systems::{ell_general, forms, max_rank_general, n_of, MaxRankReport};
use crate::specialization::stratum_system;
use crate::synthesis::dk_cluster;

/// The vanishing statements for a level-`d` system `(m, 2^i, 1^j)`
/// consistent in `U_s`: under each set of hypotheses there is no curve of
/// degree `d` through a general such cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LevelStatement {
    /// `i = 0` and `s <= m + 1`.
    OnlySimplePoints,
    /// `2i <= m < 2i + j`.
    FewDoublePoints,
    /// `d = m + 1` and `m >= 2i - 2`.
    LineSplitsOff,
    /// `2i <= m < d`.
    FewDoublesHighDegree,
    /// `i <= m < d` and `4(i + j) >= m^2 - 2m - 4`.
    ManySimplePoints,
}

impl LevelStatement {
    pub const ALL: [LevelStatement; 5] = [
        LevelStatement::OnlySimplePoints,
        LevelStatement::FewDoublePoints,
        LevelStatement::LineSplitsOff,
        LevelStatement::FewDoublesHighDegree,
        LevelStatement::ManySimplePoints,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LevelStatement::OnlySimplePoints => "only-simple-points",
            LevelStatement::FewDoublePoints => "few-double-points",
            LevelStatement::LineSplitsOff => "line-splits-off",
            LevelStatement::FewDoublesHighDegree => "few-doubles-high-degree",
            LevelStatement::ManySimplePoints => "many-simple-points",
        }
    }

    /// The specific hypotheses (level and consistency are checked apart).
    pub fn applies(self, s: usize, m: i64, i: usize, j: usize, d: usize) -> bool {
        let (i, j, d) = (i as i64, j as i64, d as i64);
        match self {
            LevelStatement::OnlySimplePoints => i == 0 && s as i64 <= m + 1,
            LevelStatement::FewDoublePoints => 2 * i <= m && 2 * i + j > m,
            LevelStatement::LineSplitsOff => d == m + 1 && m >= 2 * i - 2,
            LevelStatement::FewDoublesHighDegree => 2 * i <= m && d > m,
            LevelStatement::ManySimplePoints => i <= m && d > m && 4 * (i + j) >= m * m - 2 * m - 4,
        }
    }
}

/// A level-`d` tuple `(s, m, i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelTuple {
    pub s: usize,
    pub m: i64,
    pub i: usize,
    pub j: usize,
    pub d: usize,
}

/// All level tuples with `1 <= d <= max_d`, consistent in `U_s`
/// (`1 <= s <= m + 1`), satisfying the hypotheses of `statement`.
pub fn level_tuples(statement: LevelStatement, max_d: usize) -> Vec<LevelTuple> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        let n = forms(d) as u64;
        for m in 0..=(d as i64 + 1) {
            let base = (m * (m + 1) / 2) as u64;
            if base > n {
                break;
            }
            for i in 0..=((n - base) / 3) as usize {
                let j = (n - base - 3 * i as u64) as usize;
                debug_assert_eq!(n_of(m, i, j), n);
                for s in 1..=(m as usize + 1) {
                    if statement.applies(s, m, i, j, d)
                        && stratum_system(s.max(1), m, i, j).is_consistent()
                    {
                        out.push(LevelTuple { s, m, i, j, d });
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    pub tuple: LevelTuple,
    pub ell: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub statement: &'static str,
    pub eligible: usize,
    pub checks: Vec<LevelCheck>,
    pub ok: bool,
}

/// `ell_d = -1` on `count` tuples drawn from the eligible ones.
pub fn check_level_statement(
    statement: LevelStatement,
    max_d: usize,
    count: usize,
    seed: u64,
    height: u32,
) -> Result<LevelReport> {
    let mut tuples = level_tuples(statement, max_d);
    let eligible = tuples.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tuples.shuffle(&mut rng);
    tuples.truncate(count);
    let checks: Vec<LevelCheck> = tuples
        .par_iter()
        .enumerate()
        .map(|(k, t)| {
            let wc = stratum_system(t.s, t.m, t.i, t.j);
            let ell = ell_general(&[wc], t.d, seed.wrapping_add(k as u64), height)?;
            Ok(LevelCheck {
                tuple: *t,
                ell,
                ok: ell == -1,
            })
        })
        .collect::<Result<_>>()?;
    let ok = !checks.is_empty() && checks.iter().all(|c| c.ok);
    Ok(LevelReport {
        statement: statement.name(),
        eligible,
        checks,
        ok,
    })
}

/// A union of `(m, 2^{i_1}, 1^{j_1})` on `U_s` with free chains
/// `(2^{i_k}, 1^{j_k})` at other points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankParameters {
    pub m: i64,
    pub s: usize,
    /// `(i_k, j_k)`; the first entry belongs to the point of multiplicity `m`.
    pub parts: Vec<(usize, usize)>,
}

impl RankParameters {
    pub fn doubles(&self) -> usize {
        self.parts.iter().map(|p| p.0).sum()
    }

    pub fn simples(&self) -> usize {
        self.parts.iter().map(|p| p.1).sum()
    }

    pub fn length(&self) -> u64 {
        n_of(self.m, self.doubles(), self.simples())
    }

    pub fn is_exception(&self) -> bool {
        let (i, j) = (self.doubles(), self.simples());
        j == 0 && ((self.m == 2 && i == 4) || (self.m == 4 && i == 6))
    }

    /// Hypotheses of the theorem, the two exceptions included.
    pub fn in_range(&self) -> bool {
        let (i, j, m) = (self.doubles() as i64, self.simples() as i64, self.m);
        let first = self.parts[0];
        m >= (self.s as i64 + i).min(2 * self.s as i64)
            && 3 * i + j >= 2 * m + 3
            && 4 * j >= m * m - 4 * m - 6
            && self.s <= 1 + first.0 + first.1
            && self.parts[1..].iter().all(|p| p.0 + p.1 > 0)
    }

    pub fn clusters(&self) -> Vec<WeightedCluster> {
        let (i1, j1) = self.parts[0];
        let first = Multiplicities::m2i1j(self.m, i1, j1);
        let r = first.len();
        let mut out =
            vec![
                WeightedCluster::new(Cluster::single(Chain::stratum(r, self.s, 1)), first)
                    .expect("strata are valid clusters"),
            ];
        for &(i, j) in &self.parts[1..] {
            let mut m = vec![2i64; i];
            m.extend(std::iter::repeat_n(1, j));
            out.push(WeightedCluster::chain(&m, &[]));
        }
        out
    }
}

/// Random parameters within the hypotheses, outside the exceptions, with
/// `m <= max_m` and length at most `max_length`.
pub fn sample_rank_parameters<R: Rng + ?Sized>(
    rng: &mut R,
    max_m: i64,
    max_length: u64,
) -> RankParameters {
    loop {
        let m = rng.gen_range(1..=max_m);
        let s = rng.gen_range(1..=(m as usize / 2 + 1).max(1));
        let rho = rng.gen_range(1..=4usize);
        let mut parts = Vec::with_capacity(rho);
        for k in 0..rho {
            let i = rng.gen_range(0..=6usize);
            let j = rng.gen_range(0..=if k == 0 { 8usize } else { 4 });
            parts.push((i, j));
        }
        let p = RankParameters { m, s, parts };
        if p.in_range() && !p.is_exception() && p.length() <= max_length {
            return p;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankCase {
    pub parameters: RankParameters,
    pub length: u64,
    pub report: MaxRankReport,
    pub exception: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankSweepReport {
    pub cases: Vec<RankCase>,
    pub ok: bool,
}

fn run_case(p: RankParameters, seed: u64, height: u32) -> Result<RankCase> {
    let report = max_rank_general(&p.clusters(), seed, height, None)?;
    let exception = p.is_exception();
    let ok = if exception {
        report.failing.len() == 1 && report.defect_at(report.failing[0]) == Some(1)
    } else {
        report.ok
    };
    Ok(RankCase {
        length: p.length(),
        parameters: p,
        report,
        exception,
        ok,
    })
}

/// Maximal rank at general position for `count` random parameter sets.
pub fn rank_sweep(
    count: usize,
    seed: u64,
    height: u32,
    max_m: i64,
    max_length: u64,
) -> Result<RankSweepReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<RankParameters> = (0..count)
        .map(|_| sample_rank_parameters(&mut rng, max_m, max_length))
        .collect();
    let cases: Vec<RankCase> = params
        .into_par_iter()
        .enumerate()
        .map(|(k, p)| run_case(p, seed.wrapping_add(1000 + k as u64), height))
        .collect::<Result<_>>()?;
    let ok = cases.iter().all(|c| c.ok);
    Ok(RankSweepReport { cases, ok })
}

/// Configurations of the two exceptional families: five double points and
/// a quadruple point with six double points, proper or infinitely near.
pub fn exceptional_family_members() -> Vec<RankParameters> {
    vec![
        RankParameters {
            m: 2,
            s: 1,
            parts: vec![(0, 0), (1, 0), (1, 0), (1, 0), (1, 0)],
        },
        RankParameters {
            m: 2,
            s: 1,
            parts: vec![(4, 0)],
        },
        RankParameters {
            m: 2,
            s: 1,
            parts: vec![(1, 0), (2, 0), (1, 0)],
        },
        RankParameters {
            m: 2,
            s: 1,
            parts: vec![(2, 0), (2, 0)],
        },
        RankParameters {
            m: 4,
            s: 1,
            parts: vec![(0, 0), (1, 0), (1, 0), (1, 0), (1, 0), (1, 0), (1, 0)],
        },
        RankParameters {
            m: 4,
            s: 2,
            parts: vec![(2, 0), (2, 0), (2, 0)],
        },
        RankParameters {
            m: 4,
            s: 2,
            parts: vec![(6, 0)],
        },
    ]
}

pub fn exceptional_families(seed: u64, height: u32) -> Result<RankSweepReport> {
    let cases: Vec<RankCase> = exceptional_family_members()
        .into_par_iter()
        .enumerate()
        .map(|(k, p)| run_case(p, seed.wrapping_add(k as u64), height))
        .collect::<Result<_>>()?;
    let ok = cases.iter().all(|c| c.ok);
    Ok(RankSweepReport { cases, ok })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DkCase {
    pub k: usize,
    pub mults: Vec<i64>,
    pub report: MaxRankReport,
    pub expected_ok: bool,
    pub ok: bool,
}

/// The `D_k` cluster at a general point; maximal rank is expected for all
/// `k` except 6 and 7, where the defect is one.
pub fn dk_maximal_rank(k: usize, seed: u64, height: u32) -> Result<DkCase> {
    let wc = dk_cluster(k)?;
    let report = max_rank_general(std::slice::from_ref(&wc), seed, height, None)?;
    let expected_ok = !(k == 6 || k == 7);
    let ok = if expected_ok {
        report.ok
    } else {
        report.failing.len() == 1 && report.defect_at(report.failing[0]) == Some(1)
    };
    Ok(DkCase {
        k,
        mults: wc.mults.0,
        report,
        expected_ok,
        ok,
    })
}
