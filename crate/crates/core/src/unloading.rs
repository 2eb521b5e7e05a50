//! Unloading: the consistent representative of a weighted cluster and the
//! length of its cluster scheme.

use serde::Serialize;

use crate::cluster::{Multiplicities, WeightedCluster};
use crate::error::{Error, Result};

const ITERATION_CAP: usize = 100_000;

/// One application of [`unload_step`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnloadStep {
    /// 0-based point index.
    pub index: usize,
    pub amount: i64,
    pub before: Vec<i64>,
    pub after: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnloadingTrace {
    pub steps: Vec<UnloadStep>,
    pub final_cluster: WeightedCluster,
}

impl UnloadingTrace {
    pub fn final_mults(&self) -> &[i64] {
        self.final_cluster.mults.as_slice()
    }
}

/// Unloads once at `i`, which must have negative excess.
pub fn unload_step(wc: &WeightedCluster, i: usize) -> Result<WeightedCluster> {
    if i >= wc.len() {
        return Err(Error::Precondition(format!("no point p{}", i + 1)));
    }
    let rho = wc.excesses()[i];
    if rho >= 0 {
        return Err(Error::Precondition(format!(
            "excess at p{} is {rho}, nothing to unload",
            i + 1
        )));
    }
    let prox = wc.cluster.proximate_to(i);
    let q = prox.len() as i64;
    let n = (-rho + q) / (1 + q);
    let mut m = wc.mults.0.clone();
    m[i] += n;
    for j in prox {
        m[j] -= n;
    }
    Ok(WeightedCluster {
        cluster: wc.cluster.clone(),
        mults: Multiplicities(m),
    })
}

/// Amount `n` that [`unload_step`] would move at `i`.
pub fn unload_amount(wc: &WeightedCluster, i: usize) -> i64 {
    let rho = wc.excesses()[i];
    let q = wc.cluster.proximate_to(i).len() as i64;
    (-rho + q) / (1 + q)
}

/// Unloads at the smallest index with negative excess until consistent.
pub fn unload(wc: &WeightedCluster) -> Result<UnloadingTrace> {
    unload_with(wc, |rho| rho.iter().position(|&r| r < 0))
}

/// Unloading with a caller-chosen order. `pick` receives the excesses and
/// must return an index with negative excess, or `None` when there is none.
pub fn unload_with<P>(wc: &WeightedCluster, mut pick: P) -> Result<UnloadingTrace>
where
    P: FnMut(&[i64]) -> Option<usize>,
{
    wc.cluster.ensure_valid()?;
    let mut cur = wc.clone();
    let mut steps = Vec::new();
    loop {
        let rho = cur.excesses();
        let Some(i) = pick(&rho) else {
            if rho.iter().any(|&r| r < 0) {
                return Err(Error::Precondition(
                    "unloading order stopped before consistency".into(),
                ));
            }
            break;
        };
        if steps.len() >= ITERATION_CAP {
            return Err(Error::Internal(format!(
                "unloading did not terminate within {ITERATION_CAP} steps"
            )));
        }
        let amount = unload_amount(&cur, i);
        let next = unload_step(&cur, i)?;
        steps.push(UnloadStep {
            index: i,
            amount,
            before: cur.mults.0.clone(),
            after: next.mults.0.clone(),
        });
        cur = next;
    }
    Ok(UnloadingTrace {
        steps,
        final_cluster: cur,
    })
}

/// The consistent system `delta(m)`.
pub fn delta(wc: &WeightedCluster) -> Result<Vec<i64>> {
    Ok(unload(wc)?.final_cluster.mults.0)
}

/// Length of the cluster scheme: `sum m_i (m_i + 1) / 2` over `delta(m)`.
pub fn length(wc: &WeightedCluster) -> Result<u64> {
    let d = delta(wc)?;
    if let Some(m) = d.iter().find(|&&m| m < 0) {
        return Err(Error::Precondition(format!(
            "consistent form {} has negative multiplicity {m}",
            Multiplicities(d.clone())
        )));
    }
    Ok(d.iter().map(|&m| (m * (m + 1) / 2) as u64).sum())
}

/// Same consistent form, ignoring trailing zeros of each chain.
pub fn equivalent(a: &WeightedCluster, b: &WeightedCluster) -> Result<bool> {
    if a.cluster != b.cluster {
        return Err(Error::Precondition(
            "equivalence needs the same underlying cluster".into(),
        ));
    }
    let da = unload(a)?.final_cluster;
    let db = unload(b)?.final_cluster;
    let chains = a.cluster.root_count();
    Ok((0..chains)
        .all(|k| da.chain_component(k).mults.trimmed() == db.chain_component(k).mults.trimmed()))
}
