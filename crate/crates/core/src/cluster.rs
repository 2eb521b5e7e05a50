//! Unibranched clusters, forests of them, and their proximity structure.
//!
//! Indices in the Rust API are 0-based. Text renderings and the JSON files
//! use 1-based point labels (`p1`, `p2`, ...), matching the usual notation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A unibranched chain `p_1, ..., p_r`: each point lies on the exceptional
/// divisor of the previous one. `extra_prox[i] = Some(t)` marks `p_i` as a
/// satellite, proximate to `p_{i-1}` and to `p_t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    extra_prox: Vec<Option<usize>>,
}

impl Chain {
    /// `r` points, all free.
    pub fn free(r: usize) -> Self {
        Chain {
            extra_prox: vec![None; r],
        }
    }

    /// Free chain with the listed `(point, target)` satellites (0-based).
    pub fn with_satellites(r: usize, satellites: &[(usize, usize)]) -> Self {
        let mut c = Chain::free(r);
        for &(i, t) in satellites {
            c.extra_prox[i] = Some(t);
        }
        c
    }

    pub fn from_extra_prox(extra_prox: Vec<Option<usize>>) -> Self {
        Chain { extra_prox }
    }

    /// Cluster of the open stratum `U_{s,t}` on `r` points (1-based `s > t`):
    /// `p_i` is proximate to `p_t` for `s >= i > t`, and nothing else beyond
    /// the chain proximities.
    pub fn stratum(r: usize, s: usize, t: usize) -> Self {
        let mut c = Chain::free(r);
        for i in (t + 2)..=s.min(r) {
            c.extra_prox[i - 1] = Some(t - 1);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.extra_prox.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extra_prox.is_empty()
    }

    pub fn extra_prox(&self, i: usize) -> Option<usize> {
        self.extra_prox[i]
    }

    pub fn set_extra_prox(&mut self, i: usize, t: Option<usize>) {
        self.extra_prox[i] = t;
    }

    pub fn is_satellite(&self, i: usize) -> bool {
        self.extra_prox[i].is_some()
    }

    /// `p_j` proximate to `p_i` (0-based, within this chain).
    pub fn is_proximate(&self, j: usize, i: usize) -> bool {
        j == i + 1 || (j > i + 1 && self.extra_prox[j] == Some(i))
    }

    /// Points proximate to `p_i`.
    pub fn proximate_to(&self, i: usize) -> Vec<usize> {
        (i + 1..self.len())
            .filter(|&j| self.is_proximate(j, i))
            .collect()
    }

    /// Points `p_i` is proximate to.
    pub fn proximate_targets(&self, i: usize) -> Vec<usize> {
        let mut v = Vec::new();
        if i > 0 {
            v.push(i - 1);
        }
        if let Some(t) = self.extra_prox[i] {
            v.push(t);
        }
        v
    }

    /// Appends a point at the end.
    pub fn push(&mut self, extra_prox: Option<usize>) {
        self.extra_prox.push(extra_prox);
    }

    pub fn truncate(&mut self, r: usize) {
        self.extra_prox.truncate(r);
    }
}

/// A single violated rule found by [`Cluster::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    EmptyChain {
        chain: usize,
    },
    RootProximate {
        chain: usize,
    },
    TargetOutOfRange {
        chain: usize,
        point: usize,
        target: usize,
    },
    UnsupportedSatellite {
        chain: usize,
        point: usize,
        target: usize,
    },
    NonContiguous {
        chain: usize,
        target: usize,
        point: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::EmptyChain { chain } => write!(f, "chain {} is empty", chain + 1),
            Violation::RootProximate { chain } => {
                write!(f, "chain {}: the root cannot be proximate to a point", chain + 1)
            }
            Violation::TargetOutOfRange { chain, point, target } => write!(
                f,
                "chain {}: p{} cannot be a satellite of p{}",
                chain + 1,
                point + 1,
                target + 1
            ),
            Violation::UnsupportedSatellite { chain, point, target } => write!(
                f,
                "chain {}: p{} proximate to p{}, but no earlier exceptional divisor through p{} supports it",
                chain + 1,
                point + 1,
                target + 1,
                point
            ),
            Violation::NonContiguous { chain, target, point } => write!(
                f,
                "chain {}: points proximate to p{} do not form a contiguous run (gap before p{})",
                chain + 1,
                target + 1,
                point + 1
            ),
        }
    }
}

/// A forest of unibranched chains at distinct points. Proximities never
/// cross chains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cluster {
    chains: Vec<Chain>,
}

impl Cluster {
    pub fn new(chains: Vec<Chain>) -> Self {
        Cluster { chains }
    }

    pub fn single(chain: Chain) -> Self {
        Cluster {
            chains: vec![chain],
        }
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn chains_mut(&mut self) -> &mut [Chain] {
        &mut self.chains
    }

    /// Total number of points.
    pub fn len(&self) -> usize {
        self.chains.iter().map(Chain::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn root_count(&self) -> usize {
        self.chains.len()
    }

    /// Global index of the first point of each chain.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.chains.len());
        let mut acc = 0;
        for c in &self.chains {
            off.push(acc);
            acc += c.len();
        }
        off
    }

    /// `(chain, local index)` of a global index.
    pub fn locate(&self, global: usize) -> (usize, usize) {
        let mut g = global;
        for (k, c) in self.chains.iter().enumerate() {
            if g < c.len() {
                return (k, g);
            }
            g -= c.len();
        }
        panic!("point index {global} out of range");
    }

    /// Global indices of the points proximate to global point `i`.
    pub fn proximate_to(&self, i: usize) -> Vec<usize> {
        let (k, li) = self.locate(i);
        let off = self.offsets()[k];
        self.chains[k]
            .proximate_to(li)
            .into_iter()
            .map(|j| j + off)
            .collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (k, c) in self.chains.iter().enumerate() {
            if c.is_empty() {
                out.push(Violation::EmptyChain { chain: k });
                continue;
            }
            if c.extra_prox[0].is_some() {
                out.push(Violation::RootProximate { chain: k });
            }
            for i in 1..c.len() {
                let Some(t) = c.extra_prox[i] else { continue };
                if t + 1 >= i {
                    out.push(Violation::TargetOutOfRange {
                        chain: k,
                        point: i,
                        target: t,
                    });
                    continue;
                }
                let supported = t + 2 == i || c.extra_prox[i - 1] == Some(t);
                if !supported {
                    out.push(Violation::UnsupportedSatellite {
                        chain: k,
                        point: i,
                        target: t,
                    });
                }
            }
            // runs {j : extra_prox(j) = t} must be t+2, t+3, ... without gaps
            for t in 0..c.len() {
                let run: Vec<usize> = (0..c.len())
                    .filter(|&j| c.extra_prox[j] == Some(t))
                    .collect();
                let mut expect = t + 2;
                for j in run {
                    if j != expect {
                        out.push(Violation::NonContiguous {
                            chain: k,
                            target: t,
                            point: j,
                        });
                        break;
                    }
                    expect += 1;
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCluster(
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    pub fn proximity_matrix(&self) -> Result<ProximityMatrix> {
        self.ensure_valid()?;
        let n = self.len();
        let mut entries = vec![vec![0i64; n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = 1;
        }
        for i in 0..n {
            for j in self.proximate_to(i) {
                entries[j][i] = -1;
            }
        }
        Ok(ProximityMatrix { entries })
    }

    /// Whether a single-chain cluster lies in the open stratum `U_{s,t}`
    /// (1-based `s > t >= 1`).
    pub fn matches_stratum(&self, s: usize, t: usize) -> bool {
        if self.chains.len() != 1 || t == 0 || s <= t {
            return false;
        }
        let c = &self.chains[0];
        if s > c.len() {
            return false;
        }
        (0..c.len()).all(|i| {
            let one_based = i + 1;
            let expected = if one_based > t + 1 && one_based <= s {
                Some(t - 1)
            } else {
                None
            };
            c.extra_prox[i] == expected
        })
    }
}

/// Lower unitriangular matrix with `P[j][i] = -1` iff `p_j` is proximate to `p_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProximityMatrix {
    pub entries: Vec<Vec<i64>>,
}

impl ProximityMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// `P^T m`.
    pub fn transpose_apply(&self, m: &[i64]) -> Vec<i64> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[j][i] * m[j]).sum())
            .collect()
    }
}

/// Integer multiplicities, one per point. Entries may be zero or negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multiplicities(pub Vec<i64>);

impl Multiplicities {
    /// Expands run-length notation, e.g. `[(3, 1), (2, 4), (1, 2)]` is `(3, 2^4, 1^2)`.
    pub fn expand(runs: &[(i64, usize)]) -> Self {
        Multiplicities(
            runs.iter()
                .flat_map(|&(m, k)| std::iter::repeat_n(m, k))
                .collect(),
        )
    }

    /// The system `(m, 2^i, 1^j)`.
    pub fn m2i1j(m: i64, i: usize, j: usize) -> Self {
        Multiplicities::expand(&[(m, 1), (2, i), (1, j)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// `sum m_i (m_i + 1) / 2`.
    pub fn naive_length(&self) -> i64 {
        self.0.iter().map(|&m| m * (m + 1) / 2).sum()
    }

    /// Drops trailing zeros.
    pub fn trimmed(&self) -> Vec<i64> {
        let mut v = self.0.clone();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }
}

impl fmt::Display for Multiplicities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

/// A cluster together with a system of multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightedCluster {
    pub cluster: Cluster,
    pub mults: Multiplicities,
}

impl WeightedCluster {
    pub fn new(cluster: Cluster, mults: Multiplicities) -> Result<Self> {
        if cluster.len() != mults.len() {
            return Err(Error::InvalidCluster(format!(
                "{} points but {} multiplicities",
                cluster.len(),
                mults.len()
            )));
        }
        Ok(WeightedCluster { cluster, mults })
    }

    /// Single chain with the given satellites (0-based) and multiplicities.
    pub fn chain(mults: &[i64], satellites: &[(usize, usize)]) -> Self {
        WeightedCluster {
            cluster: Cluster::single(Chain::with_satellites(mults.len(), satellites)),
            mults: Multiplicities(mults.to_vec()),
        }
    }

    pub fn len(&self) -> usize {
        self.mults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }

    /// `rho_i = m_i - sum_{p_j prox p_i} m_j`.
    pub fn excesses(&self) -> Vec<i64> {
        let m = &self.mults.0;
        (0..m.len())
            .map(|i| {
                m[i] - self
                    .cluster
                    .proximate_to(i)
                    .iter()
                    .map(|&j| m[j])
                    .sum::<i64>()
            })
            .collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.excesses().iter().all(|&r| r >= 0)
    }

    /// Sub-cluster of one chain.
    pub fn chain_component(&self, k: usize) -> WeightedCluster {
        let off = self.cluster.offsets()[k];
        let c = self.cluster.chains()[k].clone();
        let n = c.len();
        WeightedCluster {
            cluster: Cluster::single(c),
            mults: Multiplicities(self.mults.0[off..off + n].to_vec()),
        }
    }
}

/// Output format for [`render_enriques`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramFormat {
    Ascii,
    Dot,
}

/// Deterministic Enriques diagram. In ASCII, `o` marks a free point (or a
/// root), `*` a satellite; the connector line above a node is `|` for a
/// free point and `:` for a satellite, and `~ pK` names the satellite's
/// second proximity target.
pub fn render_enriques(wc: &WeightedCluster, format: DiagramFormat) -> String {
    match format {
        DiagramFormat::Ascii => render_ascii(wc),
        DiagramFormat::Dot => render_dot(wc),
    }
}

fn render_ascii(wc: &WeightedCluster) -> String {
    let mut s = String::new();
    let offsets = wc.cluster.offsets();
    for (k, c) in wc.cluster.chains().iter().enumerate() {
        s.push_str(&format!("chain {}\n", k + 1));
        for i in 0..c.len() {
            let m = wc.mults.0[offsets[k] + i];
            if i > 0 {
                s.push_str(if c.is_satellite(i) { ":\n" } else { "|\n" });
            }
            match c.extra_prox(i) {
                Some(t) => s.push_str(&format!("* p{} [{}] ~ p{}\n", i + 1, m, t + 1)),
                None => s.push_str(&format!("o p{} [{}]\n", i + 1, m)),
            }
        }
    }
    s
}

fn render_dot(wc: &WeightedCluster) -> String {
    let mut s = String::from("digraph enriques {\n  rankdir=TB;\n");
    let offsets = wc.cluster.offsets();
    for (k, c) in wc.cluster.chains().iter().enumerate() {
        for i in 0..c.len() {
            let m = wc.mults.0[offsets[k] + i];
            let shape = if c.is_satellite(i) { "box" } else { "circle" };
            s.push_str(&format!(
                "  c{}p{} [label=\"p{}\\n{}\", shape={}];\n",
                k + 1,
                i + 1,
                i + 1,
                m,
                shape
            ));
        }
        for i in 1..c.len() {
            let style = if c.is_satellite(i) { "dashed" } else { "solid" };
            s.push_str(&format!(
                "  c{k}p{} -> c{k}p{} [style={style}];\n",
                i,
                i + 1,
                k = k + 1
            ));
            if let Some(t) = c.extra_prox(i) {
                s.push_str(&format!(
                    "  c{k}p{} -> c{k}p{} [style=dotted, constraint=false];\n",
                    t + 1,
                    i + 1,
                    k = k + 1
                ));
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Parses the ASCII rendering back into a weighted cluster.
pub fn parse_enriques_ascii(text: &str) -> Result<WeightedCluster> {
    let bad = |line: &str| Error::Parse(format!("unrecognized diagram line {line:?}"));
    let mut chains: Vec<Chain> = Vec::new();
    let mut mults = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if line.starts_with("chain") {
            chains.push(Chain::free(0));
            continue;
        }
        if line == "|" || line == ":" {
            continue;
        }
        let chain = chains.last_mut().ok_or_else(|| bad(line))?;
        let (marker, rest) = line.split_at(1);
        let mut parts = rest.split_whitespace();
        let label = parts.next().ok_or_else(|| bad(line))?;
        let idx: usize = label
            .strip_prefix('p')
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(line))?;
        if idx != chain.len() + 1 {
            return Err(bad(line));
        }
        let mult: i64 = parts
            .next()
            .and_then(|v| v.strip_prefix('[')?.strip_suffix(']')?.parse().ok())
            .ok_or_else(|| bad(line))?;
        let extra = match marker {
            "o" => None,
            "*" => {
                if parts.next() != Some("~") {
                    return Err(bad(line));
                }
                let t: usize = parts
                    .next()
                    .and_then(|v| v.strip_prefix('p')?.parse().ok())
                    .ok_or_else(|| bad(line))?;
                Some(t.checked_sub(1).ok_or_else(|| bad(line))?)
            }
            _ => return Err(bad(line)),
        };
        chain.push(extra);
        mults.push(mult);
    }
    WeightedCluster::new(Cluster::new(chains), Multiplicities(mults))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(Cluster::single(Chain::free(3)).is_valid());
        assert!(Cluster::single(Chain::with_satellites(3, &[(2, 0)])).is_valid());
        let broken = Cluster::single(Chain::with_satellites(4, &[(3, 0)]));
        let v = broken.validate();
        assert!(v.iter().any(|x| matches!(
            x,
            Violation::NonContiguous {
                target: 0,
                point: 3,
                ..
            }
        )));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::UnsupportedSatellite { point: 3, .. })));
    }

    #[test]
    fn validate_rejects_out_of_range_targets() {
        let c = Cluster::single(Chain::with_satellites(3, &[(1, 0)]));
        assert!(matches!(
            c.validate()[0],
            Violation::TargetOutOfRange {
                point: 1,
                target: 0,
                ..
            }
        ));
        let root = Cluster::single(Chain::from_extra_prox(vec![Some(0)]));
        assert!(root
            .validate()
            .contains(&Violation::RootProximate { chain: 0 }));
    }

    #[test]
    fn satellite_after_satellite() {
        // p3 prox p1, p4 prox p1 (U_4), and p5 prox p3 (E_3 direction)
        let c = Chain::with_satellites(5, &[(2, 0), (3, 0), (4, 2)]);
        assert!(Cluster::single(c).is_valid());
        // p5 prox p2 is not supported: p4 is not proximate to p2
        let c = Chain::with_satellites(5, &[(2, 0), (3, 0), (4, 1)]);
        assert!(!Cluster::single(c).is_valid());
    }

    #[test]
    fn proximity_matrix_examples() {
        let one = Cluster::single(Chain::free(1)).proximity_matrix().unwrap();
        assert_eq!(one.entries, vec![vec![1]]);
        let two = Cluster::single(Chain::free(2)).proximity_matrix().unwrap();
        assert_eq!(two.entries, vec![vec![1, 0], vec![-1, 1]]);
        let sat = Cluster::single(Chain::with_satellites(3, &[(2, 0)]))
            .proximity_matrix()
            .unwrap();
        assert_eq!(sat.entries[2], vec![-1, -1, 1]);
        assert!(Cluster::single(Chain::with_satellites(4, &[(3, 0)]))
            .proximity_matrix()
            .is_err());
    }

    #[test]
    fn excess_examples() {
        assert_eq!(WeightedCluster::chain(&[3], &[]).excesses(), vec![3]);
        assert_eq!(WeightedCluster::chain(&[1, 2], &[]).excesses(), vec![-1, 2]);
        assert_eq!(
            WeightedCluster::chain(&[2, 2, 2], &[(2, 0)]).excesses(),
            vec![-2, 0, 2]
        );
    }

    #[test]
    fn consistency_examples() {
        assert!(WeightedCluster::chain(&[2, 1], &[]).is_consistent());
        assert!(!WeightedCluster::chain(&[1, 2], &[]).is_consistent());
        assert!(!WeightedCluster::chain(&[2, 2, 2], &[(2, 0)]).is_consistent());
    }

    #[test]
    fn stratum_examples() {
        let plain = Cluster::single(Chain::free(4));
        assert!(plain.matches_stratum(2, 1));
        let u3 = Cluster::single(Chain::with_satellites(4, &[(2, 0)]));
        assert!(u3.matches_stratum(3, 1));
        let u4 = Cluster::single(Chain::with_satellites(4, &[(2, 0), (3, 0)]));
        assert!(!u4.matches_stratum(3, 1));
        assert!(u4.matches_stratum(4, 1));
        assert_eq!(
            Chain::stratum(4, 3, 1),
            Chain::with_satellites(4, &[(2, 0)])
        );
    }

    #[test]
    fn render_examples() {
        let single = WeightedCluster::chain(&[4], &[]);
        assert_eq!(
            render_enriques(&single, DiagramFormat::Ascii),
            "chain 1\no p1 [4]\n"
        );
        let tac = WeightedCluster::chain(&[2, 2], &[]);
        assert_eq!(
            render_enriques(&tac, DiagramFormat::Ascii),
            "chain 1\no p1 [2]\n|\no p2 [2]\n"
        );
        let cusp = WeightedCluster::chain(&[2, 1, 1], &[(2, 0)]);
        let text = render_enriques(&cusp, DiagramFormat::Ascii);
        assert!(text.ends_with(":\n* p3 [1] ~ p1\n"));
        let dot = render_enriques(&cusp, DiagramFormat::Dot);
        assert!(dot.contains("c1p2 -> c1p3 [style=dashed]"));
        assert!(dot.contains("c1p1 -> c1p3 [style=dotted"));
    }

    #[test]
    fn ascii_roundtrip_forest() {
        let wc = WeightedCluster::new(
            Cluster::new(vec![
                Chain::with_satellites(4, &[(2, 0), (3, 0)]),
                Chain::free(2),
            ]),
            Multiplicities(vec![5, 2, 2, 1, 2, 1]),
        )
        .unwrap();
        let text = render_enriques(&wc, DiagramFormat::Ascii);
        assert_eq!(parse_enriques_ascii(&text).unwrap(), wc);
    }
}
