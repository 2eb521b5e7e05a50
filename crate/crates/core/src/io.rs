//! JSON formats for clusters, unions of embedded clusters, singularity
//! specifications and plane curves. Rationals are exact `"p/q"` strings.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::arith::{format_q, parse_q, Q};
use crate::cluster::{Chain, Cluster, Multiplicities, WeightedCluster};
use crate::error::{Error, Result};
use crate::local_algebra::EmbeddedCluster;
use crate::plane_systems::SchemeUnion;
use crate::poly::Poly2;
use crate::synthesis::{PlaneCurve, SingularitySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Root,
    Free,
    Satellite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub kind: PointKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    /// 1-based index of the second point the satellite is proximate to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_prox: Option<usize>,
    pub mult: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<[String; 2]>,
    pub points: Vec<PointJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterJson {
    pub chains: Vec<ChainJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub degree: usize,
    /// `"x^a*y^b"` to coefficient.
    pub monomials: BTreeMap<String, String>,
    pub chart: String,
}

pub const AFFINE_CHART: &str = "affine chart z = 1, coordinates (x, y)";

/// Deserializes `text`, reporting the field path of a schema violation.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse(format!("at {path}: {}", e.into_inner()))
    })
}

fn rational(s: &str, path: &str) -> Result<Q> {
    parse_q(s).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("at {path}: {m}")),
        other => other,
    })
}

struct ParsedChain {
    chain: Chain,
    mults: Vec<i64>,
    lambdas: Vec<Option<Q>>,
    base: Option<(Q, Q)>,
}

fn parse_chain(c: &ChainJson, k: usize) -> Result<ParsedChain> {
    let at = |i: usize, field: &str| format!("chains[{k}].points[{i}].{field}");
    if c.points.is_empty() {
        return Err(Error::Parse(format!("at chains[{k}].points: empty chain")));
    }
    let mut extra = Vec::with_capacity(c.points.len());
    let mut lambdas = Vec::with_capacity(c.points.len());
    for (i, p) in c.points.iter().enumerate() {
        match (i, p.kind) {
            (0, PointKind::Root) | (1.., PointKind::Free) | (2.., PointKind::Satellite) => {}
            (0, _) => {
                return Err(Error::Parse(format!(
                    "at {}: the first point must be the root",
                    at(0, "kind")
                )))
            }
            (_, PointKind::Root) => {
                return Err(Error::Parse(format!(
                    "at {}: only the first point is a root",
                    at(i, "kind")
                )))
            }
            (_, PointKind::Satellite) => {
                return Err(Error::Parse(format!(
                    "at {}: the second point cannot be a satellite",
                    at(i, "kind")
                )))
            }
        }
        if p.kind != PointKind::Satellite && p.extra_prox.is_some() {
            return Err(Error::Parse(format!(
                "at {}: only satellites have extra_prox",
                at(i, "extra_prox")
            )));
        }
        if p.kind != PointKind::Free && p.lambda.is_some() {
            return Err(Error::Parse(format!(
                "at {}: only free points have lambda",
                at(i, "lambda")
            )));
        }
        let e = match p.extra_prox {
            None if p.kind == PointKind::Satellite => {
                return Err(Error::Parse(format!(
                    "at {}: missing for a satellite",
                    at(i, "extra_prox")
                )))
            }
            None => None,
            // the target is 1-based and precedes the immediate predecessor
            Some(t) if t >= 1 && t < i => Some(t - 1),
            Some(t) => {
                return Err(Error::Parse(format!(
                    "at {}: {t} is not a point before p{}",
                    at(i, "extra_prox"),
                    i
                )))
            }
        };
        extra.push(e);
        lambdas.push(match &p.lambda {
            Some(s) => Some(rational(s, &at(i, "lambda"))?),
            None => None,
        });
    }
    let base = match &c.base {
        Some([x, y]) => Some((
            rational(x, &format!("chains[{k}].base[0]"))?,
            rational(y, &format!("chains[{k}].base[1]"))?,
        )),
        None => None,
    };
    Ok(ParsedChain {
        chain: Chain::from_extra_prox(extra),
        mults: c.points.iter().map(|p| p.mult).collect(),
        lambdas,
        base,
    })
}

/// A weighted cluster (a forest of chains); bases and directions, if
/// present, are checked for syntax and otherwise ignored.
pub fn parse_cluster(text: &str) -> Result<WeightedCluster> {
    let file: ClusterJson = parse_json(text)?;
    cluster_from_json(&file)
}

pub fn cluster_from_json(file: &ClusterJson) -> Result<WeightedCluster> {
    if file.chains.is_empty() {
        return Err(Error::Parse("at chains: no chains".into()));
    }
    let mut chains = Vec::new();
    let mut mults = Vec::new();
    for (k, c) in file.chains.iter().enumerate() {
        let p = parse_chain(c, k)?;
        chains.push(p.chain);
        mults.extend(p.mults);
    }
    let cluster = Cluster::new(chains);
    cluster.ensure_valid()?;
    WeightedCluster::new(cluster, Multiplicities(mults))
}

/// A union of embedded clusters: every chain needs a base point and every
/// free point a direction.
pub fn parse_union(text: &str) -> Result<SchemeUnion> {
    let file: ClusterJson = parse_json(text)?;
    union_from_json(&file)
}

pub fn union_from_json(file: &ClusterJson) -> Result<SchemeUnion> {
    let mut comps = Vec::with_capacity(file.chains.len());
    for (k, c) in file.chains.iter().enumerate() {
        let p = parse_chain(c, k)?;
        let Some(base) = p.base else {
            return Err(Error::Parse(format!("at chains[{k}].base: missing")));
        };
        let cluster = Cluster::single(p.chain);
        cluster.ensure_valid()?;
        let wc = WeightedCluster::new(cluster, Multiplicities(p.mults))?;
        comps.push(EmbeddedCluster::new(wc, base, p.lambdas)?);
    }
    SchemeUnion::new(comps)
}

fn chain_json(
    chain: &Chain,
    mults: &[i64],
    lambdas: Option<&[Option<Q>]>,
    base: Option<&(Q, Q)>,
) -> ChainJson {
    let points = (0..chain.len())
        .map(|i| {
            let kind = if i == 0 {
                PointKind::Root
            } else if chain.is_satellite(i) {
                PointKind::Satellite
            } else {
                PointKind::Free
            };
            PointJson {
                kind,
                lambda: lambdas.and_then(|l| l[i].as_ref()).map(format_q),
                extra_prox: chain.extra_prox(i).map(|t| t + 1),
                mult: mults[i],
            }
        })
        .collect();
    ChainJson {
        base: base.map(|(x, y)| [format_q(x), format_q(y)]),
        points,
    }
}

pub fn cluster_to_json(wc: &WeightedCluster) -> ClusterJson {
    let offsets = wc.cluster.offsets();
    let chains = wc
        .cluster
        .chains()
        .iter()
        .zip(offsets)
        .map(|(c, o)| chain_json(c, &wc.mults.0[o..o + c.len()], None, None))
        .collect();
    ClusterJson { chains }
}

pub fn union_to_json(z: &SchemeUnion) -> ClusterJson {
    let chains = z
        .components
        .iter()
        .map(|ec| chain_json(ec.chain(), ec.mults(), Some(&ec.lambdas), Some(&ec.base)))
        .collect();
    ClusterJson { chains }
}

pub fn parse_spec(text: &str) -> Result<SingularitySpec> {
    let s: SingularitySpec = parse_json(text)?;
    SingularitySpec::new(s.tacnodes, s.cusps)
}

fn monomial_key(a: usize, b: usize) -> String {
    format!("x^{a}*y^{b}")
}

fn parse_monomial_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("at monomials.{key}: expected \"x^a*y^b\""));
    let (x, y) = key.split_once('*').ok_or_else(bad)?;
    let a = x
        .strip_prefix("x^")
        .ok_or_else(bad)?
        .parse()
        .map_err(|_| bad())?;
    let b = y
        .strip_prefix("y^")
        .ok_or_else(bad)?
        .parse()
        .map_err(|_| bad())?;
    Ok((a, b))
}

pub fn curve_to_json(c: &PlaneCurve) -> CurveJson {
    CurveJson {
        degree: c.degree,
        monomials: c
            .poly
            .terms()
            .map(|(a, b, q)| (monomial_key(a, b), format_q(q)))
            .collect(),
        chart: AFFINE_CHART.to_string(),
    }
}

pub fn parse_curve(text: &str) -> Result<PlaneCurve> {
    let file: CurveJson = parse_json(text)?;
    if file.chart != AFFINE_CHART {
        return Err(Error::Parse(format!(
            "at chart: unsupported chart {:?}",
            file.chart
        )));
    }
    let mut terms = Vec::with_capacity(file.monomials.len());
    for (k, v) in &file.monomials {
        let (a, b) = parse_monomial_key(k)?;
        terms.push((a, b, rational(v, &format!("monomials.{k}"))?));
    }
    let curve = PlaneCurve::new(Poly2::from_terms(terms))?;
    if curve.degree != file.degree {
        return Err(Error::Parse(format!(
            "at degree: declared {} but the equation has degree {}",
            file.degree, curve.degree
        )));
    }
    Ok(curve)
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q_int;

    #[test]
    fn single_point() {
        let wc = parse_cluster(r#"{"chains":[{"points":[{"kind":"root","mult":3}]}]}"#).unwrap();
        assert_eq!(wc.len(), 1);
        assert_eq!(wc.mults.0, vec![3]);
    }

    #[test]
    fn cluster_round_trip() {
        let wc = WeightedCluster::chain(&[4, 2, 1, 1, 1], &[(3, 1)]);
        let text = to_pretty(&cluster_to_json(&wc));
        assert_eq!(parse_cluster(&text).unwrap(), wc);
        assert!(text.contains("\"extra_prox\": 2"));
    }

    #[test]
    fn union_round_trip() {
        let a = EmbeddedCluster::free_chain(&[2, 2], (q_int(0), q_int(0)));
        let wc = WeightedCluster::chain(&[2, 1, 1], &[(2, 0)]);
        let b = EmbeddedCluster::new(
            wc,
            (q_int(1), Q::new(1.into(), 3.into())),
            vec![None, Some(q_int(5)), None],
        )
        .unwrap();
        let z = SchemeUnion::new(vec![a, b]).unwrap();
        let text = to_pretty(&union_to_json(&z));
        assert_eq!(parse_union(&text).unwrap(), z);
    }

    #[test]
    fn rejects() {
        let zero_den = r#"{"chains":[{"base":["0","0"],"points":[{"kind":"root","mult":2},{"kind":"free","lambda":"1/0","mult":1}]}]}"#;
        let e = parse_union(zero_den).unwrap_err();
        assert!(e.to_string().contains("points[1].lambda"), "{e}");
        let dup = r#"{"chains":[{"base":["0","0"],"points":[{"kind":"root","mult":2}]},{"base":["0","0"],"points":[{"kind":"root","mult":1}]}]}"#;
        assert!(parse_union(dup).is_err());
        let unreduced = r#"{"chains":[{"base":["2/4","0"],"points":[{"kind":"root","mult":2}]}]}"#;
        assert!(parse_union(unreduced).is_err());
        let no_base = r#"{"chains":[{"points":[{"kind":"root","mult":2}]}]}"#;
        assert!(parse_union(no_base).is_err());
        let unknown = r#"{"chains":[{"points":[{"kind":"root","mult":2,"weight":1}]}]}"#;
        assert!(parse_cluster(unknown).is_err());
        let bad_sat = r#"{"chains":[{"points":[{"kind":"root","mult":2},{"kind":"free","mult":1},{"kind":"satellite","extra_prox":2,"mult":1}]}]}"#;
        assert!(parse_cluster(bad_sat).is_err());
        let wrong_type = r#"{"chains":[{"points":[{"kind":"root","mult":"two"}]}]}"#;
        let e = parse_cluster(wrong_type).unwrap_err();
        assert!(e.to_string().contains("chains[0].points[0].mult"), "{e}");
    }

    #[test]
    fn curve_round_trip() {
        let p = Poly2::from_terms([(0, 2, q_int(1)), (4, 0, q_int(-1)), (1, 1, q_int(3))]);
        let c = PlaneCurve::new(p).unwrap();
        let text = to_pretty(&curve_to_json(&c));
        assert_eq!(parse_curve(&text).unwrap(), c);
        let spec = parse_spec(r#"{"tacnodes":[2,2,2]}"#).unwrap();
        assert_eq!(spec.weight(), 6);
        assert!(parse_spec(r#"{"tacnodes":[0]}"#).is_err());
    }
}
