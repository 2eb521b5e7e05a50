//! Inputs shared by the benchmarks.

use infnear_core::arith::q_int;
use infnear_core::local_algebra::EmbeddedCluster;
use infnear_core::plane_systems::{place_general, SchemeUnion};
use infnear_core::synthesis::{synthesize, PlaneCurve, SingularitySpec};
use infnear_core::WeightedCluster;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` general double points.
pub fn double_points(count: usize, seed: u64) -> SchemeUnion {
    let clusters: Vec<WeightedCluster> = (0..count)
        .map(|_| WeightedCluster::chain(&[2], &[]))
        .collect();
    place_general(&clusters, &mut ChaCha8Rng::seed_from_u64(seed), 100).expect("general points")
}

/// The chain `(m, 2^i, 1^j)` in general position at the origin.
pub fn unibranched(m: i64, i: usize, j: usize, seed: u64) -> EmbeddedCluster {
    let mut mults = vec![m];
    mults.extend(std::iter::repeat_n(2, i));
    mults.extend(std::iter::repeat_n(1, j));
    let wc = WeightedCluster::chain(&mults, &[]);
    EmbeddedCluster::random(
        &wc,
        (q_int(0), q_int(0)),
        &mut ChaCha8Rng::seed_from_u64(seed),
        100,
    )
    .expect("free chains embed")
}

/// A sextic with three tacnodes and the union it was built from.
pub fn tacnodal_sextic(seed: u64) -> (PlaneCurve, SchemeUnion) {
    let spec = SingularitySpec::new(vec![2, 2, 2], Vec::new()).expect("positive orders");
    let s = synthesize(&spec, 6, seed, 100).expect("three tacnodes fit on a sextic");
    (s.curve, s.union)
}
