//! Clusters of infinitely near points in the plane, unloading, local
//! conditions and linear systems of plane curves through weighted clusters.

pub mod arith;
pub mod cluster;
pub mod error;
pub mod io;
pub mod linalg;
pub mod local_algebra;
pub mod maximal_rank;
pub mod modp;
pub mod plane_systems;
pub mod poly;
pub mod specialization;
pub mod synthesis;
pub mod unloading;
pub mod upoly;

pub use arith::{Fp, Scalar, Q};
pub use cluster::{Chain, Cluster, Multiplicities, WeightedCluster};
pub use error::{Error, Result};
