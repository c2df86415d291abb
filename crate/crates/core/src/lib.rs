//! Range-based localization for wireless sensor networks.
//!
//! Each anchor observation defines a circle (anchor position, estimated
//! distance). Pairwise circle intersections are filtered by one of three
//! clustering methods and the surviving points are averaged into a position
//! estimate. The [`harness`] module runs the Monte-Carlo error sweep over
//! random Unit Disc Graph networks built by [`network`].

pub mod clustering;
mod error;
pub mod geometry;
pub mod harness;
pub mod network;
pub mod ranging;
pub mod rng;

pub use clustering::{Cluster, ClusterOptions, FavourRule, Method, PairPolicy};
pub use error::{Error, Result};
pub use geometry::{Circle, IntersectionResult, Point2};
pub use harness::{NodeResult, SweepConfig, SweepRecord};
pub use network::{NetworkConfig, NetworkTopology};
pub use ranging::{ErrorKind, ErrorModel, ShadowingParams, Sign};
