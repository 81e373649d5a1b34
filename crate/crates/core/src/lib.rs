//! Clustering of ultra-dense wireless networks into non-overlapping
//! clusters with balanced uplink sum capacity.
//!
//! The crate simulates base stations and users in the plane, estimates each
//! cluster's uplink sum capacity under path loss and Rayleigh fading, and
//! builds three decompositions: cellular (one base station per cluster),
//! BS-clustering (k-means++ over base stations) and the capacity-balancing
//! refinement, which grows the weakest cluster and sheds the outermost node
//! of the strongest until their capacity gap falls under a threshold.

pub mod capacity;
pub mod channel;
pub mod clustering;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod placement;
pub mod seed;

pub use capacity::{CapacityEstimate, NetworkReport};
pub use channel::FadingBatch;
pub use error::{Error, Result};
pub use model::{ClusterView, Network, NodeKind, Partition, PhysicalParams, Position};
pub use placement::{PlacementSpec, SpatialDistribution};
