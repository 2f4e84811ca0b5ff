//! edgeLBP: local binary pattern descriptors for relief patterns on
//! polygonal surface meshes, plus the retrieval measures used to compare
//! them.
//!
//! The pipeline runs curvature estimation ([`curvature`]), ring extraction
//! around every vertex ([`ring`]), code histograms ([`descriptor`]),
//! pairwise distances ([`similarity`]) and scoring against class labels
//! ([`retrieval`]).

pub mod curvature;
pub mod descriptor;
pub mod mesh;
pub mod retrieval;
pub mod ring;
pub mod shapes;
pub mod similarity;

pub use curvature::{estimate_principal_curvatures, CurvatureError, FieldKind, PrincipalCurvatures};
pub use descriptor::{
    compute_descriptor, Alpha, DescriptorError, DescriptorParams, EdgeLbpDescriptor, Histogram, RmaxRule,
};
pub use mesh::{load_mesh_auto, MeshError, SurfaceTessellation, VertexField};
pub use retrieval::{evaluate, GroundTruth, RetrievalError, RetrievalReport, TierImage};
pub use ring::{multi_ring, MultiRing, Ring, RingError, RingPoint};
pub use similarity::{distance_matrix, DistanceMatrix, Metric, SimilarityError};
