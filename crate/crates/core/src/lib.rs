//! Circular planar electrical networks: forward maps (Laplacian, Kron
//! reduction, effective resistance, circular split systems) and the inverse
//! pipeline (validation, planarity, order discovery, bridge detection, and
//! blob-by-blob graph reconstruction from strand matchings).

pub mod arrangement;
pub mod circular;
pub mod error;
pub mod generate;
pub mod kalmanson;
pub mod matrix;
pub mod medial;
pub mod network;
pub mod reconstruct;
pub mod response;
pub mod scalar;
pub mod splitsys;

pub use circular::{
    circular_minor, enumerate_circular_pairs, is_circular_pair, is_circular_planar, CircularOrder,
    CircularPair, Planarity,
};
pub use error::Error;
pub use kalmanson::{
    find_circular_order, is_kalmanson, split_decomposition, split_metric, OrderSearch,
    WeightedSplit, WeightedSplitSystem,
};
pub use matrix::SquareMatrix;
pub use medial::{medial_strand_matching, StrandMatching};
pub use network::{Edge, Network};
pub use reconstruct::{
    blob_submatrix, matching_to_graph, max_respected, num_terminals, reassemble,
    reconstruct_pipeline, strand_matching_from_response, verify_bridge, PipelineConfig,
    ReconstructionPlan,
};
pub use response::{
    m_from_w, restrict_resistance, validate_response, w_from_m, ResistanceMatrix, ResponseMatrix,
    ValidationReport,
};
pub use scalar::{Mode, Scalar};
pub use splitsys::{decompose, one_nested_obstruction, render_dot, splits_cross, BlobDecomposition};
