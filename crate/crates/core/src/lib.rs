//! Co-density, the Gupta bound and a constructive decomposition of a
//! loopless multigraph into edge-disjoint edge covers.
//!
//! The pipeline in [`decompose`] regularizes the graph by splitting off
//! edges, punctures minimum optimal odd sets, edge-colors with `k+2` colors,
//! recolors the contracted graph so that the top two colors behave well at
//! the contracted vertices, lifts the coloring back, and finally augments
//! the first `k` color classes into edge covers. Every stage is checked at
//! runtime; [`oracle`] holds independent brute-force ground truth.

pub mod coloring;
pub mod decompose;
pub mod density;
pub mod graph;
pub mod lift;
pub mod oracle;
pub mod special;

pub use coloring::{Color, EdgeColoring};
pub use decompose::{decompose, CoverDecomposition, DecomposeOptions, FailureReport};
pub use density::{Codensity, GuptaBound, OddSetCertificate};
pub use graph::{EdgeId, Multigraph, VertexId};
