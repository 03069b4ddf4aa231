//! Flat tori T^k = R^k / Z^k under collapsed metrics.

pub mod enumerate;
pub mod geometry;
pub mod metric;
pub mod reduce;
pub mod scan;

pub use geometry::{covering_radius, dual_min, shortest_vector, CoveringRadius, ReducedLattice, ShortestVector};
pub use metric::{gram, CollapsedMetric, GramSource, MAX_DIM};
pub use scan::{
    convergent_subgrid, scan_collapse, scan_row, verify_th2, verify_th3, CollapseScanRow, EpsRange, Th2Report,
    Th3Report,
};
