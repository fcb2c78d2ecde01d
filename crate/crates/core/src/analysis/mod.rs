//! State Comparison Map: per-cell density matrices, flattened and projected
//! onto their two leading principal components.

mod comparison;
mod eigen;
mod pca;
mod silhouette;

pub use comparison::{comparison_map, flatten_density, ComparisonMap, ComparisonPoint, FlattenedState};
pub use eigen::symmetric_eigen;
pub use pca::{fit_pca, PcaModel};
pub use silhouette::separation_score;
