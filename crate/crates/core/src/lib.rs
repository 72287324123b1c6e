//! Principal Vietoris-Rips persistence sets of metric spaces.

pub mod bottleneck;
pub mod error;
pub mod graph;
pub mod metric;
pub mod oracle;
pub mod plot;
pub mod principal;
pub mod regions;
pub mod sampling;
pub mod spaces;
pub mod split;

pub use error::{Error, Result};
pub use metric::{DistanceMatrix, MetricStats, Violation};
