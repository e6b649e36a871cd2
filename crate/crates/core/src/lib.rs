//! Synthetic social-contact networks and graph-complexity comparison.

pub mod analysis;
pub mod contact;
pub mod error;
pub mod features;
pub mod graph;
pub mod measures;
pub mod rng;
pub mod scalar;
pub mod stylized;
pub mod synthpop;

pub use error::{Error, Result};
pub use graph::{Family, Graph, GraphLabel};
pub use scalar::Scalar;

/// Double-precision instantiations of the generic numeric types.
pub type NodeMeasure = measures::NodeMeasure<f64>;
pub type FeatureVector = features::FeatureVector<f64>;
pub type ExtractedFeatures = features::ExtractedFeatures<f64>;
pub type FeatureMatrix = analysis::FeatureMatrix<f64>;
pub type AnalysisResult = analysis::AnalysisResult<f64>;
pub type Tensor = synthpop::Tensor<f64>;
pub type MarginalSet = synthpop::MarginalSet<f64>;
