//! Feature-space comparison of graph families: standardization, K-Means,
//! two-component PCA and cluster/family agreement.

mod agreement;
mod kmeans;
mod matrix;
mod pca;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use agreement::{adjusted_rand_index, label_agreement, Agreement};
pub use kmeans::{kmeans, KMeansFit};
pub use matrix::{standardize, FeatureMatrix, Standardized};
pub use pca::{pca2, symmetric_eigen, Pca2};

use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Cluster count; defaults to the number of distinct families.
    pub k: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub standardize: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            k: None,
            seed: 0,
            restarts: 32,
            standardize: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult<T> {
    pub names: Vec<String>,
    pub k: usize,
    pub standardized: bool,
    /// Column names that had zero variance and were zeroed.
    pub zero_variance_columns: Vec<String>,
    pub assignments: Vec<usize>,
    /// Centroids in the clustered (possibly standardized) space.
    pub centroids: Vec<Vec<T>>,
    pub wcss: T,
    pub axes: [Vec<T>; 2],
    pub explained_variance: [T; 2],
    pub projection: Vec<[T; 2]>,
    pub pca_degenerate: bool,
    pub ari: f64,
    pub purity: std::collections::BTreeMap<crate::graph::Family, f64>,
    pub synthetic_in_real_cluster: Vec<(String, bool)>,
}

/// Clusters in full feature space, then projects to two dimensions.
pub fn analyze<T: Scalar>(m: &FeatureMatrix<T>, opts: &AnalysisOptions) -> Result<AnalysisResult<T>> {
    let (data, zero_variance) = if opts.standardize {
        let s = standardize(m)?;
        let zv = s.zero_variance.iter().map(|&j| m.columns[j].clone()).collect();
        (s.matrix, zv)
    } else {
        (m.clone(), Vec::new())
    };
    let k = opts
        .k
        .unwrap_or_else(|| m.labels.iter().map(|l| l.family).collect::<BTreeSet<_>>().len());
    let fit = kmeans(&data.rows, k, opts.seed, opts.restarts)?;
    let pca = pca2(&data.rows)?;
    let agreement = label_agreement(&fit.assignments, &m.labels)?;
    Ok(AnalysisResult {
        names: m.labels.iter().map(|l| l.name.clone()).collect(),
        k,
        standardized: opts.standardize,
        zero_variance_columns: zero_variance,
        assignments: fit.assignments,
        centroids: fit.centroids,
        wcss: fit.wcss,
        axes: pca.axes,
        explained_variance: pca.explained_variance,
        projection: pca.projection,
        pca_degenerate: pca.degenerate,
        ari: agreement.ari,
        purity: agreement.purity,
        synthetic_in_real_cluster: agreement.synthetic_in_real_cluster,
    })
}
