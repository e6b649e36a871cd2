//! Fixed-layout feature vectors built from the measure battery.
//!
//! `paper34`: six node measures (clustering, PageRank, betweenness,
//! closeness, in-degree, out-degree) sampled at five quantiles, then the
//! mean and population standard deviation of in- and out-degree.
//! `full39` appends the five whole-graph scalars.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::measures::{
    self, exact_sum, quantile_sample, MeasureKind, NodeMeasure, PageRankParams, SourceSampling,
};
use crate::scalar::Scalar;

pub const QUANTILES: [f64; 5] = [0.10, 0.25, 0.50, 0.75, 0.90];
const QUANTILE_TAGS: [&str; 5] = ["q10", "q25", "q50", "q75", "q90"];
const SCALAR_SLOTS: [&str; 5] = [
    "von_neumann_entropy",
    "structure_connectivity",
    "structure_connectedness",
    "average_intersite_distance",
    "vertex_distance_information",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureLayout {
    Paper34,
    Full39,
}

impl FeatureLayout {
    pub fn len(self) -> usize {
        match self {
            FeatureLayout::Paper34 => 34,
            FeatureLayout::Full39 => 39,
        }
    }

    pub fn slot_names(self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.len());
        for kind in MeasureKind::ALL {
            for tag in QUANTILE_TAGS {
                names.push(format!("{}_{tag}", kind.slug()));
            }
        }
        for d in ["in_degree", "out_degree"] {
            names.push(format!("{d}_mean"));
            names.push(format!("{d}_std"));
        }
        if self == FeatureLayout::Full39 {
            names.extend(SCALAR_SLOTS.iter().map(|s| s.to_string()));
        }
        names
    }
}

impl fmt::Display for FeatureLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureLayout::Paper34 => "paper34",
            FeatureLayout::Full39 => "full39",
        })
    }
}

impl FromStr for FeatureLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper34" => Ok(FeatureLayout::Paper34),
            "full39" => Ok(FeatureLayout::Full39),
            _ => Err(Error::InvalidInput(format!("unknown feature layout {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector<T> {
    pub layout: FeatureLayout,
    pub names: Vec<String>,
    pub values: Vec<T>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn get(&self, name: &str) -> Option<T> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureOptions {
    pub layout: FeatureLayout,
    /// Graphs with more nodes than this use sampled sources for
    /// betweenness and the Wiener number.
    pub approx_threshold: usize,
    pub sample_sources: usize,
    pub seed: u64,
    pub pagerank: PageRankParams,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            layout: FeatureLayout::Full39,
            approx_threshold: 5000,
            sample_sources: 256,
            seed: 0,
            pagerank: PageRankParams::default(),
        }
    }
}

/// How each feature of one graph was computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureProvenance {
    pub layout: FeatureLayout,
    pub node_count: usize,
    pub edge_count: usize,
    pub components: usize,
    pub betweenness: SourceSampling,
    pub wiener: SourceSampling,
    pub pagerank: PageRankParams,
    /// False when the graph has no edges and the slot was set to 0.
    pub vertex_distance_information_defined: bool,
    /// Closeness and Wiener sums cover reachable pairs only.
    pub distance_convention: String,
}

#[derive(Clone, Debug)]
pub struct ExtractedFeatures<T> {
    pub vector: FeatureVector<T>,
    pub provenance: FeatureProvenance,
}

fn mean_std<T: Scalar>(values: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(values.len());
    let mean = exact_sum(values.iter().copied()) / n;
    let var = exact_sum(values.iter().map(|&v| (v - mean) * (v - mean))) / n;
    (mean, var.sqrt())
}

pub fn extract_features<T: Scalar>(g: &Graph, opts: &FeatureOptions) -> Result<ExtractedFeatures<T>> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidInput("cannot featurize an empty graph".into()));
    }
    let sampling = if n > opts.approx_threshold {
        SourceSampling::Sampled {
            count: opts.sample_sources.clamp(1, n),
            seed: opts.seed,
        }
    } else {
        SourceSampling::Exact
    };

    let node_measures: [NodeMeasure<T>; 6] = [
        measures::local_clustering(g),
        measures::pagerank(g, opts.pagerank)?,
        measures::betweenness(g, sampling)?,
        measures::closeness(g),
        NodeMeasure::in_degree(g),
        NodeMeasure::out_degree(g),
    ];
    let mut values = Vec::with_capacity(opts.layout.len());
    for m in &node_measures {
        values.extend(quantile_sample(&m.values, &QUANTILES)?);
    }
    for m in &node_measures[4..] {
        let (mean, std) = mean_std(&m.values);
        values.push(mean);
        values.push(std);
    }

    let mut vdi_defined = true;
    if opts.layout == FeatureLayout::Full39 {
        values.push(measures::von_neumann_entropy(g));
        values.push(measures::structure_connectivity(g));
        values.push(measures::structure_connectedness(g)?);
        values.push(measures::average_intersite_distance(g, sampling)?);
        values.push(if g.arc_count() == 0 {
            vdi_defined = false;
            T::zero()
        } else {
            measures::vertex_distance_information(g)?
        });
    }
    debug_assert_eq!(values.len(), opts.layout.len());

    Ok(ExtractedFeatures {
        vector: FeatureVector {
            layout: opts.layout,
            names: opts.layout.slot_names(),
            values,
        },
        provenance: FeatureProvenance {
            layout: opts.layout,
            node_count: n,
            edge_count: g.edge_count(),
            components: connected_components(g).1,
            betweenness: sampling,
            wiener: sampling,
            pagerank: opts.pagerank,
            vertex_distance_information_defined: vdi_defined,
            distance_convention: "reachable pairs only".into(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edge_list(n, &e, false).unwrap()
    }

    #[test]
    fn slot_counts_and_unique_names() {
        for layout in [FeatureLayout::Paper34, FeatureLayout::Full39] {
            let names = layout.slot_names();
            assert_eq!(names.len(), layout.len());
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), names.len());
        }
        assert_eq!(FeatureLayout::Paper34.slot_names()[0], "clustering_q10");
        assert_eq!(FeatureLayout::Paper34.slot_names()[33], "out_degree_std");
    }

    #[test]
    fn vertex_transitive_quantiles_equal() {
        let opts = FeatureOptions { layout: FeatureLayout::Paper34, ..Default::default() };
        let f = extract_features::<f64>(&complete(4), &opts).unwrap().vector;
        assert_eq!(f.values.len(), 34);
        for chunk in f.values[..30].chunks(5) {
            assert!(chunk.iter().all(|&v| v == chunk[0]), "{chunk:?}");
        }
        assert_eq!(f.get("in_degree_std"), Some(0.0));
        assert_eq!(f.get("out_degree_mean"), Some(3.0));
    }

    #[test]
    fn full39_scalars_on_triangle() {
        let f = extract_features::<f64>(&complete(3), &FeatureOptions::default()).unwrap();
        let v = &f.vector;
        assert_eq!(v.values.len(), 39);
        assert_abs_diff_eq!(v.get("von_neumann_entropy").unwrap(), 0.5625, epsilon = 1e-12);
        assert_eq!(v.get("structure_connectivity"), Some(1.0));
        assert_eq!(v.get("structure_connectedness"), Some(100.0));
        assert_eq!(f.provenance.betweenness, SourceSampling::Exact);
    }

    #[test]
    fn edgeless_graph_flags_vdi() {
        let f = extract_features::<f64>(&Graph::empty(4, false), &FeatureOptions::default()).unwrap();
        assert_eq!(f.vector.get("vertex_distance_information"), Some(0.0));
        assert!(!f.provenance.vertex_distance_information_defined);
    }

    #[test]
    fn large_graphs_switch_to_sampling() {
        let opts = FeatureOptions { approx_threshold: 3, sample_sources: 2, seed: 5, ..Default::default() };
        let f = extract_features::<f64>(&complete(5), &opts).unwrap();
        assert_eq!(f.provenance.betweenness, SourceSampling::Sampled { count: 2, seed: 5 });
    }

    #[test]
    fn empty_graph_rejected() {
        assert!(extract_features::<f64>(&Graph::empty(0, false), &FeatureOptions::default()).is_err());
    }
}
