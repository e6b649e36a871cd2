//! Graph-complexity measures: per-node centralities and whole-graph scalars.

mod centrality;
mod exact_sum;
mod global;
mod quantile;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use centrality::{betweenness, closeness, local_clustering, pagerank, pagerank_residual, PageRankParams};
pub use exact_sum::{exact_sum, ExactSum};
pub use global::{
    average_intersite_distance, structure_connectedness, structure_connectivity,
    vertex_distance_information, von_neumann_entropy, wiener_number,
};
pub use quantile::quantile_sample;

use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureKind {
    Clustering,
    PageRank,
    Betweenness,
    Closeness,
    InDegree,
    OutDegree,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::Clustering,
        MeasureKind::PageRank,
        MeasureKind::Betweenness,
        MeasureKind::Closeness,
        MeasureKind::InDegree,
        MeasureKind::OutDegree,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            MeasureKind::Clustering => "clustering",
            MeasureKind::PageRank => "pagerank",
            MeasureKind::Betweenness => "betweenness",
            MeasureKind::Closeness => "closeness",
            MeasureKind::InDegree => "in_degree",
            MeasureKind::OutDegree => "out_degree",
        }
    }
}

/// One value per node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeMeasure<T> {
    pub kind: MeasureKind,
    pub values: Vec<T>,
}

impl<T: Scalar> NodeMeasure<T> {
    pub fn in_degree(g: &Graph) -> Self {
        let (inn, _) = g.degrees();
        NodeMeasure {
            kind: MeasureKind::InDegree,
            values: inn.into_iter().map(T::from_usize_lossy).collect(),
        }
    }

    pub fn out_degree(g: &Graph) -> Self {
        let (_, out) = g.degrees();
        NodeMeasure {
            kind: MeasureKind::OutDegree,
            values: out.into_iter().map(T::from_usize_lossy).collect(),
        }
    }
}

/// Exact computation, or an estimate from a seeded sample of source nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SourceSampling {
    Exact,
    Sampled { count: usize, seed: u64 },
}

impl SourceSampling {
    /// Ascending source list. Errors when more sources than nodes are requested.
    ///
    /// Sampled mode draws whole structural colour classes (Weisfeiler-Lehman
    /// refinement of the degree partition) in seeded order until at least
    /// `count` nodes are covered, so the chosen set does not depend on how
    /// nodes are numbered. The result can hold more than `count` sources;
    /// callers scale by its actual length.
    pub(crate) fn sources(&self, g: &Graph) -> crate::Result<Vec<usize>> {
        let n = g.node_count();
        match *self {
            SourceSampling::Exact => Ok((0..n).collect()),
            SourceSampling::Sampled { count, seed } => {
                if count > n {
                    return Err(crate::Error::InvalidInput(format!(
                        "{count} sample sources requested from {n} nodes"
                    )));
                }
                if count == 0 {
                    return Err(crate::Error::InvalidInput("sample count must be positive".into()));
                }
                if count == n {
                    return Ok((0..n).collect());
                }
                let colour = structural_colours(g);
                let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
                for (v, &c) in colour.iter().enumerate() {
                    classes.entry(c).or_default().push(v);
                }
                let mut order: Vec<(f64, u64)> =
                    classes.keys().map(|&c| (crate::rng::keyed_uniform(seed, c), c)).collect();
                order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut s = Vec::with_capacity(count);
                for (_, c) in order {
                    if s.len() >= count {
                        break;
                    }
                    s.extend_from_slice(&classes[&c]);
                }
                s.sort_unstable();
                Ok(s)
            }
        }
    }
}

const WL_ROUNDS: usize = 4;

/// Label-independent node colours: degrees refined by hashing each node's
/// colour with the sorted multiset of its neighbours' colours.
fn structural_colours(g: &Graph) -> Vec<u64> {
    use crate::rng::mix;
    let n = g.node_count();
    let (inn, out) = g.degrees();
    let mut colour: Vec<u64> = (0..n).map(|v| mix(mix(0x5747, inn[v] as u64), out[v] as u64)).collect();
    let rev = g.is_directed().then(|| g.transpose());
    let mut classes = distinct(&colour);
    for _ in 0..WL_ROUNDS {
        let next: Vec<u64> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut h = colour[v];
                let mut nb: Vec<u64> = g.neighbors(v).iter().map(|&u| colour[u as usize]).collect();
                nb.sort_unstable();
                for c in nb {
                    h = mix(h, c);
                }
                if let Some(r) = &rev {
                    let mut nb: Vec<u64> = r.neighbors(v).iter().map(|&u| colour[u as usize]).collect();
                    nb.sort_unstable();
                    h = mix(h, 0x1e);
                    for c in nb {
                        h = mix(h, c);
                    }
                }
                h
            })
            .collect();
        let refined = distinct(&next);
        colour = next;
        if refined == classes {
            break;
        }
        classes = refined;
    }
    colour
}

fn distinct(c: &[u64]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Runs `per_chunk` over fixed-size chunks of `sources` in parallel and
/// returns the chunk results in source order. Chunk boundaries depend only
/// on the number of sources.
pub(crate) fn map_source_chunks<R, F>(sources: &[usize], per_chunk: F) -> Vec<R>
where
    R: Send,
    F: Fn(&[usize]) -> R + Sync + Send,
{
    if sources.is_empty() {
        return Vec::new();
    }
    let chunk = sources.len().div_ceil(32).max(16);
    sources.par_chunks(chunk).map(per_chunk).collect()
}
