//! Compressed adjacency graph shared by every other module.
//!
//! A [`Graph`] is immutable once built. Adjacency lists are sorted and free
//! of duplicates and self-loops; undirected graphs store both arcs of every
//! edge.

mod io;
mod traversal;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    load_canonical, load_graph, load_graph_labeled, save_canonical, save_graph, sidecar_path,
    write_label_map, GraphFormat, GraphMetadata, LoadedGraph,
};
pub use traversal::{bfs_distances, connected_components, UNREACHABLE};

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    node_count: usize,
    directed: bool,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    durations: Option<Vec<f64>>,
}

impl Graph {
    /// Builds a graph from unweighted pairs.
    ///
    /// Self-loops are dropped, duplicates merged, and undirected input is
    /// symmetrized.
    pub fn from_edge_list(node_count: usize, edges: &[(usize, usize)], directed: bool) -> Result<Self> {
        let arcs = edges.iter().map(|&(u, v)| (u, v, 0.0));
        Self::build(node_count, arcs, directed, false)
    }

    /// Like [`Graph::from_edge_list`] with a contact duration per edge.
    /// Durations of merged duplicates are summed.
    pub fn from_weighted_edge_list(
        node_count: usize,
        edges: &[(usize, usize, f64)],
        directed: bool,
    ) -> Result<Self> {
        if let Some(&(u, v, d)) = edges.iter().find(|e| !(e.2 >= 0.0) || !e.2.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "edge ({u}, {v}) has invalid duration {d}"
            )));
        }
        Self::build(node_count, edges.iter().copied(), directed, true)
    }

    pub(crate) fn build(
        node_count: usize,
        edges: impl Iterator<Item = (usize, usize, f64)>,
        directed: bool,
        weighted: bool,
    ) -> Result<Self> {
        if node_count > u32::MAX as usize {
            return Err(Error::InvalidInput(format!("{node_count} nodes exceeds u32 ids")));
        }
        let mut arcs: Vec<(u32, u32, f64)> = Vec::new();
        for (u, v, d) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::EdgeOutOfRange { u, v, node_count });
            }
            if u == v {
                continue;
            }
            arcs.push((u as u32, v as u32, d));
            if !directed {
                arcs.push((v as u32, u as u32, d));
            }
        }
        // Stable sort keeps the summation order of duplicate durations fixed.
        arcs.sort_by_key(|a| (a.0, a.1));

        let mut offsets = vec![0usize; node_count + 1];
        let mut neighbors = Vec::with_capacity(arcs.len());
        let mut durations = Vec::with_capacity(if weighted { arcs.len() } else { 0 });
        let mut last: Option<(u32, u32)> = None;
        for (u, v, d) in arcs {
            if last == Some((u, v)) {
                if weighted {
                    *durations.last_mut().unwrap() += d;
                }
                continue;
            }
            last = Some((u, v));
            offsets[u as usize + 1] += 1;
            neighbors.push(v);
            if weighted {
                durations.push(d);
            }
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        Ok(Graph {
            node_count,
            directed,
            offsets,
            neighbors,
            durations: weighted.then_some(durations),
        })
    }

    /// Graph with `node_count` nodes and no edges.
    pub fn empty(node_count: usize, directed: bool) -> Self {
        Graph {
            node_count,
            directed,
            offsets: vec![0; node_count + 1],
            neighbors: Vec::new(),
            durations: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored arcs (twice the edge count for undirected graphs).
    pub fn arc_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Edges, counting each undirected edge once.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.neighbors.len()
        } else {
            self.neighbors.len() / 2
        }
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_array(&self) -> &[u32] {
        &self.neighbors
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn durations(&self) -> Option<&[f64]> {
        self.durations.as_deref()
    }

    /// Durations aligned with [`Graph::neighbors`] for node `v`.
    pub fn neighbor_durations(&self, v: usize) -> Option<&[f64]> {
        self.durations
            .as_deref()
            .map(|d| &d[self.offsets[v]..self.offsets[v + 1]])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Duration of arc (u, v), if present and the graph carries durations.
    pub fn edge_duration(&self, u: usize, v: usize) -> Option<f64> {
        let pos = self.neighbors(u).binary_search(&(v as u32)).ok()?;
        self.neighbor_durations(u).map(|d| d[pos])
    }

    /// Arcs `(u, v, duration)`; undirected edges appear once with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Option<f64>)> + '_ {
        (0..self.node_count).flat_map(move |u| {
            let durs = self.neighbor_durations(u);
            self.neighbors(u)
                .iter()
                .enumerate()
                .filter(move |(_, &v)| self.directed || (v as usize) > u)
                .map(move |(i, &v)| (u, v as usize, durs.map(|d| d[i])))
        })
    }

    /// In-degree and out-degree per node. Equal for undirected graphs.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let out: Vec<usize> = (0..self.node_count).map(|v| self.out_degree(v)).collect();
        if !self.directed {
            return (out.clone(), out);
        }
        let mut inn = vec![0usize; self.node_count];
        for &v in &self.neighbors {
            inn[v as usize] += 1;
        }
        (inn, out)
    }

    /// Reversed graph (in-adjacency). Undirected graphs return a clone.
    pub fn transpose(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let weighted = self.durations.is_some();
        let arcs = self.edges().map(|(u, v, d)| (v, u, d.unwrap_or(0.0)));
        Graph::build(self.node_count, arcs, true, weighted).expect("transpose of valid graph")
    }

    /// Underlying undirected graph; durations of antiparallel arcs are summed.
    pub fn to_undirected(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let weighted = self.durations.is_some();
        let arcs = self.edges().map(|(u, v, d)| (u, v, d.unwrap_or(0.0)));
        Graph::build(self.node_count, arcs, false, weighted).expect("valid graph")
    }

    /// Graph with node `v` renamed to `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.node_count {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
        }
        let weighted = self.durations.is_some();
        let arcs = self
            .edges()
            .map(|(u, v, d)| (perm[u], perm[v], d.unwrap_or(0.0)));
        Graph::build(self.node_count, arcs, self.directed, weighted)
    }

    /// Checks the structural invariants. Always true for graphs built by
    /// this crate; used by tests and after loading.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if self.offsets.len() != self.node_count + 1
            || self.offsets[0] != 0
            || self.offsets[self.node_count] != self.neighbors.len()
        {
            return bad("offsets do not frame neighbors");
        }
        if let Some(d) = &self.durations {
            if d.len() != self.neighbors.len() {
                return bad("durations misaligned");
            }
        }
        for u in 0..self.node_count {
            if self.offsets[u] > self.offsets[u + 1] {
                return bad("offsets decrease");
            }
            let adj = self.neighbors(u);
            if adj.windows(2).any(|w| w[0] >= w[1]) {
                return bad("adjacency not strictly increasing");
            }
            for (i, &v) in adj.iter().enumerate() {
                let v = v as usize;
                if v >= self.node_count || v == u {
                    return bad("neighbor out of range or self-loop");
                }
                if !self.directed {
                    if !self.has_edge(v, u) {
                        return bad("asymmetric undirected graph");
                    }
                    if let Some(d) = self.neighbor_durations(u) {
                        if self.edge_duration(v, u) != Some(d[i]) {
                            return bad("asymmetric durations");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    ErdosRenyi,
    NewmanWatts,
    RandomRegular,
    PowerlawCluster,
    AgentSynthetic,
    RealWorld,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::ErdosRenyi,
        Family::NewmanWatts,
        Family::RandomRegular,
        Family::PowerlawCluster,
        Family::AgentSynthetic,
        Family::RealWorld,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::ErdosRenyi => "ErdosRenyi",
            Family::NewmanWatts => "NewmanWatts",
            Family::RandomRegular => "RandomRegular",
            Family::PowerlawCluster => "PowerlawCluster",
            Family::AgentSynthetic => "AgentSynthetic",
            Family::RealWorld => "RealWorld",
        }
    }

    pub fn is_stylized(self) -> bool {
        matches!(
            self,
            Family::ErdosRenyi | Family::NewmanWatts | Family::RandomRegular | Family::PowerlawCluster
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown graph family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphLabel {
    pub name: String,
    pub family: Family,
}

impl GraphLabel {
    pub fn new(name: impl Into<String>, family: Family) -> Self {
        GraphLabel {
            name: name.into(),
            family,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangle() {
        let g = Graph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)], false).unwrap();
        let (inn, out) = g.degrees();
        assert_eq!(out, vec![2, 2, 2]);
        assert_eq!(inn, out);
        assert_eq!(g.edge_count(), 3);
        g.validate().unwrap();
    }

    #[test]
    fn duplicates_merge() {
        let g = Graph::from_edge_list(2, &[(0, 1), (0, 1)], false).unwrap();
        assert_eq!(g.edge_count(), 1);
        let w = Graph::from_weighted_edge_list(2, &[(0, 1, 10.0), (1, 0, 5.0)], false).unwrap();
        assert_eq!(w.edge_count(), 1);
        assert_eq!(w.edge_duration(0, 1), Some(15.0));
        assert_eq!(w.edge_duration(1, 0), Some(15.0));
    }

    #[test]
    fn isolated_vertex() {
        let g = Graph::from_edge_list(4, &[(0, 1), (1, 2)], false).unwrap();
        assert_eq!(g.out_degree(3), 0);
    }

    #[test]
    fn self_loops_dropped() {
        let g = Graph::from_edge_list(2, &[(0, 0), (0, 1)], false).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn out_of_range_rejected() {
        let err = Graph::from_edge_list(2, &[(0, 1), (1, 5)], false).unwrap_err();
        assert!(matches!(err, Error::EdgeOutOfRange { u: 1, v: 5, .. }));
    }

    #[test]
    fn star_and_directed_degrees() {
        let s = Graph::from_edge_list(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], false).unwrap();
        assert_eq!(s.degrees().0, vec![4, 1, 1, 1, 1]);
        let d = Graph::from_edge_list(2, &[(0, 1)], true).unwrap();
        assert_eq!(d.degrees(), (vec![0, 1], vec![1, 0]));
        assert_eq!(d.transpose().neighbors(1), &[0]);
    }

    #[test]
    fn family_parse() {
        assert_eq!("realworld".parse::<Family>().unwrap(), Family::RealWorld);
        assert!("nope".parse::<Family>().is_err());
    }

    fn arb_edges() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, bool)> {
        (1usize..20).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec((0..n, 0..n), 0..60),
                any::<bool>(),
            )
        })
    }

    proptest! {
        #[test]
        fn construction_invariants((n, edges, directed) in arb_edges()) {
            let g = Graph::from_edge_list(n, &edges, directed).unwrap();
            g.validate().unwrap();
            let (inn, out) = g.degrees();
            prop_assert_eq!(out.iter().sum::<usize>(), g.arc_count());
            prop_assert_eq!(inn.iter().sum::<usize>(), g.arc_count());
            if !directed {
                prop_assert_eq!(out.iter().sum::<usize>(), 2 * g.edge_count());
            }
        }
    }
}
