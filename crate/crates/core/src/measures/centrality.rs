use rayon::prelude::*;

use super::exact_sum::ExactSum;
use super::{map_source_chunks, MeasureKind, NodeMeasure, SourceSampling};
use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHABLE};
use crate::scalar::Scalar;

/// Local clustering over out-neighbourhoods: arcs among the neighbours of
/// `i` divided by `k_i (k_i - 1)`. Nodes with fewer than two neighbours get 0.
/// Undirected edges count in both directions, so a triangle scores 1.
pub fn local_clustering<T: Scalar>(g: &Graph) -> NodeMeasure<T> {
    let n = g.node_count();
    let mut stamp = vec![u32::MAX; n];
    let mut values = vec![T::zero(); n];
    for i in 0..n {
        let nbrs = g.neighbors(i);
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        for &j in nbrs {
            stamp[j as usize] = i as u32;
        }
        let mut links = 0u64;
        for &j in nbrs {
            links += g
                .neighbors(j as usize)
                .iter()
                .filter(|&&w| stamp[w as usize] == i as u32)
                .count() as u64;
        }
        values[i] = T::from_u64(links).unwrap() / T::from_usize_lossy(k * (k - 1));
    }
    NodeMeasure {
        kind: MeasureKind::Clustering,
        values,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

struct PageRankOperator<'a, T> {
    g: &'a Graph,
    rev: std::borrow::Cow<'a, Graph>,
    inv_out: Vec<T>,
    damping: T,
    base: T,
    inv_n: T,
}

impl<'a, T: Scalar> PageRankOperator<'a, T> {
    fn new(g: &'a Graph, damping: f64) -> Self {
        let n = g.node_count();
        let rev = if g.is_directed() {
            std::borrow::Cow::Owned(g.transpose())
        } else {
            std::borrow::Cow::Borrowed(g)
        };
        let inv_out = (0..n)
            .map(|v| match g.out_degree(v) {
                0 => T::zero(),
                d => T::one() / T::from_usize_lossy(d),
            })
            .collect();
        let damping = T::from_f64_lossy(damping);
        let inv_n = T::one() / T::from_usize_lossy(n);
        PageRankOperator {
            g,
            rev,
            inv_out,
            damping,
            base: (T::one() - damping) * inv_n,
            inv_n,
        }
    }

    /// One application of the recurrence; returns the L1 change.
    fn step(&self, pr: &[T], next: &mut [T], acc: &mut ExactSum<T>) -> T {
        let n = self.g.node_count();
        acc.clear();
        for v in 0..n {
            if self.g.out_degree(v) == 0 {
                acc.add(pr[v]);
            }
        }
        let dangling = acc.value() * self.inv_n;
        let share: Vec<T> = pr.iter().zip(&self.inv_out).map(|(&p, &w)| p * w).collect();
        for v in 0..n {
            acc.clear();
            for &u in self.rev.neighbors(v) {
                acc.add(share[u as usize]);
            }
            next[v] = self.base + self.damping * (acc.value() + dangling);
        }
        acc.clear();
        for (a, b) in pr.iter().zip(next.iter()) {
            acc.add((*a - *b).abs());
        }
        acc.value()
    }
}

/// Power iteration from the uniform vector. Mass on nodes without
/// out-arcs is spread uniformly. Converged when the L1 change of one step
/// drops below `tol`, or below the rounding floor of `T` (a few ulps per
/// node) when that is larger.
pub fn pagerank<T: Scalar>(g: &Graph, params: PageRankParams) -> Result<NodeMeasure<T>> {
    if !(params.damping > 0.0 && params.damping < 1.0) {
        return Err(Error::InvalidInput(format!("damping {} not in (0,1)", params.damping)));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(NodeMeasure {
            kind: MeasureKind::PageRank,
            values: Vec::new(),
        });
    }
    let op = PageRankOperator::<T>::new(g, params.damping);
    let floor = T::epsilon() * T::from_usize_lossy(4 * n);
    let tol = T::from_f64_lossy(params.tol).max(floor);
    let mut pr = vec![op.inv_n; n];
    let mut next = vec![T::zero(); n];
    let mut acc = ExactSum::new();
    let mut residual = T::infinity();
    for _ in 0..params.max_iter {
        residual = op.step(&pr, &mut next, &mut acc);
        std::mem::swap(&mut pr, &mut next);
        if residual < tol {
            return Ok(NodeMeasure {
                kind: MeasureKind::PageRank,
                values: pr,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "pagerank",
        iterations: params.max_iter,
        residual: residual.to_f64_lossy(),
    })
}

/// L1 change produced by applying one more iteration to `values`.
pub fn pagerank_residual<T: Scalar>(g: &Graph, values: &[T], damping: f64) -> T {
    let op = PageRankOperator::<T>::new(g, damping);
    let mut next = vec![T::zero(); values.len()];
    op.step(values, &mut next, &mut ExactSum::new())
}

struct Brandes<T> {
    dist: Vec<u32>,
    sigma: Vec<T>,
    delta: Vec<T>,
    order: Vec<u32>,
    acc: ExactSum<T>,
}

impl<T: Scalar> Brandes<T> {
    fn new(n: usize) -> Self {
        Brandes {
            dist: vec![UNREACHABLE; n],
            sigma: vec![T::zero(); n],
            delta: vec![T::zero(); n],
            order: Vec::with_capacity(n),
            acc: ExactSum::new(),
        }
    }

    /// Adds the dependencies of source `s` into `totals`.
    fn accumulate(&mut self, g: &Graph, rev: &Graph, s: usize, totals: &mut [ExactSum<T>]) {
        self.order.clear();
        self.dist[s] = 0;
        self.order.push(s as u32);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head] as usize;
            head += 1;
            let next = self.dist[v] + 1;
            for &w in g.neighbors(v) {
                if self.dist[w as usize] == UNREACHABLE {
                    self.dist[w as usize] = next;
                    self.order.push(w);
                }
            }
        }
        // path counts pulled from predecessors so each sum is order-free
        self.sigma[s] = T::one();
        for idx in 1..self.order.len() {
            let w = self.order[idx] as usize;
            let dw = self.dist[w];
            self.acc.clear();
            for &v in rev.neighbors(w) {
                if self.dist[v as usize].wrapping_add(1) == dw {
                    self.acc.add(self.sigma[v as usize]);
                }
            }
            self.sigma[w] = self.acc.value();
        }
        for idx in (0..self.order.len()).rev() {
            let v = self.order[idx] as usize;
            let dv1 = self.dist[v] + 1;
            self.acc.clear();
            for &w in g.neighbors(v) {
                let w = w as usize;
                if self.dist[w] == dv1 {
                    self.acc.add(self.sigma[v] / self.sigma[w] * (T::one() + self.delta[w]));
                }
            }
            self.delta[v] = self.acc.value();
            if v != s {
                totals[v].add(self.delta[v]);
            }
        }
        for &v in &self.order {
            let v = v as usize;
            self.dist[v] = UNREACHABLE;
            self.sigma[v] = T::zero();
            self.delta[v] = T::zero();
        }
    }
}

/// Shortest-path betweenness by single-source dependency accumulation.
///
/// Exact mode sums over every source. Sampled mode sums over the sampled
/// sources and scales by `n` over their number. Undirected graphs report the
/// unordered-pair value (half the ordered sum).
pub fn betweenness<T: Scalar>(g: &Graph, mode: SourceSampling) -> Result<NodeMeasure<T>> {
    let n = g.node_count();
    let sources = mode.sources(g)?;
    let rev_owned;
    let rev = if g.is_directed() {
        rev_owned = g.transpose();
        &rev_owned
    } else {
        g
    };
    let partials = map_source_chunks(&sources, |chunk| {
        let mut work = Brandes::<T>::new(n);
        let mut totals = vec![ExactSum::new(); n];
        for &s in chunk {
            work.accumulate(g, rev, s, &mut totals);
        }
        totals
    });
    let mut totals = vec![ExactSum::<T>::new(); n];
    for part in &partials {
        for (t, p) in totals.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    let mut scale = T::from_usize_lossy(n) / T::from_usize_lossy(sources.len().max(1));
    if !g.is_directed() {
        scale = scale / (T::one() + T::one());
    }
    Ok(NodeMeasure {
        kind: MeasureKind::Betweenness,
        values: totals.iter().map(|t| t.value() * scale).collect(),
    })
}

/// Sum of hop distances from `s` to every node it reaches, and how many
/// nodes that is (excluding `s`).
pub(crate) fn distance_sum(g: &Graph, s: usize, dist: &mut [u32], queue: &mut Vec<u32>) -> (u64, usize) {
    queue.clear();
    dist[s] = 0;
    queue.push(s as u32);
    let mut head = 0;
    let mut total = 0u64;
    while head < queue.len() {
        let v = queue[head] as usize;
        head += 1;
        let next = dist[v] + 1;
        for &w in g.neighbors(v) {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = next;
                total += next as u64;
                queue.push(w);
            }
        }
    }
    for &v in queue.iter() {
        dist[v as usize] = UNREACHABLE;
    }
    (total, queue.len() - 1)
}

/// Per-source distance sums for every node, computed in parallel.
pub(crate) fn all_distance_sums(g: &Graph, sources: &[usize]) -> Vec<u64> {
    let n = g.node_count();
    sources
        .par_iter()
        .map_init(
            || (vec![UNREACHABLE; n], Vec::with_capacity(n)),
            |(dist, queue), &s| distance_sum(g, s, dist, queue).0,
        )
        .collect()
}

/// `1 / sum_j d_ij` over the nodes `i` reaches; 0 when it reaches none.
pub fn closeness<T: Scalar>(g: &Graph) -> NodeMeasure<T> {
    let sources: Vec<usize> = (0..g.node_count()).collect();
    let values = all_distance_sums(g, &sources)
        .into_iter()
        .map(|s| if s == 0 { T::zero() } else { T::one() / T::from_u64(s).unwrap() })
        .collect();
    NodeMeasure {
        kind: MeasureKind::Closeness,
        values,
    }
}
