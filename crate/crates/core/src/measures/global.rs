use super::centrality::all_distance_sums;
use super::exact_sum::exact_sum;
use super::SourceSampling;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Degree used by the whole-graph formulas: adjacency length for
/// undirected graphs, in + out for directed ones.
fn total_degrees(g: &Graph) -> Vec<usize> {
    let (inn, out) = g.degrees();
    if g.is_directed() {
        inn.iter().zip(&out).map(|(a, b)| a + b).collect()
    } else {
        out
    }
}

/// `|V|/4 - sum over edges (u,v) of 1 / (4 d_u d_v)`.
pub fn von_neumann_entropy<T: Scalar>(g: &Graph) -> T {
    let deg = total_degrees(g);
    let four = T::from_f64_lossy(4.0);
    let edge_terms = exact_sum(g.edges().map(|(u, v, _)| {
        T::one() / (four * T::from_usize_lossy(deg[u]) * T::from_usize_lossy(deg[v]))
    }));
    T::from_usize_lossy(g.node_count()) / four - edge_terms
}

/// `E - V + 1`.
pub fn structure_connectivity<T: Scalar>(g: &Graph) -> T {
    T::from_usize_lossy(g.edge_count()) - T::from_usize_lossy(g.node_count()) + T::one()
}

/// `2E / (V (V - 1)) * 100`.
pub fn structure_connectedness<T: Scalar>(g: &Graph) -> Result<T> {
    let v = g.node_count();
    if v < 2 {
        return Err(Error::InvalidInput(format!("connectedness needs at least 2 nodes, got {v}")));
    }
    let num = T::from_usize_lossy(2 * g.edge_count());
    let den = T::from_usize_lossy(v) * T::from_usize_lossy(v - 1);
    Ok(num / den * T::from_f64_lossy(100.0))
}

/// Wiener number: half the sum of hop distances over ordered reachable
/// pairs. Sampled mode scales the sampled sources' sums by `V` over their number.
pub fn wiener_number<T: Scalar>(g: &Graph, mode: SourceSampling) -> Result<T> {
    let n = g.node_count();
    if n == 0 {
        return Ok(T::zero());
    }
    let sources = mode.sources(g)?;
    let total: u128 = all_distance_sums(g, &sources).into_iter().map(u128::from).sum();
    let scale = T::from_usize_lossy(n) / T::from_usize_lossy(sources.len());
    let total = T::from_u128(total).expect("distance sum fits scalar");
    Ok(total * scale / (T::one() + T::one()))
}

/// `2W / V`. Unreachable pairs are left out of `W`.
pub fn average_intersite_distance<T: Scalar>(g: &Graph, mode: SourceSampling) -> Result<T> {
    let n = g.node_count();
    if n == 0 {
        return Ok(T::zero());
    }
    let w = wiener_number::<T>(g, mode)?;
    Ok((w + w) / T::from_usize_lossy(n))
}

/// `sum_i a_i log2 a_i / (A log2 A)` with `a_i` the vertex degrees and
/// `A = sum_i a_i`. Undefined (error) for edgeless graphs.
pub fn vertex_distance_information<T: Scalar>(g: &Graph) -> Result<T> {
    let deg = total_degrees(g);
    let a_total: usize = deg.iter().sum();
    if a_total <= 1 {
        return Err(Error::InvalidInput(
            "vertex distance information undefined for an edgeless graph".into(),
        ));
    }
    let xlogx = |a: usize| {
        let a = T::from_usize_lossy(a);
        a * a.log2()
    };
    let num = exact_sum(deg.iter().filter(|&&a| a >= 1).map(|&a| xlogx(a)));
    Ok(num / xlogx(a_total))
}
