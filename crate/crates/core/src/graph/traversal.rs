use std::collections::VecDeque;

use super::Graph;

/// Distance marker for nodes not reachable from the source.
pub const UNREACHABLE: u32 = u32::MAX;

/// Hop distances from `source` following arcs in their stored direction.
///
/// # Panics
/// If `source >= g.node_count()`.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<u32> {
    assert!(source < g.node_count(), "source {source} out of range");
    let mut dist = vec![UNREACHABLE; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source as u32);
    while let Some(v) = queue.pop_front() {
        let next = dist[v as usize] + 1;
        for &w in g.neighbors(v as usize) {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Weakly connected components. Ids are assigned in order of each
/// component's lowest node id. Returns `(component_of, count)`.
pub fn connected_components(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (u, v, _) in g.edges() {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            let (lo, hi) = if ru < rv { (ru, rv) } else { (rv, ru) };
            parent[hi] = lo;
        }
    }
    let mut id = vec![usize::MAX; n];
    let mut comp = vec![0usize; n];
    let mut count = 0;
    for v in 0..n {
        let r = find(&mut parent, v);
        if id[r] == usize::MAX {
            id[r] = count;
            count += 1;
        }
        comp[v] = id[r];
    }
    (comp, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn path_and_triangle() {
        let p3 = Graph::from_edge_list(3, &[(0, 1), (1, 2)], false).unwrap();
        assert_eq!(bfs_distances(&p3, 0), vec![0, 1, 2]);
        let k3 = Graph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)], false).unwrap();
        assert_eq!(bfs_distances(&k3, 2), vec![1, 1, 0]);
    }

    #[test]
    fn unreachable_marked() {
        let g = Graph::empty(2, false);
        assert_eq!(bfs_distances(&g, 0), vec![0, UNREACHABLE]);
    }

    #[test]
    fn components() {
        let k3 = Graph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)], false).unwrap();
        assert_eq!(connected_components(&k3).1, 1);
        let two = Graph::from_edge_list(4, &[(0, 1), (2, 3)], false).unwrap();
        assert_eq!(connected_components(&two), (vec![0, 0, 1, 1], 2));
        assert_eq!(connected_components(&Graph::empty(5, false)).1, 5);
        let weak = Graph::from_edge_list(3, &[(0, 1), (2, 1)], true).unwrap();
        assert_eq!(connected_components(&weak).1, 1);
    }

    proptest! {
        #[test]
        fn triangle_inequality(n in 2usize..15, edges in proptest::collection::vec((0usize..15, 0usize..15), 0..40)) {
            let edges: Vec<_> = edges.into_iter().filter(|&(u, v)| u < n && v < n).collect();
            let g = Graph::from_edge_list(n, &edges, false).unwrap();
            let all: Vec<Vec<u32>> = (0..n).map(|s| bfs_distances(&g, s)).collect();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if all[i][k] != UNREACHABLE && all[k][j] != UNREACHABLE {
                            prop_assert!(all[i][j] <= all[i][k] + all[k][j]);
                        }
                    }
                }
            }
        }
    }
}
