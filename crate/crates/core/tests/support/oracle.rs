//! Brute-force reference implementations for small graphs: Floyd-Warshall
//! distances and explicit enumeration of every shortest path.

#![allow(dead_code)]

use synthgraph::rng::keyed_uniform;
use synthgraph::Graph;

pub struct Oracle {
    pub n: usize,
    pub directed: bool,
    pub adj: Vec<Vec<bool>>,
    pub dist: Vec<Vec<Option<usize>>>,
}

impl Oracle {
    pub fn new(n: usize, edges: &[(usize, usize)], directed: bool) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            if u != v {
                adj[u][v] = true;
                if !directed {
                    adj[v][u] = true;
                }
            }
        }
        let mut dist: Vec<Vec<Option<usize>>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Some(0) } else if adj[i][j] { Some(1) } else { None }).collect())
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (dist[i][k], dist[k][j]) {
                        if dist[i][j].map_or(true, |d| a + b < d) {
                            dist[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        Oracle { n, directed, adj, dist }
    }

    /// Every shortest s-t path as a vertex sequence.
    pub fn shortest_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let Some(d) = self.dist[s][t] else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut path = vec![s];
        self.extend(&mut path, t, d, &mut out);
        out
    }

    fn extend(&self, path: &mut Vec<usize>, t: usize, d: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if path.len() == d + 1 {
            if last == t {
                out.push(path.clone());
            }
            return;
        }
        for next in 0..self.n {
            if self.adj[last][next] {
                path.push(next);
                self.extend(path, t, d, out);
                path.pop();
            }
        }
    }

    /// Sum over ordered pairs of the fraction of shortest paths through v;
    /// halved for undirected graphs.
    pub fn betweenness(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.n];
        for s in 0..self.n {
            for t in 0..self.n {
                if s == t {
                    continue;
                }
                let paths = self.shortest_paths(s, t);
                if paths.is_empty() {
                    continue;
                }
                for p in &paths {
                    for &v in &p[1..p.len() - 1] {
                        b[v] += 1.0 / paths.len() as f64;
                    }
                }
            }
        }
        if !self.directed {
            b.iter_mut().for_each(|x| *x /= 2.0);
        }
        b
    }

    pub fn closeness(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let s: usize = (0..self.n).filter(|&j| j != i).filter_map(|j| self.dist[i][j]).sum();
                if s == 0 {
                    0.0
                } else {
                    1.0 / s as f64
                }
            })
            .collect()
    }

    pub fn wiener(&self) -> f64 {
        let total: usize = (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .filter_map(|(i, j)| self.dist[i][j])
            .sum();
        total as f64 / 2.0
    }

    pub fn average_intersite_distance(&self) -> f64 {
        2.0 * self.wiener() / self.n as f64
    }

    /// Ordered neighbour pairs (j, k) with an arc j -> k, over k(k-1).
    pub fn clustering(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let nb: Vec<usize> = (0..self.n).filter(|&j| self.adj[i][j]).collect();
                let k = nb.len();
                if k < 2 {
                    return 0.0;
                }
                let links = nb
                    .iter()
                    .flat_map(|&a| nb.iter().map(move |&b| (a, b)))
                    .filter(|&(a, b)| a != b && self.adj[a][b])
                    .count();
                links as f64 / (k * (k - 1)) as f64
            })
            .collect()
    }
}

/// All labelled simple undirected graphs on n nodes, as edge lists.
pub fn all_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect())
        .collect()
}

/// Random graph on n nodes: a random spanning tree plus extra edges with
/// probability p, so it is always connected.
pub fn random_connected(n: usize, p: f64, seed: u64, directed: bool) -> Vec<(usize, usize)> {
    let mut key = 0u64;
    let mut u = || {
        key += 1;
        keyed_uniform(seed, key)
    };
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = (u() * v as f64) as usize;
        edges.push((parent, v));
        if directed {
            edges.push((v, parent));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && (directed || a < b) && u() < p {
                edges.push((a, b));
            }
        }
    }
    edges
}

pub fn graph(n: usize, edges: &[(usize, usize)], directed: bool) -> Graph {
    Graph::from_edge_list(n, edges, directed).unwrap()
}
