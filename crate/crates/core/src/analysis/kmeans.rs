use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;

const MAX_LLOYD_ITERATIONS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansFit<T> {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<T>>,
    pub wcss: T,
    /// Restart that produced this fit.
    pub restart: usize,
    /// WCSS after each assignment step.
    pub wcss_history: Vec<T>,
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, ties to the lowest id.
fn nearest<T: Scalar>(p: &[T], centroids: &[Vec<T>]) -> (usize, T) {
    let mut best = (0, sq_dist(p, &centroids[0]));
    for (c, centroid) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus<T: Scalar>(rows: &[Vec<T>], k: usize, r: &mut rng::Rng) -> Vec<Vec<T>> {
    let mut centroids = vec![rows[r.gen_range(0..rows.len())].clone()];
    let mut d2: Vec<f64> = rows.iter().map(|p| sq_dist(p, &centroids[0]).to_f64_lossy()).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = r.gen::<f64>() * total;
            let mut idx = d2.iter().rposition(|&d| d > 0.0).unwrap();
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && u < d {
                    idx = i;
                    break;
                }
                u -= d;
            }
            idx
        } else {
            r.gen_range(0..rows.len())
        };
        centroids.push(rows[pick].clone());
        for (p, d) in rows.iter().zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, &centroids[centroids.len() - 1]).to_f64_lossy());
        }
    }
    centroids
}

fn lloyd<T: Scalar>(rows: &[Vec<T>], mut centroids: Vec<Vec<T>>, restart: usize) -> KMeansFit<T> {
    let k = centroids.len();
    let dims = rows[0].len();
    let mut assignments: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let nearest_all: Vec<(usize, T)> = rows.iter().map(|p| nearest(p, &centroids)).collect();
        let next: Vec<usize> = nearest_all.iter().map(|x| x.0).collect();
        let wcss: T = nearest_all.iter().map(|x| x.1).sum();
        if let Some(&prev) = history.last() {
            let slack = T::from_f64_lossy(1e-9) * (prev + T::one());
            assert!(wcss <= prev + slack, "k-means WCSS increased from {prev} to {wcss}");
        }
        history.push(wcss);
        if next == assignments {
            break;
        }
        assignments = next;

        let mut sums = vec![vec![T::zero(); dims]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in rows.iter().zip(&assignments) {
            counts[c] += 1;
            for (s, &x) in sums[c].iter_mut().zip(p) {
                *s = *s + x;
            }
        }
        let mut cost: Vec<T> = nearest_all.iter().map(|x| x.1).collect();
        for c in 0..k {
            if counts[c] > 0 {
                let n = T::from_usize_lossy(counts[c]);
                centroids[c] = sums[c].iter().map(|&s| s / n).collect();
            } else {
                // Reseed at the point farthest from its own centroid.
                let far = (0..rows.len())
                    .fold(0, |best, i| if cost[i] > cost[best] { i } else { best });
                centroids[c] = rows[far].clone();
                cost[far] = T::zero();
            }
        }
    }
    let wcss = *history.last().unwrap();
    KMeansFit {
        assignments,
        centroids,
        wcss,
        restart,
        wcss_history: history,
    }
}

/// Best of `restarts` k-means++ seeded Lloyd runs by WCSS, ties to the
/// lowest restart.
pub fn kmeans<T: Scalar>(rows: &[Vec<T>], k: usize, seed: u64, restarts: usize) -> Result<KMeansFit<T>> {
    if k == 0 || k > rows.len() {
        return Err(Error::InvalidInput(format!("k = {k} with {} rows", rows.len())));
    }
    if restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::InvalidInput("rows differ in length".into()));
    }
    let fits: Vec<KMeansFit<T>> = (0..restarts)
        .into_par_iter()
        .map(|restart| {
            let mut r = rng::stream(seed, restart as u64);
            lloyd(rows, plus_plus(rows, k, &mut r), restart)
        })
        .collect();
    Ok(fits
        .into_iter()
        .reduce(|best, f| if f.wcss < best.wcss { f } else { best })
        .unwrap())
}
