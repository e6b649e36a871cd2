//! Randomised inputs shared by the property and acceptance tests.

#![allow(dead_code)]

use synthgraph::rng::keyed_uniform;
use synthgraph::synthpop::{Axis, AxisKind, MarginalSet, Purpose, Tensor, Visit, VisitSchedule};

/// Per-axis sums of a row-major tensor, computed by index decomposition.
pub fn margins(shape: &[usize], data: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = shape.iter().map(|&s| vec![0.0; s]).collect();
    for (flat, &x) in data.iter().enumerate() {
        let mut rest = flat;
        for a in (0..shape.len()).rev() {
            out[a][rest % shape[a]] += x;
            rest /= shape[a];
        }
    }
    out
}

/// A feasible three-axis instance: marginals come from a hidden table whose
/// support equals the seed's, so an exact fit exists.
pub fn ipf_instance(seed: u64) -> MarginalSet<f64> {
    let mut key = 0u64;
    let mut u = || {
        key += 1;
        keyed_uniform(seed, key)
    };
    let shape: Vec<usize> = (0..3).map(|_| 2 + (u() * 4.0) as usize).collect();
    let cells: usize = shape.iter().product();
    let mut truth: Vec<f64> = (0..cells).map(|_| if u() < 0.2 { 0.0 } else { 0.5 + 9.5 * u() }).collect();
    // keep every category populated
    for i in 0..shape.iter().copied().max().unwrap() {
        let mut flat = 0;
        for &s in &shape {
            flat = flat * s + i.min(s - 1);
        }
        if truth[flat] == 0.0 {
            truth[flat] = 1.0;
        }
    }
    let total: f64 = truth.iter().sum();
    truth.iter_mut().for_each(|x| *x *= 1000.0 / total);
    let seed_data: Vec<f64> = truth.iter().map(|&t| if t == 0.0 { 0.0 } else { 0.1 + 4.9 * u() }).collect();
    let names = ["a", "b", "c", "d", "e"];
    MarginalSet {
        axes: shape
            .iter()
            .enumerate()
            .map(|(i, &s)| Axis::new(&format!("axis{i}"), &names[..s], AxisKind::Categorical))
            .collect(),
        marginals: margins(&shape, &truth),
        seed_table: Tensor::new(shape, seed_data).unwrap(),
    }
}

/// Random non-overlapping weekly visits for `persons` people over a few
/// locations.
pub fn random_visits(persons: usize, locations: usize, seed: u64) -> VisitSchedule {
    let mut key = 0u64;
    let mut u = || {
        key += 1;
        keyed_uniform(seed, key)
    };
    let mut visits = Vec::new();
    for person in 0..persons {
        let mut t = (u() * 120.0) as u32;
        while t < 3000 {
            let duration = 10 + (u() * 300.0) as u32;
            visits.push(Visit {
                person,
                location: (u() * locations as f64) as usize,
                purpose: Purpose::ALL[(u() * 5.0) as usize],
                start: t,
                duration,
            });
            t += duration + (u() * 200.0) as u32;
        }
    }
    VisitSchedule { person_count: persons, visits }
}
