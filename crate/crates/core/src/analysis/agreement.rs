use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Family, GraphLabel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub ari: f64,
    /// Fraction of each family's rows that fall in its modal cluster.
    pub purity: BTreeMap<Family, f64>,
    /// For each agent-synthetic row, whether its cluster is mostly
    /// real-world graphs.
    pub synthetic_in_real_cluster: Vec<(String, bool)>,
}

fn comb2(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Adjusted Rand index between two labelings.
pub fn adjusted_rand_index<A: Ord + Clone, B: Ord + Clone>(a: &[A], b: &[B]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!("{} vs {} labels", a.len(), b.len())));
    }
    let mut table: BTreeMap<(A, B), usize> = BTreeMap::new();
    let mut rows: BTreeMap<A, usize> = BTreeMap::new();
    let mut cols: BTreeMap<B, usize> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        *table.entry((x.clone(), y.clone())).or_default() += 1;
        *rows.entry(x.clone()).or_default() += 1;
        *cols.entry(y.clone()).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| comb2(c)).sum();
    let sa: f64 = rows.values().map(|&c| comb2(c)).sum();
    let sb: f64 = cols.values().map(|&c| comb2(c)).sum();
    let total = comb2(a.len());
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sa * sb / total;
    let max = (sa + sb) / 2.0;
    if max == expected {
        // Both partitions trivial in the same way.
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

fn modal<K: Ord + Copy>(counts: &BTreeMap<K, usize>) -> Option<(K, usize)> {
    // BTreeMap iteration is ordered, so ties go to the smallest key.
    counts
        .iter()
        .fold(None, |best, (&k, &c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((k, c)),
        })
}

pub fn label_agreement(assignments: &[usize], labels: &[GraphLabel]) -> Result<Agreement> {
    let families: Vec<Family> = labels.iter().map(|l| l.family).collect();
    let ari = adjusted_rand_index(assignments, &families)?;

    let mut by_family: BTreeMap<Family, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut by_cluster: BTreeMap<usize, BTreeMap<Family, usize>> = BTreeMap::new();
    for (&c, &f) in assignments.iter().zip(&families) {
        *by_family.entry(f).or_default().entry(c).or_default() += 1;
        *by_cluster.entry(c).or_default().entry(f).or_default() += 1;
    }
    let purity = by_family
        .iter()
        .map(|(&f, counts)| {
            let total: usize = counts.values().sum();
            (f, modal(counts).map_or(0.0, |(_, c)| c as f64 / total as f64))
        })
        .collect();
    let synthetic_in_real_cluster = labels
        .iter()
        .zip(assignments)
        .filter(|(l, _)| l.family == Family::AgentSynthetic)
        .map(|(l, c)| {
            let real = modal(&by_cluster[c]).map(|(f, _)| f) == Some(Family::RealWorld);
            (l.name.clone(), real)
        })
        .collect();
    Ok(Agreement {
        ari,
        purity,
        synthetic_in_real_cluster,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ari_examples() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1, 2], &[5, 5, 6, 6, 7]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 0, 0], &['a', 'a', 'b', 'b']).unwrap(), 0.0);
        assert_eq!(adjusted_rand_index(&[1, 1, 0, 0], &['A', 'A', 'B', 'B']).unwrap(), 1.0);
        // Worked example: contingency [[2,1],[0,2]] (n=5).
        // index = 1 + 1 = 2, sa = 3 + 1 = 4, sb = 1 + 3 = 4, expected = 1.6, max = 4.
        let ari = adjusted_rand_index(&[0, 0, 0, 1, 1], &[0, 0, 1, 1, 1]).unwrap();
        assert!((ari - (2.0 - 1.6) / (4.0 - 1.6)).abs() < 1e-15);
    }

    #[test]
    fn purity_and_synthetic_flags() {
        let labels = vec![
            GraphLabel::new("email", Family::RealWorld),
            GraphLabel::new("p2p", Family::RealWorld),
            GraphLabel::new("G1", Family::AgentSynthetic),
            GraphLabel::new("Home", Family::AgentSynthetic),
            GraphLabel::new("ER-15", Family::ErdosRenyi),
        ];
        let a = label_agreement(&[0, 0, 0, 1, 2], &labels).unwrap();
        assert_eq!(a.purity[&Family::RealWorld], 1.0);
        assert_eq!(a.purity[&Family::AgentSynthetic], 0.5);
        assert_eq!(
            a.synthetic_in_real_cluster,
            vec![("G1".to_string(), true), ("Home".to_string(), false)]
        );
    }

    proptest! {
        #[test]
        fn ari_invariant_under_cluster_relabeling(a in prop::collection::vec(0usize..4, 2..30), seed in 0u64..1000) {
            let b: Vec<usize> = a.iter().enumerate().map(|(i, _)| (crate::rng::mix(seed, i as u64) % 3) as usize).collect();
            let perm = [2usize, 0, 3, 1];
            let a2: Vec<usize> = a.iter().map(|&x| perm[x]).collect();
            let x = adjusted_rand_index(&a, &b).unwrap();
            let y = adjusted_rand_index(&a2, &b).unwrap();
            prop_assert!((x - y).abs() < 1e-12);
            prop_assert!(x <= 1.0 + 1e-12);
        }
    }
}
