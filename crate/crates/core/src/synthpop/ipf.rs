//! Iterative proportional fitting of a seed table to axis marginals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How a demographic axis is encoded when households are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKind {
    /// One-hot encoded.
    #[default]
    Categorical,
    /// Encoded by category index.
    Ordinal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub categories: Vec<String>,
    #[serde(default)]
    pub kind: AxisKind,
}

impl Axis {
    pub fn new(name: &str, categories: &[&str], kind: AxisKind) -> Self {
        Axis {
            name: name.to_string(),
            categories: categories.iter().map(|c| c.to_string()).collect(),
            kind,
        }
    }
}

/// Dense row-major table over the cross product of the axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    pub shape: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let cells: usize = shape.iter().product();
        if cells != data.len() {
            return Err(Error::InvalidInput(format!(
                "table of shape {shape:?} needs {cells} cells, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn total(&self) -> T {
        crate::measures::exact_sum(self.data.iter().copied())
    }

    /// Category index along every axis for each flat cell index.
    pub fn coordinates(&self, flat: usize) -> Vec<usize> {
        let mut rem = flat;
        let mut coords = vec![0; self.shape.len()];
        for (a, &len) in self.shape.iter().enumerate().rev() {
            coords[a] = rem % len;
            rem /= len;
        }
        coords
    }

    fn axis_index(&self) -> Vec<Vec<usize>> {
        let mut idx = vec![Vec::with_capacity(self.data.len()); self.shape.len()];
        for flat in 0..self.data.len() {
            for (a, c) in self.coordinates(flat).into_iter().enumerate() {
                idx[a].push(c);
            }
        }
        idx
    }

    /// Sums over all axes except `axis`.
    pub fn axis_sums(&self, axis: usize) -> Vec<T> {
        let idx = self.axis_index();
        sums_along(&self.data, &idx[axis], self.shape[axis])
    }
}

fn sums_along<T: Scalar>(data: &[T], cat: &[usize], len: usize) -> Vec<T> {
    let mut s = vec![T::zero(); len];
    for (&v, &c) in data.iter().zip(cat) {
        s[c] = s[c] + v;
    }
    s
}

#[derive(Clone, Debug)]
pub struct MarginalSet<T> {
    pub axes: Vec<Axis>,
    pub marginals: Vec<Vec<T>>,
    pub seed_table: Tensor<T>,
}

impl<T: Scalar> MarginalSet<T> {
    pub fn validate(&self, tol: T) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.axes.is_empty() {
            return bad("at least one axis required".into());
        }
        if self.axes.len() != self.marginals.len() || self.axes.len() != self.seed_table.shape.len() {
            return bad("axes, marginals and seed table dimensions disagree".into());
        }
        for (a, (axis, m)) in self.axes.iter().zip(&self.marginals).enumerate() {
            if axis.categories.len() != m.len() || self.seed_table.shape[a] != m.len() {
                return bad(format!("axis {} has inconsistent category counts", axis.name));
            }
            if m.iter().any(|v| !(*v >= T::zero())) {
                return bad(format!("axis {} has a negative marginal", axis.name));
            }
        }
        if self.seed_table.data.iter().any(|v| !(*v >= T::zero())) {
            return bad("seed table has negative cells".into());
        }
        let total = crate::measures::exact_sum(self.marginals[0].iter().copied());
        for (axis, m) in self.axes.iter().zip(&self.marginals).skip(1) {
            let t = crate::measures::exact_sum(m.iter().copied());
            if (t - total).abs() > tol {
                return bad(format!("marginal total of axis {} is {t}, expected {total}", axis.name));
            }
        }
        // every positive marginal needs seed mass in its slice
        for (a, axis) in self.axes.iter().enumerate() {
            let support = self.seed_table.axis_sums(a);
            for (c, (&s, &m)) in support.iter().zip(&self.marginals[a]).enumerate() {
                if m > T::zero() && s <= T::zero() {
                    return bad(format!(
                        "axis {} category {} has marginal {m} but no seed support",
                        axis.name, axis.categories[c]
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct IpfFit<T> {
    pub table: Tensor<T>,
    pub iterations: usize,
    /// Largest per-axis L1 gap between fitted sums and marginals.
    pub residual: T,
}

/// Scales the seed table axis by axis until every axis sum matches its
/// marginal within `tol` (L1). Zero cells stay zero.
pub fn ipf_fit<T: Scalar>(m: &MarginalSet<T>, tol: T, max_iter: usize) -> Result<IpfFit<T>> {
    m.validate(tol)?;
    let idx = m.seed_table.axis_index();
    let mut data = m.seed_table.data.clone();
    let residual_of = |data: &[T]| -> T {
        let mut worst = T::zero();
        for (a, marg) in m.marginals.iter().enumerate() {
            let s = sums_along(data, &idx[a], marg.len());
            let gap = s.iter().zip(marg).fold(T::zero(), |acc, (x, y)| acc + (*x - *y).abs());
            worst = worst.max(gap);
        }
        worst
    };
    let mut residual = residual_of(&data);
    for iter in 1..=max_iter {
        for (a, marg) in m.marginals.iter().enumerate() {
            let sums = sums_along(&data, &idx[a], marg.len());
            let factors: Vec<T> = sums
                .iter()
                .zip(marg)
                .map(|(&s, &t)| if s > T::zero() { t / s } else { T::zero() })
                .collect();
            for (v, &c) in data.iter_mut().zip(&idx[a]) {
                *v = *v * factors[c];
            }
        }
        residual = residual_of(&data);
        if residual <= tol {
            return Ok(IpfFit {
                table: Tensor {
                    shape: m.seed_table.shape.clone(),
                    data,
                },
                iterations: iter,
                residual,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "ipf",
        iterations: max_iter,
        residual: residual.to_f64_lossy(),
    })
}
