use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pca2<T> {
    /// Two unit-norm principal axes.
    pub axes: [Vec<T>; 2],
    /// Fraction of total variance captured by each axis.
    pub explained_variance: [T; 2],
    /// Centered rows projected on the axes.
    pub projection: Vec<[T; 2]>,
    pub mean: Vec<T>,
    /// Set when the data spans fewer than two directions; the missing
    /// axes are zero.
    pub degenerate: bool,
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and eigenvectors (as columns of `v`), unsorted.
pub fn symmetric_eigen<T: Scalar>(mut a: Vec<Vec<T>>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let norm: T = a.iter().flatten().map(|&x| x * x).sum::<T>().sqrt();
    let tol = norm * T::epsilon();
    let two = T::from_f64_lossy(2.0);
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<T>()
            .sqrt();
        if off <= tol {
            return Ok(((0..n).map(|i| a[i][i]).collect(), v));
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (two * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::NonConvergence {
        what: "jacobi eigendecomposition",
        iterations: MAX_SWEEPS,
        residual: f64::NAN,
    })
}

/// Two leading principal components of the column-centered rows.
pub fn pca2<T: Scalar>(rows: &[Vec<T>]) -> Result<Pca2<T>> {
    if rows.len() < 3 {
        return Err(Error::InvalidInput(format!("PCA needs at least 3 rows, got {}", rows.len())));
    }
    let d = rows[0].len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidInput("rows must share a positive length".into()));
    }
    let n = T::from_usize_lossy(rows.len());
    let mean: Vec<T> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<T>() / n).collect();
    let centered: Vec<Vec<T>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(&x, &m)| x - m).collect())
        .collect();
    let cov: Vec<Vec<T>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| centered.iter().map(|r| r[i] * r[j]).sum::<T>() / n)
                .collect()
        })
        .collect();
    let (values, vectors) = symmetric_eigen(cov)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    let total: T = values.iter().map(|&x| x.max(T::zero())).sum();
    let floor = total * T::epsilon() * T::from_usize_lossy(d * 16);

    let mut degenerate = false;
    let mut axes: [Vec<T>; 2] = [vec![T::zero(); d], vec![T::zero(); d]];
    let mut explained = [T::zero(); 2];
    for (slot, &idx) in order.iter().take(2).enumerate() {
        if values[idx] <= floor || total <= T::zero() {
            degenerate = true;
            continue;
        }
        let mut axis: Vec<T> = vectors.iter().map(|row| row[idx]).collect();
        let norm = axis.iter().map(|&x| x * x).sum::<T>().sqrt();
        let lead = axis
            .iter()
            .enumerate()
            .fold(0, |b, (i, x)| if x.abs() > axis[b].abs() { i } else { b });
        let sign = if axis[lead] < T::zero() { -T::one() } else { T::one() };
        for x in axis.iter_mut() {
            *x = *x * sign / norm;
        }
        axes[slot] = axis;
        explained[slot] = values[idx] / total;
    }
    if d < 2 {
        degenerate = true;
    }
    let projection = centered
        .iter()
        .map(|r| {
            let dot = |a: &[T]| r.iter().zip(a).map(|(&x, &y)| x * y).sum::<T>();
            [dot(&axes[0]), dot(&axes[1])]
        })
        .collect();
    Ok(Pca2 {
        axes,
        explained_variance: explained,
        projection,
        mean,
        degenerate,
    })
}
