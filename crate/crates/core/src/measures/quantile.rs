use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Empirical quantiles by linear interpolation on rank `h = q (n - 1)`.
pub fn quantile_sample<T: Scalar>(values: &[T], probs: &[f64]) -> Result<Vec<T>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("quantile of an empty sequence".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("quantile input contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let last = sorted.len() - 1;
    probs
        .iter()
        .map(|&q| {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidInput(format!("probability {q} not in [0,1]")));
            }
            let h = q * last as f64;
            let lo = h.floor() as usize;
            if lo >= last {
                return Ok(sorted[last]);
            }
            let frac = T::from_f64_lossy(h - lo as f64);
            Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
        })
        .collect()
}
