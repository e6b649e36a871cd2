//! Correctly rounded floating-point summation.
//!
//! Node measures sum over neighbour and source sets whose iteration order
//! follows node labels. Rounding the exact sum once makes every such result
//! independent of that order, so relabeled graphs give bitwise-equal
//! features and parallel reductions do not depend on the thread count.

use crate::scalar::Scalar;

/// Running exact sum kept as non-overlapping partials.
#[derive(Clone, Debug, Default)]
pub struct ExactSum<T> {
    partials: Vec<T>,
}

impl<T: Scalar> ExactSum<T> {
    pub fn new() -> Self {
        ExactSum { partials: Vec::new() }
    }

    pub fn clear(&mut self) {
        self.partials.clear();
    }

    pub fn add(&mut self, mut x: T) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != T::zero() {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn merge(&mut self, other: &ExactSum<T>) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    /// The exact sum rounded to nearest, ties to even.
    pub fn value(&self) -> T {
        let p = &self.partials;
        let Some(&top) = p.last() else {
            return T::zero();
        };
        let mut n = p.len() - 1;
        let mut hi = top;
        let mut lo = T::zero();
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            lo = y - (hi - x);
            if lo != T::zero() {
                break;
            }
        }
        // half-way case: the remaining partials decide the rounding direction
        if n > 0 {
            let next = p[n - 1];
            let two = T::one() + T::one();
            if (lo < T::zero() && next < T::zero()) || (lo > T::zero() && next > T::zero()) {
                let y = lo * two;
                let x = hi + y;
                if y == x - hi {
                    hi = x;
                }
            }
        }
        hi
    }
}

impl<T: Scalar> FromIterator<T> for ExactSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn exact_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().collect::<ExactSum<T>>().value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cancellation() {
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum([0.1f64; 10]), 1.0);
        assert_eq!(exact_sum(Vec::<f64>::new()), 0.0);
    }

    #[test]
    fn f32_supported() {
        assert_eq!(exact_sum([1e8f32, 1.0, -1e8]), 1.0);
    }

    proptest! {
        #[test]
        fn order_independent(mut v in proptest::collection::vec(-1e6f64..1e6, 0..50), seed in any::<u64>()) {
            let a = exact_sum(v.iter().copied());
            use rand::seq::SliceRandom;
            v.shuffle(&mut crate::rng::seeded(seed));
            prop_assert_eq!(a.to_bits(), exact_sum(v.iter().copied()).to_bits());
        }

        #[test]
        fn merge_matches_single_pass(a in proptest::collection::vec(-1e3f64..1e3, 0..30), b in proptest::collection::vec(-1e3f64..1e3, 0..30)) {
            let mut x: ExactSum<f64> = a.iter().copied().collect();
            x.merge(&b.iter().copied().collect());
            prop_assert_eq!(x.value(), exact_sum(a.iter().chain(b.iter()).copied()));
        }
    }
}
