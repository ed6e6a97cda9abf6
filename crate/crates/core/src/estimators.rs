//! Sample Hoover and Gini estimators.

use serde::Serialize;

use crate::error::{Error, Result, SampleError};

/// Observations `X_1, ..., X_n` with `n >= 2`, each finite and non-negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> std::result::Result<Self, SampleError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(SampleError::NonFinite { index });
            }
            if value < 0.0 {
                return Err(SampleError::Negative { index, value });
            }
        }
        if values.len() < 2 {
            return Err(SampleError::TooSmall(values.len()));
        }
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        pairwise_sum(&self.sorted())
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    /// Rejects non-integer values (for discrete families).
    pub fn check_integer(&self) -> std::result::Result<(), SampleError> {
        match self.values.iter().position(|v| v.fract() != 0.0) {
            Some(index) => Err(SampleError::NotInteger {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }

    /// Values in ascending order; every reduction runs over this order so
    /// that results do not depend on how the input was arranged.
    pub(crate) fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `c * X` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Sample> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("scale factor must be positive, got {c}")));
        }
        Ok(Sample {
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = SampleError;

    fn try_from(values: Vec<f64>) -> std::result::Result<Self, SampleError> {
        Sample::new(values)
    }
}

const PAIRWISE_BLOCK: usize = 8;

pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().sum()
    } else {
        let (lo, hi) = xs.split_at(xs.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// `(1/2) sum |X_i - mean| / sum X_i`, or 0 when the sample sums to zero.
pub fn hoover_hat(s: &Sample) -> f64 {
    let sorted = s.sorted();
    let total = pairwise_sum(&sorted);
    if total == 0.0 {
        return 0.0;
    }
    if sorted.len() == 2 {
        // |X1 - mean| + |X2 - mean| = |X1 - X2| exactly
        return 0.5 * ((sorted[1] - sorted[0]) / total);
    }
    let mean = total / sorted.len() as f64;
    let deviations: Vec<f64> = sorted.iter().map(|x| (x - mean).abs()).collect();
    0.5 * (pairwise_sum(&deviations) / total)
}

/// `(1/(n-1)) sum_{i<j} |X_i - X_j| / sum X_i`, via the sorted form
/// `sum_k (2k - n - 1) X_(k)`.
pub fn gini_hat(s: &Sample) -> Result<f64> {
    let sorted = s.sorted();
    let total = pairwise_sum(&sorted);
    if total == 0.0 {
        return Err(Error::domain(
            "Gini estimator is undefined for a sample summing to zero",
        ));
    }
    let n = sorted.len() as f64;
    let weighted: Vec<f64> = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .collect();
    Ok(pairwise_sum(&weighted) / ((n - 1.0) * total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    fn gini_quadratic(v: &[f64]) -> f64 {
        let mut pairs = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                pairs += (v[i] - v[j]).abs();
            }
        }
        pairs / ((v.len() as f64 - 1.0) * v.iter().sum::<f64>())
    }

    #[test]
    fn hoover_examples() {
        assert_eq!(hoover_hat(&sample(&[1.0, 1.0, 1.0, 1.0])), 0.0);
        assert_eq!(hoover_hat(&sample(&[0.0, 0.0, 0.0])), 0.0);
        assert_eq!(hoover_hat(&sample(&[0.0, 2.0])), 0.5);
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini_hat(&sample(&[1.0, 1.0, 1.0])).unwrap(), 0.0);
        assert_eq!(gini_hat(&sample(&[0.0, 2.0])).unwrap(), 1.0);
        assert!(gini_hat(&sample(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn extremal_sample_hits_upper_bound() {
        for n in 2..40 {
            let mut v = vec![0.0; n];
            v[n / 2] = 3.7;
            let h = hoover_hat(&sample(&v));
            assert!((h - (1.0 - 1.0 / n as f64)).abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn construction_rejects_bad_values() {
        assert_eq!(Sample::new(vec![1.0]), Err(SampleError::TooSmall(1)));
        assert_eq!(
            Sample::new(vec![1.0, -2.0]),
            Err(SampleError::Negative { index: 1, value: -2.0 })
        );
        assert_eq!(
            Sample::new(vec![f64::NAN, 1.0]),
            Err(SampleError::NonFinite { index: 0 })
        );
        assert!(sample(&[1.0, 2.5]).check_integer().is_err());
        assert!(sample(&[1.0, 2.0]).check_integer().is_ok());
    }

    fn positive_sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1e3, 2..60).prop_filter("needs positive sum", |v| v.iter().sum::<f64>() > 0.0)
    }

    proptest! {
        #[test]
        fn scale_invariance(v in positive_sample(), c in prop::sample::select(vec![1e-6, 0.37, 1.0, 1e6])) {
            let s = sample(&v);
            let h = hoover_hat(&s);
            let hc = hoover_hat(&s.scaled(c).unwrap());
            prop_assert!((h - hc).abs() <= 1e-12 * h.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn range(v in prop::collection::vec(0.0f64..50.0, 2..80)) {
            let s = sample(&v);
            let h = hoover_hat(&s);
            prop_assert!(h >= 0.0 && h <= 1.0 - 1.0 / v.len() as f64);
        }

        #[test]
        fn two_point_identity(a in 0.0f64..1e4, b in 0.0f64..1e4) {
            prop_assume!(a + b > 0.0);
            let s = sample(&[a, b]);
            prop_assert_eq!(hoover_hat(&s), gini_hat(&s).unwrap() / 2.0);
        }

        #[test]
        fn sorted_gini_matches_quadratic(v in positive_sample()) {
            let g = gini_hat(&sample(&v)).unwrap();
            prop_assert!((g - gini_quadratic(&v)).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&g));
        }

        #[test]
        fn permutation_invariance(v in positive_sample(), seed in any::<u64>()) {
            let mut shuffled = v.clone();
            let mut state = seed | 1;
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                shuffled.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let (a, b) = (sample(&v), sample(&shuffled));
            prop_assert_eq!(hoover_hat(&a).to_bits(), hoover_hat(&b).to_bits());
            prop_assert_eq!(gini_hat(&a).unwrap().to_bits(), gini_hat(&b).unwrap().to_bits());
        }
    }
}
