use crate::error::{Error, Result};

/// Outcomes of a biased sample, kept sorted with ties as multiplicities.
///
/// Besides the sorted values the sample keeps its distinct values and the
/// cumulative observation counts at each of them; CDF-type constraints are
/// indexed by distinct value while weights stay per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    distinct: Vec<f64>,
    // cum_counts[k] = number of observations <= distinct[k]
    cum_counts: Vec<usize>,
}

impl Sample {
    /// Builds a sample from unsorted outcomes.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample is empty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample value {bad}")));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        Ok(Self::from_sorted_unchecked(values))
    }

    /// Builds a sample from outcomes that are already sorted nondecreasing.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample is empty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample value {bad}")));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("sample values are not sorted"));
        }
        Ok(Self::from_sorted_unchecked(values))
    }

    fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        let mut distinct = Vec::new();
        let mut cum_counts = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if distinct.last() == Some(&v) {
                *cum_counts.last_mut().unwrap() = i + 1;
            } else {
                distinct.push(v);
                cum_counts.push(i + 1);
            }
        }
        Sample { values, distinct, cum_counts }
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

    pub fn distinct_values(&self) -> &[f64] {
        &self.distinct
    }

    /// Number of observations at or below the `k`-th distinct value, for each `k`.
    pub fn cumulative_counts(&self) -> &[usize] {
        &self.cum_counts
    }

    /// Multiplicity of each distinct value.
    pub fn group_counts(&self) -> Vec<usize> {
        let mut prev = 0;
        self.cum_counts
            .iter()
            .map(|&c| {
                let g = c - prev;
                prev = c;
                g
            })
            .collect()
    }

    /// Index of the first observation of the `k`-th distinct value group,
    /// or `n` when `k` equals the number of distinct values.
    pub fn group_start(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.cum_counts[k - 1]
        }
    }

    /// Number of distinct values `<= y`.
    pub fn distinct_le(&self, y: f64) -> usize {
        self.distinct.partition_point(|&v| v <= y)
    }

    /// Number of distinct values `< y`.
    pub fn distinct_lt(&self, y: f64) -> usize {
        self.distinct.partition_point(|&v| v < y)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Sample standard deviation (n - 1 denominator); zero for a single value.
    pub fn sd(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    pub fn is_constant(&self) -> bool {
        self.distinct.len() == 1
    }

    /// The sample of `-Y`, sorted.
    pub fn negated(&self) -> Sample {
        Self::from_sorted_unchecked(self.values.iter().rev().map(|v| -v).collect())
    }

    pub fn shifted(&self, c: f64) -> Sample {
        Self::from_sorted_unchecked(self.values.iter().map(|v| v + c).collect())
    }

    pub(crate) fn require_bounds_size(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::invalid(format!(
                "bound computation needs at least 2 observations, got {}",
                self.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_groups_ties() {
        let s = Sample::new(vec![2.0, 1.0, 2.0, 5.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 2.0, 5.0]);
        assert_eq!(s.distinct_values(), &[1.0, 2.0, 5.0]);
        assert_eq!(s.cumulative_counts(), &[1, 3, 4]);
        assert_eq!(s.group_counts(), vec![1, 2, 1]);
        assert_eq!(s.group_start(2), 3);
        assert_eq!(s.distinct_le(2.0), 2);
        assert_eq!(s.distinct_lt(2.0), 1);
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        assert!(Sample::new(vec![f64::INFINITY]).is_err());
        assert!(Sample::from_sorted(vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn negation_reverses_order() {
        let s = Sample::new(vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.negated().values(), &[-3.0, -1.0, 0.0]);
        assert_eq!(s.sd(), (7.0f64 / 3.0).sqrt());
    }
}
