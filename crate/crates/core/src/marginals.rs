//! Rank-based probability integral transforms, tie-breaking jitter, and
//! empirical quantiles.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

fn validate_finite(values: &[f64]) -> Result<()> {
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

fn has_ties(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Break exact ties at random while preserving the order of distinct values.
///
/// Tied values are perturbed by uniform noise on (-g/4, g/4) with g the
/// smallest gap between distinct sorted values; untied values pass through
/// untouched, so continuous data is returned bit-identical. When all values
/// are equal the gap is undefined and unit-scale noise (g = 1) is used
/// instead. Deterministic given `seed`.
pub fn jitter(values: &[f64], seed: u64) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::SampleTooSmall {
            min: 2,
            got: values.len(),
        });
    }
    validate_finite(values)?;
    if !has_ties(values) {
        return Ok(values.to_vec());
    }

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut gap = f64::INFINITY;
    for w in sorted.windows(2) {
        let d = w[1] - w[0];
        if d > 0.0 && d < gap {
            gap = d;
        }
    }
    // All values identical: fall back to unit scale.
    let scale = if gap.is_finite() { gap / 4.0 } else { 0.25 };

    // Only members of tie groups receive noise.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut tied = vec![false; values.len()];
    for w in order.windows(2) {
        if values[w[0]] == values[w[1]] {
            tied[w[0]] = true;
            tied[w[1]] = true;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let out: Vec<f64> = values
            .iter()
            .zip(&tied)
            .map(|(v, t)| {
                if *t {
                    v + (rng.random::<f64>() * 2.0 - 1.0) * scale
                } else {
                    *v
                }
            })
            .collect();
        if !has_ties(&out) {
            return Ok(out);
        }
    }
}

/// Rank transform rank(X_i)/(n+1); rejects ties and n < 2.
pub fn pseudo_observations(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { min: 2, got: n });
    }
    validate_finite(values)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    for w in order.windows(2) {
        if values[w[0]] == values[w[1]] {
            return Err(Error::TiesPresent);
        }
    }

    let denom = (n + 1) as f64;
    let mut out = vec![0.0; n];
    for (rank0, &i) in order.iter().enumerate() {
        out[i] = (rank0 + 1) as f64 / denom;
    }
    Ok(out)
}

/// Empirical CDF with the copula-friendly 1/(n+1) normalization.
pub fn empirical_cdf(values: &[f64], x: f64) -> f64 {
    let count = values.iter().filter(|v| **v <= x).count();
    count as f64 / (values.len() + 1) as f64
}

/// Left-continuous order-statistic inverse: the ceil(p*n)-th order statistic.
pub fn empirical_quantile(values: &[f64], p: f64) -> Result<f64> {
    SortedSample::new(values)?.quantile(p)
}

/// A sample kept sorted so repeated quantile lookups are O(1).
#[derive(Debug, Clone)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SampleTooSmall {
                min: 2,
                got: values.len(),
            });
        }
        validate_finite(values)?;
        let mut values = values.to_vec();
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// ceil(p*n)-th order statistic, p in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange {
                value: p,
                bounds: "(0, 1)",
            });
        }
        let n = self.values.len();
        let k = (p * n as f64).ceil() as usize;
        Ok(self.values[k.clamp(1, n) - 1])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
