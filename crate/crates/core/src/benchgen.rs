//! Synthetic cause-effect benchmark families with ground truth.
//!
//! Six families share the cause X ~ N(0, sqrt(2)) and differ in mechanism
//! and noise:
//!
//! * `AN` / `AN-s`  — Y = f(X) + E,        E ~ N(0, sigma), sigma ~ U[1/5, sqrt(2/5)]
//! * `HN` / `HN-s`  — Y = a f(X) + (1 + bX) E, a, b ~ U[0.1, 0.9], E as above
//! * `MN-U`         — Y = f(X) E,          E ~ U(-1, 1)
//! * `MN-G`         — Y = f(X) E,          E ~ N(0, 1)
//!
//! `f` is a fresh Gaussian-process draw (squared-exponential kernel,
//! length-scale 1 on standardized X) for the base families and a randomized
//! sigmoid for the `-s` variants. Column order is shuffled by a fair coin
//! and recorded as ground truth, so generated benchmarks are balanced.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pair::{Direction, LabeledPair, Pair};
use crate::seeding::derive_seed;

const MAX_GP_INPUT: usize = 5000;

/// Scenario family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    An,
    AnS,
    Hn,
    HnS,
    MnU,
    MnG,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::An,
        Family::AnS,
        Family::Hn,
        Family::HnS,
        Family::MnU,
        Family::MnG,
    ];

    fn uses_sigmoid(self) -> bool {
        matches!(self, Family::AnS | Family::HnS)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::An => "AN",
            Family::AnS => "AN-s",
            Family::Hn => "HN",
            Family::HnS => "HN-s",
            Family::MnU => "MN-U",
            Family::MnG => "MN-G",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AN" => Ok(Family::An),
            "AN-S" => Ok(Family::AnS),
            "HN" => Ok(Family::Hn),
            "HN-S" => Ok(Family::HnS),
            "MN-U" => Ok(Family::MnU),
            "MN-G" => Ok(Family::MnG),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// A complete benchmark description; the master seed determines every pair.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub family: Family,
    pub n: usize,
    pub n_pairs: usize,
    pub seed: u64,
}

/// One zero-mean Gaussian-process draw over `xs` with squared-exponential
/// kernel. Duplicate inputs receive identical outputs; the kernel matrix is
/// stabilized by escalating diagonal jitter up to 1e-6 before giving up.
pub fn sample_gp_function(
    xs: &[f64],
    length_scale: f64,
    amplitude: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if xs.len() > MAX_GP_INPUT {
        return Err(Error::GpInputTooLong {
            got: xs.len(),
            max: MAX_GP_INPUT,
        });
    }
    if xs.is_empty() {
        return Err(Error::EmptyInput("gp inputs"));
    }
    if let Some(index) = xs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    assert!(length_scale > 0.0, "length scale must be positive");
    if amplitude == 0.0 {
        return Ok(vec![0.0; xs.len()]);
    }

    // Factor on distinct inputs only so exact duplicates map to the same
    // function value.
    let mut unique = xs.to_vec();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let index_of: Vec<usize> = xs
        .iter()
        .map(|x| unique.partition_point(|u| u < x))
        .collect();

    let m = unique.len();
    let two_l2 = 2.0 * length_scale * length_scale;
    let factor = {
        let mut found = None;
        let mut jitter = 1e-10;
        while jitter <= 1e-6 {
            let k = DMatrix::from_fn(m, m, |i, j| {
                let d = unique[i] - unique[j];
                (-d * d / two_l2).exp() + if i == j { jitter } else { 0.0 }
            });
            if let Some(chol) = k.cholesky() {
                found = Some(chol);
                break;
            }
            jitter *= 10.0;
        }
        found.ok_or(Error::KernelFactorization)?
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = DVector::from_fn(m, |_, _| StandardNormal.sample(&mut rng));
    let f_unique = factor.l() * eps;
    Ok(index_of.iter().map(|&k| amplitude * f_unique[k]).collect())
}

fn standardize(xs: &[f64]) -> Vec<f64> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt().max(1e-12);
    xs.iter().map(|x| (x - mean) / sd).collect()
}

/// Randomized saturating sigmoid: f(x) = a b (x + c) / (1 + |b (x + c)|)
/// with a = +-U[0.5, 2], b ~ U[0.5, 2], c ~ U[-2, 2].
fn sample_sigmoid(xs: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let a = sign * rng.random_range(0.5..2.0);
    let b = rng.random_range(0.5..2.0);
    let c = rng.random_range(-2.0..2.0);
    xs.iter()
        .map(|x| {
            let t = b * (x + c);
            a * t / (1.0 + t.abs())
        })
        .collect()
}

/// Generate the pair at `pair_index` of a scenario. Deterministic: the
/// per-pair seed is derived from the scenario seed and the index.
pub fn gen_pair(scenario: &Scenario, pair_index: usize) -> Result<LabeledPair> {
    if scenario.n < 2 {
        return Err(Error::SampleTooSmall {
            min: 2,
            got: scenario.n,
        });
    }
    let seed = derive_seed(scenario.seed, pair_index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = scenario.n;

    let x_dist = Normal::new(0.0, std::f64::consts::SQRT_2).unwrap();
    let x: Vec<f64> = (0..n).map(|_| x_dist.sample(&mut rng)).collect();

    let f = if scenario.family.uses_sigmoid() {
        sample_sigmoid(&x, &mut rng)
    } else {
        let gp_seed: u64 = rng.random();
        sample_gp_function(&standardize(&x), 1.0, 1.0, gp_seed)?
    };

    let y: Vec<f64> = match scenario.family {
        Family::An | Family::AnS => {
            let sigma = rng.random_range(0.2..(0.4f64).sqrt());
            let noise = Normal::new(0.0, sigma).unwrap();
            f.iter().map(|fi| fi + noise.sample(&mut rng)).collect()
        }
        Family::Hn | Family::HnS => {
            let a = rng.random_range(0.1..0.9);
            let b = rng.random_range(0.1..0.9);
            let sigma = rng.random_range(0.2..(0.4f64).sqrt());
            let noise = Normal::new(0.0, sigma).unwrap();
            f.iter()
                .zip(&x)
                .map(|(fi, xi)| a * fi + (1.0 + b * xi) * noise.sample(&mut rng))
                .collect()
        }
        Family::MnU => f
            .iter()
            .map(|fi| fi * (rng.random::<f64>() * 2.0 - 1.0))
            .collect(),
        Family::MnG => {
            let noise = Normal::new(0.0, 1.0).unwrap();
            f.iter().map(|fi| fi * noise.sample(&mut rng)).collect()
        }
    };

    let id = format!("pair{:04}", pair_index + 1);
    if rng.random_bool(0.5) {
        Ok(LabeledPair {
            id,
            pair: Pair::new(x, y)?,
            truth: Direction::XToY,
            weight: 1.0,
        })
    } else {
        Ok(LabeledPair {
            id,
            pair: Pair::new(y, x)?,
            truth: Direction::YToX,
            weight: 1.0,
        })
    }
}

/// Generate all pairs of a scenario (parallel over pairs, reproducible).
pub fn gen_benchmark(scenario: &Scenario) -> Result<Vec<LabeledPair>> {
    (0..scenario.n_pairs)
        .into_par_iter()
        .map(|k| gen_pair(scenario, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gp_single_point_draws_from_prior() {
        // Variance over many single-point draws matches amplitude^2.
        let mut acc = 0.0;
        let reps = 4000;
        for seed in 0..reps {
            let f = sample_gp_function(&[0.7], 1.0, 2.0, seed).unwrap();
            assert_eq!(f.len(), 1);
            acc += f[0] * f[0];
        }
        let var = acc / reps as f64;
        assert!((var - 4.0).abs() < 0.3, "single-point variance {var}");
    }

    #[test]
    fn gp_zero_amplitude_is_zero() {
        let xs = vec![0.0, 0.5, 1.0, 2.0];
        assert_eq!(sample_gp_function(&xs, 1.0, 0.0, 9).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn gp_duplicates_get_equal_outputs() {
        let xs = vec![0.3, 1.2, 0.3, -0.5, 1.2];
        let f = sample_gp_function(&xs, 1.0, 1.0, 4).unwrap();
        assert_eq!(f[0], f[2]);
        assert_eq!(f[1], f[4]);
        assert!(f[0] != f[3]);
    }

    #[test]
    fn gp_is_deterministic_and_smooth() {
        let xs: Vec<f64> = (0..400).map(|k| k as f64 / 100.0).collect();
        let a = sample_gp_function(&xs, 1.0, 1.0, 77).unwrap();
        let b = sample_gp_function(&xs, 1.0, 1.0, 77).unwrap();
        assert_eq!(a, b);
        // Neighboring points 0.01 apart stay close under length-scale 1.
        for w in a.windows(2) {
            assert!((w[0] - w[1]).abs() < 0.2);
        }
    }

    #[test]
    fn gp_rejects_oversized_input() {
        let xs = vec![0.0; MAX_GP_INPUT + 1];
        assert!(matches!(
            sample_gp_function(&xs, 1.0, 1.0, 0),
            Err(Error::GpInputTooLong { .. })
        ));
    }

    #[test]
    fn pair_generation_deterministic() {
        let sc = Scenario {
            family: Family::Hn,
            n: 200,
            n_pairs: 3,
            seed: 5,
        };
        let a = gen_benchmark(&sc).unwrap();
        let b = gen_benchmark(&sc).unwrap();
        assert_eq!(a.len(), 3);
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!(pa.pair.x, pb.pair.x);
            assert_eq!(pa.pair.y, pb.pair.y);
            assert_eq!(pa.truth, pb.truth);
        }
    }

    #[test]
    fn empty_benchmark() {
        let sc = Scenario {
            family: Family::An,
            n: 100,
            n_pairs: 0,
            seed: 0,
        };
        assert!(gen_benchmark(&sc).unwrap().is_empty());
    }

    #[test]
    fn coin_flip_is_balanced() {
        let sc = Scenario {
            family: Family::MnU,
            n: 2,
            n_pairs: 1000,
            seed: 11,
        };
        let pairs = gen_benchmark(&sc).unwrap();
        let frac = pairs
            .iter()
            .filter(|p| p.truth == Direction::XToY)
            .count() as f64
            / pairs.len() as f64;
        assert!((0.44..=0.56).contains(&frac), "x->y fraction {frac}");
    }

    #[test]
    fn cause_variance_near_two() {
        let sc = Scenario {
            family: Family::An,
            n: 1000,
            n_pairs: 8,
            seed: 23,
        };
        for (k, lp) in gen_benchmark(&sc).unwrap().iter().enumerate() {
            let cause = match lp.truth {
                Direction::XToY => &lp.pair.x,
                _ => &lp.pair.y,
            };
            let n = cause.len() as f64;
            let mean = cause.iter().sum::<f64>() / n;
            let var = cause.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            assert!((1.6..=2.4).contains(&var), "pair {k}: cause variance {var}");
        }
    }

    #[test]
    fn mn_u_noise_support() {
        // Y/f(X) must lie in (-1, 1); reconstruct f by regenerating the pair
        // deterministically and checking the ratio bound via |y| < |f|.
        let sc = Scenario {
            family: Family::MnU,
            n: 500,
            n_pairs: 4,
            seed: 3,
        };
        for lp in gen_benchmark(&sc).unwrap() {
            let (effect, _cause) = match lp.truth {
                Direction::XToY => (&lp.pair.y, &lp.pair.x),
                _ => (&lp.pair.x, &lp.pair.y),
            };
            // |y| = |f||e| <= |f| for e in (-1,1); the GP amplitude is 1 so
            // |f| rarely exceeds 4 sd; sanity-bound the effect scale.
            assert!(effect.iter().all(|v| v.abs() < 6.0));
        }
    }

    #[test]
    fn an_residual_scale_in_sigma_range() {
        let sc = Scenario {
            family: Family::An,
            n: 1000,
            n_pairs: 5,
            seed: 40,
        };
        for k in 0..sc.n_pairs {
            // Recompute the mechanism deterministically to get residuals.
            let seed = derive_seed(sc.seed, k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x_dist = Normal::new(0.0, std::f64::consts::SQRT_2).unwrap();
            let x: Vec<f64> = (0..sc.n).map(|_| x_dist.sample(&mut rng)).collect();
            let gp_seed: u64 = rng.random();
            let f = sample_gp_function(&standardize(&x), 1.0, 1.0, gp_seed).unwrap();

            let lp = gen_pair(&sc, k).unwrap();
            let (cause, effect) = match lp.truth {
                Direction::XToY => (&lp.pair.x, &lp.pair.y),
                _ => (&lp.pair.y, &lp.pair.x),
            };
            assert_eq!(cause, &x);
            let resid: Vec<f64> = effect.iter().zip(&f).map(|(y, fi)| y - fi).collect();
            let n = resid.len() as f64;
            let mean = resid.iter().sum::<f64>() / n;
            let sd = (resid.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0))
                .sqrt();
            assert!(
                (0.17..=0.68).contains(&sd),
                "pair {k}: residual sd {sd} outside the sigma band"
            );
        }
    }
}
