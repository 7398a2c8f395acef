//! Pinball quantile loss, directional quantile scores, and their
//! Gauss-Legendre aggregation into a single direction score in [0, 1].

use crate::copula::CopulaModel;
use crate::error::{Error, Result};
use crate::marginals::{jitter, pseudo_observations, SortedSample};
use crate::pair::Pair;
use crate::seeding::{column_fingerprint, derive_seed};

/// Both directional scores below this threshold count as degenerate and
/// yield the undecided value 0.5 instead of a 0/0 ratio.
const DEGENERATE_SCORE: f64 = 1e-12;

/// Pinball loss of `forecast` against `observation` at level `tau`:
/// (1-tau)(f-o) when f >= o, tau(o-f) otherwise. Always nonnegative.
pub fn quantile_loss(forecast: f64, observation: f64, tau: f64) -> f64 {
    debug_assert!(tau > 0.0 && tau < 1.0);
    if forecast >= observation {
        (1.0 - tau) * (forecast - observation)
    } else {
        tau * (observation - forecast)
    }
}

/// Quadrature rule on [0, 1]: weights sum to one, exact for polynomials of
/// degree <= 2m-1.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes and weights mapped from [-1, 1] to [0, 1], computed
/// by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule> {
    if m == 0 || m > 64 {
        return Err(Error::QuadratureSize(m));
    }
    let mut roots = Vec::with_capacity(m);
    for k in 0..m {
        // Chebyshev-flavored initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dpm = 0.0;
        for _ in 0..100 {
            let (pm, d) = legendre_with_derivative(m, x);
            dpm = d;
            let dx = pm / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (pm, d) = legendre_with_derivative(m, x);
                dpm = d;
                x -= pm / d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dpm * dpm);
        roots.push((x, w));
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(QuadratureRule {
        nodes: roots.iter().map(|r| 0.5 * (r.0 + 1.0)).collect(),
        weights: roots.iter().map(|r| 0.5 * r.1).collect(),
    })
}

/// P_m(x) and P'_m(x) by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let d = m as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// A pair made ready for scoring: ties jittered, pseudo-observations and
/// sorted marginals computed.
///
/// Jitter seeds combine the caller's seed with a content fingerprint of each
/// column, so the same column receives the same jitter no matter which slot
/// it occupies; this keeps scores exactly antisymmetric under column
/// exchange even for discrete data.
#[derive(Debug, Clone)]
pub struct PreparedPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub sorted_x: SortedSample,
    pub sorted_y: SortedSample,
}

impl PreparedPair {
    pub fn new(pair: &Pair, seed: u64) -> Result<Self> {
        let x = jitter(&pair.x, derive_seed(seed, column_fingerprint(&pair.x)))?;
        let y = jitter(&pair.y, derive_seed(seed, column_fingerprint(&pair.y)))?;
        let u = pseudo_observations(&x)?;
        let v = pseudo_observations(&y)?;
        let sorted_x = SortedSample::new(&x)?;
        let sorted_y = SortedSample::new(&y)?;
        Ok(Self {
            x,
            y,
            u,
            v,
            sorted_x,
            sorted_y,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Fit the copula surface shared by both scoring directions.
    pub fn fit_copula(&self) -> Result<CopulaModel> {
        CopulaModel::fit(&self.u, &self.v)
    }
}

/// Per-tau quantile scores in both directions and the normalized
/// direction score.
#[derive(Debug, Clone, Copy)]
pub struct DirectionalScores {
    pub tau: f64,
    /// Mean pinball loss predicting Y from X (units of Y).
    pub s_y_given_x: f64,
    /// Mean pinball loss predicting X from Y (units of X).
    pub s_x_given_y: f64,
    /// Normalized score in [0, 1]; values above 0.5 favor X -> Y.
    pub s_xy: f64,
}

impl DirectionalScores {
    fn new(tau: f64, s_y_given_x: f64, s_x_given_y: f64) -> Self {
        let s_xy = if s_y_given_x < DEGENERATE_SCORE && s_x_given_y < DEGENERATE_SCORE {
            0.5
        } else {
            s_x_given_y / (s_y_given_x + s_x_given_y)
        };
        Self {
            tau,
            s_y_given_x,
            s_x_given_y,
            s_xy,
        }
    }

    pub fn s_yx(&self) -> f64 {
        1.0 - self.s_xy
    }
}

/// Empirical quantile scores of both conditional directions at level `tau`,
/// using conditional quantiles from the shared copula fit.
pub fn directional_scores(
    prepared: &PreparedPair,
    model: &CopulaModel,
    tau: f64,
) -> Result<DirectionalScores> {
    let scores = directional_scores_multi(prepared, model, &[tau])?;
    Ok(scores[0])
}

/// As [`directional_scores`], evaluating all quantile levels against the
/// same conditional slices (one slice per observation and direction).
pub fn directional_scores_multi(
    prepared: &PreparedPair,
    model: &CopulaModel,
    taus: &[f64],
) -> Result<Vec<DirectionalScores>> {
    for tau in taus {
        if !(*tau > 0.0 && *tau < 1.0) {
            return Err(Error::ProbabilityOutOfRange {
                value: *tau,
                bounds: "(0, 1)",
            });
        }
    }
    let n = prepared.len() as f64;
    let mut loss_y_given_x = vec![0.0; taus.len()];
    let mut loss_x_given_y = vec![0.0; taus.len()];

    for i in 0..prepared.len() {
        let slice = model.conditional_v_given_u(prepared.u[i]);
        for (j, tau) in taus.iter().enumerate() {
            let p = slice.invert(*tau);
            let forecast = prepared.sorted_y.quantile(p)?;
            loss_y_given_x[j] += quantile_loss(forecast, prepared.y[i], *tau);
        }
    }
    for i in 0..prepared.len() {
        let slice = model.conditional_u_given_v(prepared.v[i]);
        for (j, tau) in taus.iter().enumerate() {
            let p = slice.invert(*tau);
            let forecast = prepared.sorted_x.quantile(p)?;
            loss_x_given_y[j] += quantile_loss(forecast, prepared.x[i], *tau);
        }
    }

    Ok(taus
        .iter()
        .enumerate()
        .map(|(j, tau)| DirectionalScores::new(*tau, loss_y_given_x[j] / n, loss_x_given_y[j] / n))
        .collect())
}

/// The full direction score: jitter, rank-transform, fit one copula shared
/// by both directions, and aggregate the per-tau scores over an m-node
/// Gauss-Legendre rule. Values above 0.5 favor X -> Y.
pub fn aggregate_score(pair: &Pair, m: usize, seed: u64) -> Result<f64> {
    if pair.len() < 10 {
        return Err(Error::SampleTooSmall {
            min: 10,
            got: pair.len(),
        });
    }
    let rule = gauss_legendre(m)?;
    let prepared = PreparedPair::new(pair, seed)?;
    let model = prepared.fit_copula()?;
    let scores = directional_scores_multi(&prepared, &model, &rule.nodes)?;
    let s: f64 = rule
        .weights
        .iter()
        .zip(&scores)
        .map(|(w, d)| w * d.s_xy)
        .sum();
    Ok(s.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::marginals::empirical_quantile;
    use crate::normal;

    #[test]
    fn pinball_examples() {
        assert!((quantile_loss(2.0, 1.0, 0.25) - 0.75).abs() < 1e-15);
        assert!((quantile_loss(1.0, 2.0, 0.25) - 0.25).abs() < 1e-15);
        assert_eq!(quantile_loss(3.3, 3.3, 0.7), 0.0);
    }

    #[test]
    fn gauss_legendre_midpoint() {
        let rule = gauss_legendre(1).unwrap();
        assert_eq!(rule.nodes, vec![0.5]);
        assert!((rule.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_three_nodes() {
        let rule = gauss_legendre(3).unwrap();
        let sqrt35 = (3.0f64 / 5.0).sqrt();
        let expect = [0.5 * (1.0 - sqrt35), 0.5, 0.5 * (1.0 + sqrt35)];
        for (got, want) in rule.nodes.iter().zip(expect) {
            assert!((got - want).abs() < 1e-14);
        }
        let expect_w = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
        for (got, want) in rule.weights.iter().zip(expect_w) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        // m nodes integrate monomials up to degree 2m-1 exactly.
        for m in 1..=10 {
            let rule = gauss_legendre(m).unwrap();
            for degree in 0..=(2 * m - 1) {
                let got: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(degree as i32))
                    .sum();
                let want = 1.0 / (degree as f64 + 1.0);
                assert!(
                    (got - want).abs() < 1e-12,
                    "m={m} degree={degree}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn gauss_legendre_cubic_with_two_nodes() {
        let rule = gauss_legendre(2).unwrap();
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x * x * x)
            .sum();
        assert!((got - 0.25).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_rejects_out_of_range() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(65).is_err());
    }

    /// Average pinball loss over a sample is minimized near the empirical
    /// tau-quantile (consistency of the scoring function).
    #[test]
    fn pinball_minimizer_is_the_quantile() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let sample: Vec<f64> = (0..10_000)
            .map(|_| normal::quantile_unchecked(rng.random::<f64>().clamp(1e-12, 1.0 - 1e-12)))
            .collect();
        for &tau in &[0.1, 0.5, 0.9] {
            let mut best = (f64::INFINITY, f64::NAN);
            let mut z = -3.0;
            while z <= 3.0 {
                let avg: f64 = sample.iter().map(|y| quantile_loss(z, *y, tau)).sum::<f64>()
                    / sample.len() as f64;
                if avg < best.0 {
                    best = (avg, z);
                }
                z += 0.005;
            }
            let q = empirical_quantile(&sample, tau).unwrap();
            assert!(
                (best.1 - q).abs() < 0.05,
                "tau={tau}: minimizer {} vs quantile {q}",
                best.1
            );
        }
    }

    fn tanh_pair(n: usize, seed: u64) -> Pair {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n)
            .map(|_| normal::quantile_unchecked(rng.random::<f64>().clamp(1e-12, 1.0 - 1e-12)))
            .collect();
        let y: Vec<f64> = x.iter().map(|a| a.tanh() * rng.random::<f64>()).collect();
        Pair::new(x, y).unwrap()
    }

    fn independent_pair(n: usize, seed: u64) -> Pair {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        Pair::new(x, y).unwrap()
    }

    /// Quick version of the multiplicative-noise check; the acceptance
    /// suite runs the full 300-repetition average.
    #[test]
    fn tanh_pair_scores_toward_x() {
        let mut mean = 0.0;
        let reps = 20;
        for r in 0..reps {
            let pair = tanh_pair(500, 9000 + r);
            let prepared = PreparedPair::new(&pair, r).unwrap();
            let model = prepared.fit_copula().unwrap();
            let d = directional_scores(&prepared, &model, 0.5).unwrap();
            assert!(d.s_x_given_y > d.s_y_given_x);
            mean += d.s_xy;
        }
        mean /= f64::from(reps as u32);
        assert!((mean - 0.738).abs() < 0.06, "mean S(0.5) = {mean}");
    }

    #[test]
    fn swap_is_antisymmetric() {
        let pair = tanh_pair(200, 5);
        let s1 = aggregate_score(&pair, 3, 42).unwrap();
        let s2 = aggregate_score(&pair.swapped(), 3, 42).unwrap();
        assert!(
            (s1 + s2 - 1.0).abs() < 1e-12,
            "s1={s1} s2={s2} sum={}",
            s1 + s2
        );
    }

    #[test]
    fn swap_antisymmetric_with_ties() {
        // Discrete columns force the jitter path; content-derived jitter
        // seeds keep the exchange exact.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x: Vec<f64> = (0..300).map(|_| f64::from(rng.random_range(0..12))).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|a| (a - 6.0).powi(2) + f64::from(rng.random_range(0..5)))
            .collect();
        let pair = Pair::new(x, y).unwrap();
        let s1 = aggregate_score(&pair, 3, 7).unwrap();
        let s2 = aggregate_score(&pair.swapped(), 3, 7).unwrap();
        assert!((s1 + s2 - 1.0).abs() < 1e-12, "sum = {}", s1 + s2);
    }

    #[test]
    fn independent_pair_near_half() {
        let pair = independent_pair(1000, 17);
        let s = aggregate_score(&pair, 3, 0).unwrap();
        assert!((s - 0.5).abs() < 0.05, "independent score {s}");
    }

    #[test]
    fn shifted_copy_is_undecided_or_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..400).map(|_| rng.random::<f64>() * 10.0).collect();
        let y: Vec<f64> = x.iter().map(|a| a + 2.5).collect();
        let pair = Pair::new(x, y).unwrap();
        let s = aggregate_score(&pair, 3, 0).unwrap();
        assert!((s - 0.5).abs() < 0.02, "degenerate pair score {s}");
    }

    #[test]
    fn degenerate_losses_yield_sentinel() {
        let d = DirectionalScores::new(0.5, 0.0, 0.0);
        assert_eq!(d.s_xy, 0.5);
        let d = DirectionalScores::new(0.5, 1e-13, 5e-13);
        assert_eq!(d.s_xy, 0.5);
        let d = DirectionalScores::new(0.5, 0.2, 0.6);
        assert!((d.s_xy - 0.75).abs() < 1e-15);
        assert!((d.s_yx() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn monotone_transform_of_x_leaves_y_score_unchanged() {
        let pair = tanh_pair(300, 100);
        let transformed = Pair::new(
            pair.x.iter().map(|a| (0.5 * a).exp()).collect(),
            pair.y.clone(),
        )
        .unwrap();
        let p1 = PreparedPair::new(&pair, 0).unwrap();
        let p2 = PreparedPair::new(&transformed, 0).unwrap();
        let m1 = p1.fit_copula().unwrap();
        let m2 = p2.fit_copula().unwrap();
        for &tau in &[0.25, 0.5, 0.9] {
            let d1 = directional_scores(&p1, &m1, tau).unwrap();
            let d2 = directional_scores(&p2, &m2, tau).unwrap();
            assert!(
                (d1.s_y_given_x - d2.s_y_given_x).abs() < 1e-12,
                "tau={tau}"
            );
        }
    }

    #[test]
    fn aggregate_rejects_small_pairs() {
        let pair = Pair::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]).unwrap();
        assert!(matches!(
            aggregate_score(&pair, 3, 0),
            Err(Error::SampleTooSmall { .. })
        ));
    }

    #[test]
    fn scores_stay_in_unit_interval() {
        for seed in 0..5 {
            let pair = tanh_pair(120, seed);
            let s = aggregate_score(&pair, 3, seed).unwrap();
            assert!((0.0..=1.0).contains(&s));
        }
    }
}
