//! Nonparametric copula surface via the transformation kernel estimator.
//!
//! Pseudo-observations are mapped to standard-normal scores, a bivariate
//! Gaussian kernel density estimate is taken there, and the copula density
//! is recovered by dividing out the normal margins. The density is evaluated
//! once on a grid of cell centers; a shape-constrained piecewise-cubic
//! surface then provides the copula CDF, both h-functions (conditional
//! CDFs), and their inverses.
//!
//! Floating-point arithmetic in the kernel and covariance sums is arranged
//! so that fitting on the exchanged columns produces the exactly transposed
//! surface: `hfunc1` of the swapped fit mirrors `hfunc2` of the original to
//! machine precision, which is what makes direction scores antisymmetric.

use crate::error::{Error, Result};
use crate::interp::{hermite_value, limited_tangents, MonotoneCubic};
use crate::marginals::SortedSample;
use crate::normal;

/// Default number of grid nodes per axis.
pub const DEFAULT_GRID_SIZE: usize = 30;

/// Half-width threshold at which h-function bisection stops.
const BISECTION_WIDTH: f64 = 1e-10;
const BISECTION_MAX_ITER: usize = 50;

/// Number of panels of the fixed trapezoid rule behind the copula CDF.
const CDF_PANELS: usize = 120;

/// Symmetric 2x2 kernel bandwidth matrix on the normal-score scale.
#[derive(Debug, Clone, Copy)]
pub struct BandwidthMatrix {
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
}

impl BandwidthMatrix {
    pub fn det(&self) -> f64 {
        self.b11 * self.b22 - self.b12 * self.b12
    }

    pub fn is_positive_definite(&self) -> bool {
        self.b11 > 0.0 && self.det() > 0.0
    }

    /// z' B^-1 z, grouped so that exchanging the coordinate roles produces
    /// bit-identical results.
    fn inverse_quadratic_form(&self, z1: f64, z2: f64) -> f64 {
        ((self.b22 * (z1 * z1) + self.b11 * (z2 * z2)) - 2.0 * (self.b12 * (z1 * z2)))
            / self.det()
    }
}

/// Map a pair of pseudo-observation columns to standard-normal scores.
pub fn normal_scores(u: &[f64], v: &[f64]) -> Result<Vec<(f64, f64)>> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    for w in u.iter().chain(v.iter()) {
        if !(*w > 0.0 && *w < 1.0) {
            return Err(Error::ProbabilityOutOfRange {
                value: *w,
                bounds: "(0, 1)",
            });
        }
    }
    Ok(u.iter()
        .zip(v)
        .map(|(a, b)| (normal::quantile_unchecked(*a), normal::quantile_unchecked(*b)))
        .collect())
}

/// Normal-reference bandwidth: B = n^(-1/3) * sample covariance of the
/// scores. A degenerate covariance (perfect rank correlation) has its
/// diagonal inflated by 1e-4 to restore positive definiteness.
pub fn select_bandwidth(scores: &[(f64, f64)]) -> Result<BandwidthMatrix> {
    let n = scores.len();
    if n < 10 {
        return Err(Error::SampleTooSmall { min: 10, got: n });
    }
    let nf = n as f64;
    let mean1 = scores.iter().map(|z| z.0).sum::<f64>() / nf;
    let mean2 = scores.iter().map(|z| z.1).sum::<f64>() / nf;
    let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
    for z in scores {
        let d1 = z.0 - mean1;
        let d2 = z.1 - mean2;
        s11 += d1 * d1;
        s12 += d1 * d2;
        s22 += d2 * d2;
    }
    let denom = nf - 1.0;
    s11 /= denom;
    s12 /= denom;
    s22 /= denom;
    if !(s11 > 0.0 && s11 * s22 - s12 * s12 > 0.0) {
        s11 += 1e-4;
        s22 += 1e-4;
    }
    let scale = nf.powf(-1.0 / 3.0);
    let b = BandwidthMatrix {
        b11: scale * s11,
        b12: scale * s12,
        b22: scale * s22,
    };
    if b.is_positive_definite() {
        Ok(b)
    } else {
        Err(Error::DegenerateBandwidth)
    }
}

/// Bivariate Gaussian kernel density estimate at `z` on the score scale.
pub fn kernel_density(scores: &[(f64, f64)], bandwidth: &BandwidthMatrix, z: (f64, f64)) -> f64 {
    debug_assert!(bandwidth.is_positive_definite());
    let mut sum = 0.0;
    for zi in scores {
        let q = bandwidth.inverse_quadratic_form(z.0 - zi.0, z.1 - zi.1);
        sum += (-0.5 * q).exp();
    }
    sum / (2.0 * std::f64::consts::PI * bandwidth.det().sqrt() * scores.len() as f64)
}

/// Transformation kernel estimate of the copula density at interior (u, v).
pub fn copula_density(
    scores: &[(f64, f64)],
    bandwidth: &BandwidthMatrix,
    u: f64,
    v: f64,
) -> Result<f64> {
    for w in [u, v] {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::ProbabilityOutOfRange {
                value: w,
                bounds: "(0, 1)",
            });
        }
    }
    let z1 = normal::quantile_unchecked(u);
    let z2 = normal::quantile_unchecked(v);
    Ok(kernel_density(scores, bandwidth, (z1, z2)) / (normal::pdf(z1) * normal::pdf(z2)))
}

/// Evaluated copula density on a square grid of cell centers.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    nodes: Vec<f64>,
    /// Row-major: values[i * size + j] = density at (nodes[i], nodes[j]).
    values: Vec<f64>,
}

impl DensityGrid {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nodes.len() + j]
    }

    /// Index of the node nearest to `x`.
    pub fn nearest_node(&self, x: f64) -> usize {
        let mut best = 0;
        for (k, n) in self.nodes.iter().enumerate() {
            if (n - x).abs() < (self.nodes[best] - x).abs() {
                best = k;
            }
        }
        best
    }
}

/// One conditional density slice of the surface, with its normalized CDF
/// and the bisection inverse. Obtained from [`CopulaModel`].
#[derive(Debug, Clone)]
pub struct ConditionalSlice {
    curve: MonotoneCubic,
    /// Mass of the constant extension below the first node.
    head: f64,
    total: f64,
}

impl ConditionalSlice {
    fn new(nodes: &[f64], values: Vec<f64>) -> Self {
        let first = values[0];
        let last = *values.last().unwrap();
        let lo = nodes[0];
        let hi = *nodes.last().unwrap();
        let curve = MonotoneCubic::new(nodes.to_vec(), values);
        let head = first * lo;
        let total = head + curve.total_integral() + last * (1.0 - hi);
        Self { curve, head, total }
    }

    fn unnormalized_to(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let (lo, hi) = self.curve.domain();
        if t <= 0.0 {
            0.0
        } else if t < lo {
            self.curve.first_value() * t
        } else if t < hi {
            self.head + self.curve.integral_to(t)
        } else {
            self.head + self.curve.total_integral() + self.curve.last_value() * (1.0 - hi)
                - self.curve.last_value() * (1.0 - t)
        }
    }

    /// Normalized conditional CDF: 0 at 0, exactly 1 at 1, nondecreasing.
    pub fn cdf(&self, t: f64) -> f64 {
        if self.total > 0.0 {
            (self.unnormalized_to(t) / self.total).clamp(0.0, 1.0)
        } else {
            // Fully underflowed slice; fall back to the uniform conditional.
            t.clamp(0.0, 1.0)
        }
    }

    /// Bisection inverse of [`ConditionalSlice::cdf`].
    pub fn invert(&self, tau: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..BISECTION_MAX_ITER {
            if hi - lo < BISECTION_WIDTH {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Fitted copula surface: density grid, per-axis interpolation tangents,
/// and the total-mass normalizer for the CDF.
#[derive(Debug, Clone)]
pub struct CopulaModel {
    grid: DensityGrid,
    bandwidth: BandwidthMatrix,
    /// Tangents along axis 0 of each grid column: tan_u[i*g+j] is the
    /// tangent at nodes[i] of the curve i -> values[i][j].
    tan_u: Vec<f64>,
    /// Tangents along axis 1 of each grid row.
    tan_v: Vec<f64>,
    mass: f64,
}

impl CopulaModel {
    /// Fit on a pair of pseudo-observation columns with the default grid.
    pub fn fit(u: &[f64], v: &[f64]) -> Result<Self> {
        Self::fit_with_grid(u, v, DEFAULT_GRID_SIZE)
    }

    pub fn fit_with_grid(u: &[f64], v: &[f64], grid_size: usize) -> Result<Self> {
        assert!(grid_size >= 4, "grid needs at least 4 nodes per axis");
        let scores = normal_scores(u, v)?;
        let bandwidth = select_bandwidth(&scores)?;

        let g = grid_size;
        // Cell centers (2k-1)/(2g): keeps evaluations away from the
        // boundary singularities of the transformation estimator.
        let nodes: Vec<f64> = (0..g).map(|k| (2 * k + 1) as f64 / (2 * g) as f64).collect();
        let z_nodes: Vec<f64> = nodes.iter().map(|n| normal::quantile_unchecked(*n)).collect();
        let pdf_nodes: Vec<f64> = z_nodes.iter().map(|z| normal::pdf(*z)).collect();

        let mut values = vec![0.0; g * g];
        for i in 0..g {
            for j in 0..g {
                let raw = kernel_density(&scores, &bandwidth, (z_nodes[i], z_nodes[j]))
                    / (pdf_nodes[i] * pdf_nodes[j]);
                values[i * g + j] = raw.max(0.0);
            }
        }

        let mut tan_u = vec![0.0; g * g];
        let mut tan_v = vec![0.0; g * g];
        let mut column = vec![0.0; g];
        for j in 0..g {
            for i in 0..g {
                column[i] = values[i * g + j];
            }
            let t = limited_tangents(&nodes, &column);
            for i in 0..g {
                tan_u[i * g + j] = t[i];
            }
        }
        for i in 0..g {
            let row = &values[i * g..(i + 1) * g];
            let t = limited_tangents(&nodes, row);
            tan_v[i * g..(i + 1) * g].copy_from_slice(&t);
        }

        let mut model = Self {
            grid: DensityGrid { nodes, values },
            bandwidth,
            tan_u,
            tan_v,
            mass: 1.0,
        };
        model.mass = model.cdf_unnormalized(1.0, 1.0);
        Ok(model)
    }

    pub fn grid(&self) -> &DensityGrid {
        &self.grid
    }

    pub fn bandwidth(&self) -> &BandwidthMatrix {
        &self.bandwidth
    }

    /// Density slice along v at fixed u, interpolated from the grid.
    pub fn conditional_v_given_u(&self, u: f64) -> ConditionalSlice {
        self.slice(Axis::First, u)
    }

    /// Density slice along u at fixed v.
    pub fn conditional_u_given_v(&self, v: f64) -> ConditionalSlice {
        self.slice(Axis::Second, v)
    }

    fn slice(&self, axis: Axis, at: f64) -> ConditionalSlice {
        let nodes = &self.grid.nodes;
        let g = nodes.len();
        let w = at.clamp(nodes[0], nodes[g - 1]);
        let k = match nodes.partition_point(|&n| n <= w) {
            0 => 0,
            p if p >= g => g - 2,
            p => p - 1,
        };
        let h = nodes[k + 1] - nodes[k];
        let s = (w - nodes[k]) / h;

        let mut f = Vec::with_capacity(g);
        for j in 0..g {
            let (y0, y1, t0, t1) = match axis {
                Axis::First => (
                    self.grid.values[k * g + j],
                    self.grid.values[(k + 1) * g + j],
                    self.tan_u[k * g + j],
                    self.tan_u[(k + 1) * g + j],
                ),
                Axis::Second => (
                    self.grid.values[j * g + k],
                    self.grid.values[j * g + k + 1],
                    self.tan_v[j * g + k],
                    self.tan_v[j * g + k + 1],
                ),
            };
            f.push(hermite_value(y0, y1, t0, t1, h, s).max(0.0));
        }
        ConditionalSlice::new(nodes, f)
    }

    /// Conditional CDF of V given U = u, normalized to span [0, 1].
    pub fn hfunc1(&self, u: f64, v: f64) -> f64 {
        self.conditional_v_given_u(u).cdf(v)
    }

    /// Conditional CDF of U given V = v.
    pub fn hfunc2(&self, v: f64, u: f64) -> f64 {
        self.conditional_u_given_v(v).cdf(u)
    }

    /// Inverse of `hfunc1` in its second argument.
    pub fn hinv1(&self, u: f64, tau: f64) -> f64 {
        self.conditional_v_given_u(u).invert(tau)
    }

    /// Inverse of `hfunc2` in its second argument.
    pub fn hinv2(&self, v: f64, tau: f64) -> f64 {
        self.conditional_u_given_v(v).invert(tau)
    }

    /// Copula CDF, normalized so that cdf(1, 1) = 1 exactly.
    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        let raw = self.cdf_unnormalized(u, v);
        (raw / self.mass).clamp(0.0, 1.0)
    }

    /// Trapezoid integration of the conditional-slice prefix masses over a
    /// fixed panel grid in u. Fixed panels keep the result exactly
    /// nondecreasing in both arguments.
    fn cdf_unnormalized(&self, u: f64, v: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = v.clamp(0.0, 1.0);
        if u == 0.0 || v == 0.0 {
            return 0.0;
        }
        let step = 1.0 / CDF_PANELS as f64;
        let mut acc = 0.0;
        let mut prev_s = 0.0;
        let mut prev_f = self.slice(Axis::First, 0.0).unnormalized_to(v);
        for k in 1..=CDF_PANELS {
            let s = k as f64 * step;
            if s >= u {
                break;
            }
            let f = self.slice(Axis::First, s).unnormalized_to(v);
            acc += 0.5 * (prev_f + f) * step;
            prev_s = s;
            prev_f = f;
        }
        // Partial panel up to u, with the panel-linear interpolant of F.
        let f_end = self.slice(Axis::First, prev_s + step).unnormalized_to(v);
        let t = (u - prev_s) / step;
        let f_u = prev_f + (f_end - prev_f) * t;
        acc + 0.5 * (prev_f + f_u) * (u - prev_s)
    }
}

#[derive(Debug, Clone, Copy)]
enum Axis {
    First,
    Second,
}

/// Conditional tau-quantile of Y given X through the fitted surface:
/// the empirical quantile of `sample_y` at hinv1(u, tau).
pub fn conditional_quantile_y_given_x(
    model: &CopulaModel,
    sample_y: &SortedSample,
    u: f64,
    tau: f64,
) -> Result<f64> {
    check_interior(u)?;
    check_interior(tau)?;
    sample_y.quantile(model.hinv1(u, tau))
}

/// Conditional tau-quantile of X given Y.
pub fn conditional_quantile_x_given_y(
    model: &CopulaModel,
    sample_x: &SortedSample,
    v: f64,
    tau: f64,
) -> Result<f64> {
    check_interior(v)?;
    check_interior(tau)?;
    sample_x.quantile(model.hinv2(v, tau))
}

fn check_interior(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange {
            value: p,
            bounds: "(0, 1)",
        })
    }
}
