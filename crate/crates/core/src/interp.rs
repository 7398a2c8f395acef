//! Shape-constrained piecewise-cubic interpolation.
//!
//! Cubic Hermite interpolation with Fritsch-Carlson limited tangents: on
//! every knot interval the interpolant is monotone between its endpoint
//! values, so it never overshoots the data. In particular, nonnegative data
//! produce a nonnegative interpolant, which makes the running integral
//! nondecreasing — the property the copula h-functions rely on for valid
//! bisection.

/// Monotonicity-safe cubic Hermite curve with analytic prefix integrals.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    tangents: Vec<f64>,
    /// prefix[k] = integral of the curve from xs[0] to xs[k].
    prefix: Vec<f64>,
}

impl MonotoneCubic {
    /// Build the curve through `(xs[i], ys[i])`; `xs` strictly increasing,
    /// at least two knots.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() >= 2, "need at least two knots");
        assert_eq!(xs.len(), ys.len(), "knot/value length mismatch");
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]), "knots must increase");

        let tangents = limited_tangents(&xs, &ys);
        let mut prefix = Vec::with_capacity(xs.len());
        prefix.push(0.0);
        let mut acc = 0.0;
        for i in 0..xs.len() - 1 {
            let h = xs[i + 1] - xs[i];
            acc += h * (0.5 * (ys[i] + ys[i + 1]) + h * (tangents[i] - tangents[i + 1]) / 12.0);
            prefix.push(acc);
        }
        Self {
            xs,
            ys,
            tangents,
            prefix,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn first_value(&self) -> f64 {
        self.ys[0]
    }

    pub fn last_value(&self) -> f64 {
        *self.ys.last().unwrap()
    }

    /// Largest interval index i with xs[i] <= x (clamped to a valid segment).
    fn locate(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Evaluate the curve; arguments outside the knot range clamp to the
    /// boundary value (constant extension).
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x <= lo {
            return self.ys[0];
        }
        if x >= hi {
            return self.last_value();
        }
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        hermite_value(self.ys[i], self.ys[i + 1], self.tangents[i], self.tangents[i + 1], h, s)
    }

    /// Integral of the curve from the first knot to `x` clamped into the
    /// knot range.
    pub fn integral_to(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return self.total_integral();
        }
        let i = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        self.prefix[i]
            + hermite_prefix_integral(
                self.ys[i],
                self.ys[i + 1],
                self.tangents[i],
                self.tangents[i + 1],
                h,
                s,
            )
    }

    /// Integral over the whole knot range.
    pub fn total_integral(&self) -> f64 {
        *self.prefix.last().unwrap()
    }
}

pub(crate) fn hermite_value(y0: f64, y1: f64, t0: f64, t1: f64, h: f64, s: f64) -> f64 {
    let omx = 1.0 - s;
    let h00 = (1.0 + 2.0 * s) * omx * omx;
    let h10 = s * omx * omx;
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    y0 * h00 + y1 * h01 + h * (t0 * h10 + t1 * h11)
}

/// Integral of the Hermite segment from its left knot to relative position
/// `s` in [0, 1], using the antiderivatives of the four basis polynomials.
fn hermite_prefix_integral(y0: f64, y1: f64, t0: f64, t1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s2 * s2;
    let i00 = 0.5 * s4 - s3 + s;
    let i01 = -0.5 * s4 + s3;
    let i10 = 0.25 * s4 - (2.0 / 3.0) * s3 + 0.5 * s2;
    let i11 = 0.25 * s4 - s3 / 3.0;
    h * (y0 * i00 + y1 * i01) + h * h * (t0 * i10 + t1 * i11)
}

/// Fritsch-Carlson limited tangents (weighted-harmonic-mean interior rule,
/// shape-clamped three-point rule at the ends). Guarantees per-interval
/// monotonicity of the Hermite interpolant.
pub(crate) fn limited_tangents(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut h = Vec::with_capacity(n - 1);
    let mut d = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let hi = xs[i + 1] - xs[i];
        h.push(hi);
        d.push((ys[i + 1] - ys[i]) / hi);
    }
    if n == 2 {
        return vec![d[0], d[0]];
    }

    let mut t = vec![0.0; n];
    for k in 1..n - 1 {
        let (d0, d1) = (d[k - 1], d[k]);
        if d0 == 0.0 || d1 == 0.0 || (d0 > 0.0) != (d1 > 0.0) {
            t[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            t[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    t[0] = edge_tangent(h[0], h[1], d[0], d[1]);
    t[n - 1] = edge_tangent(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    t
}

fn edge_tangent(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let t = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if t == 0.0 || d0 == 0.0 || (t > 0.0) != (d0 > 0.0) {
        0.0
    } else if ((d0 > 0.0) != (d1 > 0.0) || d1 == 0.0) && t.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        t
    }
}
