//! Interpolation of samples on the uniform grid `k / M`, `k = 0..=M`.

/// Piecewise-cubic Hermite interpolant with Fritsch–Carlson slope limiting.
/// Monotone data give a monotone interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic<'a> {
    values: &'a [f64],
    /// Slopes per unit index, not per unit `x`.
    slopes: Vec<f64>,
    scale: f64,
}

impl<'a> MonotoneCubic<'a> {
    /// `values` must hold at least three samples.
    pub fn new(values: &'a [f64]) -> Self {
        let len = values.len();
        assert!(len >= 3, "need at least three samples");
        let secants: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let mut slopes = vec![0.0; len];
        for k in 1..len - 1 {
            let (d0, d1) = (secants[k - 1], secants[k]);
            slopes[k] = if d0 * d1 <= 0.0 { 0.0 } else { 0.5 * (d0 + d1) };
        }
        slopes[0] = end_slope(secants[0], secants[1]);
        slopes[len - 1] = end_slope(secants[len - 2], secants[len - 3]);

        for (k, &d) in secants.iter().enumerate() {
            if d == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            let alpha = slopes[k] / d;
            let beta = slopes[k + 1] / d;
            let r2 = alpha * alpha + beta * beta;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                slopes[k] = tau * alpha * d;
                slopes[k + 1] = tau * beta * d;
            }
        }
        Self {
            values,
            slopes,
            scale: (len - 1) as f64,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let (k, t) = locate(x, self.scale);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k], self.slopes[k + 1]);
        let s = 1.0 - t;
        let h00 = (1.0 + 2.0 * t) * s * s;
        let h10 = t * s * s;
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = -t * t * s;
        h00 * v0 + h10 * m0 + h01 * v1 + h11 * m1
    }
}

/// Three-point one-sided slope, limited so it keeps the sign of the adjacent
/// secant and stays within three times it.
fn end_slope(d_near: f64, d_far: f64) -> f64 {
    let m = 0.5 * (3.0 * d_near - d_far);
    if m * d_near <= 0.0 {
        0.0
    } else if m.abs() > 3.0 * d_near.abs() {
        3.0 * d_near
    } else {
        m
    }
}

/// Piecewise-linear interpolant.
#[derive(Debug, Clone, Copy)]
pub struct Linear<'a> {
    values: &'a [f64],
    scale: f64,
}

impl<'a> Linear<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        assert!(values.len() >= 2, "need at least two samples");
        Self {
            values,
            scale: (values.len() - 1) as f64,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let (k, t) = locate(x, self.scale);
        self.values[k] + t * (self.values[k + 1] - self.values[k])
    }
}

/// Cell index and local coordinate of `x ∈ [0, 1]` on a grid with `scale = M` cells.
#[inline]
fn locate(x: f64, scale: f64) -> (usize, f64) {
    let u = (x * scale).clamp(0.0, scale);
    let k = (u.floor() as usize).min(scale as usize - 1);
    (k, u - k as f64)
}
