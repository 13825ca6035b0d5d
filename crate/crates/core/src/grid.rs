//! Functions sampled on the uniform grid `x_k = k / M`, `k = 0..=M`.

use std::fmt::Write as _;

use crate::cf::Parameter;
use crate::error::{Error, Result};
use crate::measure::RhoMeasure;

/// Fewest grid intervals accepted; end derivatives use four nodes.
pub const MIN_INTERVALS: usize = 4;

/// Default number of grid intervals.
pub const DEFAULT_INTERVALS: usize = 4096;

/// Tolerance on `F(0) = 0` and `F(1) = 1`.
pub const ENDPOINT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// A distribution function `F_n`.
    Cdf,
    /// `f_n(x) = (x + N - 1) F_n'(x)`.
    Density,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::Cdf => "CDF",
            GridKind::Density => "density",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    n: Parameter,
    kind: GridKind,
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps node values; checks grid size, finiteness and, for the CDF kind,
    /// monotonicity and endpoints.
    pub fn new(n: Parameter, kind: GridKind, values: Vec<f64>) -> Result<Self> {
        let intervals = values.len().saturating_sub(1);
        if intervals < MIN_INTERVALS {
            return Err(Error::GridTooSmall {
                min: MIN_INTERVALS,
                got: intervals,
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        let g = Self { n, kind, values };
        if kind == GridKind::Cdf {
            g.validate_cdf()?;
        }
        Ok(g)
    }

    pub fn sample(n: Parameter, kind: GridKind, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=intervals)
            .map(|k| f(k as f64 / intervals as f64))
            .collect();
        Self::new(n, kind, values)
    }

    /// `F_0(x) = x`, the distribution function of Lebesgue measure.
    pub fn lebesgue_cdf(n: Parameter, intervals: usize) -> Result<Self> {
        Self::sample(n, GridKind::Cdf, intervals, |x| x)
    }

    /// Samples of `ρ_N([0, x])`.
    pub fn rho_cdf(n: Parameter, intervals: usize) -> Result<Self> {
        let m = RhoMeasure::new(n);
        Self::sample(n, GridKind::Cdf, intervals, |x| m.cdf_unchecked(x))
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            n: self.n,
            kind: self.kind,
            values,
        }
    }

    pub fn parameter(&self) -> Parameter {
        self.n
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        k as f64 / self.intervals() as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.intervals() as f64;
        (0..self.values.len()).map(move |k| k as f64 / m)
    }

    pub fn validate_cdf(&self) -> Result<()> {
        if let Some(k) = self.values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::NonMonotone(k));
        }
        let first = self.values[0];
        if first.abs() > ENDPOINT_TOLERANCE {
            return Err(Error::BadEndpoint {
                which: "F(0)",
                value: first,
                expected: 0.0,
            });
        }
        let last = self.values[self.intervals()];
        if (last - 1.0).abs() > ENDPOINT_TOLERANCE {
            return Err(Error::BadEndpoint {
                which: "F(1)",
                value: last,
                expected: 1.0,
            });
        }
        Ok(())
    }

    /// `max_k |values[k] - f(x_k)|`.
    pub fn sup_distance(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes()
            .zip(&self.values)
            .map(|(x, v)| (v - f(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Derivative estimates at every node: central differences inside,
    /// second-order one-sided differences at the ends.
    pub fn derivative(&self) -> Vec<f64> {
        let v = &self.values;
        let m = self.intervals();
        let inv_2h = 0.5 * m as f64;
        let mut d = Vec::with_capacity(m + 1);
        d.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv_2h);
        d.extend((1..m).map(|k| (v[k + 1] - v[k - 1]) * inv_2h));
        d.push((3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) * inv_2h);
        d
    }

    /// One-sided estimates of the first and second derivative at `x = 1`.
    pub fn end_derivatives(&self) -> (f64, f64) {
        let v = &self.values;
        let m = self.intervals();
        let inv_h = m as f64;
        let first = (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) * 0.5 * inv_h;
        let second = (2.0 * v[m] - 5.0 * v[m - 1] + 4.0 * v[m - 2] - v[m - 3]) * inv_h * inv_h;
        (first, second)
    }

    /// Two-column CSV with header `x,<F|f>`.
    pub fn to_csv(&self) -> String {
        let label = match self.kind {
            GridKind::Cdf => "F",
            GridKind::Density => "f",
        };
        let mut out = String::with_capacity(32 * self.values.len());
        let _ = writeln!(out, "x,{label}");
        for (x, v) in self.nodes().zip(&self.values) {
            let _ = writeln!(out, "{x},{v}");
        }
        out
    }
}
