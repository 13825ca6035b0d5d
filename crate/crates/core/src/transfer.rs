//! The transfer operator `Uf(x) = Σ_{i>=N} P_{N,i}(x) f(u_{N,i}(x))` and one
//! step of the Gauss–Kuzmin recursion, in distribution-function form
//!
//! ```text
//! F_{n+1}(x) = Σ_{i>=N} [ F_n(1 - N/(x+i)) - F_n(1 - N/i) ]
//! ```
//!
//! and in density form `f_{n+1} = U f_n`.
//!
//! Every infinite sum is cut at an index `I` (see [`TailPolicy`]). Terms are
//! always added in increasing `i`, the tail correction last, so results do not
//! depend on how grid nodes are scheduled across threads.

use rayon::prelude::*;

use crate::cf::Parameter;
use crate::error::{domain, Error, Result};
use crate::grid::{GridFunction, GridKind};
use crate::interp::{Linear, MonotoneCubic};

/// Terms kept beyond `N` by [`TailPolicy::default_for`].
pub const DEFAULT_EXTRA_TERMS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// Add an asymptotic estimate of the discarded terms.
    AnalyticCorrection,
    /// Drop the discarded terms; their size is bounded by
    /// [`TailPolicy::remaining_weight`] times `sup |f|`.
    BoundOnly,
}

/// Where the branch sums are cut and what replaces the discarded terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailPolicy {
    n: Parameter,
    cutoff: u64,
    mode: TailMode,
}

impl TailPolicy {
    pub fn new(n: Parameter, cutoff: u64, mode: TailMode) -> Result<Self> {
        if cutoff < n.get() {
            return Err(Error::InvalidCutoff {
                cutoff,
                n: n.get(),
            });
        }
        Ok(Self { n, cutoff, mode })
    }

    /// `I = N + 1000` with analytic correction.
    pub fn default_for(n: Parameter) -> Self {
        Self {
            n,
            cutoff: n.get() + DEFAULT_EXTRA_TERMS,
            mode: TailMode::AnalyticCorrection,
        }
    }

    pub fn parameter(&self) -> Parameter {
        self.n
    }

    /// Last index `I` summed explicitly.
    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn mode(&self) -> TailMode {
        self.mode
    }

    /// `Σ_{i>I} P_{N,i}(x) = (x + N - 1)/(x + I)`, exact by telescoping.
    pub fn remaining_weight(&self, x: f64) -> f64 {
        (x + self.n.as_f64() - 1.0) / (x + self.cutoff as f64)
    }
}

fn check_branch(n: Parameter, i: u64, x: f64) -> Result<()> {
    if i < n.get() {
        return Err(domain("branch index", i, "{N, N+1, ...}"));
    }
    if !(x.is_finite() && (0.0..=1.0).contains(&x)) {
        return Err(domain("x", x, "[0, 1]"));
    }
    Ok(())
}

/// `P_{N,i}(x) = (x + N - 1)/((x + i)(x + i - 1))`.
pub fn branch_weight(n: Parameter, i: u64, x: f64) -> Result<f64> {
    check_branch(n, i, x)?;
    let xi = x + i as f64;
    Ok((x + n.as_f64() - 1.0) / (xi * (xi - 1.0)))
}

/// `u_{N,i}(x) = 1 - N/(x + i)`.
pub fn branch_point(n: Parameter, i: u64, x: f64) -> Result<f64> {
    check_branch(n, i, x)?;
    Ok(1.0 - n.as_f64() / (x + i as f64))
}

/// Behaviour of `f` at `1⁻` used by the analytic tail of the density sum.
#[derive(Debug, Clone, Copy)]
struct EndData {
    value: f64,
    slope: f64,
}

/// `∫_z^∞ dt / (t² (t - 1))`, which stands in for `Σ_{i>I} 1/((x+i)²(x+i-1))`
/// with `z = x + I + 1/2`.
fn cubic_tail(z: f64) -> f64 {
    -(-1.0 / z).ln_1p() - 1.0 / z
}

fn transfer_at(n: Parameter, f: &impl Fn(f64) -> f64, x: f64, tail: &TailPolicy, end: Option<EndData>) -> f64 {
    let big_n = n.as_f64();
    let a = x + big_n - 1.0;
    let mut sum = 0.0;
    for i in n.get()..=tail.cutoff {
        let xi = x + i as f64;
        sum += a / (xi * (xi - 1.0)) * f(1.0 - big_n / xi);
    }
    if tail.mode == TailMode::AnalyticCorrection {
        // f(u) ≈ f(1) - f'(1) N/(x+i) on the discarded branches.
        let end = end.unwrap_or(EndData {
            value: f(1.0),
            slope: 0.0,
        });
        let z = x + tail.cutoff as f64 + 0.5;
        sum += end.value * tail.remaining_weight(x) - end.slope * big_n * a * cubic_tail(z);
    }
    sum
}

/// `Uf(x)` truncated at `I`; in analytic mode the discarded branches
/// contribute `f(1) · (x + N - 1)/(x + I)`.
pub fn apply_transfer(n: Parameter, f: impl Fn(f64) -> f64, x: f64, tail: &TailPolicy) -> Result<f64> {
    check_branch(n, n.get(), x)?;
    check_policy(n, tail)?;
    Ok(transfer_at(n, &f, x, tail, None))
}

fn check_policy(n: Parameter, tail: &TailPolicy) -> Result<()> {
    if tail.n != n {
        return Err(Error::InvalidArgument(format!(
            "tail policy built for N = {} used with N = {n}",
            tail.n
        )));
    }
    Ok(())
}

/// `Σ_{i>I} (1/i - 1/(i+x))` and `Σ_{i>I} (1/i² - 1/(i+x)²)` from the
/// asymptotic series of digamma and trigamma at `z = I + 1`.
fn harmonic_tails(z: f64, x: f64) -> (f64, f64) {
    let w = z + x;
    let (z2, w2) = (z * z, w * w);
    let s1 = (x / z).ln_1p() + x / (2.0 * z * w) + (1.0 / z2 - 1.0 / w2) / 12.0
        - (1.0 / (z2 * z2) - 1.0 / (w2 * w2)) / 120.0;
    let s2 = x / (z * w) + 0.5 * (1.0 / z2 - 1.0 / w2) + (1.0 / (z2 * z) - 1.0 / (w2 * w)) / 6.0;
    (s1, s2)
}

/// Right-hand side of the distribution-function recursion for a fixed `F_n`,
/// evaluable at any `x` (no re-pinning of the endpoints).
pub struct CdfStep<'a> {
    n: Parameter,
    interp: MonotoneCubic<'a>,
    /// `F_n(1 - N/i)` for `i = N..=I`.
    base: Vec<f64>,
    tail: TailPolicy,
    /// `(F_n'(1⁻), F_n''(1⁻))`.
    end: (f64, f64),
}

impl<'a> CdfStep<'a> {
    pub fn new(f: &'a GridFunction, tail: &TailPolicy) -> Result<Self> {
        if f.kind() != GridKind::Cdf {
            return Err(Error::WrongKind { expected: "CDF" });
        }
        let n = f.parameter();
        check_policy(n, tail)?;
        f.validate_cdf()?;
        let interp = MonotoneCubic::new(f.values());
        let big_n = n.as_f64();
        let base = (n.get()..=tail.cutoff)
            .map(|i| interp.eval(1.0 - big_n / i as f64))
            .collect();
        Ok(Self {
            n,
            interp,
            base,
            tail: *tail,
            end: f.end_derivatives(),
        })
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let big_n = self.n.as_f64();
        let mut sum = 0.0;
        for (i, b) in (self.n.get()..=self.tail.cutoff).zip(&self.base) {
            sum += self.interp.eval(1.0 - big_n / (x + i as f64)) - b;
        }
        if self.tail.mode == TailMode::AnalyticCorrection {
            // F(1-δ) ≈ F(1) - F'(1) δ + F''(1) δ²/2 on the discarded branches.
            let (d1, d2) = self.end;
            let (s1, s2) = harmonic_tails(self.tail.cutoff as f64 + 1.0, x);
            sum += d1 * big_n * s1 - 0.5 * d2 * big_n * big_n * s2;
        }
        sum
    }
}

/// One step `F_n -> F_{n+1}` on the grid of `f`. Off-grid values of `F_n`
/// come from a monotone cubic interpolant. The result is rescaled affinely to
/// `F(0) = 0`, `F(1) = 1`; overwriting the end values instead would leave a
/// kink that the end-derivative estimates of the next step amplify.
pub fn gk_step_cdf(f: &GridFunction, tail: &TailPolicy) -> Result<GridFunction> {
    let step = CdfStep::new(f, tail)?;
    let m = f.intervals();
    let raw: Vec<f64> = (0..=m)
        .into_par_iter()
        .map(|k| step.value_at(k as f64 / m as f64))
        .collect();
    let (lo, hi) = (raw[0], raw[m]);
    let mut values: Vec<f64> = raw.iter().map(|v| (v - lo) / (hi - lo)).collect();
    values[0] = 0.0;
    values[m] = 1.0;
    let out = f.with_values(values);
    out.validate_cdf()?;
    Ok(out)
}

/// One step `f_n -> U f_n` on the grid of `f`, with linear interpolation.
pub fn gk_step_density(f: &GridFunction, tail: &TailPolicy) -> Result<GridFunction> {
    if f.kind() != GridKind::Density {
        return Err(Error::WrongKind { expected: "density" });
    }
    let n = f.parameter();
    check_policy(n, tail)?;
    let interp = Linear::new(f.values());
    let eval = |y: f64| interp.eval(y);
    let end = EndData {
        value: f.values()[f.intervals()],
        slope: f.end_derivatives().0,
    };
    let m = f.intervals();
    let values: Vec<f64> = (0..=m)
        .into_par_iter()
        .map(|k| transfer_at(n, &eval, k as f64 / m as f64, tail, Some(end)))
        .collect();
    Ok(f.with_values(values))
}
