//! Gauss–Kuzmin iteration with error tracking, geometric-rate fitting and the
//! derivative-contraction check for densities.

use serde::{Deserialize, Serialize};

use crate::cf::Parameter;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridKind};
use crate::measure::RhoMeasure;
use crate::qn::qn_value;
use crate::transfer::{gk_step_cdf, gk_step_density, TailPolicy};

/// Errors above `FLOOR_FACTOR × floor` are considered free of discretization noise.
pub const FLOOR_FACTOR: f64 = 100.0;

/// Only errors below `e_0 / TRANSIENT_FACTOR` enter the rate fit.
pub const TRANSIENT_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    #[serde(rename = "N")]
    pub parameter: u64,
    /// Number of steps taken.
    #[serde(rename = "n")]
    pub steps: usize,
    /// `e_k = max_grid |F_k - ρ_N([0, x])|` for `k = 0..=n`.
    pub e_n: Vec<f64>,
    pub fitted_rate: Option<f64>,
    /// RMS residual of the log-linear fit.
    pub fit_residual: Option<f64>,
    /// First and last step used by the fit.
    pub fit_window: Option<(usize, usize)>,
    /// Residual of one step applied to the sampled invariant CDF.
    pub floor: f64,
    #[serde(rename = "q_N")]
    pub q_n: f64,
    #[serde(rename = "M")]
    pub grid: usize,
    #[serde(rename = "I")]
    pub cutoff: u64,
    pub seed: Option<u64>,
    pub note: Option<String>,
}

impl IterationReport {
    /// Steps before the error first drops to `FLOOR_FACTOR × floor`.
    pub fn pre_floor(&self) -> usize {
        self.e_n
            .iter()
            .position(|&e| e <= FLOOR_FACTOR * self.floor)
            .unwrap_or(self.e_n.len())
    }

    /// `max e_k / (e_0 q_N^k)` over the pre-floor steps.
    pub fn envelope_constant(&self) -> f64 {
        let e0 = self.e_n[0];
        self.e_n[..self.pre_floor()]
            .iter()
            .enumerate()
            .map(|(k, e)| e / (e0 * self.q_n.powi(k as i32)))
            .fold(0.0, f64::max)
    }
}

/// Least-squares line through `(k, ln e_k)`; returns `(slope, rms residual)`.
pub fn fit_log_linear(points: &[(usize, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let len = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(k, e)| (sx + k as f64, sy + e.ln()));
    let (mx, my) = (sx / len, sy / len);
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(sxx, sxy), &(k, e)| {
        let dx = k as f64 - mx;
        (sxx + dx * dx, sxy + dx * (e.ln() - my))
    });
    let slope = sxy / sxx;
    let rss: f64 = points
        .iter()
        .map(|&(k, e)| {
            let r = e.ln() - (my + slope * (k as f64 - mx));
            r * r
        })
        .sum();
    Some((slope, (rss / len).sqrt()))
}

/// Residual `max |step(ρ) - ρ|` of the sampled invariant CDF under one step.
pub fn discretization_floor(n: Parameter, intervals: usize, tail: &TailPolicy) -> Result<f64> {
    let rho = RhoMeasure::new(n);
    let f = GridFunction::rho_cdf(n, intervals)?;
    let next = gk_step_cdf(&f, tail)?;
    Ok(next.sup_distance(|x| rho.cdf_unchecked(x)))
}

/// Iterates the distribution-function recursion from `initial` and records
/// the sup-norm distance to the invariant CDF after every step.
pub fn iterate_gk(initial: &GridFunction, steps: usize, tail: &TailPolicy) -> Result<IterationReport> {
    if initial.kind() != GridKind::Cdf {
        return Err(Error::WrongKind { expected: "CDF" });
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("iterate_gk needs at least one step".into()));
    }
    let n = initial.parameter();
    let rho = RhoMeasure::new(n);
    let distance = |g: &GridFunction| g.sup_distance(|x| rho.cdf_unchecked(x));

    let mut current = initial.clone();
    let mut errors = Vec::with_capacity(steps + 1);
    errors.push(distance(&current));
    for _ in 0..steps {
        current = gk_step_cdf(&current, tail)?;
        errors.push(distance(&current));
    }

    let floor = discretization_floor(n, initial.intervals(), tail)?;
    let upper = errors[0] / TRANSIENT_FACTOR;
    let window: Vec<(usize, f64)> = errors
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, e)| e > FLOOR_FACTOR * floor && e < upper)
        .collect();
    let fit = fit_log_linear(&window);
    let note = if fit.is_none() {
        Some(format!(
            "only {} step(s) between {}x the discretization floor and e_0/{}; no rate fitted",
            window.len(),
            FLOOR_FACTOR,
            TRANSIENT_FACTOR
        ))
    } else {
        None
    };
    Ok(IterationReport {
        parameter: n.get(),
        steps,
        e_n: errors,
        fitted_rate: fit.map(|(slope, _)| slope.exp()),
        fit_residual: fit.map(|(_, r)| r),
        fit_window: fit.map(|_| (window[0].0, window[window.len() - 1].0)),
        floor,
        q_n: qn_value(n),
        grid: initial.intervals(),
        cutoff: tail.cutoff(),
        seed: None,
        note,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    /// `M_k = max_grid |f_k'|`, `k = 0..=steps`.
    pub sup_derivative: Vec<f64>,
    /// `M_{k+1} / M_k`.
    pub ratios: Vec<f64>,
    pub q_n: f64,
}

impl ContractionReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// Subtracts the `ρ_N`-mean (trapezoid rule) so iterates stay near zero;
/// `U` fixes constants, so derivatives are unchanged.
fn center(f: &GridFunction, rho: &RhoMeasure) -> GridFunction {
    let v = f.values();
    let m = f.intervals();
    let mut mean = 0.0;
    for (k, x) in f.nodes().enumerate() {
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        mean += w * v[k] * rho.density_unchecked(x);
    }
    mean /= m as f64;
    f.with_values(v.iter().map(|y| y - mean).collect())
}

fn sup_abs(values: &[f64]) -> f64 {
    values.iter().map(|d| d.abs()).fold(0.0, f64::max)
}

/// Iterates `f_{k+1} = U f_k` and reports the ratios of successive maximal
/// derivatives, which should stay below `q_N`.
pub fn contraction_check(initial: &GridFunction, steps: usize, tail: &TailPolicy) -> Result<ContractionReport> {
    if initial.kind() != GridKind::Density {
        return Err(Error::WrongKind { expected: "density" });
    }
    let n = initial.parameter();
    let rho = RhoMeasure::new(n);
    let m0 = sup_abs(&initial.derivative());
    if m0 == 0.0 {
        return Err(Error::DegenerateDensity);
    }
    let mut current = center(initial, &rho);
    let mut sups = vec![m0];
    for _ in 0..steps {
        current = center(&gk_step_density(&current, tail)?, &rho);
        sups.push(sup_abs(&current.derivative()));
    }
    let ratios = sups.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(ContractionReport {
        sup_derivative: sups,
        ratios,
        q_n: qn_value(n),
    })
}
