//! Rényi-type continued fractions for an integer parameter `N >= 2`.
//!
//! The map `R_N(x) = {N / (1 - x)}` generates expansions
//! `x = 1 - N/(1 + a_1 - N/(1 + a_2 - ...))` with digits `a_k >= N`. This crate
//! provides
//!
//! * exact and floating-point expansions with arbitrary-precision convergents ([`cf`]),
//! * the invariant probability measure `dx / ((x + N - 1) log(N/(N-1)))` ([`measure`]),
//! * the transfer operator and the Gauss–Kuzmin iteration of distribution
//!   functions and densities on uniform grids ([`transfer`], [`gk`]),
//! * a Monte-Carlo estimate of the orbit distribution ([`montecarlo`]),
//! * rigorous evaluation of the contraction constant
//!   `q_N = ζ(3, N) + N ζ(2, N) - 1` together with its closed-form bounds ([`qn`]).

pub mod cf;
pub mod cli;
pub mod error;
pub mod gk;
pub mod grid;
pub mod interp;
pub mod measure;
pub mod montecarlo;
pub mod precise;
pub mod qn;
pub mod transfer;
pub mod zeta;

pub use cf::{
    convergents, digit, evaluate, expand, expand_exact, renyi_map, Convergent, DigitSequence,
    Expansion, ExactExpansion, FloatDigit, Orbit, Parameter, Truncation,
};
pub use error::{Error, Result};
pub use gk::{contraction_check, iterate_gk, IterationReport};
pub use grid::{GridFunction, GridKind};
pub use measure::RhoMeasure;
pub use montecarlo::{monte_carlo_cdf, EmpiricalCdf, MonteCarloRun};
pub use qn::{qn_bounds, qn_exact, qn_series, reproduce_table, zeta_inequality_check, QnCertificate};
pub use transfer::{
    apply_transfer, branch_point, branch_weight, gk_step_cdf, gk_step_density, TailMode,
    TailPolicy,
};
pub use zeta::{hurwitz_zeta, ZetaValue};
