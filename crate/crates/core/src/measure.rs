//! The invariant probability measure `ρ_N(dx) = dx / ((x + N - 1) log(N/(N-1)))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cf::Parameter;
use crate::error::{domain, Result};
use crate::precise::Enclosure;

const NORMALIZER_BITS: u32 = 160;

/// Enclosure of `log(N/(N-1)) = 2 atanh(1/(2N-1))` from its power series.
pub fn log_ratio_enclosure(n: Parameter, bits: u32) -> Enclosure {
    let base = BigInt::from(2 * n.get() - 1);
    let base_sq = &base * &base;
    let target = BigInt::one() << (bits + 4);
    let mut power = base.clone();
    let mut sum = BigRational::zero();
    let mut k: u64 = 0;
    loop {
        sum += BigRational::new(BigInt::one(), &power * BigInt::from(2 * k + 1));
        power *= &base_sq;
        k += 1;
        if power > target {
            break;
        }
    }
    // Remaining terms are bounded by y^{2k+1} / ((2k+1)(1 - y^2)).
    let y_sq_comp = BigRational::one() - BigRational::new(BigInt::one(), base_sq);
    let rest = BigRational::new(BigInt::one(), &power * BigInt::from(2 * k + 1)) / y_sq_comp;
    let two = BigRational::from_integer(BigInt::from(2));
    let lo = Enclosure::rational(&(&sum * &two), bits);
    let hi = Enclosure::rational(&((sum + rest) * two), bits);
    let (l, _) = lo.raw();
    let (_, h) = hi.raw();
    Enclosure::from_raw(l.clone(), h.clone(), bits)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoMeasure {
    n: Parameter,
    normalizer: f64,
}

impl RhoMeasure {
    pub fn new(n: Parameter) -> Self {
        let normalizer = log_ratio_enclosure(n, NORMALIZER_BITS).recip().to_f64();
        Self { n, normalizer }
    }

    pub fn parameter(&self) -> Parameter {
        self.n
    }

    /// `1 / log(N/(N-1))`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// `ρ_N([0, x]) = log((x + N - 1)/(N - 1)) / log(N/(N-1))`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.cdf_unchecked(x))
    }

    #[inline]
    pub(crate) fn cdf_unchecked(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return 1.0;
        }
        self.normalizer * (x / (self.n.as_f64() - 1.0)).ln_1p()
    }

    pub fn interval(&self, a: f64, b: f64) -> Result<f64> {
        check_unit(a)?;
        check_unit(b)?;
        if a > b {
            return Err(domain("interval start", a, "[0, b]"));
        }
        Ok(self.cdf_unchecked(b) - self.cdf_unchecked(a))
    }

    /// `normalizer / (x + N - 1)`.
    pub fn density(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.density_unchecked(x))
    }

    #[inline]
    pub(crate) fn density_unchecked(&self, x: f64) -> f64 {
        self.normalizer / (x + self.n.as_f64() - 1.0)
    }
}

fn check_unit(x: f64) -> Result<()> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain("x", x, "[0, 1]"))
    }
}

/// Convenience wrappers matching the free-function style of the rest of the crate.
pub fn rho_cdf(m: &RhoMeasure, x: f64) -> Result<f64> {
    m.cdf(x)
}

pub fn rho_interval(m: &RhoMeasure, a: f64, b: f64) -> Result<f64> {
    m.interval(a, b)
}

pub fn rho_density(m: &RhoMeasure, x: f64) -> Result<f64> {
    m.density(x)
}
