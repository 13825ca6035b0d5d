//! Hurwitz zeta `ζ(s, a) = Σ_{i >= a} i^{-s}` for `s ∈ {2, 3}` and integer `a >= 1`.
//!
//! The first `K - a` terms are summed directly; the tail `Σ_{i >= K}` is
//! replaced by its Euler–Maclaurin expansion
//!
//! ```text
//! K^{1-s}/(s-1) + K^{-s}/2 + Σ_{j=1..m} B_{2j}/(2j)! · s(s+1)…(s+2j-2) · K^{-s-2j+1}
//! ```
//!
//! Since every derivative of `t^{-s}` has constant sign, the remainder has the
//! sign of the first omitted term and is no larger in magnitude, which turns
//! the truncated expansion into a rigorous [`Enclosure`].

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::precise::{bits_for_digits, Enclosure};

/// Largest Euler–Maclaurin order tried by the automatic driver.
const MAX_ORDER: usize = 40;

/// Offset `K - a` the automatic driver starts from.
const BASE_OFFSET: u64 = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaValue {
    pub s: u32,
    pub a: u64,
    pub value: Enclosure,
    /// Significant digits requested.
    pub precision: u32,
    /// First index handled by the Euler–Maclaurin tail.
    pub cutoff: u64,
    /// Number of Bernoulli correction terms.
    pub order: usize,
}

impl ZetaValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Rigorous bound on `|ζ(s, a) - midpoint|`.
    pub fn error_bound(&self) -> f64 {
        self.value.radius()
    }

    pub fn to_decimal(&self, sig: usize) -> String {
        self.value.to_decimal(sig)
    }
}

/// `B_0, B_1, ..., B_{2 MAX_ORDER + 2}` with the `B_1 = -1/2` convention.
fn bernoulli() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let len = 2 * MAX_ORDER + 3;
        let mut b: Vec<BigRational> = Vec::with_capacity(len);
        // binom holds row m + 1 of Pascal's triangle while computing B_m.
        let mut binom: Vec<BigInt> = vec![BigInt::one(), BigInt::one()];
        b.push(BigRational::one());
        for m in 1..len {
            let mut next = vec![BigInt::one(); m + 2];
            for k in 1..=m {
                next[k] = &binom[k - 1] + &binom[k];
            }
            binom = next;
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += bk * BigRational::from_integer(binom[k].clone());
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m as u64 + 1)));
        }
        b
    })
}

/// `B_{2j}/(2j)! · s(s+1)…(s+2j-2) · K^{-s-2j+1}`.
fn em_term(s: u32, k: u64, j: usize) -> BigRational {
    let b = &bernoulli()[2 * j];
    let mut num = BigInt::one();
    for r in 0..(2 * j as u64 - 1) {
        num *= u64::from(s) + r;
    }
    let mut fact = BigInt::one();
    for r in 1..=(2 * j as u64) {
        fact *= r;
    }
    let power = num_traits::pow(BigInt::from(k), s as usize + 2 * j - 1);
    b * BigRational::new(num, fact * power)
}

fn check_args(s: u32, a: u64) -> Result<()> {
    if s != 2 && s != 3 {
        return Err(Error::UnsupportedZetaOrder(s));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("Hurwitz zeta needs a >= 1".into()));
    }
    Ok(())
}

/// Enclosure of `Σ_{a <= i < cutoff} i^{-s}` plus the order-`order`
/// Euler–Maclaurin tail from `cutoff`, at `bits` fractional bits.
pub fn zeta_enclosure(s: u32, a: u64, cutoff: u64, order: usize, bits: u32) -> Result<Enclosure> {
    check_args(s, a)?;
    if cutoff < a {
        return Err(Error::InvalidArgument(format!(
            "Euler-Maclaurin cutoff {cutoff} is below a = {a}"
        )));
    }
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Euler-Maclaurin order {order} exceeds {MAX_ORDER}"
        )));
    }
    let one = BigInt::one() << bits;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for i in a..cutoff {
        let den = num_traits::pow(BigInt::from(i), s as usize);
        let (q, r) = num_integer::Integer::div_rem(&one, &den);
        if r.is_zero() {
            hi += &q;
        } else {
            hi += &q + 1u32;
        }
        lo += q;
    }

    let k = BigInt::from(cutoff);
    let s_big = BigInt::from(s);
    let mut tail = BigRational::new(BigInt::one(), (&s_big - 1u32) * num_traits::pow(k.clone(), s as usize - 1))
        + BigRational::new(BigInt::one(), BigInt::from(2u32) * num_traits::pow(k.clone(), s as usize));
    for j in 1..=order {
        tail += em_term(s, cutoff, j);
    }
    let next = em_term(s, cutoff, order + 1);
    let (tail_lo, tail_hi) = if next.is_negative() {
        (&tail + &next, tail)
    } else {
        (tail.clone(), tail + next)
    };
    let t_lo = Enclosure::rational(&tail_lo, bits);
    let t_hi = Enclosure::rational(&tail_hi, bits);
    let (t_lo_raw, _) = t_lo.raw();
    let (_, t_hi_raw) = t_hi.raw();
    Ok(Enclosure::from_raw(lo + t_lo_raw, hi + t_hi_raw, bits))
}

/// `ζ(s, a)` with an explicit cutoff and Euler–Maclaurin order.
pub fn hurwitz_zeta_with(s: u32, a: u64, cutoff: u64, order: usize, precision: u32) -> Result<ZetaValue> {
    let bits = working_bits(s, a, precision);
    Ok(ZetaValue {
        s,
        a,
        value: zeta_enclosure(s, a, cutoff, order, bits)?,
        precision,
        cutoff,
        order,
    })
}

/// Fractional bits that leave `precision` significant digits for `ζ(s, a) ≈ a^{1-s}/(s-1)`.
pub fn working_bits(s: u32, a: u64, precision: u32) -> u32 {
    let magnitude_bits = (s - 1) * (64 - a.leading_zeros());
    bits_for_digits(precision + 2) + magnitude_bits
}

/// Cutoff and order whose omitted Euler–Maclaurin term is below `2^-(bits + 2)`.
pub fn choose_truncation(s: u32, a: u64, bits: u32) -> (u64, usize) {
    let target = BigRational::new(BigInt::one(), BigInt::one() << (bits + 2));
    let mut offset = BASE_OFFSET;
    loop {
        let cutoff = a + offset;
        let mut previous: Option<BigRational> = None;
        for order in 0..MAX_ORDER {
            let next = em_term(s, cutoff, order + 1).abs();
            if next <= target {
                return (cutoff, order);
            }
            // The expansion is asymptotic: once terms grow, a larger cutoff is needed.
            if previous.as_ref().is_some_and(|p| &next > p) {
                break;
            }
            previous = Some(next);
        }
        offset *= 2;
    }
}

/// `ζ(s, a)` to `precision` significant digits with a rigorous error bound.
pub fn hurwitz_zeta(s: u32, a: u64, precision: u32) -> Result<ZetaValue> {
    check_args(s, a)?;
    let bits = working_bits(s, a, precision);
    hurwitz_zeta_bits(s, a, precision, bits)
}

/// As [`hurwitz_zeta`] but at a caller-chosen scale, so several values can be combined.
pub fn hurwitz_zeta_bits(s: u32, a: u64, precision: u32, bits: u32) -> Result<ZetaValue> {
    check_args(s, a)?;
    let (cutoff, order) = choose_truncation(s, a, bits);
    Ok(ZetaValue {
        s,
        a,
        value: zeta_enclosure(s, a, cutoff, order, bits)?,
        precision,
        cutoff,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli();
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[12], rat(-691, 2730));
        assert_eq!(b[20], rat(-174611, 330));
        assert!(b[3].is_zero() && b[21].is_zero());
    }

    #[test]
    fn rejects_other_orders() {
        assert_eq!(hurwitz_zeta(4, 2, 30), Err(Error::UnsupportedZetaOrder(4)));
        assert!(hurwitz_zeta(2, 0, 30).is_err());
    }

    #[test]
    fn zeta_two_one_is_pi_squared_over_six() {
        let z = hurwitz_zeta(2, 1, 30).unwrap();
        // π²/6 to 40 digits.
        assert_eq!(&z.to_decimal(30), "1.64493406684822643647241516665");
        assert!(z.error_bound() < 1e-30);
        assert_eq!(z.to_f64(), std::f64::consts::PI * std::f64::consts::PI / 6.0);
    }

    #[test]
    fn zeta_two_two_drops_first_term() {
        let bits = working_bits(2, 2, 30);
        let z1 = hurwitz_zeta_bits(2, 1, 30, bits).unwrap();
        let z2 = hurwitz_zeta_bits(2, 2, 30, bits).unwrap();
        let diff = z1.value.sub(&z2.value);
        assert!(diff.contains(&rat(1, 1)));
    }

    #[test]
    fn zeta_three_two() {
        // ζ(3) - 1, Apéry's constant minus one.
        let z = hurwitz_zeta(3, 2, 30).unwrap();
        assert_eq!(&z.to_decimal(28), "0.2020569031595942853997381615");
    }

    #[test]
    fn error_bound_meets_precision() {
        for (s, a) in [(2, 1), (2, 10000), (3, 2), (3, 10000)] {
            let z = hurwitz_zeta(s, a, 30).unwrap();
            assert!(z.error_bound() < 1e-28, "s={s} a={a}: {}", z.error_bound());
            assert!(z.value.is_positive());
        }
    }

    #[test]
    fn aggressive_and_long_cutoffs_agree() {
        for (s, a) in [(2, 2), (3, 2), (2, 10), (3, 10)] {
            let short = hurwitz_zeta_with(s, a, a + 10, 1, 30).unwrap();
            let long = hurwitz_zeta_with(s, a, a + 1_000_000, 1, 30).unwrap();
            assert!(short.value.overlaps(&long.value), "s={s} a={a}");
            assert!(long.error_bound() < short.error_bound());
        }
    }
}
