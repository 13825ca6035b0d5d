//! The Rényi-type continued fraction map, digit expansion and convergents.
//!
//! Two arithmetic paths are exposed: [`expand`] iterates the map in machine
//! doubles, [`expand_exact`] iterates it on exact rationals. The convergent
//! recurrences always run on arbitrary-precision integers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// Largest digit the floating-point path will report. Past this point
/// `floor(N / (1 - x))` carries no information in a double.
pub const DIGIT_CAP: u64 = 1 << 53;

/// The integer parameter `N >= 2` of the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parameter(u64);

impl Parameter {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(n));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u64> for Parameter {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        Self::new(n)
    }
}

/// A finite list of digits `a_1..a_n`, each at least `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSequence {
    n: Parameter,
    digits: Vec<u64>,
}

impl DigitSequence {
    pub fn new(n: Parameter, digits: Vec<u64>) -> Result<Self> {
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &a)| a < n.get()) {
            return Err(Error::DigitBelowParameter {
                digit,
                position: position + 1,
                n: n.get(),
            });
        }
        Ok(Self { n, digits })
    }

    pub fn empty(n: Parameter) -> Self {
        Self {
            n,
            digits: Vec::new(),
        }
    }

    pub fn parameter(&self) -> Parameter {
        self.n
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// The first `k` digits (all of them if `k` exceeds the length).
    pub fn prefix(&self, k: usize) -> Self {
        Self {
            n: self.n,
            digits: self.digits[..k.min(self.digits.len())].to_vec(),
        }
    }

    /// Appends a digit, checking it against `N`.
    pub fn push(&mut self, digit: u64) -> Result<()> {
        if digit < self.n.get() {
            return Err(Error::DigitBelowParameter {
                digit,
                position: self.digits.len() + 1,
                n: self.n.get(),
            });
        }
        self.digits.push(digit);
        Ok(())
    }
}

/// The `index`-th convergent `p / q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

/// A floating-point orbit `x_0, R_N(x_0), ...` and the digits read off along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub n: Parameter,
    pub points: Vec<f64>,
    pub digits: Vec<u64>,
}

/// Why a floating-point expansion stopped before the requested length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// The iterate at this step equals 1, where the digit is infinite.
    HitOne { step: usize },
    /// The digit at this (1-based) position reached [`DIGIT_CAP`]; it was
    /// recorded as the cap and the expansion stopped.
    PrecisionLoss { position: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub orbit: Orbit,
    pub truncation: Option<Truncation>,
}

impl Expansion {
    pub fn digits(&self) -> DigitSequence {
        DigitSequence {
            n: self.orbit.n,
            digits: self.orbit.digits.clone(),
        }
    }

    /// `R_N^k(x)` for the last `k` reached.
    pub fn final_point(&self) -> f64 {
        *self.orbit.points.last().expect("orbit always holds x_0")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactExpansion {
    pub digits: DigitSequence,
    pub remainder: BigRational,
}

/// Result of the floating-point digit function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloatDigit {
    Finite(u64),
    /// `floor(N / (1 - x))` is at least [`DIGIT_CAP`].
    Saturated,
    /// `x = 1`.
    Infinite,
}

impl FloatDigit {
    pub fn value(self) -> Option<u64> {
        match self {
            FloatDigit::Finite(a) => Some(a),
            FloatDigit::Saturated => Some(DIGIT_CAP),
            FloatDigit::Infinite => None,
        }
    }
}

fn check_closed_unit(x: f64) -> Result<()> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain("x", x, "[0, 1]"))
    }
}

fn check_half_open_unit(x: f64) -> Result<()> {
    if x.is_finite() && (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain("x", x, "[0, 1)"))
    }
}

/// `R_N(x) = N/(1-x) - floor(N/(1-x))`, with `R_N(1) = 0`.
pub fn renyi_map(n: Parameter, x: f64) -> Result<f64> {
    check_closed_unit(x)?;
    if x == 1.0 {
        return Ok(0.0);
    }
    let y = n.as_f64() / (1.0 - x);
    // y >= N >= 2, so y - floor(y) is exact and strictly below 1.
    Ok(y - y.floor())
}

/// `a_1(x) = floor(N / (1 - x))`.
pub fn digit(n: Parameter, x: f64) -> Result<FloatDigit> {
    check_closed_unit(x)?;
    if x == 1.0 {
        return Ok(FloatDigit::Infinite);
    }
    let y = (n.as_f64() / (1.0 - x)).floor();
    if y >= DIGIT_CAP as f64 {
        Ok(FloatDigit::Saturated)
    } else {
        Ok(FloatDigit::Finite(y as u64))
    }
}

/// First `count` digits of `x` in double precision, with the orbit visited.
pub fn expand(n: Parameter, x: f64, count: usize) -> Result<Expansion> {
    check_half_open_unit(x)?;
    let mut points = Vec::with_capacity(count + 1);
    let mut digits = Vec::with_capacity(count);
    let mut truncation = None;
    let mut current = x;
    points.push(current);
    for step in 0..count {
        match digit(n, current)? {
            FloatDigit::Finite(a) => digits.push(a),
            FloatDigit::Saturated => {
                digits.push(DIGIT_CAP);
                truncation = Some(Truncation::PrecisionLoss { position: step + 1 });
                break;
            }
            FloatDigit::Infinite => {
                truncation = Some(Truncation::HitOne { step });
                break;
            }
        }
        current = renyi_map(n, current)?;
        points.push(current);
    }
    Ok(Expansion {
        orbit: Orbit { n, points, digits },
        truncation,
    })
}

/// First `count` digits of a rational `x` using exact arithmetic.
pub fn expand_exact(n: Parameter, x: &BigRational, count: usize) -> Result<ExactExpansion> {
    if x.is_negative() || *x >= BigRational::one() {
        return Err(domain("x", x, "[0, 1)"));
    }
    let big_n = BigRational::from_integer(n.as_bigint());
    let one = BigRational::one();
    let mut current = x.clone();
    let mut digits = Vec::with_capacity(count);
    for position in 1..=count {
        let y = &big_n / (&one - &current);
        let a = y.floor();
        digits.push(a.to_integer().to_u64().ok_or(Error::DigitOverflow(position))?);
        current = y - a;
    }
    Ok(ExactExpansion {
        digits: DigitSequence { n, digits },
        remainder: current,
    })
}

/// Convergents `(p_0, q_0), ..., (p_n, q_n)` from the three-term recurrences
/// `p_k = (1 + a_k) p_{k-1} - N p_{k-2}` (same for `q`), seeded by
/// `p_0 = q_0 = 1`, `p_1 = 1 + a_1 - N`, `q_1 = 1 + a_1`.
pub fn convergents(d: &DigitSequence) -> Vec<Convergent> {
    let n = d.parameter().as_bigint();
    // (p_{-1}, q_{-1}) = (1, 0) reproduces the stated seeds for k = 1.
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (BigInt::one(), BigInt::one());
    let mut out = Vec::with_capacity(d.len() + 1);
    out.push(Convergent {
        index: 0,
        p: p.clone(),
        q: q.clone(),
    });
    for (k, &a) in d.digits().iter().enumerate() {
        let b = BigInt::from(a) + 1u32;
        let p_next = &b * &p - &n * &p_prev;
        let q_next = &b * &q - &n * &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent {
            index: k + 1,
            p: p.clone(),
            q: q.clone(),
        });
    }
    out
}

/// Exact value of `1 - N/(1 + a_1 - N/(1 + a_2 - ... - N/(1 + a_n)))`.
pub fn evaluate(d: &DigitSequence) -> Result<BigRational> {
    let (last, rest) = d.digits().split_last().ok_or(Error::EmptyDigits)?;
    let n = BigRational::from_integer(d.parameter().as_bigint());
    let one = BigRational::one();
    let mut tail = BigRational::from_integer(BigInt::from(*last) + 1u32);
    for &a in rest.iter().rev() {
        tail = BigRational::from_integer(BigInt::from(a) + 1u32) - &n / tail;
    }
    Ok(one - n / tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Parameter {
        Parameter::new(n).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn parameter_rejects_small_n() {
        assert_eq!(Parameter::new(1), Err(Error::InvalidParameter(1)));
        assert_eq!(Parameter::new(0), Err(Error::InvalidParameter(0)));
        assert_eq!(p(2).get(), 2);
    }

    #[test]
    fn map_examples() {
        assert_eq!(renyi_map(p(2), 0.0).unwrap(), 0.0);
        assert_eq!(renyi_map(p(2), 0.5).unwrap(), 0.0);
        assert_eq!(renyi_map(p(2), 0.2).unwrap(), 0.5);
        assert_eq!(renyi_map(p(3), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn map_domain() {
        for x in [-0.1, 1.5, f64::NAN, f64::INFINITY] {
            assert!(matches!(renyi_map(p(2), x), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn digit_examples() {
        assert_eq!(digit(p(2), 0.0).unwrap(), FloatDigit::Finite(2));
        assert_eq!(digit(p(3), 0.2).unwrap(), FloatDigit::Finite(3));
        assert_eq!(digit(p(2), 0.5).unwrap(), FloatDigit::Finite(4));
        assert_eq!(digit(p(2), 1.0).unwrap(), FloatDigit::Infinite);
        assert_eq!(digit(p(2), 1.0 - f64::EPSILON / 2.0).unwrap(), FloatDigit::Saturated);
    }

    #[test]
    fn expand_examples() {
        assert_eq!(expand(p(2), 0.0, 3).unwrap().orbit.digits, vec![2, 2, 2]);
        let e = expand(p(2), 0.5, 3).unwrap();
        assert_eq!(e.orbit.digits, vec![4, 2, 2]);
        assert_eq!(e.orbit.points, vec![0.5, 0.0, 0.0, 0.0]);
        assert_eq!(e.truncation, None);
        // R_3(0.2) = 0.75, whose digit is floor(3 / 0.25) = 12.
        let e = expand(p(3), 0.2, 2).unwrap();
        assert_eq!(e.orbit.digits, vec![3, 12]);
        assert!((e.orbit.points[1] - 0.75).abs() < 1e-15);
        assert!(expand(p(2), 1.0, 2).is_err());
    }

    #[test]
    fn expand_flags_precision_loss_near_one() {
        let x = 1.0 - f64::EPSILON / 2.0;
        let e = expand(p(2), x, 5).unwrap();
        assert_eq!(e.orbit.digits, vec![DIGIT_CAP]);
        assert_eq!(e.truncation, Some(Truncation::PrecisionLoss { position: 1 }));
    }

    #[test]
    fn expand_exact_examples() {
        let d = expand_exact(p(2), &rat(1, 2), 3).unwrap();
        assert_eq!(d.digits.digits(), &[4, 2, 2]);
        assert!(d.remainder.is_zero());
        assert_eq!(expand_exact(p(2), &rat(1, 3), 1).unwrap().digits.digits(), &[3]);
        assert_eq!(expand_exact(p(5), &rat(0, 1), 2).unwrap().digits.digits(), &[5, 5]);
        assert!(expand_exact(p(2), &rat(1, 1), 1).is_err());
        assert!(expand_exact(p(2), &rat(-1, 3), 1).is_err());
    }

    #[test]
    fn convergent_examples() {
        let c = convergents(&DigitSequence::new(p(2), vec![3]).unwrap());
        let pairs: Vec<(i64, i64)> = c
            .iter()
            .map(|c| (c.p.to_i64().unwrap(), c.q.to_i64().unwrap()))
            .collect();
        assert_eq!(pairs, vec![(1, 1), (2, 4)]);

        let c = convergents(&DigitSequence::new(p(2), vec![2, 2]).unwrap());
        let pairs: Vec<(i64, i64)> = c
            .iter()
            .map(|c| (c.p.to_i64().unwrap(), c.q.to_i64().unwrap()))
            .collect();
        assert_eq!(pairs, vec![(1, 1), (1, 3), (1, 7)]);
        let det = &c[1].p * &c[2].q - &c[2].p * &c[1].q;
        assert_eq!(det, BigInt::from(4));
    }

    #[test]
    fn convergents_of_empty_sequence() {
        let c = convergents(&DigitSequence::empty(p(3)));
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].p.clone(), c[0].q.clone()), (BigInt::one(), BigInt::one()));
    }

    #[test]
    fn evaluate_examples() {
        let v = |n, d: Vec<u64>| evaluate(&DigitSequence::new(p(n), d).unwrap()).unwrap();
        assert_eq!(v(2, vec![4]), rat(3, 5));
        assert_eq!(v(2, vec![2, 2]), rat(1, 7));
        assert_eq!(v(3, vec![3]), rat(1, 4));
        assert_eq!(v(2, vec![4, 2, 2]), rat(15, 29));
        assert_eq!(evaluate(&DigitSequence::empty(p(2))), Err(Error::EmptyDigits));
    }

    #[test]
    fn digit_sequence_rejects_small_digits() {
        assert!(matches!(
            DigitSequence::new(p(3), vec![3, 2]),
            Err(Error::DigitBelowParameter { digit: 2, position: 2, n: 3 })
        ));
        let mut d = DigitSequence::empty(p(3));
        assert!(d.push(5).is_ok());
        assert!(d.push(1).is_err());
        assert_eq!(d.digits(), &[5]);
    }
}
