//! Rigorous interval arithmetic on fixed-point big integers.
//!
//! An [`Enclosure`] is a pair of integers `lo <= hi` read as `[lo, hi] / 2^bits`.
//! Every operation rounds `lo` down and `hi` up, so the true value of an
//! expression stays inside the interval computed for it.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bits needed to carry `digits` decimal digits, plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

#[derive(Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn div_floor(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_floor(den)
}

fn div_ceil(num: &BigInt, den: &BigInt) -> BigInt {
    -((-num).div_floor(den))
}

impl Enclosure {
    pub fn exact_integer(value: impl Into<BigInt>, bits: u32) -> Self {
        let v: BigInt = value.into() << bits;
        Self {
            lo: v.clone(),
            hi: v,
            bits,
        }
    }

    pub fn zero(bits: u32) -> Self {
        Self::exact_integer(0, bits)
    }

    /// Encloses `num / den`; `den` must be positive.
    pub fn ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        assert!(den.is_positive(), "denominator must be positive");
        let scaled = num << bits;
        Self {
            lo: div_floor(&scaled, den),
            hi: div_ceil(&scaled, den),
            bits,
        }
    }

    pub fn rational(r: &BigRational, bits: u32) -> Self {
        Self::ratio(r.numer(), r.denom(), bits)
    }

    /// Encloses `sqrt(v)` for a non-negative integer `v`.
    pub fn sqrt_integer(v: &BigInt, bits: u32) -> Self {
        assert!(!v.is_negative(), "square root of a negative integer");
        let scaled = v << (2 * bits);
        let lo = scaled.sqrt();
        let hi = if &lo * &lo == scaled { lo.clone() } else { &lo + 1u32 };
        Self { lo, hi, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.bits)
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, BigInt::one() << (self.bits + 1))
    }

    /// Correctly rounded double of the midpoint.
    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().expect("finite rational")
    }

    /// An upper bound on the distance from the midpoint to any point of the interval.
    pub fn radius(&self) -> f64 {
        let r = BigRational::new(&self.hi - &self.lo, BigInt::one() << (self.bits + 1));
        // Round up so the reported bound is never optimistic.
        let f = r.to_f64().expect("finite rational");
        if f == 0.0 {
            0.0
        } else {
            f.next_up()
        }
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        self.cmp_rational(r) == Some(Ordering::Equal)
    }

    /// `Some(Less)` if the whole interval lies below `r`, `Some(Greater)` if
    /// above, `Some(Equal)` if `r` lies inside; never `None` for a proper
    /// interval. Provided as `Option` for symmetry with `partial_cmp`.
    pub fn cmp_rational(&self, r: &BigRational) -> Option<Ordering> {
        let scaled = r.numer() << self.bits;
        let den = r.denom();
        if &self.hi * den < scaled {
            Some(Ordering::Less)
        } else if &self.lo * den > scaled {
            Some(Ordering::Greater)
        } else {
            Some(Ordering::Equal)
        }
    }

    /// `a / 2^self.bits` against `b / 2^other.bits`.
    fn cmp_scaled(&self, a: &BigInt, other: &Self, b: &BigInt) -> Ordering {
        (a << other.bits).cmp(&(b << self.bits))
    }

    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.cmp_scaled(&self.hi, other, &other.lo) == Ordering::Less
    }

    pub fn certainly_le(&self, other: &Self) -> bool {
        self.cmp_scaled(&self.hi, other, &other.lo) != Ordering::Greater
    }

    pub fn certainly_gt_rational(&self, r: &BigRational) -> bool {
        self.cmp_rational(r) == Some(Ordering::Greater)
    }

    pub fn certainly_lt_rational(&self, r: &BigRational) -> bool {
        self.cmp_rational(r) == Some(Ordering::Less)
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.cmp_scaled(&self.lo, other, &other.hi) != Ordering::Greater
            && other.cmp_scaled(&other.lo, self, &self.hi) != Ordering::Greater
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    fn check_bits(&self, other: &Self) {
        assert_eq!(self.bits, other.bits, "enclosures at different scales");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_bits(other);
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            bits: self.bits,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_bits(other);
        Self {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
            bits: self.bits,
        }
    }

    pub fn add_integer(&self, k: impl Into<BigInt>) -> Self {
        let shift: BigInt = k.into() << self.bits;
        Self {
            lo: &self.lo + &shift,
            hi: &self.hi + &shift,
            bits: self.bits,
        }
    }

    pub fn mul_integer(&self, k: impl Into<BigInt>) -> Self {
        let k: BigInt = k.into();
        let (a, b) = (&self.lo * &k, &self.hi * &k);
        if k.sign() == Sign::Minus {
            Self { lo: b, hi: a, bits: self.bits }
        } else {
            Self { lo: a, hi: b, bits: self.bits }
        }
    }

    /// Divides by a positive integer.
    pub fn div_integer(&self, k: impl Into<BigInt>) -> Self {
        let k: BigInt = k.into();
        assert!(k.is_positive(), "divisor must be positive");
        Self {
            lo: div_floor(&self.lo, &k),
            hi: div_ceil(&self.hi, &k),
            bits: self.bits,
        }
    }

    /// `1 / self`; the interval must be strictly positive.
    pub fn recip(&self) -> Self {
        assert!(self.lo.is_positive(), "reciprocal of an interval containing zero");
        let one = BigInt::one() << (2 * self.bits);
        Self {
            lo: div_floor(&one, &self.hi),
            hi: div_ceil(&one, &self.lo),
            bits: self.bits,
        }
    }

    /// Widens the interval by `err` units of `2^-bits` on each side.
    pub fn widen(&self, err_lo: &BigInt, err_hi: &BigInt) -> Self {
        Self {
            lo: &self.lo - err_lo,
            hi: &self.hi + err_hi,
            bits: self.bits,
        }
    }

    pub(crate) fn raw(&self) -> (&BigInt, &BigInt) {
        (&self.lo, &self.hi)
    }

    pub(crate) fn from_raw(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi, bits }
    }

    /// Decimal rendering of the midpoint with `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        decimal_string(&self.midpoint(), sig)
    }
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Enclosure({} ± {:e})",
            self.to_decimal(40),
            self.radius()
        )
    }
}

/// Positional decimal rendering of a rational, rounded half-up to `sig`
/// significant digits.
pub fn decimal_string(r: &BigRational, sig: usize) -> String {
    let sig = sig.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let a = r.abs();
    // Find e with 10^e <= a < 10^(e+1).
    let ten = BigInt::from(10);
    let mut e: i64 = (a.numer().bits() as i64 - a.denom().bits() as i64) * 3 / 10;
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while pow(e) > a {
        e -= 1;
    }
    while pow(e + 1) <= a {
        e += 1;
    }
    // Scale so the integer part has `sig` digits.
    let shift = sig as i64 - 1 - e;
    let scaled = &a * pow(shift);
    let mut digits = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    let mut shift = shift;
    if digits.to_string().len() > sig {
        digits /= 10;
        shift -= 1;
    }
    let mut s = digits.to_string();
    let body = if shift <= 0 {
        s.push_str(&"0".repeat((-shift) as usize));
        s
    } else {
        let shift = shift as usize;
        if s.len() <= shift {
            format!("0.{}{}", "0".repeat(shift - s.len()), s)
        } else {
            let (int, frac) = s.split_at(s.len() - shift);
            format!("{int}.{frac}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}
