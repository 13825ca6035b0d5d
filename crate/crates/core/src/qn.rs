//! The contraction constant
//!
//! ```text
//! q_N = Σ_{i>=N} (1/i³ + N/(i²(i+1))) = ζ(3, N) + N ζ(2, N) - 1
//! ```
//!
//! evaluated rigorously, cross-checked against the defining series, and
//! compared with the closed-form bounds
//! `1/N³ + 1/(2N(N+1)) + 1/(2N) < q_N < 1/(2N(N-1)) + 1/N - 1/(2N+1)`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::cf::Parameter;
use crate::error::{Error, Result};
use crate::precise::{bits_for_digits, Enclosure};
use crate::zeta::{hurwitz_zeta_bits, ZetaValue};

/// Default number of significant digits for certificates.
pub const DEFAULT_PRECISION: u32 = 30;

/// The published table of bounds, `(N, lower, upper)`, as printed.
pub const PUBLISHED_TABLE: [(u64, &str, &str); 7] = [
    (2, "0.4583333333333333", "0.55"),
    (10, "0.055545454545454544", "0.05793650793650794"),
    (100, "0.00505050495049505", "0.0050753806723955975"),
    (500, "0.001002004007984032", "0.001003003009015033"),
    (1000, "0.0005005005004995005", "0.0005007503755629693"),
    (5000, "0.00010002000400079984", "0.00010003000300090015"),
    (10000, "0.00005000500050004999", "0.000050007500375056254"),
];

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// The closed-form bounds as exact rationals.
pub fn qn_bounds_exact(n: Parameter) -> (BigRational, BigRational) {
    let n = BigInt::from(n.get());
    let one = BigInt::one();
    let lower = ratio(one.clone(), &n * &n * &n)
        + ratio(one.clone(), BigInt::from(2) * &n * (&n + 1u32))
        + ratio(one.clone(), BigInt::from(2) * &n);
    let upper = ratio(one.clone(), BigInt::from(2) * &n * (&n - 1u32)) + ratio(one.clone(), n.clone())
        - ratio(one, BigInt::from(2) * &n + 1u32);
    (lower, upper)
}

/// The closed-form bounds, each rounded once to the nearest double.
pub fn qn_bounds(n: Parameter) -> (f64, f64) {
    let (lo, hi) = qn_bounds_exact(n);
    (
        lo.to_f64().expect("finite bound"),
        hi.to_f64().expect("finite bound"),
    )
}

/// Fractional bits giving `precision` significant digits of `q_N ≈ 1/(2N)`
/// after multiplying `ζ(2, N)` by `N`.
fn certificate_bits(n: Parameter, precision: u32) -> u32 {
    bits_for_digits(precision + 2) + 2 * (64 - n.get().leading_zeros()) + 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct QnCertificate {
    pub n: Parameter,
    /// Rigorous enclosure of `ζ(3, N) + N ζ(2, N) - 1`.
    pub q: Enclosure,
    pub lower: f64,
    pub upper: f64,
    pub zeta2: ZetaValue,
    pub zeta3: ZetaValue,
    pub precision: u32,
}

impl QnCertificate {
    pub fn q_f64(&self) -> f64 {
        self.q.to_f64()
    }

    pub fn error_bound(&self) -> f64 {
        self.q.radius()
    }

    pub fn to_json(&self) -> CertificateJson {
        let sig = self.precision as usize;
        CertificateJson {
            n: self.n.get(),
            q: self.q.to_decimal(sig),
            q_f64: self.q_f64(),
            error_bound: self.error_bound(),
            lower: self.lower,
            upper: self.upper,
            zeta2: self.zeta2.to_decimal(sig),
            zeta3: self.zeta3.to_decimal(sig),
            precision: self.precision,
        }
    }
}

/// Serialized form of a [`QnCertificate`]; high-precision values are decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    #[serde(rename = "N")]
    pub n: u64,
    pub q: String,
    pub q_f64: f64,
    pub error_bound: f64,
    pub lower: f64,
    pub upper: f64,
    pub zeta2: String,
    pub zeta3: String,
    pub precision: u32,
}

/// Encloses `q_N` via Hurwitz zeta values and checks it against the bounds.
pub fn qn_exact(n: Parameter, precision: u32) -> Result<QnCertificate> {
    let bits = certificate_bits(n, precision);
    let zeta2 = hurwitz_zeta_bits(2, n.get(), precision, bits)?;
    let zeta3 = hurwitz_zeta_bits(3, n.get(), precision, bits)?;
    let q = zeta3
        .value
        .add(&zeta2.value.mul_integer(n.get()))
        .add_integer(-1);

    let (lower_exact, upper_exact) = qn_bounds_exact(n);
    let (lower, upper) = qn_bounds(n);
    let checks = [
        (q.certainly_gt_rational(&lower_exact), "not above the exact lower bound"),
        (q.certainly_lt_rational(&upper_exact), "not below the exact upper bound"),
        (
            q.certainly_gt_rational(&BigRational::from_float(lower).expect("finite")),
            "not above the rounded lower bound",
        ),
        (
            q.certainly_lt_rational(&BigRational::from_float(upper).expect("finite")),
            "not below the rounded upper bound",
        ),
    ];
    if let Some((_, detail)) = checks.iter().find(|(ok, _)| !ok) {
        return Err(Error::SandwichViolated {
            n: n.get(),
            detail: format!("q = {} {detail}", q.to_decimal(precision as usize)),
        });
    }
    Ok(QnCertificate {
        n,
        q,
        lower,
        upper,
        zeta2,
        zeta3,
        precision,
    })
}

/// `q_N` as a double.
pub fn qn_value(n: Parameter) -> f64 {
    qn_exact(n, DEFAULT_PRECISION)
        .expect("q_N lies inside its analytic bounds")
        .q_f64()
}

/// A partial sum of the defining series with two-sided tail bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct QnSeries {
    pub n: Parameter,
    pub terms: u64,
    /// Double-double partial sum `Σ_{i=N}^{N+terms-1}`.
    pub partial: TwoFloat,
    /// `∫_K^∞ f <= Σ_{i>=K} f(i)` with `K = N + terms` and `f(t) = 1/t³ + N/(t²(t+1))`.
    pub tail_lower: BigRational,
    /// `Σ_{i>=K} f(i) <= ∫_{K-1}^∞ (1+N)/t³`.
    pub tail_upper: BigRational,
    /// Bound on the accumulated double-double rounding error of `partial`.
    pub rounding: f64,
}

impl QnSeries {
    pub fn partial_f64(&self) -> f64 {
        self.partial.hi() + self.partial.lo()
    }

    pub fn partial_exact(&self) -> BigRational {
        BigRational::from_float(self.partial.hi()).expect("finite")
            + BigRational::from_float(self.partial.lo()).expect("finite")
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_upper.to_f64().expect("finite")
    }

    /// Whether `q` minus the partial sum lies inside the tail bounds,
    /// allowing for the rounding of the partial sum.
    pub fn brackets(&self, q: &Enclosure) -> bool {
        let partial = self.partial_exact();
        let slack = BigRational::from_float(self.rounding).expect("finite");
        let lowest = &partial + &self.tail_lower - &slack;
        let highest = &partial + &self.tail_upper + &slack;
        q.lower() >= lowest && q.upper() <= highest
    }
}

/// Terms below this are summed as plain doubles; their relative error is
/// negligible against the tail bracket.
const SMALL_TERM: f64 = 1e-12;

/// `num / den` with two correction steps; the division operator of
/// `TwoFloat` is only accurate to about one double ulp.
fn div_dd(num: f64, den: TwoFloat) -> TwoFloat {
    let q1 = num / den.hi();
    let r = TwoFloat::from(num) - den * q1;
    let q2 = r.hi() / den.hi();
    let r2 = r - den * q2;
    TwoFloat::new_add(q1, q2) + r2.hi() / den.hi()
}

/// Sums the first `terms` terms of `Σ_{i>=N} (1/i³ + N/(i²(i+1)))` in
/// double-double arithmetic.
pub fn qn_series(n: Parameter, terms: u64) -> Result<QnSeries> {
    if terms == 0 {
        return Err(Error::InvalidArgument("series needs at least one term".into()));
    }
    let first = n.get();
    let end = first
        .checked_add(terms)
        .filter(|&e| e < 1 << 26)
        .ok_or_else(|| Error::InvalidArgument(format!("{terms} terms exceed the supported range")))?;
    let big_n = n.as_f64();
    let mut sum = TwoFloat::from(0.0);
    let mut small_mass = 0.0;
    let mut exact_terms = 0u64;
    // Smallest terms first.
    for i in (first..end).rev() {
        let x = i as f64;
        let num = (x + 1.0) + big_n * x;
        let t = num / (x * x * x * (x + 1.0));
        if t < SMALL_TERM {
            sum += t;
            small_mass += t;
        } else {
            // i² is exact below 2^26, so the denominator i²·i·(i+1) loses at most one rounding.
            let den = TwoFloat::new_mul(x * x, x) * (x + 1.0);
            sum += div_dd(num, den);
            exact_terms += 1;
        }
    }
    // Double-double terms: product, quotient and sum each within a few units
    // of 2^-106 relative, sixteen units is conservative. Double terms: four
    // roundings, bounded by eight units of 2^-53. Every addition: two units
    // of 2^-106 of the running sum.
    let u2 = 2f64.powi(-106);
    let rounding = 16.0 * exact_terms as f64 * sum.hi() * u2
        + 8.0 * f64::EPSILON * small_mass
        + 2.0 * terms as f64 * sum.hi() * u2;

    let k = BigInt::from(end);
    let one_plus_n = BigInt::from(first + 1);
    let tail_lower = ratio(one_plus_n.clone(), BigInt::from(2) * &k * &k)
        - ratio(BigInt::from(first), BigInt::from(3) * &k * &k * &k);
    let km1 = &k - 1u32;
    let tail_upper = ratio(one_plus_n, BigInt::from(2) * &km1 * &km1);
    Ok(QnSeries {
        n,
        terms,
        partial: sum,
        tail_lower,
        tail_upper,
        rounding,
    })
}

/// The four Hurwitz-zeta inequalities behind the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZetaInequalities {
    #[serde(rename = "N")]
    pub n: u64,
    /// `ζ(2, N) >= 2/(√(4N²+1) - 1)`
    pub zeta2_lower: bool,
    /// `ζ(2, N) < 1/N² + 2/(2N+1)`
    pub zeta2_upper: bool,
    /// `ζ(3, N) < 1/(2N(√(N²+1) - 1))`
    pub zeta3_upper: bool,
    /// `ζ(3, N) > 1/N³ + 1/(2(N² + N + 1/2))`
    pub zeta3_lower: bool,
}

impl ZetaInequalities {
    pub fn all(&self) -> bool {
        self.zeta2_lower && self.zeta2_upper && self.zeta3_upper && self.zeta3_lower
    }
}

/// Checks the four inequalities with rigorous enclosures at `precision` digits.
pub fn zeta_inequality_check(n: Parameter, precision: u32) -> Result<ZetaInequalities> {
    let bits = certificate_bits(n, precision);
    let big_n = BigInt::from(n.get());
    let zeta2 = hurwitz_zeta_bits(2, n.get(), precision, bits)?.value;
    let zeta3 = hurwitz_zeta_bits(3, n.get(), precision, bits)?.value;

    let four_n2_plus_1 = BigInt::from(4) * &big_n * &big_n + 1u32;
    let zeta2_floor = Enclosure::sqrt_integer(&four_n2_plus_1, bits)
        .add_integer(-1)
        .recip()
        .mul_integer(2);
    let zeta2_ceiling = ratio(1, &big_n * &big_n) + ratio(2, BigInt::from(2) * &big_n + 1u32);
    let n2_plus_1 = &big_n * &big_n + 1u32;
    let zeta3_ceiling = Enclosure::sqrt_integer(&n2_plus_1, bits)
        .add_integer(-1)
        .mul_integer(BigInt::from(2) * &big_n)
        .recip();
    // 1/(2(N² + N + 1/2)) = 1/(2N² + 2N + 1)
    let zeta3_floor = ratio(1, &big_n * &big_n * &big_n)
        + ratio(1, BigInt::from(2) * &big_n * &big_n + BigInt::from(2) * &big_n + 1u32);

    Ok(ZetaInequalities {
        n: n.get(),
        zeta2_lower: zeta2_floor.certainly_le(&zeta2),
        zeta2_upper: zeta2.certainly_lt_rational(&zeta2_ceiling),
        zeta3_upper: zeta3.certainly_lt(&zeta3_ceiling),
        zeta3_lower: zeta3.certainly_gt_rational(&zeta3_floor),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub lower: f64,
    pub upper: f64,
}

impl TableRow {
    /// Shortest decimal strings that round-trip to the stored doubles.
    pub fn rendered(&self) -> (String, String) {
        (format!("{}", self.lower), format!("{}", self.upper))
    }
}

/// Bounds for the tabulated values of `N`.
pub fn reproduce_table() -> Vec<TableRow> {
    PUBLISHED_TABLE
        .iter()
        .map(|&(n, _, _)| {
            let (lower, upper) = qn_bounds(Parameter::new(n).expect("tabulated N >= 2"));
            TableRow { n, lower, upper }
        })
        .collect()
}

/// One disagreement between a computed row and the printed table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMismatch {
    pub n: u64,
    pub column: &'static str,
    pub expected: &'static str,
    pub got: String,
}

pub fn check_against_published(rows: &[TableRow]) -> Vec<TableMismatch> {
    let mut out = Vec::new();
    for &(n, lower, upper) in &PUBLISHED_TABLE {
        let Some(row) = rows.iter().find(|r| r.n == n) else {
            out.push(TableMismatch {
                n,
                column: "row",
                expected: "present",
                got: "missing".into(),
            });
            continue;
        };
        let (lo, hi) = row.rendered();
        if lo != lower {
            out.push(TableMismatch {
                n,
                column: "lower",
                expected: lower,
                got: lo,
            });
        }
        if hi != upper {
            out.push(TableMismatch {
                n,
                column: "upper",
                expected: upper,
                got: hi,
            });
        }
    }
    out
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("N,lower,upper\n");
    for r in rows {
        let (lo, hi) = r.rendered();
        let _ = writeln!(out, "{},{lo},{hi}", r.n);
    }
    out
}

/// Aligned text table with columns `N | Lower bound of q_N | Upper bound of q_N`.
pub fn table_text(rows: &[TableRow]) -> String {
    let rendered: Vec<(String, String, String)> = rows
        .iter()
        .map(|r| {
            let (lo, hi) = r.rendered();
            (r.n.to_string(), lo, hi)
        })
        .collect();
    let headers = ("N", "Lower bound of q_N", "Upper bound of q_N");
    let w0 = rendered.iter().map(|r| r.0.len()).chain([headers.0.len()]).max().unwrap_or(0);
    let w1 = rendered.iter().map(|r| r.1.len()).chain([headers.1.len()]).max().unwrap_or(0);
    let w2 = rendered.iter().map(|r| r.2.len()).chain([headers.2.len()]).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{:<w0$} | {:<w1$} | {}", headers.0, headers.1, headers.2);
    let _ = writeln!(out, "{}-+-{}-+-{}", "-".repeat(w0), "-".repeat(w1), "-".repeat(w2));
    for (n, lo, hi) in &rendered {
        let _ = writeln!(out, "{n:<w0$} | {lo:<w1$} | {hi}");
    }
    out
}
