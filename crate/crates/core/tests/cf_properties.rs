use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use renyi_cf::{
    convergents, digit, evaluate, expand, expand_exact, DigitSequence, FloatDigit, Parameter,
};

fn param(n: u64) -> Parameter {
    Parameter::new(n).unwrap()
}

fn digit_sequence() -> impl Strategy<Value = DigitSequence> {
    prop::sample::select(vec![2u64, 3, 5, 10]).prop_flat_map(|n| {
        prop::collection::vec(n..=n + 20, 1..=30)
            .prop_map(move |d| DigitSequence::new(param(n), d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn determinant_is_a_power_of_n(d in digit_sequence()) {
        let n = d.parameter().as_bigint();
        let c = convergents(&d);
        for k in 1..c.len() {
            let det = &c[k - 1].p * &c[k].q - &c[k].p * &c[k - 1].q;
            prop_assert_eq!(det, num_traits::pow(n.clone(), k));
        }
    }

    #[test]
    fn convergents_are_prefix_values(d in digit_sequence()) {
        let c = convergents(&d);
        for (k, conv) in c.iter().enumerate().skip(1) {
            prop_assert_eq!(evaluate(&d.prefix(k)).unwrap(), conv.value());
        }
    }

    #[test]
    fn expansion_of_a_finite_value_reproduces_its_digits(d in digit_sequence()) {
        // 1 - N/(1 + a_k) maps to 0 with digit a_k + 1, then 0 is fixed.
        let x = evaluate(&d).unwrap();
        let e = expand_exact(d.parameter(), &x, d.len()).unwrap();
        let mut expected = d.digits().to_vec();
        *expected.last_mut().unwrap() += 1;
        prop_assert_eq!(e.digits.digits(), &expected[..]);
        prop_assert!(e.remainder.is_zero());
    }

    #[test]
    fn rational_orbits_terminate_and_convergents_close_in(
        n in prop::sample::select(vec![2u64, 3, 5, 10]),
        den in 2u64..=10_000,
        num_frac in 0.0f64..1.0,
    ) {
        let num = ((num_frac * den as f64) as u64).min(den - 1);
        let x = BigRational::new(BigInt::from(num), BigInt::from(den));
        let p = param(n);
        // Denominators strictly decrease along a rational orbit.
        let mut digits = Vec::new();
        let mut current = x.clone();
        while !current.is_zero() {
            let e = expand_exact(p, &current, 1).unwrap();
            digits.push(e.digits.digits()[0]);
            current = e.remainder;
            prop_assert!(digits.len() as u64 <= den);
        }
        // Then 0 repeats the digit N; pad with it.
        digits.extend(std::iter::repeat_n(n, 200));
        let d = DigitSequence::new(p, digits).unwrap();
        let c = convergents(&d);
        let mut previous: Option<BigRational> = None;
        let mut reached = false;
        for conv in &c[1..] {
            let err = (conv.value() - &x).abs();
            if err.is_zero() {
                reached = true;
                break;
            }
            if let Some(prev) = &previous {
                prop_assert!(&err < prev);
            }
            if err.to_f64().unwrap() < 1e-12 {
                reached = true;
            }
            previous = Some(err);
        }
        prop_assert!(reached);
    }
}

#[test]
fn digits_are_floors_and_at_least_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..100_000 {
        let n = rng.gen_range(2..=1000u64);
        let x: f64 = rng.gen();
        let FloatDigit::Finite(a) = digit(param(n), x).unwrap() else {
            panic!("x = {x} should have a finite digit");
        };
        assert!(a >= n, "digit {a} below N = {n} at x = {x}");
        // Exact check of a <= N/(1-x) < a + 1, allowing the double quotient to
        // round onto an integer from below.
        let xr = BigRational::from_float(x).unwrap();
        let y = BigRational::from_integer(BigInt::from(n)) / (BigRational::from_integer(1.into()) - xr);
        let a_exact = y.floor().to_integer().to_u64().unwrap();
        if a != a_exact {
            let gap = (y - BigRational::from_integer(BigInt::from(a))).abs().to_f64().unwrap();
            assert!(a == a_exact + 1 && gap < 4.0 * f64::EPSILON * a as f64, "x = {x}, N = {n}");
        }
        let e = expand(param(n), x, 5).unwrap();
        assert!(e.orbit.digits.iter().all(|&d| d >= n));
    }
}

#[test]
fn float_and_exact_digits_agree_on_dyadic_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let scale = (1u64 << 20) as f64;
    let one = BigRational::from_integer(1.into());
    let mut compared = 0usize;
    for _ in 0..2000 {
        let n = [2u64, 3, 5, 10][rng.gen_range(0..4)];
        let big_n = BigRational::from_integer(BigInt::from(n));
        let j: u64 = rng.gen_range(0..1 << 20);
        let xr = BigRational::new(BigInt::from(j), BigInt::from(1u64 << 20));
        let float = expand(param(n), j as f64 / scale, 40).unwrap();
        let points = &float.orbit.points;
        // The exact orbit of a dyadic point reaches 0. Compare up to there,
        // stopping at the first float iterate within 1e-9 of 1. Rounding
        // errors grow by at least N per step, so a position is compared only
        // while the float orbit is within 1e-9 of the exact one and the exact
        // quotient N/(1-x) is not within reach of an integer.
        let mut current = xr;
        for (k, &a) in float.orbit.digits.iter().enumerate() {
            if current.is_zero() || points[k] > 1.0 - 1e-9 {
                break;
            }
            let drift = (BigRational::from_float(points[k]).unwrap() - &current).abs().to_f64().unwrap();
            let y = &big_n / (&one - &current);
            let a_exact = y.floor();
            let frac = (&y - &a_exact).to_f64().unwrap();
            let reach = 2.0 * n as f64 * drift / (1.0 - points[k]).powi(2) + 1e-15 * y.to_f64().unwrap();
            if drift > 1e-9 {
                break;
            }
            if frac > reach && 1.0 - frac > reach {
                assert_eq!(a, a_exact.to_integer().to_u64().unwrap(), "N = {n}, x = {j}/2^20, position {}", k + 1);
                compared += 1;
            }
            current = y - a_exact;
        }
    }
    assert!(compared > 5000, "{compared}");
}
