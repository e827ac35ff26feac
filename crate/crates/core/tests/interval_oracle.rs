//! Interval arithmetic checked against exact and high-precision oracles.

use dde_rigor::interval::{parse_decimal, split, Interval};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn encloses(i: Interval, v: &BigRational) -> bool {
    &q(i.lo()) <= v && v <= &q(i.hi())
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        -1.0..1.0f64,
        (-300i32..300, -1.0..1.0f64).prop_map(|(e, m)| m * 2f64.powi(e)),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (finite(), finite()).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)))
}

fn members(x: Interval, t: f64) -> [f64; 3] {
    let inner = x.lo() + (x.hi() - x.lo()) * t;
    [x.lo(), x.hi(), inner.clamp(x.lo(), x.hi())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arithmetic_encloses_exact_results(a in interval(), b in interval(), t in 0.0..1.0f64, u in 0.0..1.0f64) {
        let sum = a + b;
        let diff = a - b;
        let prod = a * b;
        let quot = b.try_div(a);
        let sq = a.sqr();
        let cube = a.powi(3);
        for x in members(a, t) {
            for y in members(b, u) {
                let (xq, yq) = (q(x), q(y));
                prop_assert!(encloses(sum, &(&xq + &yq)));
                prop_assert!(encloses(diff, &(&xq - &yq)));
                prop_assert!(encloses(prod, &(&xq * &yq)));
                if let Ok(d) = quot {
                    prop_assert!(encloses(d, &(&yq / &xq)));
                } else {
                    prop_assert!(a.contains_zero());
                }
                prop_assert!(encloses(sq, &(&xq * &xq)));
                prop_assert!(encloses(cube, &(&xq * &xq * &xq)));
            }
        }
    }

    #[test]
    fn monotone_under_inclusion(a in interval(), b in interval(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        // a sub-interval of a must map inside the image of a
        let x = members(a, s)[2];
        let y = members(a, t)[2];
        let sub = Interval::new(x.min(y), x.max(y));
        prop_assert!((sub + b).subset(a + b));
        prop_assert!((sub * b).subset(a * b));
        prop_assert!((sub - b).subset(a - b));
    }

    #[test]
    fn hull_and_intersection(a in interval(), b in interval()) {
        let h = a.hull(b);
        prop_assert!(a.subset(h) && b.subset(h));
        match a.intersect(b) {
            Ok(i) => prop_assert!(i.subset(a) && i.subset(b)),
            Err(_) => prop_assert!(a.hi() < b.lo() || b.hi() < a.lo()),
        }
    }
}

/// A random literal `[-]digits[.digits]` and its exact value.
fn random_decimal(rng: &mut ChaCha8Rng) -> (String, BigRational) {
    let int_len = rng.gen_range(0..8);
    let frac_len = rng.gen_range(if int_len == 0 { 1 } else { 0 }..30);
    let mut s = String::new();
    let neg = rng.gen_bool(0.5);
    if neg {
        s.push('-');
    }
    let mut digits = String::new();
    for _ in 0..int_len {
        digits.push(char::from(b'0' + rng.gen_range(0..10)));
    }
    s.push_str(&digits);
    let mut frac = String::new();
    for _ in 0..frac_len {
        frac.push(char::from(b'0' + rng.gen_range(0..10)));
    }
    if frac_len > 0 {
        s.push('.');
        s.push_str(&frac);
    }
    let all = format!("{digits}{frac}");
    let num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().unwrap() };
    let den = num_traits::pow(BigInt::from(10), frac_len);
    let mut v = BigRational::new(num, den);
    if neg {
        v = -v;
    }
    (s, v)
}

#[test]
fn parse_decimal_contains_exact_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let (s, v) = random_decimal(&mut rng);
        let i = parse_decimal(&s).unwrap();
        assert!(encloses(i, &v), "{s} -> {i:?}");
    }
    let tenth = parse_decimal("0.1").unwrap();
    assert!(encloses(tenth, &BigRational::new(1.into(), 10.into())));
    assert!(tenth.hi() == tenth.lo().next_up());
}

// sin and cos by Taylor series in fixed point with 2^-SCALE resolution;
// π by Machin's formula. Truncation errors are amplified by at most e^|x|
// per term, far below the 2^40 units allowed for them.

const SCALE: u64 = 1200;

fn one() -> BigInt {
    BigInt::one() << SCALE
}

/// x * 2^SCALE, exact for every double above 2^-1100 in magnitude.
fn fx(x: f64) -> BigInt {
    let r = q(x) * BigRational::from_integer(one());
    r.floor().to_integer()
}

fn atan_inv(k: i64, terms: usize) -> (BigInt, BigInt) {
    let kb = BigInt::from(k);
    let mut pow = one() / &kb;
    let mut s = BigInt::zero();
    for j in 0..terms {
        let term = &pow / BigInt::from(2 * j + 1);
        if j % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
        pow = &pow / (&kb * &kb);
    }
    (s, pow + BigInt::from(3 * terms))
}

fn pi_fixed() -> (BigInt, BigInt) {
    let (a, ea) = atan_inv(5, 900);
    let (b, eb) = atan_inv(239, 300);
    (16 * a - 4 * b, 16 * ea + 4 * eb)
}

/// Series value and error bound for sin (odd) or cos (even) at x, |x| < 8.
fn trig_series(x: f64, odd: bool) -> (BigInt, BigInt) {
    let xf = fx(x);
    let x2 = (&xf * &xf) >> SCALE;
    let mut term = if odd { xf.clone() } else { one() };
    let mut k: i64 = if odd { 1 } else { 0 };
    let mut s = BigInt::zero();
    let terms = 80;
    for j in 0..terms {
        if j % 2 == 0 {
            s += &term;
        } else {
            s -= &term;
        }
        term = ((&term * &x2) >> SCALE) / BigInt::from((k + 1) * (k + 2));
        k += 2;
    }
    (s, term.abs() + (BigInt::one() << 40))
}

#[test]
fn sin_cos_against_high_precision_series() {
    let (pi, pi_err) = pi_fixed();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tol = fx(1e-15);
    let unit = one();
    for case in 0..1000 {
        let a: f64 = rng.gen_range(-7.0..7.0);
        let w: f64 = if case % 3 == 0 { 0.0 } else { rng.gen_range(0.0..3.0) };
        let b = (a + w).min(7.5);
        let x = Interval::new(a, b);
        let (fa, fb) = (fx(a), fx(b));
        for odd in [true, false] {
            let got = if odd { x.sin() } else { x.cos() };
            let (glo, ghi) = (fx(got.lo()), fx(got.hi()));
            let (va, ea) = trig_series(a, odd);
            let (vb, eb) = trig_series(b, odd);
            assert!(glo <= &va - &ea && &va + &ea <= ghi, "endpoint a {x:?} odd={odd}");
            assert!(glo <= &vb - &eb && &vb + &eb <= ghi, "endpoint b {x:?} odd={odd}");
            let mut true_lo = (&va - &ea).min(&vb - &eb);
            let mut true_hi = (&va + &ea).max(&vb + &eb);
            // sin peaks at (1/2 + 2k)π and bottoms at (3/2 + 2k)π; cos at 2kπ and (1 + 2k)π.
            for k in -3i64..=3 {
                for (offset, top) in [(0i64, true), (1, false)] {
                    let twice = if odd { 1 } else { 0 } + 2 * offset + 4 * k;
                    let c = &pi * BigInt::from(twice) / 2;
                    let c_err = &pi_err * BigInt::from(twice.abs()) + 1;
                    if &c - &c_err > fa && &c + &c_err < fb {
                        if top {
                            assert_eq!(got.hi(), 1.0, "missed maximum in {x:?} odd={odd}");
                            true_hi = unit.clone();
                        } else {
                            assert_eq!(got.lo(), -1.0, "missed minimum in {x:?} odd={odd}");
                            true_lo = -unit.clone();
                        }
                    }
                }
            }
            assert!(glo >= &true_lo - &tol && ghi <= &true_hi + &tol, "too wide {x:?} odd={odd} {got:?}");
        }
    }
}

#[test]
fn split_recombination_contains_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let x: Vec<Interval> = (0..10)
            .map(|_| {
                let a: f64 = rng.gen_range(-5.0..5.0);
                Interval::new(a, a + rng.gen_range(0.0..1.0))
            })
            .collect();
        let (m, r) = split(&x);
        for ((xi, mi), ri) in x.iter().zip(&m).zip(&r) {
            assert!(ri.contains_zero());
            assert!(xi.subset(Interval::point(*mi) + *ri));
        }
    }
}
