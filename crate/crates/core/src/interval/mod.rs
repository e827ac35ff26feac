//! Closed intervals with outward-rounded arithmetic.

mod decimal;
mod elementary;
pub(crate) mod matrix;
pub(crate) mod round;

pub use decimal::{format_hex, parse_decimal, parse_hex, to_decimal_down, to_decimal_up};
pub use matrix::{dot_enclosure, matmul, matvec, split, IMatrix, IVector, Matrix};

use round::{add_down, add_up, div_down, div_up, mul_down, mul_up, sub_down, sub_up};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntervalError {
    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,
    #[error("empty intersection of [{0}, {1}] and [{2}, {3}]")]
    EmptyIntersection(f64, f64, f64, f64),
    #[error("invalid interval endpoints [{0}, {1}]")]
    InvalidEndpoints(f64, f64),
    #[error("cannot parse {0:?}: {1}")]
    ParseError(String, &'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A closed interval `[lo, hi]` with `lo <= hi` and no NaN endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    /// Panics on `lo > hi` or NaN; use [`Interval::try_new`] for untrusted input.
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Interval {
        match Interval::try_new(lo, hi) {
            Ok(x) => x,
            Err(e) => panic!("{e}"),
        }
    }

    #[inline]
    pub fn try_new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if lo <= hi && lo != f64::INFINITY && hi != f64::NEG_INFINITY {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::InvalidEndpoints(lo, hi))
        }
    }

    #[inline]
    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    /// `[-r, r]` for `r >= 0`.
    #[inline]
    pub fn symmetric(r: f64) -> Interval {
        Interval::new(-r, r)
    }

    /// Enclosure of the integer `k`, exact when `|k| <= 2^53`.
    pub fn from_int(k: i64) -> Interval {
        let x = k as f64;
        if x.abs() <= 9007199254740992.0 {
            Interval::point(x)
        } else {
            Interval::new(x.next_down(), x.next_up())
        }
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    /// A representable point of the interval, close to the centre.
    #[inline]
    pub fn mid(self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        if self.lo == f64::NEG_INFINITY {
            return if self.hi == f64::INFINITY { 0.0 } else { f64::MIN };
        }
        if self.hi == f64::INFINITY {
            return f64::MAX;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on `hi - lo`.
    #[inline]
    pub fn diam(self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Upper bound on the radius about [`Interval::mid`].
    #[inline]
    pub fn rad(self) -> f64 {
        let m = self.mid();
        sub_up(m, self.lo).max(sub_up(self.hi, m))
    }

    /// `max |x|` over the interval.
    #[inline]
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// `min |x|` over the interval.
    #[inline]
    pub fn mig(self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    #[inline]
    pub fn abs(self) -> Interval {
        Interval { lo: self.mig(), hi: self.mag() }
    }

    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    /// `self ⊆ other`.
    #[inline]
    pub fn subset(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self ⊂ int(other)`, strict on both ends.
    #[inline]
    pub fn subset_interior(self, other: Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    #[inline]
    pub fn is_strictly_positive(self) -> bool {
        self.lo > 0.0
    }

    #[inline]
    pub fn is_strictly_negative(self) -> bool {
        self.hi < 0.0
    }

    #[inline]
    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(self, other: Interval) -> Result<Interval, IntervalError> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::EmptyIntersection(self.lo, self.hi, other.lo, other.hi))
        }
    }

    /// Widens each endpoint outward by `r >= 0`.
    #[inline]
    pub fn inflate(self, r: f64) -> Interval {
        Interval { lo: sub_down(self.lo, r), hi: add_up(self.hi, r) }
    }

    /// Scales the radius about the midpoint by `factor >= 1` and adds `abs`.
    pub fn widen(self, factor: f64, abs: f64) -> Interval {
        let m = self.mid();
        let r = add_up(mul_up(self.rad(), factor), abs);
        Interval { lo: sub_down(m, r).min(self.lo), hi: add_up(m, r).max(self.hi) }
    }

    pub fn try_div(self, b: Interval) -> Result<Interval, IntervalError> {
        let a = self;
        if b.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval);
        }
        let (lo, hi) = if b.lo > 0.0 {
            if a.lo >= 0.0 {
                (div_down(a.lo, b.hi), div_up(a.hi, b.lo))
            } else if a.hi <= 0.0 {
                (div_down(a.lo, b.lo), div_up(a.hi, b.hi))
            } else {
                (div_down(a.lo, b.lo), div_up(a.hi, b.lo))
            }
        } else if a.lo >= 0.0 {
            (div_down(a.hi, b.hi), div_up(a.lo, b.lo))
        } else if a.hi <= 0.0 {
            (div_down(a.hi, b.lo), div_up(a.lo, b.hi))
        } else {
            (div_down(a.hi, b.hi), div_up(a.lo, b.hi))
        };
        Ok(Interval { lo, hi })
    }

    /// Division by a nonzero machine number.
    pub fn div_f64(self, b: f64) -> Result<Interval, IntervalError> {
        self.try_div(Interval::point(b))
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Interval {
        self * Interval::point(b)
    }

    /// `x^2`, tighter than `x * x` when `0 ∈ x`.
    pub fn sqr(self) -> Interval {
        let lo = self.mig();
        let hi = self.mag();
        Interval { lo: mul_down(lo, lo), hi: mul_up(hi, hi) }
    }

    pub fn powi(self, e: u32) -> Interval {
        if e == 0 {
            return Interval::ONE;
        }
        if e % 2 == 0 {
            let a = self.abs();
            Interval { lo: pow_down_nonneg(a.lo, e), hi: pow_up_nonneg(a.hi, e) }
        } else {
            let lo = if self.lo >= 0.0 {
                pow_down_nonneg(self.lo, e)
            } else {
                -pow_up_nonneg(-self.lo, e)
            };
            let hi = if self.hi >= 0.0 {
                pow_up_nonneg(self.hi, e)
            } else {
                -pow_down_nonneg(-self.hi, e)
            };
            Interval { lo, hi }
        }
    }

    /// `[lo,hi] + [0,0]`; normalises a negative zero endpoint produced by copying.
    #[inline]
    pub fn plus_zero(self) -> Interval {
        self + Interval::ZERO
    }
}

fn pow_down_nonneg(x: f64, e: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e {
        acc = mul_down(acc, x);
    }
    acc
}

fn pow_up_nonneg(x: f64, e: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e {
        acc = mul_up(acc, x);
    }
    acc
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, b: Interval) -> Interval {
        Interval { lo: add_down(self.lo, b.lo), hi: add_up(self.hi, b.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, b: Interval) -> Interval {
        Interval { lo: sub_down(self.lo, b.hi), hi: sub_up(self.hi, b.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, b: Interval) -> Interval {
        let a = self;
        let (lo, hi) = if a.lo >= 0.0 {
            if b.lo >= 0.0 {
                (mul_down(a.lo, b.lo), mul_up(a.hi, b.hi))
            } else if b.hi <= 0.0 {
                (mul_down(a.hi, b.lo), mul_up(a.lo, b.hi))
            } else {
                (mul_down(a.hi, b.lo), mul_up(a.hi, b.hi))
            }
        } else if a.hi <= 0.0 {
            if b.lo >= 0.0 {
                (mul_down(a.lo, b.hi), mul_up(a.hi, b.lo))
            } else if b.hi <= 0.0 {
                (mul_down(a.hi, b.hi), mul_up(a.lo, b.lo))
            } else {
                (mul_down(a.lo, b.hi), mul_up(a.lo, b.lo))
            }
        } else if b.lo >= 0.0 {
            (mul_down(a.lo, b.hi), mul_up(a.hi, b.hi))
        } else if b.hi <= 0.0 {
            (mul_down(a.hi, b.lo), mul_up(a.lo, b.lo))
        } else {
            (
                mul_down(a.lo, b.hi).min(mul_down(a.hi, b.lo)),
                mul_up(a.lo, b.lo).max(mul_up(a.hi, b.hi)),
            )
        };
        Interval { lo, hi }
    }
}

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, b: Interval) {
        *self = *self + b;
    }
}

impl SubAssign for Interval {
    #[inline]
    fn sub_assign(&mut self, b: Interval) {
        *self = *self - b;
    }
}

impl MulAssign for Interval {
    #[inline]
    fn mul_assign(&mut self, b: Interval) {
        *self = *self * b;
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Interval {
    /// Outward decimal rendering with 10 significant digits, or the
    /// precision requested by the formatter.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(10);
        write!(f, "[{}, {}]", to_decimal_down(self.lo, digits), to_decimal_up(self.hi, digits))
    }
}

/// Enclosure of π.
pub const PI: Interval = Interval { lo: std::f64::consts::PI, hi: f64::from_bits(0x400921fb54442d19) };
