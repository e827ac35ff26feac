//! Rigorous sine and cosine.
//!
//! Points are reduced modulo π/2 with a three-part Cody-Waite split of π/2
//! plus an enclosure of the tail, then evaluated by an interval Taylor series
//! on |r| ≤ π/4 + tiny with a Lagrange remainder. Wide arguments use endpoint
//! values plus any interior critical points.

use super::round::{div_up, mul_up};
use super::{Interval, PI};

const PIO2_1: f64 = f64::from_bits(0x3FF921FB54400000);
const PIO2_2: f64 = f64::from_bits(0x3DD0B4611A600000);
const PIO2_3: f64 = f64::from_bits(0x3BA3198A2E000000);
// The exact remainder π/2 - PIO2_1 - PIO2_2 - PIO2_3 lies in [TAIL_LO, TAIL_HI].
const TAIL_LO: f64 = f64::from_bits(0x397b839a252049c1);
const TAIL_HI: f64 = f64::from_bits(0x397b839a252049c2);

// k * PIO2_1 stays exact while |k| < 2^20.
const MAX_REDUCTION: f64 = 1.0e6;
const SERIES_TERMS: u32 = 12;

enum Kind {
    Sin,
    Cos,
}

/// Returns (quadrant, reduced argument) with x - quadrant*π/2 ∈ r.
fn reduce(x: f64) -> (i64, Interval) {
    let k = (x * std::f64::consts::FRAC_2_PI).round();
    let kf = Interval::point(k);
    let tail = Interval::new(TAIL_LO, TAIL_HI);
    let r = Interval::point(x) - kf * Interval::point(PIO2_1) - kf * Interval::point(PIO2_2)
        - kf * Interval::point(PIO2_3)
        - kf * tail;
    (k as i64, r)
}

/// Enclosure of sin(r) for |r| ≤ 0.8.
fn sin_series(r: Interval) -> Interval {
    let r2 = r.sqr();
    // r(1 - r²/(2·3)(1 - r²/(4·5)(1 - ...)))
    let mut acc = Interval::ONE;
    for j in (1..=SERIES_TERMS).rev() {
        let d = (2 * j * (2 * j + 1)) as f64;
        acc = Interval::ONE - (r2 * acc).div_f64(d).expect("nonzero divisor");
    }
    let s = r * acc;
    let rem = lagrange_bound(r.mag(), 2 * SERIES_TERMS + 3);
    s + Interval::symmetric(rem)
}

/// Enclosure of cos(r) for |r| ≤ 0.8.
fn cos_series(r: Interval) -> Interval {
    let r2 = r.sqr();
    let mut acc = Interval::ONE;
    for j in (1..=SERIES_TERMS).rev() {
        let d = ((2 * j - 1) * (2 * j)) as f64;
        acc = Interval::ONE - (r2 * acc).div_f64(d).expect("nonzero divisor");
    }
    let rem = lagrange_bound(r.mag(), 2 * SERIES_TERMS + 2);
    acc + Interval::symmetric(rem)
}

/// Upper bound on a^e / e!.
fn lagrange_bound(a: f64, e: u32) -> f64 {
    let mut b = 1.0;
    for j in 1..=e {
        b = div_up(mul_up(b, a), j as f64);
    }
    b
}

fn eval_point(x: f64, kind: Kind) -> Interval {
    if x == 0.0 {
        return match kind {
            Kind::Sin => Interval::ZERO,
            Kind::Cos => Interval::ONE,
        };
    }
    if !x.is_finite() || x.abs() > MAX_REDUCTION {
        return Interval::new(-1.0, 1.0);
    }
    let (k, r) = reduce(x);
    let shift = match kind {
        Kind::Sin => 0,
        Kind::Cos => 1,
    };
    let v = match (k + shift).rem_euclid(4) {
        0 => sin_series(r),
        1 => cos_series(r),
        2 => -sin_series(r),
        _ => -cos_series(r),
    };
    clamp_unit(v)
}

fn clamp_unit(v: Interval) -> Interval {
    Interval::new(v.lo().max(-1.0), v.hi().min(1.0))
}

/// Does some point `phase + 2kπ` (k integer) possibly lie in `a`?
fn hits_phase(a: Interval, phase: Interval) -> bool {
    let two_pi = PI * Interval::point(2.0);
    let k0 = ((a.lo() - phase.mid()) / (2.0 * std::f64::consts::PI)).floor() as i64;
    (k0 - 1..=k0 + 2).any(|k| {
        let t = phase + Interval::from_int(k) * two_pi;
        t.hi() >= a.lo() && t.lo() <= a.hi()
    })
}

fn eval(a: Interval, kind: Kind) -> Interval {
    if a.is_point() {
        return eval_point(a.lo(), kind);
    }
    if !a.lo().is_finite() || !a.hi().is_finite() || a.diam() >= 6.28 || a.mag() > MAX_REDUCTION {
        return Interval::new(-1.0, 1.0);
    }
    let half_pi = PI.div_f64(2.0).expect("nonzero divisor");
    let (max_at, min_at) = match kind {
        Kind::Sin => (half_pi, -half_pi),
        Kind::Cos => (Interval::ZERO, PI),
    };
    let (lo_v, hi_v) = match kind {
        Kind::Sin => (eval_point(a.lo(), Kind::Sin), eval_point(a.hi(), Kind::Sin)),
        Kind::Cos => (eval_point(a.lo(), Kind::Cos), eval_point(a.hi(), Kind::Cos)),
    };
    let mut out = lo_v.hull(hi_v);
    if hits_phase(a, max_at) {
        out = out.hull(Interval::ONE);
    }
    if hits_phase(a, min_at) {
        out = out.hull(-Interval::ONE);
    }
    clamp_unit(out)
}

impl Interval {
    pub fn sin(self) -> Interval {
        eval(self, Kind::Sin)
    }

    pub fn cos(self) -> Interval {
        eval(self, Kind::Cos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_constants_bracket_the_split() {
        assert!(TAIL_LO < TAIL_HI);
        assert_eq!(TAIL_HI, TAIL_LO.next_up());
    }

    #[test]
    fn exact_points() {
        assert_eq!(Interval::ZERO.sin(), Interval::ZERO);
        assert_eq!(Interval::ZERO.cos(), Interval::ONE);
    }

    #[test]
    fn full_branch_gives_unit_range() {
        let c = Interval::new(0.0, std::f64::consts::PI).cos();
        assert_eq!(c.lo(), -1.0);
        assert_eq!(c.hi(), 1.0);
        let s = Interval::new(0.0, std::f64::consts::FRAC_PI_2).sin();
        assert_eq!(s.lo(), 0.0);
        assert_eq!(s.hi(), 1.0);
    }

    #[test]
    fn point_enclosures_are_narrow_and_contain_libm() {
        for &x in &[0.1, 1.0, -2.5, 3.0, 10.0, 100.0, 1e5, 7.0e-9, -0.7853981633974483] {
            let s = Interval::point(x).sin();
            let c = Interval::point(x).cos();
            assert!(s.diam() <= 8.0 * f64::EPSILON * s.mag().max(1e-300), "{x} {s:?}");
            assert!((s.mid() - x.sin()).abs() <= 2e-16 * x.sin().abs().max(1e-300) + 1e-300 || s.contains(x.sin()));
            assert!((c.mid() - x.cos()).abs() <= 4e-16);
        }
    }

    #[test]
    fn near_multiple_of_pi_keeps_relative_accuracy() {
        let s = Interval::point(std::f64::consts::PI).sin();
        // sin(fl(π)) = π - fl(π) ≈ 1.2246e-16
        assert!(s.lo() > 1.2246e-16 && s.hi() < 1.2247e-16);
    }
}
