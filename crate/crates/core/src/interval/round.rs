//! Directed rounding of the four basic operations.
//!
//! Every function returns a machine number that bounds the exact real
//! result from below (`*_down`) or above (`*_up`). The exact rounding error
//! is recovered with error-free transformations (TwoSum and an FMA based
//! TwoProduct / remainder), so the results coincide with what a processor
//! running in directed rounding mode would produce. Outside the range where
//! the transformations are exact we fall back to a one-ulp widening.

/// Below this magnitude the FMA residual of a product may be inexact.
const EXACT_PRODUCT_MIN: f64 = f64::from_bits(54u64 << 52); // 2^-969

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s.is_nan() {
            f64::NEG_INFINITY
        } else if s > 0.0 && a.is_finite() && b.is_finite() {
            f64::MAX
        } else {
            s
        };
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s.is_nan() {
            f64::INFINITY
        } else if s < 0.0 && a.is_finite() && b.is_finite() {
            f64::MIN
        } else {
            s
        };
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_finite() && p.abs() >= EXACT_PRODUCT_MIN {
        if a.mul_add(b, -p) < 0.0 {
            p.next_down()
        } else {
            p
        }
    } else {
        mul_fallback(a, b, p, false)
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_finite() && p.abs() >= EXACT_PRODUCT_MIN {
        if a.mul_add(b, -p) > 0.0 {
            p.next_up()
        } else {
            p
        }
    } else {
        mul_fallback(a, b, p, true)
    }
}

#[cold]
fn mul_fallback(a: f64, b: f64, p: f64, up: bool) -> f64 {
    if a == 0.0 || b == 0.0 {
        // 0 * inf is taken as 0, the usual interval convention.
        return 0.0;
    }
    if p.is_infinite() {
        if a.is_finite() && b.is_finite() {
            return match (p > 0.0, up) {
                (true, true) => f64::INFINITY,
                (true, false) => f64::MAX,
                (false, true) => f64::MIN,
                (false, false) => f64::NEG_INFINITY,
            };
        }
        return p;
    }
    // Tiny product: the residual may not be representable.
    if up {
        p.next_up()
    } else {
        p.next_down()
    }
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q.is_finite() && q != 0.0 && q.abs() >= EXACT_PRODUCT_MIN && a.abs() >= EXACT_PRODUCT_MIN {
        let r = (-q).mul_add(b, a);
        // sign of (a/b - q) equals sign(r) * sign(b)
        let below = if b > 0.0 { r < 0.0 } else { r > 0.0 };
        if below {
            q.next_down()
        } else {
            q
        }
    } else {
        div_fallback(a, b, q, false)
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q.is_finite() && q != 0.0 && q.abs() >= EXACT_PRODUCT_MIN && a.abs() >= EXACT_PRODUCT_MIN {
        let r = (-q).mul_add(b, a);
        let above = if b > 0.0 { r > 0.0 } else { r < 0.0 };
        if above {
            q.next_up()
        } else {
            q
        }
    } else {
        div_fallback(a, b, q, true)
    }
}

#[cold]
fn div_fallback(a: f64, b: f64, q: f64, up: bool) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if b.is_infinite() {
        return if a.is_infinite() {
            if up {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else if up {
            // a / inf tends to a signed zero; stay on the safe side
            if (a > 0.0) == (b > 0.0) {
                0.0_f64.next_up()
            } else {
                0.0
            }
        } else if (a > 0.0) == (b > 0.0) {
            0.0
        } else {
            0.0_f64.next_down()
        };
    }
    if q.is_infinite() && a.is_finite() {
        return match (q > 0.0, up) {
            (true, true) => f64::INFINITY,
            (true, false) => f64::MAX,
            (false, true) => f64::MIN,
            (false, false) => f64::NEG_INFINITY,
        };
    }
    if q.is_nan() {
        return if up { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    if up {
        q.next_up()
    } else {
        q.next_down()
    }
}
