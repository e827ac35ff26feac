//! Decimal literals in, outward decimal and bit-exact hexadecimal out.

use super::{Interval, IntervalError};

// 10^22 is the largest power of ten that is an exact double.
const EXACT_POW10_MAX: usize = 22;
const EXACT_INT_MAX: u64 = 1 << 53;

fn parse_err(s: &str, why: &'static str) -> IntervalError {
    IntervalError::ParseError(s.to_string(), why)
}

/// Encloses the value of a literal `[-]digits[.digits]`.
///
/// The literal is read as the integer quotient `numerator / 10^fraction_digits`
/// and divided with directed rounding, so the result is the tightest enclosure
/// whenever the numerator and the power of ten are exact doubles.
pub fn parse_decimal(s: &str) -> Result<Interval, IntervalError> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(parse_err(s, "no digits"));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(parse_err(s, "expected [-]digits[.digits]"));
    }
    let digits: String = int_part.chars().chain(frac_part.chars()).collect();
    let digits = digits.trim_start_matches('0');
    let scale = frac_part.len();

    let num = if digits.is_empty() {
        Interval::ZERO
    } else {
        match digits.parse::<u64>() {
            Ok(v) if v <= EXACT_INT_MAX => Interval::point(v as f64),
            _ => {
                let ten = Interval::point(10.0);
                digits.bytes().fold(Interval::ZERO, |acc, b| acc * ten + Interval::point((b - b'0') as f64))
            }
        }
    };
    let den = if scale <= EXACT_POW10_MAX {
        Interval::point(10f64.powi(scale as i32))
    } else {
        let mut d = Interval::point(10f64.powi(EXACT_POW10_MAX as i32));
        for _ in EXACT_POW10_MAX..scale {
            d = d * Interval::point(10.0);
        }
        d
    };
    let q = num.try_div(den).map_err(|_| parse_err(s, "fraction too long"))?;
    Ok(if neg { -q } else { q })
}

/// A decimal digit string with value `sign * mantissa * 10^exp`.
struct Dec {
    neg: bool,
    mantissa: u128,
    exp: i32,
}

impl Dec {
    fn from_sci(x: f64, digits: usize) -> Dec {
        let s = format!("{:.*e}", digits.saturating_sub(1), x.abs());
        let (m, e) = s.split_once('e').expect("scientific format");
        let e: i32 = e.parse().expect("exponent");
        let frac_len = m.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
        let mantissa: u128 = m.replace('.', "").parse().expect("mantissa");
        Dec { neg: x < 0.0, mantissa, exp: e - frac_len }
    }

    /// Moves the value by one unit in the last digit, downward or upward.
    fn step(&mut self, up: bool) {
        let grow = up != self.neg;
        if grow {
            self.mantissa += 1;
        } else if self.mantissa == 0 {
            self.neg = !self.neg;
            self.mantissa = 1;
        } else {
            self.mantissa -= 1;
        }
    }

    fn render(&self) -> String {
        let digits = self.mantissa.to_string();
        let sign = if self.neg && self.mantissa != 0 { "-" } else { "" };
        if self.exp >= 0 {
            format!("{sign}{digits}{}", "0".repeat(self.exp as usize))
        } else {
            let frac = (-self.exp) as usize;
            let padded = if digits.len() <= frac {
                format!("{}{}", "0".repeat(frac + 1 - digits.len()), digits)
            } else {
                digits
            };
            let (a, b) = padded.split_at(padded.len() - frac);
            let b = b.trim_end_matches('0');
            if b.is_empty() {
                format!("{sign}{a}")
            } else {
                format!("{sign}{a}.{b}")
            }
        }
    }
}

fn to_decimal(x: f64, digits: usize, up: bool) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mut d = Dec::from_sci(x, digits.max(1));
    // Step until the decimal lies strictly on the requested side of x.
    for _ in 0..4 {
        let enc = parse_decimal(&d.render()).expect("rendered decimal parses");
        let ok = if up { enc.lo() >= x } else { enc.hi() <= x };
        if ok {
            return d.render();
        }
        d.step(up);
    }
    unreachable!("outward decimal rounding did not converge for {x}")
}

/// Decimal string whose value is ≤ x.
pub fn to_decimal_down(x: f64, digits: usize) -> String {
    to_decimal(x, digits, false)
}

/// Decimal string whose value is ≥ x.
pub fn to_decimal_up(x: f64, digits: usize) -> String {
    to_decimal(x, digits, true)
}

/// C99 `%a` style rendering, exact for every finite double.
pub fn format_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 { (0, -1022) } else { (1, exp_bits - 1023) };
    let mut hex = format!("{frac:013x}");
    while hex.ends_with('0') {
        hex.pop();
    }
    if hex.is_empty() {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{hex}p{exp:+}")
    }
}

/// Parses the output of [`format_hex`]; rejects literals that would round.
pub fn parse_hex(s: &str) -> Result<f64, IntervalError> {
    let t = s.trim();
    match t {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let body = body
        .strip_prefix("0x")
        .or_else(|| body.strip_prefix("0X"))
        .ok_or_else(|| parse_err(s, "missing 0x prefix"))?;
    let (mant, exp) = body.split_once(['p', 'P']).ok_or_else(|| parse_err(s, "missing exponent"))?;
    let exp: i32 = exp.parse().map_err(|_| parse_err(s, "bad exponent"))?;
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let hex_digits: String = ip.chars().chain(fp.chars()).collect();
    if hex_digits.is_empty() || hex_digits.len() > 16 {
        return Err(parse_err(s, "bad mantissa length"));
    }
    let m = u64::from_str_radix(&hex_digits, 16).map_err(|_| parse_err(s, "bad hex digit"))?;
    if m != 0 && 64 - m.leading_zeros() - m.trailing_zeros() > 53 {
        return Err(parse_err(s, "mantissa exceeds 53 bits"));
    }
    let mut v = m as f64;
    let mut e = exp - 4 * fp.len() as i32;
    // Scale in steps that keep every intermediate exact.
    while e > 0 {
        let k = e.min(1000);
        v *= 2f64.powi(k);
        e -= k;
    }
    while e < 0 {
        let k = (-e).min(1000);
        let before = v;
        v *= 2f64.powi(-k);
        if v != 0.0 && v * 2f64.powi(k) != before {
            return Err(parse_err(s, "value not representable"));
        }
        e += k;
    }
    if m != 0 && (v == 0.0 || v.is_infinite()) {
        return Err(parse_err(s, "value out of range"));
    }
    Ok(if neg { -v } else { v })
}
