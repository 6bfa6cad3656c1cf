//! Fixed-width decimal rendering: 40 significant digits, truncated toward zero.

use super::enclosure::{floor_div, Enclosure};
use super::{Elem, ExactReal};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

pub const RENDER_DIGITS: u32 = 40;

fn format_digits(negative: bool, digits: &BigInt, exponent: i64) -> String {
    let s = digits.to_string();
    debug_assert_eq!(s.len(), RENDER_DIGITS as usize);
    let sign = if negative { "-" } else { "" };
    format!("{sign}{}.{}e{exponent}", &s[..1], &s[1..])
}

/// `floor(|x| * 10^k)` for an exact value.
fn scaled_floor(x: &ExactReal, k: i64) -> BigInt {
    let ten = BigInt::from(10u32);
    let (num, den) = if k >= 0 {
        (ten.pow(k as u32), BigInt::from(1))
    } else {
        (BigInt::from(1), ten.pow((-k) as u32))
    };
    match x {
        ExactReal::Rational(q) => floor_div(&(q.numer().abs() * num), &(q.denom() * den)),
        ExactReal::Quadratic(q) => {
            let s = if q.signum() == Ordering::Less { -1 } else { 1 };
            let e = Elem {
                a: &q.a * s * &num,
                b: &q.b * s * &num,
                c: &q.c * &den,
            };
            e.floor(&q.d)
        }
        ExactReal::Interval(_) => unreachable!("interval values are rendered from enclosures"),
    }
}

/// Renders an exact value with 40 certified significant digits.
pub fn render_exact(x: &ExactReal) -> String {
    let negative = match x.signum() {
        Some(Ordering::Equal) => return "0".to_string(),
        Some(Ordering::Less) => true,
        _ => false,
    };
    if let ExactReal::Interval(i) = x {
        return render_enclosure(&i.enclose(64 + (i.scale() as f64 * 3.33) as u32));
    }
    let digits = RENDER_DIGITS as i64;
    let est = estimate_log10(x);
    let mut e = est;
    let lower = BigInt::from(10u32).pow(RENDER_DIGITS - 1);
    let upper = BigInt::from(10u32).pow(RENDER_DIGITS);
    loop {
        let m = scaled_floor(x, digits - 1 - e);
        if m >= upper {
            e += 1;
        } else if m < lower {
            e -= 1;
        } else {
            return format_digits(negative, &m, e);
        }
    }
}

fn estimate_log10(x: &ExactReal) -> i64 {
    // magnitude of the endpoint nearest zero, once it carries a few bits
    let mut bits = 64;
    loop {
        let e = x.enclose(bits);
        let near = if e.is_positive() {
            e.lo_scaled().clone()
        } else if e.is_negative() {
            e.hi_scaled().abs()
        } else {
            BigInt::zero()
        };
        if near >= BigInt::from(16) {
            return log10_floor(&BigRational::new(near, BigInt::from(1) << bits as usize));
        }
        bits *= 2;
    }
}

fn log10_floor(v: &BigRational) -> i64 {
    if v.is_zero() {
        return 0;
    }
    let n = v.numer().bits() as i64 - v.denom().bits() as i64;
    (n as f64 * std::f64::consts::LOG10_2).floor() as i64
}

/// Renders the lower end of an enclosure (the upper end for negative values)
/// truncated to 40 significant digits; digits beyond the enclosure width are
/// not certified.
pub fn render_enclosure(e: &Enclosure) -> String {
    let v = if e.hi().is_negative() { e.hi() } else { e.lo() };
    if v.is_zero() {
        return "0".to_string();
    }
    render_exact(&ExactReal::Rational(v))
}

/// Renders a value known only through refinable enclosures, refining until
/// the 40 truncated digits agree at both ends or `max_bits` is reached.
pub fn render_refined(f: impl Fn(u32) -> Option<Enclosure>, max_bits: u32) -> String {
    let mut bits = 160.min(max_bits);
    loop {
        if let Some(e) = f(bits) {
            let lo = render_exact(&ExactReal::Rational(e.lo()));
            let hi = render_exact(&ExactReal::Rational(e.hi()));
            if lo == hi || bits >= max_bits {
                return render_enclosure(&e);
            }
        } else if bits >= max_bits {
            return "undefined".to_string();
        }
        bits = (bits * 2).min(max_bits);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_forty_digits() {
        let q = ExactReal::rational(1, 4);
        assert_eq!(
            render_exact(&q),
            format!("2.{}e-1", "5".to_string() + &"0".repeat(38))
        );
        let third = ExactReal::rational(-1, 3);
        assert_eq!(render_exact(&third), format!("-3.{}e-1", "3".repeat(39)));
        assert_eq!(render_exact(&ExactReal::zero()), "0");
        let big = ExactReal::from(1000);
        assert_eq!(render_exact(&big), format!("1.{}e3", "0".repeat(39)));
    }

    #[test]
    fn renders_surds() {
        let s2 = ExactReal::sqrt_of(2).unwrap();
        assert_eq!(
            render_exact(&s2),
            "1.414213562373095048801688724209698078569e0"
        );
        let neg = s2.neg();
        assert_eq!(
            render_exact(&neg),
            "-1.414213562373095048801688724209698078569e0"
        );
        // 21*phi - 34 is tiny and negative
        let phi = ExactReal::golden_ratio();
        let d = phi.scale_int(&BigInt::from(21)).add_int(&BigInt::from(-34));
        assert!(render_exact(&d).starts_with("-2.1286"));
        assert!(render_exact(&d).ends_with("e-2"));
    }
}
