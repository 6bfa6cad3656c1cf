//! Exact real numbers: rationals, quadratic irrationals and certified decimal
//! intervals, with rigorous comparison against transcendental thresholds.

mod enclosure;
mod quadratic;
mod render;
mod threshold;

pub use enclosure::{exp_rational, ln_rational, Enclosure};
pub use quadratic::Quadratic;
pub use render::{render_enclosure, render_exact, render_refined, RENDER_DIGITS};
pub(crate) use threshold::cap_bits;
pub use threshold::{
    compare, compare_by, compare_expr, ln_interval, Comparison, Expr, Threshold,
    DEFAULT_PRECISION_DIGITS,
};

pub(crate) use quadratic::Elem;

use crate::error::{Error, Result};
use enclosure::{ceil_div, floor_div};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Closed interval `[lo, hi] / 10^scale`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecimalInterval {
    lo: BigInt,
    hi: BigInt,
    scale: u32,
}

impl DecimalInterval {
    pub fn new(lo: BigInt, hi: BigInt, scale: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval lower end {lo} exceeds upper end {hi}"
            )));
        }
        Ok(DecimalInterval { lo, hi, scale })
    }

    /// Smallest decimal interval at `scale` digits containing `e`.
    pub fn from_enclosure(e: &Enclosure, scale: u32) -> Self {
        let p = BigInt::from(10u32).pow(scale);
        let lo = e.lo();
        let hi = e.hi();
        DecimalInterval {
            lo: floor_div(&(lo.numer() * &p), lo.denom()),
            hi: ceil_div(&(hi.numer() * &p), hi.denom()),
            scale,
        }
    }

    pub fn lo_scaled(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_scaled(&self) -> &BigInt {
        &self.hi
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    fn denom(&self) -> BigInt {
        BigInt::from(10u32).pow(self.scale)
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.denom())
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.denom())
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, self.denom())
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo() <= q && q <= &self.hi()
    }

    pub fn enclose(&self, bits: u32) -> Enclosure {
        let lo = Enclosure::point(&self.lo(), bits);
        let hi = Enclosure::point(&self.hi(), bits);
        Enclosure::new(lo.lo_scaled().clone(), hi.hi_scaled().clone(), bits)
    }
}

/// An exactly known real number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactReal {
    Rational(BigRational),
    Quadratic(Quadratic),
    Interval(DecimalInterval),
}

impl From<BigRational> for ExactReal {
    fn from(q: BigRational) -> Self {
        ExactReal::Rational(q)
    }
}

impl From<BigInt> for ExactReal {
    fn from(n: BigInt) -> Self {
        ExactReal::Rational(BigRational::from_integer(n))
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        ExactReal::from(BigInt::from(n))
    }
}

impl From<Quadratic> for ExactReal {
    fn from(q: Quadratic) -> Self {
        ExactReal::Quadratic(q)
    }
}

impl ExactReal {
    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> ExactReal {
        ExactReal::Rational(BigRational::new(num.into(), den.into()))
    }

    /// `(a + b*sqrt(d)) / c`, canonicalized; collapses to a rational when the
    /// surd vanishes or `d` is a perfect square.
    pub fn quadratic(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<ExactReal> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        if c.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if d.is_negative() {
            return Err(Error::InvalidArgument(format!("negative radicand {d}")));
        }
        Ok(match Quadratic::canonical(a, b, c, d) {
            Ok(q) => ExactReal::Quadratic(q),
            Err(r) => ExactReal::Rational(r),
        })
    }

    pub fn sqrt_of(d: impl Into<BigInt>) -> Result<ExactReal> {
        ExactReal::quadratic(0, 1, 1, d)
    }

    /// The golden ratio `(1 + sqrt 5) / 2`.
    pub fn golden_ratio() -> ExactReal {
        ExactReal::quadratic(1, 1, 2, 5).expect("valid surd")
    }

    pub fn zero() -> ExactReal {
        ExactReal::Rational(BigRational::zero())
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, ExactReal::Interval(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactReal::Rational(q) if q.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_quadratic(&self) -> Option<&Quadratic> {
        match self {
            ExactReal::Quadratic(q) => Some(q),
            _ => None,
        }
    }

    /// The radicand of the field this value lives in, if irrational.
    pub fn field(&self) -> Option<&BigInt> {
        self.as_quadratic().map(|q| &q.d)
    }

    pub(crate) fn from_elem(e: Elem, d: Option<&BigInt>) -> ExactReal {
        match d {
            None => ExactReal::Rational(BigRational::new(e.a, e.c)),
            Some(d) => match Quadratic::in_field(e, d.clone()) {
                Ok(q) => ExactReal::Quadratic(q),
                Err(r) => ExactReal::Rational(r),
            },
        }
    }

    fn elem(&self) -> Option<(Elem, Option<&BigInt>)> {
        match self {
            ExactReal::Rational(q) => Some((Elem::rational(q), None)),
            ExactReal::Quadratic(q) => Some((q.elem(), Some(&q.d))),
            ExactReal::Interval(_) => None,
        }
    }

    /// Brings two exact values into a common field.
    pub(crate) fn unify<'a>(
        x: &'a ExactReal,
        y: &'a ExactReal,
    ) -> Result<(Elem, Elem, Option<&'a BigInt>)> {
        let (ex, dx) = x.elem().ok_or(Error::NotQuadratic)?;
        let (ey, dy) = y.elem().ok_or(Error::NotQuadratic)?;
        match (dx, dy) {
            (None, None) => Ok((ex, ey, None)),
            (Some(d), None) => Ok((ex, ey, Some(d))),
            (None, Some(d)) => Ok((ex, ey, Some(d))),
            (Some(d1), Some(d2)) => {
                let qy = y.as_quadratic().unwrap();
                match qy.elem_over(d1) {
                    Some(ey) => Ok((ex, ey, Some(d1))),
                    None => Err(Error::IncompatibleFields(d1.to_string(), d2.to_string())),
                }
            }
        }
    }

    fn interval_op(
        &self,
        other: &ExactReal,
        op: impl Fn(&Enclosure, &Enclosure) -> Option<Enclosure>,
    ) -> Result<ExactReal> {
        let scale = [self, other]
            .iter()
            .filter_map(|v| match v {
                ExactReal::Interval(i) => Some(i.scale),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let bits = (scale as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64;
        let e = op(&self.enclose(bits), &other.enclose(bits))
            .ok_or_else(|| Error::InvalidArgument("interval division by zero".into()))?;
        Ok(ExactReal::Interval(DecimalInterval::from_enclosure(
            &e, scale,
        )))
    }

    pub fn add(&self, other: &ExactReal) -> Result<ExactReal> {
        if !self.is_exact() || !other.is_exact() {
            return self.interval_op(other, |a, b| Some(a.add(b)));
        }
        let (a, b, d) = ExactReal::unify(self, other)?;
        Ok(ExactReal::from_elem(a.add(&b), d))
    }

    pub fn sub(&self, other: &ExactReal) -> Result<ExactReal> {
        if !self.is_exact() || !other.is_exact() {
            return self.interval_op(other, |a, b| Some(a.sub(b)));
        }
        let (a, b, d) = ExactReal::unify(self, other)?;
        Ok(ExactReal::from_elem(a.sub(&b), d))
    }

    pub fn mul(&self, other: &ExactReal) -> Result<ExactReal> {
        if !self.is_exact() || !other.is_exact() {
            return self.interval_op(other, |a, b| Some(a.mul(b)));
        }
        let (a, b, d) = ExactReal::unify(self, other)?;
        let one = BigInt::one();
        Ok(ExactReal::from_elem(a.mul(&b, d.unwrap_or(&one)), d))
    }

    pub fn div(&self, other: &ExactReal) -> Result<ExactReal> {
        if !self.is_exact() || !other.is_exact() {
            return self.interval_op(other, |a, b| a.div(b));
        }
        let (a, b, d) = ExactReal::unify(self, other)?;
        let one = BigInt::one();
        let dd = d.unwrap_or(&one);
        let inv = b
            .inv(dd)
            .ok_or_else(|| Error::InvalidArgument("division by zero".into()))?;
        Ok(ExactReal::from_elem(a.mul(&inv, dd), d))
    }

    pub fn neg(&self) -> ExactReal {
        match self {
            ExactReal::Rational(q) => ExactReal::Rational(-q),
            ExactReal::Quadratic(q) => ExactReal::Quadratic(Quadratic {
                a: -&q.a,
                b: -&q.b,
                c: q.c.clone(),
                d: q.d.clone(),
            }),
            ExactReal::Interval(i) => ExactReal::Interval(DecimalInterval {
                lo: -&i.hi,
                hi: -&i.lo,
                scale: i.scale,
            }),
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> ExactReal {
        match self {
            ExactReal::Rational(q) => ExactReal::Rational(q * BigRational::from_integer(n.clone())),
            ExactReal::Quadratic(q) => ExactReal::from_elem(q.elem().scale(n), Some(&q.d)),
            ExactReal::Interval(i) => {
                let (x, y) = (&i.lo * n, &i.hi * n);
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                ExactReal::Interval(DecimalInterval {
                    lo,
                    hi,
                    scale: i.scale,
                })
            }
        }
    }

    pub fn add_int(&self, n: &BigInt) -> ExactReal {
        self.add(&ExactReal::from(n.clone()))
            .expect("adding an integer never mixes fields")
    }

    /// Exact floor; `None` for an interval whose floor is not determined.
    pub fn floor(&self) -> Option<BigInt> {
        match self {
            ExactReal::Rational(q) => Some(q.floor().to_integer()),
            ExactReal::Quadratic(q) => Some(q.floor()),
            ExactReal::Interval(i) => {
                let p = i.denom();
                let lo = floor_div(&i.lo, &p);
                let hi = floor_div(&i.hi, &p);
                (lo == hi).then_some(lo)
            }
        }
    }

    /// `x - floor(x)` for exact values.
    pub fn fract(&self) -> Option<ExactReal> {
        if !self.is_exact() {
            return None;
        }
        let f = self.floor()?;
        Some(self.add_int(&-f))
    }

    pub fn signum(&self) -> Option<Ordering> {
        match self {
            ExactReal::Rational(q) => Some(q.cmp(&BigRational::zero())),
            ExactReal::Quadratic(q) => Some(q.signum()),
            ExactReal::Interval(i) => {
                if i.lo.is_positive() {
                    Some(Ordering::Greater)
                } else if i.hi.is_negative() {
                    Some(Ordering::Less)
                } else if i.lo.is_zero() && i.hi.is_zero() {
                    Some(Ordering::Equal)
                } else {
                    None
                }
            }
        }
    }

    pub fn abs(&self) -> ExactReal {
        match self.signum() {
            Some(Ordering::Less) => self.neg(),
            Some(_) => self.clone(),
            None => {
                let i = match self {
                    ExactReal::Interval(i) => i,
                    _ => unreachable!(),
                };
                ExactReal::Interval(DecimalInterval {
                    lo: BigInt::zero(),
                    hi: i.lo.abs().max(i.hi.abs()),
                    scale: i.scale,
                })
            }
        }
    }

    /// Rigorous enclosure at `bits` bits of absolute precision.
    pub fn enclose(&self, bits: u32) -> Enclosure {
        match self {
            ExactReal::Rational(q) => Enclosure::point(q, bits),
            ExactReal::Quadratic(q) => {
                let lo = q.elem().floor_scaled(&q.d, bits);
                let hi = &lo + 1;
                Enclosure::new(lo, hi, bits)
            }
            ExactReal::Interval(i) => i.enclose(bits),
        }
    }

    /// Exact ordering of two exact values in a common field.
    pub fn cmp_exact(&self, other: &ExactReal) -> Result<Ordering> {
        let (a, b, d) = ExactReal::unify(self, other)?;
        let diff = a.sub(&b);
        Ok(match d {
            Some(d) => diff.sign(d),
            None => BigRational::new(diff.a, diff.c).cmp(&BigRational::zero()),
        })
    }

    /// Distance to the nearest integer, `||x||`.
    pub fn torus_distance(&self) -> Result<ExactReal> {
        match self {
            ExactReal::Interval(i) => torus_distance_interval(i),
            _ => {
                let frac = self.fract().expect("exact");
                let half = ExactReal::rational(1, 2);
                if frac.cmp_exact(&half)? == Ordering::Greater {
                    Ok(ExactReal::from(BigInt::one()).sub(&frac)?)
                } else {
                    Ok(frac)
                }
            }
        }
    }

    /// `n*x - s`, exact for rational and same-field quadratic inputs.
    pub fn linear_form(n: &BigInt, x: &ExactReal, s: &ExactReal) -> Result<ExactReal> {
        x.scale_int(n).sub(s)
    }
}

fn torus_distance_interval(i: &DecimalInterval) -> Result<ExactReal> {
    let p = i.denom();
    // nearest integer is constant unless a half-integer lies strictly inside
    let twice_lo = &i.lo * 2;
    let twice_hi = &i.hi * 2;
    let h = floor_div(&twice_lo, &p);
    let h_odd_next = if h.is_odd() {
        h.clone() + 2
    } else {
        h.clone() + 1
    };
    let first_half = if h.is_odd() && &h * &p == twice_lo {
        h.clone() + 2
    } else {
        h_odd_next
    };
    if &first_half * &p < twice_hi {
        return Err(Error::AmbiguousInterval);
    }
    let two = BigInt::from(2);
    let k = floor_div(&(&twice_lo + &p), &(&p * &two));
    let kp = &k * &p;
    let dlo = (&i.lo - &kp).abs();
    let dhi = (&i.hi - &kp).abs();
    let (lo, hi) = if i.lo <= kp && kp <= i.hi {
        (BigInt::zero(), dlo.max(dhi))
    } else {
        (dlo.clone().min(dhi.clone()), dlo.max(dhi))
    };
    Ok(ExactReal::Interval(DecimalInterval {
        lo,
        hi,
        scale: i.scale,
    }))
}

impl fmt::Display for DecimalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "interval({},{},{})", self.lo, self.hi, self.scale)
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(
            f,
            "({}{}{}*sqrt({}))/{}",
            self.a,
            sign,
            self.b.abs(),
            self.d,
            self.c
        )
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            ExactReal::Quadratic(q) => q.fmt(f),
            ExactReal::Interval(i) => i.fmt(f),
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::Parse(s.to_string()))
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(s.to_string()));
    }
    let digits = format!("{ip}{fp}");
    let mut n = parse_int(if digits.is_empty() { "0" } else { &digits })?;
    if neg {
        n = -n;
    }
    Ok(BigRational::new(
        n,
        BigInt::from(10u32).pow(fp.len() as u32),
    ))
}

impl FromStr for ExactReal {
    type Err = Error;

    /// Accepts `p/q`, integers and decimals, `(a+b*sqrt(d))/c` (also without
    /// the outer denominator), `sqrt(d)` and `interval(lo,hi,scale)`.
    fn from_str(input: &str) -> Result<ExactReal> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse(input.to_string());
        if let Some(body) = s
            .strip_prefix("interval(")
            .and_then(|r| r.strip_suffix(')'))
        {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 3 {
                return Err(err());
            }
            let scale: u32 = parts[2].parse().map_err(|_| err())?;
            let iv = DecimalInterval::new(parse_int(parts[0])?, parse_int(parts[1])?, scale)?;
            return Ok(ExactReal::Interval(iv));
        }
        if s.contains("sqrt(") {
            return parse_surd(&s).ok_or_else(err)?;
        }
        if let Some((n, d)) = s.split_once('/') {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::InvalidArgument("zero denominator".into()));
            }
            return Ok(ExactReal::Rational(BigRational::new(parse_int(n)?, d)));
        }
        parse_decimal(&s).map(ExactReal::Rational)
    }
}

fn parse_surd(s: &str) -> Option<Result<ExactReal>> {
    let (body, c) = match s.rsplit_once(")/") {
        Some((body, c)) if body.starts_with('(') => (&body[1..], parse_int(c).ok()?),
        _ => match s.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
            Some(body) => (body, BigInt::one()),
            None => (s, BigInt::one()),
        },
    };
    let sq = body.find("sqrt(")?;
    let close = body[sq..].find(')')? + sq;
    let d = parse_int(&body[sq + 5..close]).ok()?;
    if close + 1 != body.len() {
        return None;
    }
    let head = &body[..sq];
    // head is "", "b*", "a+b*", "a-b*", "a+", "a-", "-" ...
    let head = head
        .strip_suffix('*')
        .map(|h| (h, true))
        .unwrap_or((head, false));
    let (head, had_coeff) = head;
    let split = head
        .char_indices()
        .skip(1)
        .filter(|(_, c)| *c == '+' || *c == '-')
        .map(|(i, _)| i)
        .last();
    let (a_str, b_str) = match split {
        Some(i) if !had_coeff || head[..i].chars().all(|c| c.is_ascii_digit() || c == '-') => {
            (&head[..i], &head[i..])
        }
        _ => ("", head),
    };
    let a = if a_str.is_empty() {
        BigInt::zero()
    } else {
        parse_int(a_str).ok()?
    };
    let b = match b_str {
        "" | "+" => BigInt::one(),
        "-" => -BigInt::one(),
        other => parse_int(other.strip_prefix('+').unwrap_or(other)).ok()?,
    };
    Some(ExactReal::quadratic(a, b, c, d))
}
