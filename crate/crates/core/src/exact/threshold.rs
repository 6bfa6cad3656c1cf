//! Thresholds built from rationals, logarithms and exponentials, and rigorous
//! comparison of exact values against them.

use super::enclosure::{ceil_div, floor_div, ln_rational, Enclosure};
use super::{DecimalInterval, ExactReal};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

pub const DEFAULT_PRECISION_DIGITS: u32 = 200;

/// Working precision for the first comparison attempt.
const START_BITS: u32 = 64;

/// Real-valued expression evaluated by interval arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(BigRational),
    Real(ExactReal),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
    Pow(Box<Expr>, BigRational),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(n: impl Into<BigInt>) -> Expr {
        Expr::Const(BigRational::from_integer(n.into()))
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Box::new(self))
    }

    pub fn pow(self, r: BigRational) -> Expr {
        Expr::Pow(Box::new(self), r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, o: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(o))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, o: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(o))
    }

    /// Enclosure at `bits` of working precision; `None` when a domain
    /// condition (positive log argument, nonzero divisor) cannot be
    /// certified at this precision.
    pub fn eval(&self, bits: u32) -> Option<Enclosure> {
        // a few guard bits absorb the rounding of intermediate steps
        let w = bits + 16;
        Some(match self {
            Expr::Const(q) => Enclosure::point(q, w),
            Expr::Real(x) => x.enclose(w),
            Expr::Ln(e) => match e.as_ref() {
                Expr::Const(q) if *q > BigRational::zero() => ln_rational(q, w),
                _ => e.eval(bits)?.ln()?,
            },
            Expr::Exp(e) => e.eval(bits)?.exp(),
            Expr::Sqrt(e) => e.eval(bits)?.sqrt()?,
            Expr::Pow(e, r) => {
                let x = e.eval(bits)?;
                if !x.is_positive() {
                    return None;
                }
                x.powr(r)?
            }
            Expr::Add(a, b) => a.eval(bits)?.add(&b.eval(bits)?),
            Expr::Sub(a, b) => a.eval(bits)?.sub(&b.eval(bits)?),
            Expr::Mul(a, b) => a.eval(bits)?.mul(&b.eval(bits)?),
            Expr::Div(a, b) => a.eval(bits)?.div(&b.eval(bits)?)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Expr::Const(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Expr::Real(x) => write!(f, "{x}"),
            Expr::Ln(e) => write!(f, "ln({e})"),
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
            Expr::Pow(e, r) => write!(f, "({e})^({r})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a} * {b}"),
            Expr::Div(a, b) => write!(f, "{a} / ({b})"),
        }
    }
}

/// A comparison threshold: an exact rational or a derived transcendental value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    Exact(BigRational),
    Derived(Expr),
}

impl Threshold {
    pub fn zero() -> Threshold {
        Threshold::Exact(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Threshold::Exact(q) if q.is_zero())
    }

    pub fn enclose(&self, bits: u32) -> Option<Enclosure> {
        match self {
            Threshold::Exact(q) => Some(Enclosure::point(q, bits)),
            Threshold::Derived(e) => e.eval(bits),
        }
    }

    /// Decimal enclosure of width at most `width`.
    pub fn interval(&self, width: &BigRational) -> DecimalInterval {
        decimal_cell(width, |bits| self.enclose(bits))
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Threshold::Derived(e) => write!(f, "{e}"),
        }
    }
}

/// Outcome of a rigorous comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    /// Not separated at the precision cap.
    Undecided,
}

impl Comparison {
    pub fn from_ordering(o: Ordering) -> Comparison {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }

    pub fn reverse(self) -> Comparison {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            c => c,
        }
    }
}

pub(crate) fn cap_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

/// Compares two enclosure families, doubling the precision until they
/// separate or `cap_digits` decimal digits are exhausted.
pub fn compare_by<F, G>(x: F, y: G, cap_digits: u32) -> Comparison
where
    F: Fn(u32) -> Option<Enclosure>,
    G: Fn(u32) -> Option<Enclosure>,
{
    let cap = cap_bits(cap_digits).max(START_BITS);
    let mut bits = START_BITS;
    loop {
        if let (Some(a), Some(b)) = (x(bits), y(bits)) {
            if let Some(o) = a.separation(&b) {
                return Comparison::from_ordering(o);
            }
        }
        if bits >= cap {
            return Comparison::Undecided;
        }
        bits = (bits * 2).min(cap);
    }
}

/// Rigorous comparison of `x` against `y`.
///
/// `Equal` is only returned when both sides are exact and provably equal.
pub fn compare(x: &ExactReal, y: &Threshold, cap_digits: u32) -> Comparison {
    if let Threshold::Exact(q) = y {
        if x.is_exact() {
            let o = x
                .cmp_exact(&ExactReal::Rational(q.clone()))
                .expect("rational never conflicts with a field");
            return Comparison::from_ordering(o);
        }
    }
    compare_by(|b| Some(x.enclose(b)), |b| y.enclose(b), cap_digits)
}

/// Rigorous comparison of two expressions; never returns `Equal`.
pub fn compare_expr(x: &Expr, y: &Expr, cap_digits: u32) -> Comparison {
    compare_by(|b| x.eval(b), |b| y.eval(b), cap_digits)
}

/// Enclosure of `ln r` of width at most `width`.
///
/// The result is the decimal cell `[k, k+1] / 10^s` containing `ln r`, with
/// `s` the least scale whose cell width fits; cells at finer scales nest inside
/// coarser ones, so shrinking `width` never leaves the previous interval.
pub fn ln_interval(r: &BigRational, width: &BigRational) -> DecimalInterval {
    assert!(r > &BigRational::zero(), "ln of a non-positive number");
    assert!(width > &BigRational::zero(), "non-positive width");
    if r.is_one() {
        return DecimalInterval::new(BigInt::zero(), BigInt::zero(), 0).expect("ordered");
    }
    decimal_cell(width, |bits| Some(ln_rational(r, bits)))
}

fn decimal_cell(width: &BigRational, f: impl Fn(u32) -> Option<Enclosure>) -> DecimalInterval {
    let ten = BigInt::from(10u32);
    let mut scale = 0u32;
    while BigRational::new(BigInt::one(), ten.pow(scale)) > *width {
        scale += 1;
    }
    let p = ten.pow(scale);
    let mut bits = (scale as f64 * std::f64::consts::LOG2_10) as u32 + 32;
    // Irrational values eventually fit strictly inside one cell. Values on a
    // grid point never do; after a generous number of doublings the cell
    // pair around the point is returned instead.
    for _ in 0..12 {
        if let Some(e) = f(bits) {
            let lo = e.lo();
            let hi = e.hi();
            let klo = floor_div(&(lo.numer() * &p), lo.denom());
            let khi = ceil_div(&(hi.numer() * &p), hi.denom());
            if &khi - &klo <= BigInt::one() || bits >= 1 << 16 {
                return DecimalInterval::new(klo, khi, scale).expect("ordered");
            }
        }
        bits *= 2;
    }
    let e = f(bits).expect("enclosure at high precision");
    DecimalInterval::from_enclosure(&e, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_comparisons() {
        let q = ExactReal::rational(1, 4);
        assert_eq!(
            compare(&q, &Threshold::Exact(rat(1, 2)), 50),
            Comparison::Less
        );
        let t = ExactReal::rational(1, 3);
        assert_eq!(
            compare(&t, &Threshold::Exact(rat(1, 3)), 50),
            Comparison::Equal
        );
    }

    #[test]
    fn torus_distance_of_8_phi_below_one_thirteenth() {
        let phi = ExactReal::golden_ratio();
        let d = phi.scale_int(&BigInt::from(8)).torus_distance().unwrap();
        assert_eq!(
            compare(&d, &Threshold::Exact(rat(1, 13)), 20),
            Comparison::Less
        );
    }

    #[test]
    fn derived_thresholds_separate() {
        // 1/(8 ln 2) = 0.18033688...
        let psi = Threshold::Derived(Expr::int(1).div(Expr::int(8).mul(Expr::int(2).ln())));
        assert_eq!(
            compare(&ExactReal::rational(18033688, 100_000_000), &psi, 50),
            Comparison::Less
        );
        assert_eq!(
            compare(&ExactReal::rational(18033689, 100_000_000), &psi, 50),
            Comparison::Greater
        );
    }

    #[test]
    fn indistinguishable_values_are_undecided() {
        // exp(ln 3) equals 3 but is only known through intervals
        let t = Threshold::Derived(Expr::int(3).ln().exp());
        assert_eq!(compare(&ExactReal::from(3), &t, 40), Comparison::Undecided);
    }

    #[test]
    fn ln_interval_cells() {
        let i = ln_interval(&rat(2, 1), &rat(1, 10_000_000_000));
        assert_eq!(i.scale(), 10);
        assert_eq!(i.lo_scaled(), &BigInt::from(6931471805i64));
        assert_eq!(i.hi_scaled(), &BigInt::from(6931471806i64));
        let one = ln_interval(&rat(1, 1), &rat(1, 100));
        assert!(one.lo_scaled().is_zero() && one.hi_scaled().is_zero());
    }

    #[test]
    fn ln_interval_nests() {
        let r = rat(27, 10);
        let mut w = rat(1, 2);
        let mut prev = ln_interval(&r, &w);
        for _ in 0..40 {
            w /= BigRational::from_integer(2.into());
            let next = ln_interval(&r, &w);
            assert!(prev.lo() <= next.lo() && next.hi() <= prev.hi());
            assert!(next.width() <= w);
            prev = next;
        }
    }
}
