//! Rigorous fixed-point interval arithmetic.
//!
//! An [`Enclosure`] is a closed interval `[lo, hi] / 2^bits` with integer
//! endpoints. Every operation rounds its lower end down and its upper end up,
//! so the true value of any expression built from these operations stays
//! inside the computed interval. Logarithms and exponentials are evaluated by
//! series whose partial sums are rounded in one direction per bound, with an
//! explicit tail bound added to the upper sum.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

pub(crate) fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &(&s * &s) < n {
        s + 1
    } else {
        s
    }
}

/// Bounds on `atanh(u/v) * 2^w` for `0 <= u < v`.
fn atanh_bounds(u: &BigInt, v: &BigInt, w: u32) -> (BigInt, BigInt) {
    if u.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let u2 = u * u;
    let v2 = v * v;

    let mut lo = BigInt::zero();
    let mut p = floor_div(&(u << w as usize), v);
    let mut j: u64 = 0;
    while !p.is_zero() {
        lo += &p / BigInt::from(2 * j + 1);
        p = floor_div(&(&p * &u2), &v2);
        j += 1;
    }

    let mut hi = BigInt::zero();
    let mut p = ceil_div(&(u << w as usize), v);
    let mut j: u64 = 0;
    loop {
        hi += ceil_div(&p, &BigInt::from(2 * j + 1));
        p = ceil_div(&(&p * &u2), &v2);
        j += 1;
        if p <= BigInt::one() {
            break;
        }
    }
    // remaining terms sum to at most z^(2j+1) / (1 - z^2)
    hi += ceil_div(&(&p * &v2), &(&v2 - &u2));
    (lo, hi)
}

/// Bounds on `ln(num/den) * 2^bits`, `num/den > 0`.
pub(crate) fn ln_bounds(num: &BigInt, den: &BigInt, bits: u32) -> (BigInt, BigInt) {
    assert!(
        num.is_positive() && den.is_positive(),
        "ln of a non-positive number"
    );
    // num/den = 2^k * mn/md with mn/md in [1, 2)
    let mut k: i64 = num.bits() as i64 - den.bits() as i64;
    let (mut mn, mut md) = if k >= 0 {
        (num.clone(), den << k as usize)
    } else {
        (num << (-k) as usize, den.clone())
    };
    while mn >= (&md << 1usize) {
        md <<= 1usize;
        k += 1;
    }
    while mn < md {
        mn <<= 1usize;
        k -= 1;
    }
    let guard = 12 + (64 - k.unsigned_abs().leading_zeros());
    let w = bits + guard;
    let (a_lo, a_hi) = atanh_bounds(&(&mn - &md), &(&mn + &md), w);
    let (mut lo, mut hi) = (a_lo, a_hi);
    if k != 0 {
        let (l2_lo, l2_hi) = atanh_bounds(&BigInt::one(), &BigInt::from(3), w);
        let kb = BigInt::from(k);
        if k > 0 {
            lo += &kb * l2_lo;
            hi += &kb * l2_hi;
        } else {
            lo += &kb * l2_hi;
            hi += &kb * l2_lo;
        }
    }
    lo <<= 1usize;
    hi <<= 1usize;
    let scale = pow2(guard);
    (floor_div(&lo, &scale), ceil_div(&hi, &scale))
}

/// Bounds on `exp(num/den) * 2^bits`, `den > 0`.
pub(crate) fn exp_bounds(num: &BigInt, den: &BigInt, bits: u32) -> (BigInt, BigInt) {
    if num.is_zero() {
        let one = pow2(bits);
        return (one.clone(), one);
    }
    if num.is_negative() {
        let w = bits + 4;
        let (l, h) = exp_bounds(&-num, den, w);
        let sq = pow2(2 * w);
        let lo = floor_div(&sq, &h);
        let hi = ceil_div(&sq, &l);
        let scale = pow2(4);
        return (floor_div(&lo, &scale), ceil_div(&hi, &scale));
    }
    let c = ceil_div(num, den);
    let s = c.bits() as u32 + 1;
    let magnitude = 2 * c.to_u32().expect("exponent too large for an enclosure");
    let guard = s + magnitude + 16;
    let w = bits + guard;
    let yd = den << s as usize;
    let one = pow2(w);

    let mut lo = one.clone();
    let mut term = one.clone();
    let mut k: u64 = 1;
    while !term.is_zero() {
        term = floor_div(&(&term * num), &(&yd * BigInt::from(k)));
        lo += &term;
        k += 1;
    }

    let mut hi = one.clone();
    let mut term = one;
    let mut k: u64 = 1;
    loop {
        term = ceil_div(&(&term * num), &(&yd * BigInt::from(k)));
        hi += &term;
        k += 1;
        if term <= BigInt::one() {
            break;
        }
    }
    // y <= 1/2, so the remaining tail is at most twice the last term
    hi += 2 * term;

    let wscale = pow2(w);
    for _ in 0..s {
        lo = floor_div(&(&lo * &lo), &wscale);
        hi = ceil_div(&(&hi * &hi), &wscale);
    }
    let scale = pow2(guard);
    (floor_div(&lo, &scale), ceil_div(&hi, &scale))
}

impl Enclosure {
    pub fn new(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi, bits }
    }

    pub fn point(q: &BigRational, bits: u32) -> Self {
        let scaled = q.numer() << bits as usize;
        Enclosure {
            lo: floor_div(&scaled, q.denom()),
            hi: ceil_div(&scaled, q.denom()),
            bits,
        }
    }

    pub fn integer(n: &BigInt, bits: u32) -> Self {
        let v = n << bits as usize;
        Enclosure {
            lo: v.clone(),
            hi: v,
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lo_scaled(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_scaled(&self) -> &BigInt {
        &self.hi
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.bits))
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.bits))
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, pow2(self.bits))
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo() <= q && q <= &self.hi()
    }

    pub fn contains_interval(&self, other: &Enclosure) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    /// Re-expresses the interval at another precision, rounding outward.
    pub fn at(&self, bits: u32) -> Enclosure {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let sh = (bits - self.bits) as usize;
                Enclosure {
                    lo: &self.lo << sh,
                    hi: &self.hi << sh,
                    bits,
                }
            }
            Ordering::Less => {
                let scale = pow2(self.bits - bits);
                Enclosure {
                    lo: floor_div(&self.lo, &scale),
                    hi: ceil_div(&self.hi, &scale),
                    bits,
                }
            }
        }
    }

    fn aligned(&self, other: &Enclosure) -> (Enclosure, Enclosure) {
        let bits = self.bits.max(other.bits);
        (self.at(bits), other.at(bits))
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// `Less` when every point is below every point of `other`, `Greater` for
    /// the reverse, `None` when the intervals overlap.
    pub fn separation(&self, other: &Enclosure) -> Option<Ordering> {
        let (a, b) = self.aligned(other);
        if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo > b.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        let (a, b) = self.aligned(other);
        Enclosure {
            lo: a.lo + b.lo,
            hi: a.hi + b.hi,
            bits: a.bits,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let (a, b) = self.aligned(other);
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        let scale = pow2(a.bits);
        Enclosure {
            lo: floor_div(min, &scale),
            hi: ceil_div(max, &scale),
            bits: a.bits,
        }
    }

    pub fn scale_rational(&self, q: &BigRational) -> Enclosure {
        let (n, d) = (q.numer(), q.denom());
        let (x, y) = (&self.lo * n, &self.hi * n);
        let (min, max) = if x <= y { (x, y) } else { (y, x) };
        Enclosure {
            lo: floor_div(&min, d),
            hi: ceil_div(&max, d),
            bits: self.bits,
        }
    }

    /// `None` when the divisor interval contains zero.
    pub fn div(&self, other: &Enclosure) -> Option<Enclosure> {
        let (a, b) = self.aligned(other);
        if !(b.is_positive() || b.is_negative()) {
            return None;
        }
        let sh = a.bits as usize;
        let nums = [&a.lo << sh, &a.hi << sh];
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in &nums {
            for d in [&b.lo, &b.hi] {
                let (mut n, mut d) = (n.clone(), d.clone());
                if d.is_negative() {
                    n = -n;
                    d = -d;
                }
                let f = floor_div(&n, &d);
                let c = ceil_div(&n, &d);
                lo = Some(lo.map_or(f.clone(), |l| l.min(f)));
                hi = Some(hi.map_or(c.clone(), |h| h.max(c)));
            }
        }
        Some(Enclosure {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            bits: a.bits,
        })
    }

    /// `None` when the whole interval is negative.
    pub fn sqrt(&self) -> Option<Enclosure> {
        if self.hi.is_negative() {
            return None;
        }
        let sh = self.bits as usize;
        let lo = if self.lo.is_positive() {
            (&self.lo << sh).sqrt()
        } else {
            BigInt::zero()
        };
        Some(Enclosure {
            lo,
            hi: ceil_sqrt(&(&self.hi << sh)),
            bits: self.bits,
        })
    }

    /// `None` unless the interval is strictly positive.
    pub fn ln(&self) -> Option<Enclosure> {
        if !self.is_positive() {
            return None;
        }
        let den = pow2(self.bits);
        let (lo, _) = ln_bounds(&self.lo, &den, self.bits);
        let (_, hi) = ln_bounds(&self.hi, &den, self.bits);
        Some(Enclosure {
            lo,
            hi,
            bits: self.bits,
        })
    }

    pub fn exp(&self) -> Enclosure {
        let den = pow2(self.bits);
        let (lo, _) = exp_bounds(&self.lo, &den, self.bits);
        let (_, hi) = exp_bounds(&self.hi, &den, self.bits);
        Enclosure {
            lo,
            hi,
            bits: self.bits,
        }
    }

    /// `x^r` for a strictly positive interval.
    pub fn powr(&self, r: &BigRational) -> Option<Enclosure> {
        if r.is_zero() {
            return Some(Enclosure::integer(&BigInt::one(), self.bits));
        }
        if r.is_integer() && r.is_positive() {
            let n = r.to_integer().to_u32()?;
            let mut acc = Enclosure::integer(&BigInt::one(), self.bits);
            for _ in 0..n {
                acc = acc.mul(self);
            }
            return Some(acc);
        }
        Some(self.ln()?.scale_rational(r).exp())
    }
}

/// Enclosure of `ln(r)` for a rational `r > 0`, at `bits` of absolute precision.
pub fn ln_rational(r: &BigRational, bits: u32) -> Enclosure {
    let (lo, hi) = ln_bounds(r.numer(), r.denom(), bits);
    Enclosure { lo, hi, bits }
}

/// Enclosure of `exp(r)` for a rational `r`.
pub fn exp_rational(r: &BigRational, bits: u32) -> Enclosure {
    let (lo, hi) = exp_bounds(r.numer(), r.denom(), bits);
    Enclosure { lo, hi, bits }
}
