//! Quadratic irrationals `(a + b*sqrt(d)) / c` with exact sign and floor.

use super::enclosure::floor_div;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Largest trial divisor used when extracting square factors from `d`.
const SQUARE_TRIAL_LIMIT: u64 = 1_000_000;

/// A canonical quadratic irrational `(a + b*sqrt(d)) / c`.
///
/// `c > 0`, `b != 0`, `gcd(a, b, c) = 1` and `d >= 2` is free of every square
/// factor found by trial division (all of them whenever `d < 10^18`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic {
    pub(crate) a: BigInt,
    pub(crate) b: BigInt,
    pub(crate) c: BigInt,
    pub(crate) d: BigInt,
}

/// Unnormalized field element `(a + b*sqrt(d)) / c` with `d` held by the caller.
/// `b` may be zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Elem {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

pub(crate) fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

/// Splits `d = f^2 * r`, removing every square factor with a prime below the
/// trial limit, plus the cofactor itself when it is a perfect square. Once
/// `p^3` exceeds what is left, the remainder has at most two prime factors, so
/// the split is complete for every `d` below `SQUARE_TRIAL_LIMIT^3`.
pub(crate) fn split_square(d: &BigInt) -> (BigInt, BigInt) {
    if let Some(small) = d.to_u128() {
        let (mut r, mut f, mut keep) = (small, 1u128, 1u128);
        let mut p: u128 = 2;
        while p <= SQUARE_TRIAL_LIMIT as u128 && p * p * p <= r {
            if r % p == 0 {
                let mut exp = 0;
                while r % p == 0 {
                    r /= p;
                    exp += 1;
                }
                f *= p.pow(exp / 2);
                if exp % 2 == 1 {
                    keep *= p;
                }
            }
            p += if p == 2 { 1 } else { 2 };
        }
        let (f2, r2) = square_cofactor(BigInt::from(r));
        return (f2 * f, r2 * keep);
    }
    let mut r = d.clone();
    let mut f = BigInt::one();
    let mut keep = BigInt::one();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(SQUARE_TRIAL_LIMIT);
    while p <= limit && (&p * &p * &p) <= r {
        if (&r % &p).is_zero() {
            let mut exp = 0u32;
            while (&r % &p).is_zero() {
                r /= &p;
                exp += 1;
            }
            f *= p.pow(exp / 2);
            if exp % 2 == 1 {
                keep *= &p;
            }
        }
        p += 1;
    }
    let (f2, r2) = square_cofactor(r);
    (f * f2, r2 * keep)
}

fn square_cofactor(r: BigInt) -> (BigInt, BigInt) {
    match is_square(&r) {
        Some(s) if !r.is_zero() => (s, BigInt::one()),
        _ => (BigInt::one(), r),
    }
}

/// Sign of `a + b*sqrt(d)` for a non-square `d > 0`.
pub(crate) fn sign_of(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    let sa = a.sign_cmp();
    let sb = b.sign_cmp();
    match (sa, sb) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (x, y) if x == y => x,
        (Ordering::Greater, _) => (a * a).cmp(&(b * b * d)),
        _ => (b * b * d).cmp(&(a * a)),
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

/// `floor(b*sqrt(d))` for non-square `d`.
fn floor_surd(b: &BigInt, d: &BigInt) -> BigInt {
    if b.is_zero() {
        return BigInt::zero();
    }
    let r = (b * b * d).sqrt();
    if b.is_positive() {
        r
    } else {
        -r - 1
    }
}

impl Elem {
    pub fn rational(q: &BigRational) -> Elem {
        Elem {
            a: q.numer().clone(),
            b: BigInt::zero(),
            c: q.denom().clone(),
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        if self.c == o.c {
            return Elem {
                a: &self.a + &o.a,
                b: &self.b + &o.b,
                c: self.c.clone(),
            };
        }
        Elem {
            a: &self.a * &o.c + &o.a * &self.c,
            b: &self.b * &o.c + &o.b * &self.c,
            c: &self.c * &o.c,
        }
    }

    pub fn neg(&self) -> Elem {
        Elem {
            a: -&self.a,
            b: -&self.b,
            c: self.c.clone(),
        }
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.neg())
    }

    pub fn scale(&self, n: &BigInt) -> Elem {
        Elem {
            a: &self.a * n,
            b: &self.b * n,
            c: self.c.clone(),
        }
    }

    pub fn mul(&self, o: &Elem, d: &BigInt) -> Elem {
        Elem {
            a: &self.a * &o.a + &self.b * &o.b * d,
            b: &self.a * &o.b + &self.b * &o.a,
            c: &self.c * &o.c,
        }
    }

    /// `None` for zero.
    pub fn inv(&self, d: &BigInt) -> Option<Elem> {
        let norm = &self.a * &self.a - &self.b * &self.b * d;
        if norm.is_zero() {
            return None;
        }
        Some(Elem {
            a: &self.c * &self.a,
            b: -(&self.c * &self.b),
            c: norm,
        })
    }

    pub fn sign(&self, d: &BigInt) -> Ordering {
        let s = sign_of(&self.a, &self.b, d);
        if self.c.is_negative() {
            s.reverse()
        } else {
            s
        }
    }

    pub fn normalized(&self) -> Elem {
        let mut g = self.a.gcd(&self.b).gcd(&self.c);
        if self.c.is_negative() {
            g = -g;
        }
        Elem {
            a: &self.a / &g,
            b: &self.b / &g,
            c: &self.c / &g,
        }
    }

    /// Exact `floor` for non-square `d`.
    pub fn floor(&self, d: &BigInt) -> BigInt {
        let e = self.normalized();
        let num = &e.a + floor_surd(&e.b, d);
        floor_div(&num, &e.c)
    }

    /// `floor(x * 2^bits)`.
    pub fn floor_scaled(&self, d: &BigInt, bits: u32) -> BigInt {
        let sh = bits as usize;
        Elem {
            a: &self.a << sh,
            b: &self.b << sh,
            c: self.c.clone(),
        }
        .floor(d)
    }
}

impl Quadratic {
    /// `a + b*sqrt(d)` over `c`, in any form; returns `Err(rational)` when the
    /// value turns out to be rational.
    pub(crate) fn canonical(
        a: BigInt,
        b: BigInt,
        c: BigInt,
        d: BigInt,
    ) -> Result<Quadratic, BigRational> {
        assert!(!c.is_zero(), "zero denominator");
        assert!(!d.is_negative(), "negative radicand");
        let (f, r) = split_square(&d);
        let b = b * f;
        if r.is_one() || r.is_zero() || b.is_zero() {
            let num = if r.is_one() { a + b } else { a };
            return Err(BigRational::new(num, c));
        }
        Ok(Quadratic::in_field(Elem { a, b, c }, r).unwrap_or_else(|_| unreachable!()))
    }

    /// Normalizes an element of the field `Q(sqrt(d))`, with `d` already
    /// reduced. Returns `Err(rational)` when `b` vanishes.
    pub(crate) fn in_field(e: Elem, d: BigInt) -> Result<Quadratic, BigRational> {
        if e.b.is_zero() {
            return Err(BigRational::new(e.a, e.c));
        }
        let n = e.normalized();
        Ok(Quadratic {
            a: n.a,
            b: n.b,
            c: n.c,
            d,
        })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub(crate) fn elem(&self) -> Elem {
        Elem {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }

    /// Conjugate `(a - b*sqrt(d)) / c`.
    pub fn conjugate(&self) -> Quadratic {
        Quadratic {
            a: self.a.clone(),
            b: -&self.b,
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }

    pub fn floor(&self) -> BigInt {
        self.elem().floor(&self.d)
    }

    pub fn signum(&self) -> Ordering {
        sign_of(&self.a, &self.b, &self.d)
    }

    /// Rewrites this value over the radicand `d2` when both define the same
    /// field, i.e. when `d * d2` is a perfect square.
    pub(crate) fn elem_over(&self, d2: &BigInt) -> Option<Elem> {
        if &self.d == d2 {
            return Some(self.elem());
        }
        let s = is_square(&(&self.d * d2))?;
        // sqrt(d) = s / d2 * sqrt(d2)
        Some(Elem {
            a: &self.a * d2,
            b: &self.b * s,
            c: &self.c * d2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn square_parts() {
        assert_eq!(split_square(&bi(8)), (bi(2), bi(2)));
        assert_eq!(split_square(&bi(45)), (bi(3), bi(5)));
        assert_eq!(split_square(&bi(49)), (bi(7), bi(1)));
        assert_eq!(split_square(&bi(2 * 9 * 25 * 7)), (bi(15), bi(14)));
        // large prime squared times a small factor
        let p = bi(1_000_000_007);
        assert_eq!(split_square(&(&p * &p * 3)), (p.clone(), bi(3)));
        let big = BigInt::parse_bytes(b"340282366920938463463374607431768211507", 10).unwrap();
        assert_eq!(split_square(&(&big * 4)), (bi(2), big));
    }

    #[test]
    fn signs_and_floors() {
        let d = bi(2);
        assert_eq!(sign_of(&bi(-1), &bi(1), &d), Ordering::Greater);
        assert_eq!(sign_of(&bi(-2), &bi(1), &d), Ordering::Less);
        assert_eq!(sign_of(&bi(3), &bi(-2), &d), Ordering::Greater);
        let e = Elem {
            a: bi(1),
            b: bi(1),
            c: bi(2),
        };
        assert_eq!(e.floor(&bi(5)), bi(1));
        let e = Elem {
            a: bi(1),
            b: bi(-1),
            c: bi(2),
        };
        // (1 - sqrt5)/2 = -0.618...
        assert_eq!(e.floor(&bi(5)), bi(-1));
        assert_eq!(-e.neg().floor(&bi(5)), bi(0));
    }

    #[test]
    fn field_rewrite() {
        let q = Quadratic::canonical(bi(0), bi(1), bi(1), bi(8)).unwrap();
        assert_eq!(q.d, bi(2));
        assert_eq!(q.b, bi(2));
        let e = q.elem_over(&bi(2)).unwrap();
        assert_eq!(e, q.elem());
        assert!(q.elem_over(&bi(3)).is_none());
    }
}
