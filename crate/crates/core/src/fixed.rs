//! 128-bit fixed-point fractional parts with explicit error bounds, used to
//! pre-screen exact comparisons over long index ranges.

use crate::exact::ExactReal;
use num_traits::ToPrimitive;

pub(crate) const SCALE_BITS: u32 = 128;

/// `floor({x} * 2^128)` for an exact value `x`.
pub(crate) fn frac_fixed(x: &ExactReal) -> u128 {
    let f = x.fract().expect("exact value");
    f.enclose(SCALE_BITS)
        .lo_scaled()
        .to_u128()
        .expect("fractional part below one")
}

/// `j * f` as a 192-bit value `(high, low)`.
pub(crate) fn mul_small(f: u128, j: u64) -> (u64, u128) {
    let j = j as u128;
    let lo = (f as u64 as u128) * j;
    let hi = (f >> 64) * j;
    let (low, carry) = lo.overflowing_add(hi << 64);
    let high = (hi >> 64) as u64 + carry as u64;
    (high, low)
}

/// Circle distance of a 128-bit fractional position to the nearest integer.
pub(crate) fn circle_dist(v: u128) -> u128 {
    v.min(v.wrapping_neg())
}

/// Fixed-point tracker for `{n*alpha - gamma}`, accurate to `n + 1` units of
/// `2^-128`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ShiftFixed {
    pub alpha: u128,
    pub gamma: u128,
}

impl ShiftFixed {
    pub fn new(alpha: &ExactReal, gamma: &ExactReal) -> ShiftFixed {
        ShiftFixed {
            alpha: frac_fixed(alpha),
            gamma: frac_fixed(gamma),
        }
    }

    /// Approximate `||n*alpha - gamma||` in units of `2^-128`; the true value
    /// is within `n + 1` units.
    pub fn dist(&self, n: u64) -> u128 {
        let (_, low) = mul_small(self.alpha, n);
        circle_dist(low.wrapping_sub(self.gamma))
    }
}

/// `2^-128` as an `f64`.
pub(crate) const ULP: f64 = 1.0 / 340282366920938463463374607431768211456.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_products() {
        let f = u128::MAX;
        let (h, l) = mul_small(f, 3);
        // 3 * (2^128 - 1) = 2 * 2^128 + (2^128 - 3)
        assert_eq!(h, 2);
        assert_eq!(l, u128::MAX - 2);
        assert_eq!(mul_small(1 << 127, 2), (1, 0));
    }

    #[test]
    fn shifted_distances() {
        let a = ExactReal::sqrt_of(2).unwrap();
        let g = ExactReal::rational(1, 3);
        let s = ShiftFixed::new(&a, &g);
        for n in [1u64, 7, 1000, 123456] {
            let exact = ExactReal::linear_form(&n.into(), &a, &g)
                .unwrap()
                .torus_distance()
                .unwrap();
            let e = exact.enclose(128);
            let lo = e.lo_scaled().to_u128().unwrap();
            let approx = s.dist(n);
            assert!(approx.abs_diff(lo) <= n as u128 + 2);
        }
    }
}
