//! Continued-fraction expansion, convergents and the growth constant of the
//! convergent denominators.

use crate::error::{Error, Result};
use crate::exact::{ln_rational, DecimalInterval, Enclosure, ExactReal};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Partial quotients `[a0; a1, a2, ...]` of a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFExpansion {
    pub a0: BigInt,
    /// `a_1, a_2, ...`; for periodic expansions at least one full period.
    pub digits: Vec<BigInt>,
    /// `(preperiod, period)`: `a_{k+period} = a_k` for every `k > preperiod`.
    pub periodic: Option<(usize, usize)>,
    /// Every listed digit is certified and the requested depth was reached.
    pub exact: bool,
    /// The expansion terminates after `digits` (rational value).
    pub finite: bool,
}

impl CFExpansion {
    pub fn finite(a0: BigInt, digits: Vec<BigInt>) -> CFExpansion {
        CFExpansion {
            a0,
            digits,
            periodic: None,
            exact: true,
            finite: true,
        }
    }

    /// Purely periodic expansion `[0; block, block, ...]`.
    pub fn purely_periodic(block: Vec<BigInt>) -> CFExpansion {
        let period = block.len();
        assert!(period > 0, "empty period");
        CFExpansion {
            a0: BigInt::zero(),
            digits: block,
            periodic: Some((0, period)),
            exact: true,
            finite: false,
        }
    }

    /// Number of digits `a_1..` that can be served; `None` when unlimited.
    pub fn available(&self) -> Option<usize> {
        match self.periodic {
            Some(_) => None,
            None => Some(self.digits.len()),
        }
    }

    /// Partial quotient `a_k` for `k >= 0`, unrolling periods on demand.
    pub fn digit(&self, k: usize) -> Option<BigInt> {
        if k == 0 {
            return Some(self.a0.clone());
        }
        if k <= self.digits.len() {
            return Some(self.digits[k - 1].clone());
        }
        let (pre, per) = self.periodic?;
        let idx = pre + (k - 1 - pre) % per;
        Some(self.digits[idx].clone())
    }

    /// `a_1..a_depth`, or `DepthExceedsDigits`.
    pub fn digits_to(&self, depth: usize) -> Result<Vec<BigInt>> {
        if let Some(n) = self.available() {
            if depth > n {
                return Err(Error::DepthExceedsDigits {
                    requested: depth,
                    available: n,
                });
            }
        }
        Ok((1..=depth).map(|k| self.digit(k).unwrap()).collect())
    }

    /// Exact value of a finite or periodic expansion.
    pub fn value(&self) -> Option<ExactReal> {
        match self.periodic {
            None if self.finite => {
                let t = convergents(self, self.digits.len()).ok()?;
                let k = self.digits.len() as isize;
                Some(ExactReal::Rational(BigRational::new(
                    t.p(k).clone(),
                    t.q(k).clone(),
                )))
            }
            None => None,
            Some((pre, per)) => {
                let block = &self.digits[pre..pre + per];
                let (a, b, c, d) = mobius(block);
                // tail z = (a z + b)/(c z + d), z > 1
                let s = &a - &d;
                let disc = &s * &s + BigInt::from(4) * &b * &c;
                let z = ExactReal::quadratic(s, 1, &c * 2, disc).ok()?;
                let mut head = vec![self.a0.clone()];
                head.extend_from_slice(&self.digits[..pre]);
                let (a, b, c, d) = mobius(&head);
                let num = z.scale_int(&a).add_int(&b);
                let den = z.scale_int(&c).add_int(&d);
                num.div(&den).ok()
            }
        }
    }
}

/// Coefficients of `z -> [d1; d2, ..., dn, z] = (a z + b) / (c z + d)`.
fn mobius(ds: &[BigInt]) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut a, mut b, mut c, mut d) =
        (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    for x in ds {
        // right-multiply by [[x, 1], [1, 0]]
        let na = &a * x + &b;
        let nc = &c * x + &d;
        b = a;
        d = c;
        a = na;
        c = nc;
    }
    (a, b, c, d)
}

/// Expands `x` to at most `max_depth` partial quotients after `a0`.
///
/// Rational inputs yield their full finite expansion (truncated at the
/// depth), quadratic inputs a periodic one. Intervals yield digits while they
/// are certified and fail with `InsufficientPrecision` if that stops short of
/// `max_depth`.
pub fn expand(x: &ExactReal, max_depth: usize) -> Result<CFExpansion> {
    let cf = expand_certified(x, max_depth);
    if !cf.exact {
        return Err(Error::InsufficientPrecision {
            obtained: cf.digits.len(),
            obtained_next: cf.digits.len() + 1,
        });
    }
    Ok(cf)
}

/// Like [`expand`], but returns the certified prefix of an interval input
/// instead of failing; `exact` is false when the prefix is short.
pub fn expand_certified(x: &ExactReal, max_depth: usize) -> CFExpansion {
    match x {
        ExactReal::Rational(q) => expand_rational(q, max_depth),
        ExactReal::Quadratic(q) => expand_surd(q.a(), q.b(), q.c(), q.d(), max_depth),
        ExactReal::Interval(i) => {
            if i.lo_scaled() == i.hi_scaled() {
                return expand_rational(&i.lo(), max_depth);
            }
            expand_interval(i, max_depth)
        }
    }
}

fn expand_rational(q: &BigRational, max_depth: usize) -> CFExpansion {
    let (mut p, mut d) = (q.numer().clone(), q.denom().clone());
    let a0 = p.div_floor(&d);
    let mut r = &p - &a0 * &d;
    let mut digits = Vec::new();
    let mut finite = true;
    while !r.is_zero() {
        if digits.len() == max_depth {
            finite = false;
            break;
        }
        p = d;
        d = r;
        let a = p.div_floor(&d);
        r = &p - &a * &d;
        digits.push(a);
    }
    CFExpansion {
        a0,
        digits,
        periodic: None,
        exact: true,
        finite,
    }
}

/// Expansion of `(a + b*sqrt(d)) / c` through the integer states `(P, Q)` of
/// `(P + sqrt(D)) / Q`, stopping at the first repeated state.
fn expand_surd(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt, max_depth: usize) -> CFExpansion {
    let s = if b.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let mut pp = a * &s;
    let mut qq = c * &s;
    let mut dd = b * b * d;
    if !(&dd - &pp * &pp).is_multiple_of(&qq) {
        let m = qq.abs();
        pp *= &m;
        dd *= &m * &m;
        qq *= &m;
    }
    let root = dd.sqrt();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut all: Vec<BigInt> = Vec::new();
    let (start, end) = loop {
        if let Some(&j) = seen.get(&(pp.clone(), qq.clone())) {
            break (j, all.len());
        }
        seen.insert((pp.clone(), qq.clone()), all.len());
        let digit = if qq.is_positive() {
            (&pp + &root).div_floor(&qq)
        } else {
            let neg: BigInt = -&qq;
            let f: BigInt = (&pp + &root).div_floor(&neg);
            -(f + BigInt::one())
        };
        let np = &digit * &qq - &pp;
        let nq = (&dd - &np * &np) / &qq;
        all.push(digit);
        pp = np;
        qq = nq;
    };
    let a0 = all.remove(0);
    if start == 0 {
        // the period begins at a0; shift it onto a1
        all.push(a0.clone());
    }
    let pre = start.max(1) - 1;
    let mut cf = CFExpansion {
        a0,
        digits: all,
        periodic: Some((pre, end - start)),
        exact: true,
        finite: false,
    };
    let want = max_depth.max(cf.digits.len());
    cf.digits = (1..=want).map(|k| cf.digit(k).unwrap()).collect();
    cf
}

fn expand_interval(i: &DecimalInterval, max_depth: usize) -> CFExpansion {
    let (mut lo, mut hi) = (i.lo(), i.hi());
    let mut out: Vec<BigInt> = Vec::new();
    loop {
        let fl = lo.floor();
        if hi.floor() != fl || lo == fl {
            break;
        }
        out.push(fl.to_integer());
        if out.len() > max_depth {
            break;
        }
        let (nlo, nhi) = ((&hi - &fl).recip(), (&lo - &fl).recip());
        lo = nlo;
        hi = nhi;
    }
    let exact = out.len() > max_depth;
    if out.is_empty() {
        // not even the integer part is certified
        return CFExpansion {
            a0: i.lo().floor().to_integer(),
            digits: Vec::new(),
            periodic: None,
            exact: false,
            finite: false,
        };
    }
    let a0 = out.remove(0);
    out.truncate(max_depth);
    CFExpansion {
        a0,
        digits: out,
        periodic: None,
        exact,
        finite: false,
    }
}

impl fmt::Display for CFExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = match self.periodic {
            Some((pre, per)) => &self.digits[..pre + per],
            None => &self.digits[..],
        };
        write!(f, "[{}", self.a0)?;
        for (i, d) in shown.iter().enumerate() {
            write!(f, "{}{d}", if i == 0 { "; " } else { ", " })?;
        }
        write!(f, "]")?;
        if let Some((_, per)) = self.periodic {
            write!(f, " (period={per})")?;
        }
        Ok(())
    }
}

impl FromStr for CFExpansion {
    type Err = Error;

    /// Parses `[a0; a1, a2, ...]` with an optional `(period=k)` suffix that
    /// marks the last `k` digits as repeating.
    fn from_str(s: &str) -> Result<CFExpansion> {
        let err = || Error::Parse(s.to_string());
        let s = s.trim();
        let close = s.find(']').ok_or_else(err)?;
        let body = s.strip_prefix('[').ok_or_else(err)?;
        let body = &body[..close - 1];
        let rest = s[close + 1..].trim();
        let (head, tail) = match body.split_once(';') {
            Some((h, t)) => (h, t),
            None => (body, ""),
        };
        let a0 = BigInt::from_str(head.trim()).map_err(|_| err())?;
        let digits = tail
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| BigInt::from_str(t).map_err(|_| err()))
            .collect::<Result<Vec<_>>>()?;
        if digits.iter().any(|d| !d.is_positive()) {
            return Err(err());
        }
        if rest.is_empty() {
            return Ok(CFExpansion::finite(a0, digits));
        }
        let per: usize = rest
            .strip_prefix("(period=")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(err)?;
        if per == 0 || per > digits.len() {
            return Err(err());
        }
        Ok(CFExpansion {
            a0,
            periodic: Some((digits.len() - per, per)),
            digits,
            exact: true,
            finite: false,
        })
    }
}

/// Convergent numerators and denominators `p_k`, `q_k` for `k = -1..=depth`,
/// with `p_{-1} = 1`, `q_{-1} = 0`, `p_0 = a_0`, `q_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentTable<T> {
    p: Vec<T>,
    q: Vec<T>,
}

impl<T: Integer + Clone> ConvergentTable<T> {
    pub fn from_partial_quotients(a0: T, digits: impl IntoIterator<Item = T>) -> Self {
        let mut p = vec![T::one(), a0];
        let mut q = vec![T::zero(), T::one()];
        for a in digits {
            let n = p.len();
            p.push(a.clone() * p[n - 1].clone() + p[n - 2].clone());
            q.push(a * q[n - 1].clone() + q[n - 2].clone());
        }
        ConvergentTable { p, q }
    }

    pub fn depth(&self) -> usize {
        self.p.len() - 2
    }

    /// `p_k` for `-1 <= k <= depth`.
    pub fn p(&self, k: isize) -> &T {
        &self.p[(k + 1) as usize]
    }

    /// `q_k` for `-1 <= k <= depth`.
    pub fn q(&self, k: isize) -> &T {
        &self.q[(k + 1) as usize]
    }

    /// `(k, p_k, q_k)` for `k = 0..=depth`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &T, &T)> {
        self.p[1..]
            .iter()
            .zip(&self.q[1..])
            .enumerate()
            .map(|(k, (p, q))| (k, p, q))
    }
}

/// Convergents of `cf` up to index `depth`.
pub fn convergents(cf: &CFExpansion, depth: usize) -> Result<ConvergentTable<BigInt>> {
    let digits = cf.digits_to(depth)?;
    Ok(ConvergentTable::from_partial_quotients(
        cf.a0.clone(),
        digits,
    ))
}

/// True iff `a_1, ..., a_depth` all lie in `[1, m]`.
pub fn digits_bounded(cf: &CFExpansion, m: &BigInt, depth: usize) -> Result<bool> {
    Ok(cf
        .digits_to(depth)?
        .iter()
        .all(|a| a >= &BigInt::one() && a <= m))
}

/// Bits of working precision for the logarithms behind [`KEstimate`].
const KCONST_BITS: u32 = 48;

/// Depth-bounded enclosure of `max_{1<=t<=depth} ln(q_t) / t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KEstimate {
    pub depth: usize,
    pub c_lower: BigRational,
    pub c_upper: BigRational,
    /// Smallest `t` whose lower bound attains `c_lower`.
    pub argmax_t: usize,
    /// `(t, enclosure of ln(q_t) / t)` for `t = 1..=depth`.
    pub trend: Vec<(usize, Enclosure)>,
}

impl KEstimate {
    /// Enclosure of the running maximum over `t <= d`.
    pub fn running_max(&self, d: usize) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (_, e) in self.trend.iter().take(d) {
            lo = lo.max(e.lo());
            hi = hi.max(e.hi());
        }
        (lo, hi)
    }

    /// Heuristic: the increments of the running maximum over the depth
    /// windows `[D/4, D/2]` and `[D/2, D]` shrink by less than a factor 3/4.
    /// Geometric growth of `q_t` halves them; super-exponential growth keeps
    /// them roughly constant.
    pub fn divergence_suspected(&self) -> bool {
        let d = self.depth;
        if d < 8 {
            return false;
        }
        let (v1, _) = self.running_max(d / 4);
        let (v2, _) = self.running_max(d / 2);
        let (v3, _) = self.running_max(d);
        let first = &v2 - &v1;
        let second = &v3 - &v2;
        if first <= BigRational::zero() {
            return second > BigRational::zero();
        }
        second * BigRational::from_integer(4.into()) > first * BigRational::from_integer(3.into())
    }
}

/// Estimates the growth constant `sup_t ln(q_t) / t` up to `depth`.
pub fn k_constant(x: &ExactReal, depth: usize) -> Result<KEstimate> {
    if matches!(x, ExactReal::Rational(_)) {
        return Err(Error::InputNotIrrational);
    }
    if let ExactReal::Interval(i) = x {
        if i.lo_scaled() == i.hi_scaled() {
            return Err(Error::InputNotIrrational);
        }
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let cf = expand(x, depth)?;
    let table = convergents(&cf, depth)?;
    Ok(k_estimate_from(&table))
}

pub(crate) fn k_estimate_from(table: &ConvergentTable<BigInt>) -> KEstimate {
    let depth = table.depth();
    let mut trend = Vec::with_capacity(depth);
    for t in 1..=depth {
        let q = BigRational::from_integer(table.q(t as isize).clone());
        let e = ln_rational(&q, KCONST_BITS + 8)
            .scale_rational(&BigRational::new(BigInt::one(), BigInt::from(t)))
            .at(KCONST_BITS);
        trend.push((t, e));
    }
    let mut c_lower = BigRational::zero();
    let mut c_upper = BigRational::zero();
    let mut argmax_t = 1;
    for (t, e) in &trend {
        if e.lo() > c_lower {
            c_lower = e.lo();
            argmax_t = *t;
        }
        c_upper = c_upper.max(e.hi());
    }
    KEstimate {
        depth,
        c_lower,
        c_upper,
        argmax_t,
        trend,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bis(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rational_expansions_are_canonical() {
        let cf = expand(&"7/3".parse().unwrap(), 10).unwrap();
        assert_eq!(cf.to_string(), "[2; 3]");
        let cf = expand(&"-7/3".parse().unwrap(), 10).unwrap();
        assert_eq!(cf.to_string(), "[-3; 1, 2]");
        let cf = expand(&"5".parse().unwrap(), 10).unwrap();
        assert_eq!(cf.to_string(), "[5]");
        assert!(cf.finite);
    }

    #[test]
    fn surd_periods() {
        let s2 = expand(&ExactReal::sqrt_of(2).unwrap(), 5).unwrap();
        assert_eq!(s2.to_string(), "[1; 2] (period=1)");
        assert_eq!(s2.digits, bis(&[2, 2, 2, 2, 2]));
        let phi = expand(&ExactReal::golden_ratio(), 3).unwrap();
        assert_eq!(phi.to_string(), "[1; 1] (period=1)");
        let s7 = expand(&ExactReal::sqrt_of(7).unwrap(), 8).unwrap();
        assert_eq!(s7.to_string(), "[2; 1, 1, 1, 4] (period=4)");
        // 1 + sqrt 2 has its period starting at a0
        let t = expand(&ExactReal::quadratic(1, 1, 1, 2).unwrap(), 3).unwrap();
        assert_eq!(t.to_string(), "[2; 2] (period=1)");
        // negative surd
        let n = expand(&ExactReal::quadratic(1, -1, 2, 5).unwrap(), 3).unwrap();
        assert_eq!(n.a0, BigInt::from(-1));
        assert_eq!(
            n.value().unwrap(),
            ExactReal::quadratic(1, -1, 2, 5).unwrap()
        );
    }

    #[test]
    fn periodic_values_round_trip() {
        for s in [
            "[0; 3, 1, 2] (period=3)",
            "[1; 2] (period=1)",
            "[4; 7, 1, 3, 5] (period=2)",
        ] {
            let cf: CFExpansion = s.parse().unwrap();
            let v = cf.value().unwrap();
            let back = expand(&v, 6).unwrap();
            assert_eq!(back.to_string(), s);
        }
        let cf: CFExpansion = "[2; 3]".parse().unwrap();
        assert_eq!(cf.value().unwrap(), "7/3".parse().unwrap());
    }

    #[test]
    fn convergent_tables() {
        let phi = expand(&ExactReal::golden_ratio(), 6).unwrap();
        let t = convergents(&phi, 6).unwrap();
        let q: Vec<_> = t.rows().map(|(_, _, q)| q.clone()).collect();
        assert_eq!(q, bis(&[1, 1, 2, 3, 5, 8, 13]));
        let s2 = expand(&ExactReal::sqrt_of(2).unwrap(), 6).unwrap();
        let t = convergents(&s2, 6).unwrap();
        let p: Vec<_> = t.rows().map(|(_, p, _)| p.clone()).collect();
        let q: Vec<_> = t.rows().map(|(_, _, q)| q.clone()).collect();
        assert_eq!(p, bis(&[1, 3, 7, 17, 41, 99, 239]));
        assert_eq!(q, bis(&[1, 2, 5, 12, 29, 70, 169]));
        let t0 = convergents(&s2, 0).unwrap();
        assert_eq!(t0.rows().count(), 1);
        assert_eq!((t0.p(0), t0.q(0)), (&BigInt::from(1), &BigInt::from(1)));
        let fin = expand(&"7/3".parse().unwrap(), 10).unwrap();
        assert_eq!(
            convergents(&fin, 2),
            Err(Error::DepthExceedsDigits {
                requested: 2,
                available: 1
            })
        );
    }

    #[test]
    fn small_integer_tables() {
        let t = ConvergentTable::<u64>::from_partial_quotients(0, [1u64, 1, 1, 1]);
        assert_eq!(*t.q(-1), 0);
        assert_eq!(*t.q(4), 5);
        assert_eq!(*t.p(4), 3);
    }

    #[test]
    fn interval_expansion_stops_when_uncertain() {
        let x: ExactReal = "interval(14142135,14142136,7)".parse().unwrap();
        let cf = expand_certified(&x, 50);
        assert!(!cf.exact);
        assert!(cf.digits.len() >= 5 && cf.digits.len() < 50);
        assert!(cf.digits.iter().all(|d| d == &BigInt::from(2)));
        assert!(matches!(
            expand(&x, 50),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn bounded_digits() {
        let phi = expand(&ExactReal::golden_ratio(), 40).unwrap();
        assert!(digits_bounded(&phi, &BigInt::one(), 40).unwrap());
        let s2 = expand(&ExactReal::sqrt_of(2).unwrap(), 4).unwrap();
        assert!(!digits_bounded(&s2, &BigInt::one(), 4).unwrap());
    }

    #[test]
    fn golden_ratio_constant() {
        let k = k_constant(&ExactReal::golden_ratio(), 50).unwrap();
        assert!(&k.c_upper - &k.c_lower <= BigRational::new(1.into(), 1_000_000.into()));
        assert_eq!(k.argmax_t, 50);
        // ln(phi) = 0.48121...
        assert!(k.c_upper < BigRational::new(48121.into(), 100_000.into()));
        assert!(!k.divergence_suspected());
        assert_eq!(
            k_constant(&"1/3".parse().unwrap(), 5),
            Err(Error::InputNotIrrational)
        );
    }
}
