use super::{compare_lhs, psi_uniform, render_threshold, HitRecord, Lhs, Strictness};
use crate::error::{Error, Result};
use crate::exact::{compare, ln_rational, render_exact, ExactReal, Expr, Threshold};
use crate::inhom::shift_distance;
use crate::lacunary::ShiftedLacunarySequence;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TkResult {
    /// `(k, T_k)`, with `None` when no `T <= TCap` has exactly `k` hits.
    pub values: Vec<(usize, Option<u64>)>,
    /// Hit count at every `T` in `1..=TCap`.
    pub counts: Vec<u64>,
    /// `(T, t)` pairs undecided at the precision cap, counted as hits.
    pub borderline: Vec<(u64, usize)>,
}

impl TkResult {
    pub fn not_found(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| *k)
    }
}

/// `T_k = min { T : #{ t <= T : ||n_t beta - delta|| < psi(T) } = k }` for
/// `k = 1..=k_max`, searching `T <= t_cap`.
#[allow(clippy::too_many_arguments)]
pub fn tk_sequence(
    beta: &ExactReal,
    delta: &ExactReal,
    seq: &ShiftedLacunarySequence,
    b: &BigRational,
    eps: &BigRational,
    k_max: usize,
    t_cap: u64,
    cap_digits: u32,
) -> Result<TkResult> {
    if (seq.entries.len() as u64) < t_cap {
        return Err(Error::InvalidArgument(format!(
            "TCap = {t_cap} exceeds the {} sequence terms",
            seq.entries.len()
        )));
    }
    let dists = seq.entries[..t_cap as usize]
        .iter()
        .map(|e| shift_distance(&e.n_t, beta, delta))
        .collect::<Result<Vec<_>>>()?;
    let mut counts = Vec::with_capacity(t_cap as usize);
    let mut borderline = Vec::new();
    for t_big in 1..=t_cap {
        let psi = psi_uniform(t_big, b, eps)?;
        let mut count = 0;
        for (i, d) in dists[..t_big as usize].iter().enumerate() {
            let (hit, border) =
                HitRecord::classify(compare(d, &psi, cap_digits), Strictness::Strict);
            if hit {
                count += 1;
            }
            if border {
                borderline.push((t_big, i + 1));
            }
        }
        counts.push(count);
    }
    let values = (1..=k_max)
        .map(|k| {
            let at = counts
                .iter()
                .position(|&c| c == k as u64)
                .map(|i| i as u64 + 1);
            (k, at)
        })
        .collect();
    Ok(TkResult {
        values,
        counts,
        borderline,
    })
}

fn seven_rhs(n: &BigInt, eps: &BigRational) -> Threshold {
    let half = BigRational::new(1.into(), 2.into());
    let ln_n = Expr::Const(BigRational::from_integer(n.clone())).ln();
    Threshold::Derived(ln_n.clone().ln().ln().pow(eps + half).div(ln_n.sqrt()))
}

/// Evaluates `n ||n alpha - gamma|| ||n beta - delta|| < (ln ln ln n)^{eps+1/2} / (ln n)^{1/2}`.
pub fn check_seven(
    n: &BigInt,
    alpha: &ExactReal,
    gamma: &ExactReal,
    beta: &ExactReal,
    delta: &ExactReal,
    eps: &BigRational,
    cap_digits: u32,
) -> Result<HitRecord> {
    if n < &BigInt::from(16) {
        return Err(Error::DomainTooSmall(n.to_string()));
    }
    if eps <= &BigRational::zero() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let x = shift_distance(n, alpha, gamma)?;
    let y = shift_distance(n, beta, delta)?;
    let lhs = Lhs::product(n, &x, &y);
    let rhs = seven_rhs(n, eps);
    let (hit, borderline) =
        HitRecord::classify(compare_lhs(&lhs, &rhs, cap_digits), Strictness::Strict);
    Ok(HitRecord {
        index: n.to_string(),
        lhs: lhs.render(),
        threshold: render_threshold(&rhs, cap_digits),
        hit,
        borderline,
    })
}

/// A sufficient `B*` and the first index `T0` from which the chain holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BChoice {
    pub b_star: String,
    pub t0: u64,
    /// Upper end of the growth-constant enclosure used.
    pub c_upper: String,
}

impl BChoice {
    pub fn b(&self) -> BigRational {
        BigRational::from_integer(self.b_star.parse().expect("integer"))
    }
}

/// `B* = ceil(8 sqrt((s+1) C_upper))` and `T0 = max(3, ceil(ln 4 / C_upper))`
/// for index spacing `s`.
///
/// For `t >= T0`, `ln n_t <= ln 4 + s C t <= (s+1) C t`, and with
/// `n_t ||n_t alpha - gamma|| <= 8` a hit `||n_t beta - delta|| < psi(t)`
/// forces the inequality of [`check_seven`] at `n_t`, since `ln t <= ln ln n_t`.
/// The constant does not depend on `eps`.
pub fn choose_b(seq: &ShiftedLacunarySequence, _eps: &BigRational) -> Result<BChoice> {
    let k = seq
        .c_estimate
        .as_ref()
        .filter(|_| !seq.entries.is_empty())
        .ok_or_else(|| Error::InvalidArgument("choose_B needs a nonempty sequence".into()))?;
    let c = &k.c_upper;
    if c <= &BigRational::zero() {
        return Err(Error::InvalidArgument(
            "growth constant must be positive".into(),
        ));
    }
    let factor = BigRational::from_integer(BigInt::from(64 * (seq.spacing as u64 + 1)));
    let v = (factor * c).ceil().to_integer();
    let mut b = v.sqrt();
    if &b * &b < v {
        b += 1;
    }
    let ln4 = ln_rational(&BigRational::from_integer(4.into()), 64).hi();
    let t0 = (ln4 / c)
        .ceil()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX)
        .max(3);
    Ok(BChoice {
        b_star: b.to_string(),
        t0,
        c_upper: render_exact(&ExactReal::Rational(c.clone())),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainInstance {
    pub t: usize,
    pub n_t: String,
    pub seven: HitRecord,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub choice: BChoice,
    /// Indices `t >= T0` with `||n_t beta - delta|| < psi(t)`.
    pub instances: Vec<ChainInstance>,
}

impl ChainReport {
    pub fn all_passed(&self) -> bool {
        self.instances.iter().all(|i| i.passed)
    }
}

/// Checks the uniform-rate chain on every realized hit with `t >= T0`.
pub fn verify_chain(
    seq: &ShiftedLacunarySequence,
    beta: &ExactReal,
    delta: &ExactReal,
    choice: &BChoice,
    eps: &BigRational,
    cap_digits: u32,
) -> Result<ChainReport> {
    let b = choice.b();
    let mut instances = Vec::new();
    for e in &seq.entries {
        if (e.t as u64) < choice.t0 {
            continue;
        }
        let d = shift_distance(&e.n_t, beta, delta)?;
        let psi = psi_uniform(e.t as u64, &b, eps)?;
        let (realized, _) = HitRecord::classify(compare(&d, &psi, cap_digits), Strictness::Strict);
        if !realized {
            continue;
        }
        let seven = check_seven(&e.n_t, &seq.alpha, &seq.gamma, beta, delta, eps, cap_digits)?;
        instances.push(ChainInstance {
            t: e.t,
            n_t: e.n_t.to_string(),
            passed: seven.hit && !seven.borderline,
            seven,
        });
    }
    Ok(ChainReport {
        choice: choice.clone(),
        instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lacunary::build;

    #[test]
    fn seven_needs_sixteen() {
        let a = ExactReal::sqrt_of(2).unwrap();
        let z = ExactReal::zero();
        let eps = BigRational::new(1.into(), 2.into());
        assert_eq!(
            check_seven(&BigInt::from(15), &a, &z, &a, &z, &eps, 50),
            Err(Error::DomainTooSmall("15".into()))
        );
        let r = check_seven(&BigInt::from(16), &a, &z, &a, &z, &eps, 50).unwrap();
        assert!(!r.borderline);
    }

    #[test]
    fn b_star_for_root_two() {
        let seq = build(&ExactReal::sqrt_of(2).unwrap(), &ExactReal::zero(), 3).unwrap();
        let c = choose_b(&seq, &BigRational::new(1.into(), 2.into())).unwrap();
        // C_upper = ln(q_18) / 18 < ln(1 + sqrt 2)
        assert_eq!(c.b_star, "20");
        assert_eq!(c.t0, 3);
    }
}
