//! Counting experiments around the lacunary sequence: approximation
//! thresholds, hit counts, the uniform-rate chain, digit-bounded samples,
//! badness profiles and an empirical Fourier probe.

mod counting;
mod fourier;
mod sampling;
mod uniform;

pub use counting::{
    badness_profile, count_shift_hits, littlewood_count, littlewood_record, BadnessProfile,
    LittlewoodCount, ShiftHits, DEFAULT_MAX_N,
};
pub use fourier::{
    fourier_surrogate, FourierConfig, FourierEstimate, FourierPoint, FourierRun, FOURIER_BLOCK,
};
pub use sampling::{sample_fm, task_rng, DigitWeights, FMSample, RNG_ALGORITHM};
pub use uniform::{
    check_seven, choose_b, tk_sequence, verify_chain, BChoice, ChainInstance, ChainReport, TkResult,
};

use crate::error::{Error, Result};
use crate::exact::{compare, render_exact, render_refined, Comparison, ExactReal, Expr, Threshold};
use crate::lacunary::ShiftedLacunarySequence;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// Whether a hit needs `lhs <= threshold` or `lhs < threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    NonStrict,
    Strict,
}

/// One evaluated inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HitRecord {
    pub index: String,
    /// Left side, 40 significant digits.
    pub lhs: String,
    /// Threshold, 40 significant digits.
    pub threshold: String,
    pub hit: bool,
    /// Undecided at the precision cap; counted as a hit.
    pub borderline: bool,
}

impl HitRecord {
    pub(crate) fn classify(c: Comparison, strictness: Strictness) -> (bool, bool) {
        let hit = matches!(
            (c, strictness),
            (Comparison::Less | Comparison::Undecided, _)
                | (Comparison::Equal, Strictness::NonStrict)
        );
        (hit, c == Comparison::Undecided)
    }
}

/// Hit count at one checkpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountPoint {
    pub checkpoint: String,
    pub count: u64,
    /// Asymptotic prediction, where one exists; never a pass/fail criterion.
    pub predicted: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountSeries {
    pub points: Vec<CountPoint>,
}

impl CountSeries {
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[0].count <= w[1].count)
    }
}

/// Decimal rendering of a threshold, refined up to the precision cap.
pub(crate) fn render_threshold(t: &Threshold, cap_digits: u32) -> String {
    match t {
        Threshold::Exact(q) => render_exact(&ExactReal::Rational(q.clone())),
        Threshold::Derived(_) => render_refined(
            |b| t.enclose(b),
            crate::exact::cap_bits(cap_digits).max(160),
        ),
    }
}

/// `psi(n) = 1 / (8 ln n)`, with `psi(1) = 0`.
pub fn psi_log(n: &BigInt) -> Result<Threshold> {
    if n < &BigInt::one() {
        return Err(Error::InvalidArgument(format!(
            "psi(n) needs n >= 1, got {n}"
        )));
    }
    if n.is_one() {
        return Ok(Threshold::zero());
    }
    Ok(Threshold::Derived(psi_log_expr(n)))
}

fn psi_log_expr(n: &BigInt) -> Expr {
    Expr::int(1).div(Expr::int(8).mul(Expr::Const(BigRational::from_integer(n.clone())).ln()))
}

/// `Psi(T) = sum_{t <= T} psi(n_t)` over the sequence terms.
pub fn psi_capital(seq: &ShiftedLacunarySequence, t: usize) -> Result<Threshold> {
    if t > seq.entries.len() {
        return Err(Error::InvalidArgument(format!(
            "Psi({t}) needs {t} terms, the sequence has {}",
            seq.entries.len()
        )));
    }
    let terms: Vec<Expr> = seq.entries[..t]
        .iter()
        .filter(|e| !e.n_t.is_one())
        .map(|e| psi_log_expr(&e.n_t))
        .collect();
    Ok(match terms.into_iter().reduce(Expr::add) {
        None => Threshold::zero(),
        Some(e) => Threshold::Derived(e),
    })
}

/// `psi(T) = B^{-1} T^{-1/2} (ln ln T)^{eps + 1/2}`, with `psi(1) = psi(2) = 0`.
pub fn psi_uniform(t: u64, b: &BigRational, eps: &BigRational) -> Result<Threshold> {
    if t == 0 || b <= &BigRational::zero() || eps <= &BigRational::zero() {
        return Err(Error::InvalidArgument(
            "psi_uniform needs T >= 1, B > 0, eps > 0".into(),
        ));
    }
    if t <= 2 {
        return Ok(Threshold::zero());
    }
    let half = BigRational::new(1.into(), 2.into());
    Ok(Threshold::Derived(
        Expr::Const(b.recip())
            .div(Expr::int(t).sqrt())
            .mul(Expr::int(t).ln().ln().pow(eps + half)),
    ))
}

/// Rigorous comparison of an exact or interval-valued left side.
pub(crate) fn compare_lhs(lhs: &Lhs, thr: &Threshold, cap_digits: u32) -> Comparison {
    match lhs {
        Lhs::Exact(x) => compare(x, thr, cap_digits),
        Lhs::Expr(e) => crate::exact::compare_by(|b| e.eval(b), |b| thr.enclose(b), cap_digits),
    }
}

/// A left side that is exact when the factors share a field.
pub(crate) enum Lhs {
    Exact(ExactReal),
    Expr(Expr),
}

impl Lhs {
    /// `n * x * y`, exactly when possible.
    pub fn product(n: &BigInt, x: &ExactReal, y: &ExactReal) -> Lhs {
        match x.mul(y) {
            Ok(p) => Lhs::Exact(p.scale_int(n)),
            Err(_) => Lhs::Expr(
                Expr::Const(BigRational::from_integer(n.clone()))
                    .mul(Expr::Real(x.clone()))
                    .mul(Expr::Real(y.clone())),
            ),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Lhs::Exact(x) => render_exact(x),
            Lhs::Expr(e) => render_refined(|b| e.eval(b), 2048),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn psi_values() {
        assert!(psi_log(&BigInt::one()).unwrap().is_zero());
        let p2 = psi_log(&BigInt::from(2)).unwrap();
        assert!(render_threshold(&p2, 100).starts_with("1.8033688"));
        assert!(psi_uniform(2, &rat(1, 1), &rat(1, 2)).unwrap().is_zero());
        let u3 = psi_uniform(3, &rat(1, 1), &rat(1, 2)).unwrap();
        // 3^{-1/2} ln ln 3 = 0.0542985...
        let r = render_threshold(&u3, 100);
        assert!(r.starts_with("5.42985"), "{r}");
    }

    #[test]
    fn doubling_b_halves_psi() {
        let a = psi_uniform(10, &rat(1, 1), &rat(1, 3)).unwrap();
        let b = psi_uniform(10, &rat(2, 1), &rat(1, 3)).unwrap();
        let (Threshold::Derived(ea), Threshold::Derived(eb)) = (a, b) else {
            panic!()
        };
        let twice = Expr::int(2).mul(eb);
        assert_eq!(
            crate::exact::compare_expr(&ea, &twice, 60),
            Comparison::Undecided
        );
    }
}
