//! The shifted lacunary sequence `n_t = q_{st} + b_t` with
//! `||n_t alpha - gamma|| <= 8 / n_t`, and an independent verifier.

use crate::cf::{convergents, expand, k_estimate_from, KEstimate};
use crate::error::{Error, Result};
use crate::exact::{
    compare, render_exact, Comparison, ExactReal, Expr, Threshold, DEFAULT_PRECISION_DIGITS,
};
use crate::inhom::{
    find_with, ostrowski_with, shift_distance, CertificateRecord, ShiftCertificate,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

/// Index spacing between consecutive terms; `n_t` is built on `q_{6t}`.
pub const DEFAULT_SPACING: usize = 6;

/// Outcome of the four per-entry inequalities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryChecks {
    /// `8^t < n_t`.
    pub above_power_of_eight: bool,
    /// `n_t <= 4 q_{st}`.
    pub below_four_q: bool,
    /// `||n_t alpha - gamma|| <= 8 / n_t`.
    pub distance: bool,
    /// `n_{t+1} >= 2 n_t`; `None` for the last entry.
    pub lacunary: Option<bool>,
}

impl EntryChecks {
    pub fn all(&self) -> bool {
        self.above_power_of_eight
            && self.below_four_q
            && self.distance
            && self.lacunary != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub t: usize,
    pub n_t: BigInt,
    pub b_t: BigInt,
    pub q_st: BigInt,
    /// `||n_t alpha - gamma||`.
    pub distance: ExactReal,
    pub certificate: ShiftCertificate,
    pub checks: EntryChecks,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedLacunarySequence {
    pub alpha: ExactReal,
    pub gamma: ExactReal,
    pub spacing: usize,
    pub entries: Vec<Entry>,
    /// Growth constant estimated to depth `spacing * T`.
    pub c_estimate: Option<KEstimate>,
}

/// Builds `T` terms with the default spacing.
pub fn build(
    alpha: &ExactReal,
    gamma: &ExactReal,
    t_max: usize,
) -> Result<ShiftedLacunarySequence> {
    build_with_spacing(alpha, gamma, t_max, DEFAULT_SPACING)
}

pub fn build_with_spacing(
    alpha: &ExactReal,
    gamma: &ExactReal,
    t_max: usize,
    spacing: usize,
) -> Result<ShiftedLacunarySequence> {
    if !matches!(alpha, ExactReal::Quadratic(_)) {
        return Err(Error::NotQuadratic);
    }
    if !gamma.is_exact() {
        return Err(Error::NotQuadratic);
    }
    if spacing == 0 {
        return Err(Error::InvalidArgument("spacing must be positive".into()));
    }
    ExactReal::unify(alpha, gamma)?;
    if t_max == 0 {
        return Ok(ShiftedLacunarySequence {
            alpha: alpha.clone(),
            gamma: gamma.clone(),
            spacing,
            entries: Vec::new(),
            c_estimate: None,
        });
    }
    let depth = spacing * t_max;
    let cf = expand(alpha, depth + 1)?;
    let table = convergents(&cf, depth + 1)?;
    // greedy digits do not depend on the depth, so one expansion serves every t
    let ost = ostrowski_with(gamma, alpha, &table, depth);
    let certs: Vec<Result<ShiftCertificate>> = (1..=t_max)
        .into_par_iter()
        .map(|t| find_with(alpha, gamma, &table, &ost, spacing * t))
        .collect();
    let mut entries = Vec::with_capacity(t_max);
    for (i, cert) in certs.into_iter().enumerate() {
        let t = i + 1;
        let cert = cert?;
        let q_st = table.q((spacing * t) as isize).clone();
        let n_t = &q_st + &cert.b;
        let distance = shift_distance(&n_t, alpha, gamma)?;
        let checks = entry_checks(t, &n_t, &q_st, &distance)?;
        entries.push(Entry {
            t,
            b_t: cert.b.clone(),
            n_t,
            q_st,
            distance,
            certificate: cert,
            checks,
        });
    }
    for i in 0..entries.len().saturating_sub(1) {
        let ok = entries[i + 1].n_t >= &entries[i].n_t * 2;
        entries[i].checks.lacunary = Some(ok);
    }
    let k_table = convergents(&cf, depth)?;
    Ok(ShiftedLacunarySequence {
        alpha: alpha.clone(),
        gamma: gamma.clone(),
        spacing,
        entries,
        c_estimate: Some(k_estimate_from(&k_table)),
    })
}

fn entry_checks(
    t: usize,
    n_t: &BigInt,
    q_st: &BigInt,
    distance: &ExactReal,
) -> Result<EntryChecks> {
    let eight_n = ExactReal::Rational(BigRational::new(BigInt::from(8), n_t.clone()));
    Ok(EntryChecks {
        above_power_of_eight: &BigInt::from(8).pow(t as u32) < n_t,
        below_four_q: n_t <= &(q_st * 4),
        distance: distance.cmp_exact(&eight_n)? != Ordering::Greater,
        lacunary: None,
    })
}

/// One re-derived inequality of a [`VerifyReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub t: usize,
    pub check: &'static str,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub lines: Vec<CheckLine>,
    /// Decimal enclosure `[lower, upper]` of the growth constant used.
    pub c_lower: String,
    pub c_upper: String,
    /// Every `ln(n_t)/t` lies in `[ln 8, ln 4 + 6 C_upper]`, so the growth
    /// bound also holds for every larger constant.
    pub growth_holds_for_larger_c: bool,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| !l.passed)
    }
}

/// Re-derives every inequality of `seq` from `alpha`, `gamma` and the stored
/// integers, without trusting stored distances or check flags.
pub fn verify(seq: &ShiftedLacunarySequence) -> VerifyReport {
    let mut lines = Vec::new();
    let mut push =
        |t: usize, check: &'static str, passed: bool| lines.push(CheckLine { t, check, passed });
    let s = seq.spacing.max(1);
    let depth = s * seq.entries.len().max(1);
    // denominators by the bare recurrence on freshly expanded digits
    let qs: Option<Vec<BigInt>> = expand(&seq.alpha, depth).ok().map(|cf| {
        let mut q = vec![BigInt::from(0), BigInt::one()];
        for k in 1..=depth {
            let a = cf.digit(k).expect("periodic digits");
            let next = a * &q[k] + &q[k - 1];
            q.push(next);
        }
        q
    });
    let (c_lower, c_upper) = match &seq.c_estimate {
        Some(k) => (k.c_lower.clone(), k.c_upper.clone()),
        None => (
            BigRational::from_integer(0.into()),
            BigRational::from_integer(0.into()),
        ),
    };
    let mut ratio_ok = true;
    for (i, e) in seq.entries.iter().enumerate() {
        let t = e.t;
        push(t, "index", t == i + 1);
        let q = qs.as_ref().and_then(|q| q.get(s * t + 1));
        push(t, "q_st", q == Some(&e.q_st));
        push(t, "n_t = q_st + b_t", e.n_t == &e.q_st + &e.b_t);
        let m = q
            .zip(qs.as_ref().and_then(|q| q.get(s * t)))
            .map(|(a, b)| a * 2 + b - 1);
        push(
            t,
            "1 <= b_t <= m",
            e.b_t.is_positive() && m.is_some_and(|m| e.b_t <= m),
        );
        let lower = BigInt::from(8).pow(t as u32) < e.n_t;
        push(t, "8^t < n_t", lower);
        push(t, "n_t <= 4 q_st", e.n_t <= &e.q_st * 4);
        let d = shift_distance(&e.n_t, &seq.alpha, &seq.gamma);
        let d_ok = d.as_ref().map(|d| d == &e.distance).unwrap_or(false);
        push(t, "stored distance", d_ok);
        let bound_ok = d
            .and_then(|d| {
                d.cmp_exact(&ExactReal::Rational(BigRational::new(
                    8.into(),
                    e.n_t.clone(),
                )))
            })
            .map(|o| o != Ordering::Greater)
            .unwrap_or(false);
        push(t, "||n_t alpha - gamma|| <= 8/n_t", bound_ok);
        // n_t <= 4 exp(s C_upper t) with s the spacing
        let growth = Threshold::Derived(
            Expr::int(4)
                .mul(Expr::Const(&c_upper * BigRational::from_integer(BigInt::from(s * t))).exp()),
        );
        let g = compare(
            &ExactReal::from(e.n_t.clone()),
            &growth,
            DEFAULT_PRECISION_DIGITS,
        );
        let g_ok = matches!(g, Comparison::Less | Comparison::Equal);
        push(t, "n_t <= 4 exp(s C t)", g_ok);
        ratio_ok &= lower && g_ok;
        if let Some(next) = seq.entries.get(i + 1) {
            push(t, "n_{t+1} >= 2 n_t", next.n_t >= &e.n_t * 2);
        }
    }
    VerifyReport {
        lines,
        c_lower: render_exact(&ExactReal::Rational(c_lower)),
        c_upper: render_exact(&ExactReal::Rational(c_upper)),
        growth_holds_for_larger_c: ratio_ok,
    }
}

/// CSV/JSON row of a sequence entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryRecord {
    pub t: usize,
    pub n_t: String,
    pub b_t: String,
    pub q6t: String,
    pub distance_decimal: String,
    pub distance_exact: String,
    pub checks_passed: bool,
    pub checks: EntryChecks,
    pub certificate: CertificateRecord,
}

impl Entry {
    pub fn record(&self) -> EntryRecord {
        EntryRecord {
            t: self.t,
            n_t: self.n_t.to_string(),
            b_t: self.b_t.to_string(),
            q6t: self.q_st.to_string(),
            distance_decimal: render_exact(&self.distance),
            distance_exact: self.distance.to_string(),
            checks_passed: self.checks.all(),
            checks: self.checks.clone(),
            certificate: self.certificate.record(),
        }
    }
}

impl ShiftedLacunarySequence {
    /// `(ln n_t) / t` rendered to 40 digits, for the `log n_t ~ t` profile.
    pub fn log_ratios(&self) -> Vec<(usize, String)> {
        self.entries
            .iter()
            .map(|e| {
                let r = crate::exact::render_refined(
                    |bits| {
                        Expr::Const(BigRational::from_integer(e.n_t.clone()))
                            .ln()
                            .div(Expr::int(e.t as u64))
                            .eval(bits)
                    },
                    1024,
                );
                (e.t, r)
            })
            .collect()
    }

    pub fn n_values(&self) -> Vec<u64> {
        self.entries.iter().filter_map(|e| e.n_t.to_u64()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_first_term() {
        let seq = build(&ExactReal::golden_ratio(), &ExactReal::zero(), 1).unwrap();
        let e = &seq.entries[0];
        assert_eq!(
            (e.q_st.clone(), e.b_t.clone(), e.n_t.clone()),
            (13.into(), 8.into(), 21.into())
        );
        assert!(e.checks.all());
        assert!(render_exact(&e.distance).starts_with("2.1286"));
    }

    #[test]
    fn empty_sequence() {
        let seq = build(&ExactReal::golden_ratio(), &ExactReal::zero(), 0).unwrap();
        assert!(seq.entries.is_empty());
        assert!(verify(&seq).all_passed());
    }

    #[test]
    fn verify_accepts_and_detects_tampering() {
        let seq = build(&ExactReal::golden_ratio(), &ExactReal::zero(), 5).unwrap();
        let rep = verify(&seq);
        assert!(rep.all_passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(rep.growth_holds_for_larger_c);

        let mut halved = seq.clone();
        halved.entries[1].n_t = &halved.entries[1].n_t / 2;
        assert!(verify(&halved).failures().any(|l| l.t == 2));

        let mut wrong = seq.clone();
        wrong.entries[2].distance = ExactReal::rational(1, 1000);
        let rep = verify(&wrong);
        assert!(rep
            .failures()
            .any(|l| l.t == 3 && l.check == "stored distance"));
    }
}
