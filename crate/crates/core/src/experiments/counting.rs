use super::{
    compare_lhs, psi_capital, psi_log, render_threshold, CountPoint, CountSeries, HitRecord, Lhs,
    Strictness,
};
use crate::error::{Error, Result};
use crate::exact::{compare, render_exact, render_refined, Comparison, ExactReal, Expr, Threshold};
use crate::fixed::{ShiftFixed, ULP};
use crate::inhom::shift_distance;
use crate::lacunary::ShiftedLacunarySequence;
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

/// Default cap on the counting range.
pub const DEFAULT_MAX_N: u64 = 100_000_000;

/// Indices per parallel work unit; fixed so results never depend on the
/// thread count.
const BLOCK: u64 = 1 << 16;

/// Relative safety margin of the floating-point pre-screen.
const MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftHits {
    pub series: CountSeries,
    pub records: Vec<HitRecord>,
    /// `(t, passed)`: every hit also satisfies
    /// `n_t ||n_t alpha - gamma|| ||n_t beta - delta|| <= 1 / ln n_t`.
    pub implication: Vec<(usize, bool)>,
}

/// Counts `t <= T` with `||n_t beta - delta|| <= psi(n_t)`.
pub fn count_shift_hits(
    beta: &ExactReal,
    delta: &ExactReal,
    seq: &ShiftedLacunarySequence,
    t_max: usize,
    checkpoints: &[usize],
    cap_digits: u32,
) -> Result<ShiftHits> {
    if t_max > seq.entries.len() {
        return Err(Error::InvalidArgument(format!(
            "T = {t_max} exceeds the {} sequence terms",
            seq.entries.len()
        )));
    }
    let given: Vec<u64> = checkpoints.iter().map(|&c| c as u64).collect();
    let checkpoints = normalize_checkpoints(&given, 0, t_max as u64, || {
        if t_max == 0 {
            vec![0]
        } else {
            (1..=t_max as u64).collect()
        }
    })?;
    let mut records = Vec::with_capacity(t_max);
    let mut implication = Vec::new();
    let mut hit_flags = Vec::with_capacity(t_max);
    for e in &seq.entries[..t_max] {
        let d = shift_distance(&e.n_t, beta, delta)?;
        let thr = psi_log(&e.n_t)?;
        let (hit, borderline) =
            HitRecord::classify(compare(&d, &thr, cap_digits), Strictness::NonStrict);
        if hit {
            let lhs = Lhs::product(&e.n_t, &e.distance, &d);
            let c = compare_lhs(&lhs, &inv_ln(&e.n_t), cap_digits);
            implication.push((e.t, c != Comparison::Greater));
        }
        hit_flags.push(hit);
        records.push(HitRecord {
            index: e.t.to_string(),
            lhs: render_exact(&d),
            threshold: render_threshold(&thr, cap_digits),
            hit,
            borderline,
        });
    }
    let mut points = Vec::with_capacity(checkpoints.len());
    for cp in checkpoints {
        let cp = cp as usize;
        let count = hit_flags[..cp].iter().filter(|h| **h).count() as u64;
        let psi = psi_capital(seq, cp)?;
        let predicted = match psi {
            Threshold::Exact(q) => render_exact(&ExactReal::Rational(
                q * BigRational::from_integer(2.into()),
            )),
            Threshold::Derived(e) => {
                let twice = Expr::int(2).mul(e);
                render_refined(|b| twice.eval(b), 1024)
            }
        };
        points.push(CountPoint {
            checkpoint: cp.to_string(),
            count,
            predicted: Some(predicted),
        });
    }
    Ok(ShiftHits {
        series: CountSeries { points },
        records,
        implication,
    })
}

fn inv_ln(n: &BigInt) -> Threshold {
    Threshold::Derived(Expr::int(1).div(Expr::Const(BigRational::from_integer(n.clone())).ln()))
}

fn normalize_checkpoints(
    given: &[u64],
    lo: u64,
    hi: u64,
    default: impl FnOnce() -> Vec<u64>,
) -> Result<Vec<u64>> {
    let mut cps = given.to_vec();
    if cps.is_empty() {
        cps = default();
    }
    cps.sort_unstable();
    cps.dedup();
    if let Some(bad) = cps.iter().find(|&&c| c < lo || c > hi) {
        return Err(Error::InvalidArgument(format!(
            "checkpoint {bad} outside [{lo}, {hi}]"
        )));
    }
    Ok(cps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LittlewoodCount {
    pub series: CountSeries,
    /// `count / ln ln N` per checkpoint, 40 digits.
    pub loglog_ratios: Vec<(String, String)>,
    /// Every `n` counted, ascending.
    pub hits: Vec<u64>,
    /// Hits undecided at the precision cap.
    pub borderline: Vec<u64>,
    /// Indices that needed an exact evaluation.
    pub exact_evaluations: u64,
}

struct BlockHits {
    hits: Vec<u64>,
    borderline: Vec<u64>,
    exact: u64,
}

/// Counts `n` in `[2, N]` with `n ||n alpha - gamma|| ||n beta - delta|| <= 1 / ln n`.
#[allow(clippy::too_many_arguments)]
pub fn littlewood_count(
    alpha: &ExactReal,
    gamma: &ExactReal,
    beta: &ExactReal,
    delta: &ExactReal,
    n_max: u64,
    checkpoints: &[u64],
    max_n: u64,
    cap_digits: u32,
) -> Result<LittlewoodCount> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "N must be at least 2, got {n_max}"
        )));
    }
    if n_max > max_n {
        return Err(Error::ResourceCap {
            what: "N",
            requested: n_max.to_string(),
            cap: max_n.to_string(),
        });
    }
    for v in [alpha, gamma, beta, delta] {
        if !v.is_exact() {
            return Err(Error::NotQuadratic);
        }
    }
    ExactReal::unify(alpha, gamma)?;
    ExactReal::unify(beta, delta)?;
    let checkpoints = normalize_checkpoints(checkpoints, 2, n_max, || vec![n_max])?;
    let fa = ShiftFixed::new(alpha, gamma);
    let fb = ShiftFixed::new(beta, delta);
    let blocks = (n_max - 2) / BLOCK + 1;
    let results: Vec<BlockHits> = (0..blocks)
        .into_par_iter()
        .map(|i| {
            let start = 2 + i * BLOCK;
            let end = (start + BLOCK - 1).min(n_max);
            let mut out = BlockHits {
                hits: Vec::new(),
                borderline: Vec::new(),
                exact: 0,
            };
            for n in start..=end {
                match screen(&fa, &fb, n) {
                    Some(true) => out.hits.push(n),
                    Some(false) => {}
                    None => {
                        out.exact += 1;
                        let (hit, borderline) =
                            exact_littlewood(alpha, gamma, beta, delta, n, cap_digits);
                        if hit {
                            out.hits.push(n);
                        }
                        if borderline {
                            out.borderline.push(n);
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut hits = Vec::new();
    let mut borderline = Vec::new();
    let mut exact_evaluations = 0;
    for b in results {
        hits.extend(b.hits);
        borderline.extend(b.borderline);
        exact_evaluations += b.exact;
    }
    let mut points = Vec::new();
    let mut loglog_ratios = Vec::new();
    for cp in checkpoints {
        let count = hits.partition_point(|&h| h <= cp) as u64;
        points.push(CountPoint {
            checkpoint: cp.to_string(),
            count,
            predicted: None,
        });
        let ratio = if cp >= 3 {
            let e = Expr::int(count).div(Expr::int(cp).ln().ln());
            render_refined(|b| e.eval(b), 1024)
        } else {
            "undefined".to_string()
        };
        loglog_ratios.push((cp.to_string(), ratio));
    }
    Ok(LittlewoodCount {
        series: CountSeries { points },
        loglog_ratios,
        hits,
        borderline,
        exact_evaluations,
    })
}

/// `Some(hit)` when the floating-point bounds decide the inequality.
fn screen(fa: &ShiftFixed, fb: &ShiftFixed, n: u64) -> Option<bool> {
    let err = n as u128 + 1;
    let da = fa.dist(n);
    let db = fb.dist(n);
    let nf = n as f64;
    let lo = nf * (da.saturating_sub(err) as f64 * ULP) * (db.saturating_sub(err) as f64 * ULP);
    let hi = nf * ((da + err) as f64 * ULP) * ((db + err) as f64 * ULP);
    let thr = 1.0 / nf.ln();
    if hi * (1.0 + MARGIN) < thr * (1.0 - MARGIN) {
        Some(true)
    } else if lo * (1.0 - MARGIN) > thr * (1.0 + MARGIN) {
        Some(false)
    } else {
        None
    }
}

/// `(hit, borderline)` by exact evaluation.
pub(crate) fn exact_littlewood(
    alpha: &ExactReal,
    gamma: &ExactReal,
    beta: &ExactReal,
    delta: &ExactReal,
    n: u64,
    cap_digits: u32,
) -> (bool, bool) {
    let nb = BigInt::from(n);
    let x = shift_distance(&nb, alpha, gamma).expect("validated fields");
    let y = shift_distance(&nb, beta, delta).expect("validated fields");
    let lhs = Lhs::product(&nb, &x, &y);
    HitRecord::classify(
        compare_lhs(&lhs, &inv_ln(&nb), cap_digits),
        Strictness::NonStrict,
    )
}

/// Full record of the Littlewood-type inequality at one `n >= 2`.
pub fn littlewood_record(
    alpha: &ExactReal,
    gamma: &ExactReal,
    beta: &ExactReal,
    delta: &ExactReal,
    n: u64,
    cap_digits: u32,
) -> Result<HitRecord> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "n must be at least 2, got {n}"
        )));
    }
    let nb = BigInt::from(n);
    let x = shift_distance(&nb, alpha, gamma)?;
    let y = shift_distance(&nb, beta, delta)?;
    let lhs = Lhs::product(&nb, &x, &y);
    let thr = inv_ln(&nb);
    let (hit, borderline) =
        HitRecord::classify(compare_lhs(&lhs, &thr, cap_digits), Strictness::NonStrict);
    Ok(HitRecord {
        index: n.to_string(),
        lhs: lhs.render(),
        threshold: render_threshold(&thr, cap_digits),
        hit,
        borderline,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunningMin {
    pub checkpoint: String,
    pub min_decimal: String,
    pub argmin: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadnessProfile {
    /// `min_{1 <= n <= N} n ||n beta - delta||`, an empirical profile only.
    pub min_value: ExactReal,
    pub argmin: u64,
    pub series: Vec<RunningMin>,
}

/// Running minimum of `n ||n beta - delta||` over `n` in `[1, N]`.
pub fn badness_profile(
    beta: &ExactReal,
    delta: &ExactReal,
    n_max: u64,
    checkpoints: &[u64],
    max_n: u64,
) -> Result<BadnessProfile> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if n_max > max_n {
        return Err(Error::ResourceCap {
            what: "N",
            requested: n_max.to_string(),
            cap: max_n.to_string(),
        });
    }
    if !beta.is_exact() || !delta.is_exact() {
        return Err(Error::NotQuadratic);
    }
    ExactReal::unify(beta, delta)?;
    let checkpoints = normalize_checkpoints(checkpoints, 1, n_max, || vec![n_max])?;
    let fb = ShiftFixed::new(beta, delta);
    let blocks = (n_max - 1) / BLOCK + 1;
    // per block, every n whose lower bound does not exceed the block's best
    // upper bound so far; this contains every running-minimum record
    let cands: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|i| {
            let start = 1 + i * BLOCK;
            let end = (start + BLOCK - 1).min(n_max);
            let mut best = f64::INFINITY;
            let mut out = Vec::new();
            for n in start..=end {
                let err = n as u128 + 1;
                let d = fb.dist(n);
                let nf = n as f64;
                let lo = nf * (d.saturating_sub(err) as f64 * ULP) * (1.0 - MARGIN);
                let hi = nf * ((d + err) as f64 * ULP) * (1.0 + MARGIN);
                if lo <= best {
                    out.push(n);
                }
                best = best.min(hi);
            }
            out
        })
        .collect();
    let mut cur: Option<(ExactReal, u64)> = None;
    let mut series = Vec::new();
    let mut cp_iter = checkpoints.iter().peekable();
    for n in cands.into_iter().flatten() {
        while let Some(&&cp) = cp_iter.peek() {
            if cp < n {
                series.push(running(&cur, cp));
                cp_iter.next();
            } else {
                break;
            }
        }
        let nb = BigInt::from(n);
        let v = shift_distance(&nb, beta, delta)?.scale_int(&nb);
        let better = match &cur {
            None => true,
            Some((c, _)) => v.cmp_exact(c)? == Ordering::Less,
        };
        if better {
            cur = Some((v, n));
        }
    }
    for &cp in cp_iter {
        series.push(running(&cur, cp));
    }
    let (min_value, argmin) = cur.expect("n = 1 is always a candidate");
    Ok(BadnessProfile {
        min_value,
        argmin,
        series,
    })
}

fn running(cur: &Option<(ExactReal, u64)>, cp: u64) -> RunningMin {
    let (v, n) = cur.as_ref().expect("n = 1 precedes every checkpoint");
    RunningMin {
        checkpoint: cp.to_string(),
        min_decimal: render_exact(v),
        argmin: *n,
    }
}
