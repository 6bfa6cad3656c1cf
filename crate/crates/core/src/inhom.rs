//! Gap structure of `{alpha}, ..., {m*alpha}`, Ostrowski expansions of shifts,
//! and the search for `b` with `||b*alpha - gamma|| <= 1/q_k`.

use crate::cf::{convergents, expand, ConvergentTable};
use crate::error::{Error, Result};
use crate::exact::{render_exact, ExactReal};
use crate::fixed::{frac_fixed, mul_small};
use log::info;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

/// Largest number of points enumerated explicitly.
pub const MAX_POINTS: u64 = 1_000_000;

/// One distinct gap length `steps * {alpha} - wraps` between neighbouring points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gap {
    pub length: ExactReal,
    pub multiplicity: u64,
    /// Index difference of the two neighbours.
    pub steps: i64,
    /// Difference of their integer parts.
    pub wraps: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapStructure {
    pub m: u64,
    /// Distinct gaps, longest first.
    pub distinct_gaps: Vec<Gap>,
    pub max_gap: ExactReal,
}

impl GapStructure {
    /// Exact check that the gap lengths add up to one.
    pub fn sums_to_one(&self) -> bool {
        let steps: i128 = self
            .distinct_gaps
            .iter()
            .map(|g| g.steps as i128 * g.multiplicity as i128)
            .sum();
        let wraps: i128 = self
            .distinct_gaps
            .iter()
            .map(|g| g.wraps as i128 * g.multiplicity as i128)
            .sum();
        steps == 0 && wraps == -1
    }
}

fn require_irrational(alpha: &ExactReal) -> Result<()> {
    match alpha {
        ExactReal::Quadratic(_) => Ok(()),
        ExactReal::Rational(_) => Err(Error::InputNotIrrational),
        ExactReal::Interval(_) => Err(Error::NotQuadratic),
    }
}

/// Sorted positions of `{j*alpha}` for `j = 0..=m` as `(j, floor(j*{alpha}))`.
fn sorted_points(frac: &ExactReal, m: u64) -> Vec<(u64, i64)> {
    let f = frac_fixed(frac);
    let mut pts: Vec<(u128, u64, i64)> = (0..=m)
        .map(|j| {
            let (high, low) = mul_small(f, j);
            (low, j, high as i64)
        })
        .collect();
    pts.sort_unstable();
    // keys underestimate the true positions by less than j <= m units
    let margin = m as u128 + 1;
    let certified = pts.last().is_none_or(|p| p.0 < u128::MAX - margin)
        && pts.windows(2).all(|w| w[1].0 - w[0].0 > margin);
    if certified {
        return pts.into_iter().map(|(_, j, k)| (j, k)).collect();
    }
    exact_sorted_points(frac, m)
}

fn exact_sorted_points(frac: &ExactReal, m: u64) -> Vec<(u64, i64)> {
    let mut pts: Vec<(ExactReal, u64, i64)> = (0..=m)
        .map(|j| {
            let v = frac.scale_int(&BigInt::from(j));
            let k = v.floor().expect("exact");
            (v.add_int(&-&k), j, k.to_i64().expect("small"))
        })
        .collect();
    pts.sort_by(|a, b| a.0.cmp_exact(&b.0).expect("same field"));
    pts.into_iter().map(|(_, j, k)| (j, k)).collect()
}

/// Distinct gaps between the points `0, {alpha}, ..., {m*alpha}` on the circle.
pub fn gap_structure(alpha: &ExactReal, m: u64) -> Result<GapStructure> {
    require_irrational(alpha)?;
    if m > MAX_POINTS {
        return Err(Error::TooManyPoints {
            m: m.to_string(),
            cap: MAX_POINTS,
        });
    }
    let frac = alpha.fract().expect("exact");
    let mut pts = sorted_points(&frac, m);
    // the point 0 again, one turn later
    pts.push((0, -1));
    let mut counts: Vec<((i64, i64), u64)> = Vec::new();
    for w in pts.windows(2) {
        let key = (w[1].0 as i64 - w[0].0 as i64, w[1].1 - w[0].1);
        match counts.iter_mut().find(|(k, _)| *k == key) {
            Some((_, c)) => *c += 1,
            None => counts.push((key, 1)),
        }
    }
    let mut gaps: Vec<Gap> = counts
        .into_iter()
        .map(|((steps, wraps), multiplicity)| Gap {
            length: frac
                .scale_int(&BigInt::from(steps))
                .add_int(&BigInt::from(-wraps)),
            multiplicity,
            steps,
            wraps,
        })
        .collect();
    gaps.sort_by(|a, b| b.length.cmp_exact(&a.length).expect("same field"));
    let max_gap = gaps[0].length.clone();
    Ok(GapStructure {
        m,
        distinct_gaps: gaps,
        max_gap,
    })
}

/// `m = 2 q_k + q_{k-1} - 1`.
pub fn window_size(table: &ConvergentTable<BigInt>, k: usize) -> BigInt {
    let k = k as isize;
    table.q(k) * 2 + table.q(k - 1) - 1
}

/// Checks `max gap <= a_{k+1} / q_{k+1}` for `m = 2 q_k + q_{k-1} - 1` points.
pub fn max_gap_bound_check(alpha: &ExactReal, k: usize) -> Result<bool> {
    require_irrational(alpha)?;
    let cf = expand(alpha, k + 1)?;
    let table = convergents(&cf, k + 1)?;
    let m = window_size(&table, k);
    let m = m
        .to_u64()
        .filter(|&m| m <= MAX_POINTS)
        .ok_or(Error::TooManyPoints {
            m: m.to_string(),
            cap: MAX_POINTS,
        })?;
    let gaps = gap_structure(alpha, m)?;
    let bound = ExactReal::Rational(BigRational::new(
        cf.digit(k + 1).expect("digit"),
        table.q(k as isize + 1).clone(),
    ));
    Ok(gaps.max_gap.cmp_exact(&bound)? != Ordering::Greater)
}

/// `theta_k = q_k * alpha - p_k` for `k = -1..=depth`.
fn thetas(alpha: &ExactReal, table: &ConvergentTable<BigInt>) -> Vec<ExactReal> {
    (-1..=table.depth() as isize)
        .map(|k| alpha.scale_int(table.q(k)).add_int(&-table.p(k)))
        .collect()
}

/// Digits `c_1, c_2, ...` with `{gamma} = sum c_{k+1} theta_k + residual`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OstrowskiExpansion {
    pub digits: Vec<BigInt>,
    /// `floor(gamma)`, removed before expanding.
    pub shift: BigInt,
    /// Exact remainder after the listed digits.
    pub residual: ExactReal,
    /// `|theta_{K-1}|` for `K` digits, which bounds `|residual|`.
    pub residual_bound: ExactReal,
}

impl OstrowskiExpansion {
    /// `sum_{j<k} c_{j+1} q_j`, an integer `b` with `||b*alpha - gamma|| <= |theta_{k-1}|`.
    pub fn seed(&self, table: &ConvergentTable<BigInt>, k: usize) -> BigInt {
        self.digits
            .iter()
            .take(k)
            .enumerate()
            .map(|(j, c)| c * table.q(j as isize))
            .sum()
    }
}

/// Greedy Ostrowski expansion of `gamma` to `depth` digits with respect to
/// the convergents of `alpha`.
pub fn ostrowski_expand(
    gamma: &ExactReal,
    alpha: &ExactReal,
    depth: usize,
) -> Result<OstrowskiExpansion> {
    require_irrational(alpha)?;
    if !gamma.is_exact() {
        return Err(Error::NotQuadratic);
    }
    // reject mixed fields up front
    ExactReal::unify(alpha, gamma)?;
    let cf = expand(alpha, depth + 1)?;
    let table = convergents(&cf, depth + 1)?;
    Ok(ostrowski_with(gamma, alpha, &table, depth))
}

pub(crate) fn ostrowski_with(
    gamma: &ExactReal,
    alpha: &ExactReal,
    table: &ConvergentTable<BigInt>,
    depth: usize,
) -> OstrowskiExpansion {
    let th = thetas(alpha, table);
    let theta = |k: usize| &th[k + 1];
    let shift = gamma.floor().expect("exact");
    let mut r = gamma.add_int(&-&shift);
    let mut digits = Vec::with_capacity(depth);
    for k in 0..depth {
        // work in units where theta_k is positive: r must land in [-t_k, t_{k+1}]
        let neg = theta(k).signum() == Some(Ordering::Less);
        let tk = theta(k).abs();
        let tk1 = theta(k + 1).abs();
        let rs = if neg { r.neg() } else { r.clone() };
        let z = rs.sub(&tk1).and_then(|v| v.div(&tk)).expect("same field");
        let c = (-z.neg().floor().expect("exact")).max(BigInt::zero());
        if !c.is_zero() {
            r = r.sub(&theta(k).scale_int(&c)).expect("same field");
        }
        digits.push(c);
    }
    let residual_bound = if depth == 0 {
        ExactReal::from(1)
    } else {
        theta(depth - 1).abs()
    };
    OstrowskiExpansion {
        digits,
        shift,
        residual: r,
        residual_bound,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "ostrowski+window")]
    OstrowskiWindow,
    #[serde(rename = "bruteforce")]
    BruteForce,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::OstrowskiWindow => "ostrowski+window",
            Method::BruteForce => "bruteforce",
        })
    }
}

/// A verified `b` in `[1, m]` with `||b*alpha - gamma|| <= 1/q_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftCertificate {
    pub k: usize,
    pub q_k: BigInt,
    pub q_km1: BigInt,
    pub m: BigInt,
    pub b: BigInt,
    pub distance: ExactReal,
    pub method: Method,
}

/// Flat record of a [`ShiftCertificate`] with decimal-string fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateRecord {
    pub k: usize,
    pub q_k: String,
    pub q_km1: String,
    pub m: String,
    pub b: String,
    pub distance_decimal: String,
    pub bound_decimal: String,
    pub method: Method,
}

impl ShiftCertificate {
    pub fn bound(&self) -> ExactReal {
        ExactReal::Rational(BigRational::new(BigInt::one(), self.q_k.clone()))
    }

    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            k: self.k,
            q_k: self.q_k.to_string(),
            q_km1: self.q_km1.to_string(),
            m: self.m.to_string(),
            b: self.b.to_string(),
            distance_decimal: render_exact(&self.distance),
            bound_decimal: render_exact(&self.bound()),
            method: self.method,
        }
    }
}

/// `||b*alpha - gamma||`, exactly.
pub fn shift_distance(b: &BigInt, alpha: &ExactReal, gamma: &ExactReal) -> Result<ExactReal> {
    ExactReal::linear_form(b, alpha, gamma)?.torus_distance()
}

fn feasible(
    b: &BigInt,
    alpha: &ExactReal,
    gamma: &ExactReal,
    bound: &ExactReal,
) -> Result<Option<ExactReal>> {
    let d = shift_distance(b, alpha, gamma)?;
    Ok((d.cmp_exact(bound)? != Ordering::Greater).then_some(d))
}

/// Half-width of the first correction window; any feasible `b` differs from
/// the Ostrowski seed by `x q_k + y q_{k-1}` with `|x|, |y| <= 5`.
const WINDOW: i64 = 7;

/// Smallest `b` in `[1, 2 q_k + q_{k-1} - 1]` with `||b*alpha - gamma|| <= 1/q_k`.
pub fn find_shifted_approx(
    alpha: &ExactReal,
    gamma: &ExactReal,
    k: usize,
) -> Result<ShiftCertificate> {
    require_irrational(alpha)?;
    if !gamma.is_exact() {
        return Err(Error::NotQuadratic);
    }
    ExactReal::unify(alpha, gamma)?;
    let cf = expand(alpha, k + 1)?;
    let table = convergents(&cf, k + 1)?;
    let ost = ostrowski_with(gamma, alpha, &table, k);
    find_with(alpha, gamma, &table, &ost, k)
}

pub(crate) fn find_with(
    alpha: &ExactReal,
    gamma: &ExactReal,
    table: &ConvergentTable<BigInt>,
    ost: &OstrowskiExpansion,
    k: usize,
) -> Result<ShiftCertificate> {
    let q_k = table.q(k as isize).clone();
    let q_km1 = table.q(k as isize - 1).clone();
    let m = window_size(table, k);
    let bound = ExactReal::Rational(BigRational::new(BigInt::one(), q_k.clone()));
    let b0 = ost.seed(table, k);
    let cert = |b: BigInt, distance: ExactReal, method: Method| ShiftCertificate {
        k,
        q_k: q_k.clone(),
        q_km1: q_km1.clone(),
        m: m.clone(),
        b,
        distance,
        method,
    };
    for w in [WINDOW, 2 * WINDOW] {
        if w != WINDOW {
            info!("widening correction window to +-{w} at k = {k}");
        }
        let mut cands: Vec<BigInt> = Vec::new();
        for x in -w..=w {
            for y in -w..=w {
                let b = &b0 + &q_k * x + &q_km1 * y;
                if b.is_positive() && b <= m {
                    cands.push(b);
                }
            }
        }
        cands.sort();
        cands.dedup();
        for b in cands {
            if let Some(d) = feasible(&b, alpha, gamma, &bound)? {
                return Ok(cert(b, d, Method::OstrowskiWindow));
            }
        }
    }
    match m.to_u64().filter(|&v| v <= MAX_POINTS) {
        Some(mm) => {
            info!("falling back to brute force over {mm} candidates at k = {k}");
            match brute_force_smallest(alpha, gamma, &bound, mm)? {
                Some((b, d)) => Ok(cert(b, d, Method::BruteForce)),
                None => Err(Error::SearchExhausted {
                    k,
                    m: m.to_string(),
                }),
            }
        }
        None => Err(Error::SearchExhausted {
            k,
            m: m.to_string(),
        }),
    }
}

/// Smallest `b` in `[1, m]` with `||b*alpha - gamma|| <= bound`, by exhaustive scan.
pub fn brute_force_smallest(
    alpha: &ExactReal,
    gamma: &ExactReal,
    bound: &ExactReal,
    m: u64,
) -> Result<Option<(BigInt, ExactReal)>> {
    for b in 1..=m {
        let b = BigInt::from(b);
        if let Some(d) = feasible(&b, alpha, gamma, bound)? {
            return Ok(Some((b, d)));
        }
    }
    Ok(None)
}
