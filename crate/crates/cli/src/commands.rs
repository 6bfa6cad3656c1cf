use crate::output::{Artifacts, Table};
use crate::{CliError, Command, Settings};
use lacuna::cf::{convergents, expand, k_constant};
use lacuna::exact::{render_exact, ExactReal};
use lacuna::experiments::{
    badness_profile, choose_b, count_shift_hits, fourier_surrogate, littlewood_count,
    littlewood_record, sample_fm, tk_sequence, verify_chain, DigitWeights, FourierConfig,
    HitRecord,
};
use lacuna::inhom::{find_shifted_approx, gap_structure, ostrowski_expand};
use lacuna::lacunary::{build_with_spacing, verify, ShiftedLacunarySequence};
use num_rational::BigRational;
use num_traits::Zero;

fn real(name: &str, s: &str) -> Result<ExactReal, CliError> {
    s.parse()
        .map_err(|e| CliError::Invalid(format!("--{name} {s:?}: {e}")))
}

fn rational(name: &str, s: &str) -> Result<BigRational, CliError> {
    match real(name, s)? {
        ExactReal::Rational(q) => Ok(q),
        _ => Err(CliError::Invalid(format!(
            "--{name} must be rational, got {s:?}"
        ))),
    }
}

fn weights(s: &str) -> Result<DigitWeights, CliError> {
    s.parse()
        .map_err(|e: lacuna::Error| CliError::Invalid(e.to_string()))
}

/// Parses `0,5,-3..3,512..1024` into a frequency list, ranges half-open.
pub(crate) fn parse_freqs(s: &str) -> Result<Vec<i64>, CliError> {
    let bad = || CliError::Invalid(format!("bad frequency list {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad())?;
                let b: i64 = b.trim().parse().map_err(|_| bad())?;
                out.extend(a..b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn hit_row(r: &HitRecord) -> Vec<String> {
    vec![
        r.index.clone(),
        r.lhs.clone(),
        r.threshold.clone(),
        r.hit.to_string(),
        r.borderline.to_string(),
    ]
}

const HIT_HEADERS: [&str; 5] = ["index", "lhs", "threshold", "hit", "borderline"];

fn sequence(
    alpha: &str,
    gamma: &str,
    t: usize,
    spacing: usize,
) -> Result<(ExactReal, ExactReal, ShiftedLacunarySequence), CliError> {
    let alpha = real("alpha", alpha)?;
    let gamma = real("gamma", gamma)?;
    let seq = build_with_spacing(&alpha, &gamma, t, spacing)?;
    Ok((alpha, gamma, seq))
}

/// Runs one command and returns its tables and summary lines.
pub fn execute(s: &Settings, cmd: &Command) -> Result<Artifacts, CliError> {
    let mut a = Artifacts::default();
    let cap = s.precision;
    a.line(format!("command: {}", cmd.name()));
    match cmd {
        Command::Cf { x, depth } => {
            let x = real("x", x)?;
            let cf = expand(&x, *depth)?;
            let depth = cf.available().map_or(*depth, |n| n.min(*depth));
            let table = convergents(&cf, depth)?;
            let mut t = Table::new("convergents", &["k", "a_k", "p_k", "q_k"]);
            for (k, p, q) in table.rows() {
                let digit = if k == 0 {
                    cf.a0.clone()
                } else {
                    cf.digit(k).expect("within depth")
                };
                t.push(vec![
                    k.to_string(),
                    digit.to_string(),
                    p.to_string(),
                    q.to_string(),
                ]);
            }
            a.line(format!("expansion: {cf}"));
            a.line(format!("value: {x}"));
            a.tables.push(t);
        }
        Command::Kconst { x, depth } => {
            let x = real("x", x)?;
            let k = k_constant(&x, *depth)?;
            let mut t = Table::new("kconst", &["t", "lower", "upper"]);
            for (i, e) in &k.trend {
                t.push(vec![
                    i.to_string(),
                    render_exact(&ExactReal::Rational(e.lo())),
                    render_exact(&ExactReal::Rational(e.hi())),
                ]);
            }
            a.line(format!("depth: {}", k.depth));
            a.line(format!(
                "C_lower: {}",
                render_exact(&ExactReal::Rational(k.c_lower.clone()))
            ));
            a.line(format!(
                "C_upper: {}",
                render_exact(&ExactReal::Rational(k.c_upper.clone()))
            ));
            a.line(format!("argmax_t: {}", k.argmax_t));
            a.line(format!(
                "divergence_suspected: {}",
                k.divergence_suspected()
            ));
            a.tables.push(t);
        }
        Command::Threegap { alpha, m } => {
            if m > &s.max_m {
                return Err(CliError::Cap(format!(
                    "m = {m} exceeds max-m = {}",
                    s.max_m
                )));
            }
            let alpha = real("alpha", alpha)?;
            let g = gap_structure(&alpha, *m)?;
            let mut t = Table::new(
                "gaps",
                &[
                    "length_exact",
                    "length_decimal",
                    "multiplicity",
                    "steps",
                    "wraps",
                ],
            );
            for gap in &g.distinct_gaps {
                t.push(vec![
                    gap.length.to_string(),
                    render_exact(&gap.length),
                    gap.multiplicity.to_string(),
                    gap.steps.to_string(),
                    gap.wraps.to_string(),
                ]);
            }
            a.line(format!("m: {m}"));
            a.line(format!("distinct gaps: {}", g.distinct_gaps.len()));
            a.line(format!("max gap: {}", render_exact(&g.max_gap)));
            a.line(format!("sums to one: {}", g.sums_to_one()));
            a.tables.push(t);
        }
        Command::Ostrowski {
            alpha,
            gamma,
            depth,
            k,
        } => {
            let alpha = real("alpha", alpha)?;
            let gamma = real("gamma", gamma)?;
            let o = ostrowski_expand(&gamma, &alpha, *depth)?;
            let mut t = Table::new("ostrowski", &["k", "c_k"]);
            for (i, c) in o.digits.iter().enumerate() {
                t.push(vec![(i + 1).to_string(), c.to_string()]);
            }
            a.line(format!("shift: {}", o.shift));
            a.line(format!("residual: {}", render_exact(&o.residual)));
            a.line(format!(
                "residual bound: {}",
                render_exact(&o.residual_bound)
            ));
            a.tables.push(t);
            if let Some(k) = k {
                let c = find_shifted_approx(&alpha, &gamma, *k)?.record();
                let mut t = Table::new(
                    "certificate",
                    &[
                        "k",
                        "q_k",
                        "q_km1",
                        "m",
                        "b",
                        "distance_decimal",
                        "bound_decimal",
                        "method",
                    ],
                );
                t.push(vec![
                    c.k.to_string(),
                    c.q_k,
                    c.q_km1,
                    c.m,
                    c.b.clone(),
                    c.distance_decimal,
                    c.bound_decimal,
                    c.method.to_string(),
                ]);
                a.line(format!("certified b at k = {k}: {}", c.b));
                a.tables.push(t);
            }
        }
        Command::Shiftseq {
            alpha,
            gamma,
            t,
            spacing,
        } => {
            let (_, _, seq) = sequence(alpha, gamma, *t, *spacing)?;
            let mut tab = Table::new(
                "sequence",
                &[
                    "t",
                    "n_t",
                    "b_t",
                    "q6t",
                    "distance_decimal",
                    "checks_passed",
                ],
            );
            for e in &seq.entries {
                let r = e.record();
                tab.push(vec![
                    r.t.to_string(),
                    r.n_t,
                    r.b_t,
                    r.q6t,
                    r.distance_decimal,
                    r.checks_passed.to_string(),
                ]);
            }
            let report = verify(&seq);
            let mut v = Table::new("verify", &["t", "check", "passed"]);
            for l in &report.lines {
                v.push(vec![
                    l.t.to_string(),
                    l.check.to_string(),
                    l.passed.to_string(),
                ]);
            }
            let mut lr = Table::new("log_ratios", &["t", "ln_n_t_over_t"]);
            for (i, r) in seq.log_ratios() {
                lr.push(vec![i.to_string(), r]);
            }
            a.line(format!("terms: {}", seq.entries.len()));
            a.line(format!("spacing: {}", seq.spacing));
            a.line(format!(
                "C enclosure: [{}, {}]",
                report.c_lower, report.c_upper
            ));
            a.line(format!(
                "verify: {}",
                if report.all_passed() { "pass" } else { "FAIL" }
            ));
            a.tables.extend([tab, v, lr]);
        }
        Command::Count {
            alpha,
            gamma,
            beta,
            delta,
            n,
        } => {
            let (alpha, gamma) = (real("alpha", alpha)?, real("gamma", gamma)?);
            let (beta, delta) = (real("beta", beta)?, real("delta", delta)?);
            let c = littlewood_count(
                &alpha,
                &gamma,
                &beta,
                &delta,
                *n,
                &s.checkpoints,
                s.max_n,
                cap,
            )?;
            let mut counts = Table::new("counts", &["checkpoint", "count", "predicted"]);
            for p in &c.series.points {
                counts.push(vec![
                    p.checkpoint.clone(),
                    p.count.to_string(),
                    String::new(),
                ]);
            }
            let mut hits = Table::new("hits", &HIT_HEADERS);
            for &h in &c.hits {
                hits.push(hit_row(&littlewood_record(
                    &alpha, &gamma, &beta, &delta, h, cap,
                )?));
            }
            a.line(format!("N: {n}"));
            a.line(format!("count: {}", c.hits.len()));
            a.line(format!("borderline: {}", c.borderline.len()));
            for (cp, r) in &c.loglog_ratios {
                a.line(format!("count / ln ln {cp}: {r}"));
            }
            a.tables.extend([counts, hits]);
        }
        Command::Shifthits {
            alpha,
            gamma,
            beta,
            delta,
            t,
        } => {
            let (_, _, seq) = sequence(alpha, gamma, *t, lacuna::lacunary::DEFAULT_SPACING)?;
            let (beta, delta) = (real("beta", beta)?, real("delta", delta)?);
            let cps: Vec<usize> = s.checkpoints.iter().map(|&c| c as usize).collect();
            let h = count_shift_hits(&beta, &delta, &seq, *t, &cps, cap)?;
            let mut counts = Table::new("counts", &["checkpoint", "count", "predicted"]);
            for p in &h.series.points {
                counts.push(vec![
                    p.checkpoint.clone(),
                    p.count.to_string(),
                    p.predicted.clone().unwrap_or_default(),
                ]);
            }
            let mut hits = Table::new("hits", &HIT_HEADERS);
            for r in &h.records {
                hits.push(hit_row(r));
            }
            let total = h.records.iter().filter(|r| r.hit).count();
            a.line(format!("T: {t}"));
            a.line(format!("hits: {total}"));
            a.line(format!(
                "implication holds at every hit: {}",
                h.implication.iter().all(|&(_, ok)| ok)
            ));
            a.tables.extend([counts, hits]);
        }
        Command::Uniform {
            alpha,
            gamma,
            beta,
            delta,
            t,
            eps,
            b,
            k_max,
        } => {
            let (_, _, seq) = sequence(alpha, gamma, *t, lacuna::lacunary::DEFAULT_SPACING)?;
            let (beta, delta) = (real("beta", beta)?, real("delta", delta)?);
            let eps = rational("eps", eps)?;
            if eps <= BigRational::zero() {
                return Err(CliError::Invalid("--eps must be positive".into()));
            }
            let choice = choose_b(&seq, &eps)?;
            let b = match b {
                Some(b) => rational("B", b)?,
                None => choice.b(),
            };
            let tk = tk_sequence(&beta, &delta, &seq, &b, &eps, *k_max, *t as u64, cap)?;
            let mut tt = Table::new("tk", &["k", "T_k"]);
            for (k, v) in &tk.values {
                let v = v.map_or_else(|| "NotFoundBelowCap".to_string(), |v| v.to_string());
                tt.push(vec![k.to_string(), v]);
            }
            let mut counts = Table::new("counts", &["checkpoint", "count", "predicted"]);
            for (i, c) in tk.counts.iter().enumerate() {
                counts.push(vec![(i + 1).to_string(), c.to_string(), String::new()]);
            }
            let chain = verify_chain(&seq, &beta, &delta, &choice, &eps, cap)?;
            let mut ct = Table::new(
                "chain",
                &[
                    "t",
                    "n_t",
                    "lhs",
                    "threshold",
                    "hit",
                    "borderline",
                    "passed",
                ],
            );
            for i in &chain.instances {
                ct.push(vec![
                    i.t.to_string(),
                    i.n_t.clone(),
                    i.seven.lhs.clone(),
                    i.seven.threshold.clone(),
                    i.seven.hit.to_string(),
                    i.seven.borderline.to_string(),
                    i.passed.to_string(),
                ]);
            }
            a.line(format!("B*: {}", choice.b_star));
            a.line(format!("T0: {}", choice.t0));
            a.line(format!("C_upper: {}", choice.c_upper));
            a.line(format!("B used for T_k: {b}"));
            a.line(format!("borderline comparisons: {}", tk.borderline.len()));
            a.line(format!(
                "chain: {} instances, {}",
                chain.instances.len(),
                if chain.all_passed() {
                    "all pass"
                } else {
                    "FAIL"
                }
            ));
            a.tables.extend([tt, counts, ct]);
        }
        Command::Sample {
            m,
            block_len,
            weights: w,
            count,
        } => {
            if m > &s.max_m {
                return Err(CliError::Cap(format!(
                    "M = {m} exceeds max-m = {}",
                    s.max_m
                )));
            }
            if count > &s.max_samples {
                return Err(CliError::Cap(format!(
                    "count = {count} exceeds max-samples = {}",
                    s.max_samples
                )));
            }
            let w = weights(w)?;
            let mut t = Table::new("samples", &["stream", "block", "value", "value_decimal"]);
            for stream in 0..*count {
                let x = sample_fm(*m, *block_len, s.seed, w, stream)?;
                let block: Vec<String> = x.block.iter().map(u64::to_string).collect();
                t.push(vec![
                    stream.to_string(),
                    block.join(" "),
                    x.value.to_string(),
                    render_exact(&x.value),
                ]);
            }
            a.line(format!("M: {m}"));
            a.line(format!("weights: {w}"));
            a.line(format!("samples: {count}"));
            a.tables.push(t);
        }
        Command::Badness { beta, delta, n } => {
            let (beta, delta) = (real("beta", beta)?, real("delta", delta)?);
            let p = badness_profile(&beta, &delta, *n, &s.checkpoints, s.max_n)?;
            let mut t = Table::new("badness", &["checkpoint", "min_decimal", "argmin"]);
            for r in &p.series {
                t.push(vec![
                    r.checkpoint.clone(),
                    r.min_decimal.clone(),
                    r.argmin.to_string(),
                ]);
            }
            a.line("empirical profile over a finite range, not a liminf certificate");
            a.line(format!("N: {n}"));
            a.line(format!(
                "min: {} = {}",
                p.min_value,
                render_exact(&p.min_value)
            ));
            a.line(format!("argmin: {}", p.argmin));
            a.tables.push(t);
        }
        Command::Fourier {
            m,
            weights: w,
            depth,
            samples,
            freqs,
        } => {
            if samples > &s.max_samples {
                return Err(CliError::Cap(format!(
                    "samples = {samples} exceeds max-samples = {}",
                    s.max_samples
                )));
            }
            let cfg = FourierConfig {
                m: *m,
                weights: weights(w)?,
                depth: *depth,
                samples: *samples,
                freqs: parse_freqs(freqs)?,
                seed: s.seed,
            };
            let run = fourier_surrogate(&cfg)?;
            let mut t = Table::new("fourier", &["t", "re", "im", "stderr"]);
            for p in &run.points {
                t.push(vec![
                    p.t.to_string(),
                    p.re.to_string(),
                    p.im.to_string(),
                    p.stderr.to_string(),
                ]);
            }
            a.line("Monte Carlo surrogate with i.i.d. digits; no decay guarantee");
            a.line(format!("samples: {samples}"));
            a.line(format!(
                "truncation bound on |X - x|: {:e}",
                run.truncation_bound
            ));
            a.line(format!(
                "all within 1 + 3 stderr: {}",
                run.points.iter().all(|p| p.within_noise(3.0))
            ));
            a.tables.push(t);
        }
        Command::Run { .. } => {
            return Err(CliError::Invalid(
                "run must be resolved before execution".into(),
            ));
        }
    }
    a.line(format!("precision cap: {cap} digits"));
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_lists() {
        assert_eq!(parse_freqs("0, 3,-2..1").unwrap(), vec![0, 3, -2, -1, 0]);
        assert!(parse_freqs("a..b").is_err());
        assert!(parse_freqs("").is_err());
    }
}
