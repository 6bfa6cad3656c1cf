use lacuna::cf::{convergents, expand};
use lacuna::exact::{compare, compare_expr, ln_interval, Comparison, Expr, Threshold};
use lacuna::experiments::{
    fourier_surrogate, littlewood_count, sample_fm, tk_sequence, DigitWeights, FourierConfig,
};
use lacuna::inhom::{
    brute_force_smallest, find_shifted_approx, gap_structure, ostrowski_expand, shift_distance,
    window_size,
};
use lacuna::lacunary::build;
use lacuna::ExactReal;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use std::cmp::Ordering;

const RADICANDS: [i64; 10] = [2, 3, 5, 6, 7, 10, 11, 13, 14, 19];

fn quadratic() -> impl Strategy<Value = ExactReal> {
    (
        -40i64..40,
        1i64..12,
        1i64..25,
        0usize..RADICANDS.len(),
        any::<bool>(),
    )
        .prop_map(|(a, b, c, di, neg)| {
            let b = if neg { -b } else { b };
            ExactReal::quadratic(a, b, c, RADICANDS[di]).unwrap()
        })
}

fn rational() -> impl Strategy<Value = ExactReal> {
    (-200i64..200, 1i64..60).prop_map(|(p, q)| ExactReal::rational(p, q))
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn torus_distance_range_and_shift(x in quadratic(), k in -1000i64..1000) {
        let d = x.torus_distance().unwrap();
        let half = ExactReal::rational(1, 2);
        prop_assert!(d.cmp_exact(&ExactReal::zero()).unwrap() != Ordering::Less);
        prop_assert!(d.cmp_exact(&half).unwrap() != Ordering::Greater);
        prop_assert_eq!(x.add_int(&BigInt::from(k)).torus_distance().unwrap(), d);
    }

    #[test]
    fn canonical_form_round_trips(x in quadratic()) {
        let s = x.to_string();
        let y: ExactReal = s.parse().unwrap();
        prop_assert_eq!(&y, &x);
        prop_assert_eq!(y.to_string(), s);
    }

    #[test]
    fn compare_is_antisymmetric(p in 2i64..500, q in 2i64..500, r in 1i64..9) {
        let x = Expr::int(p).ln();
        let y = Expr::int(q).ln().mul(Expr::Const(rat(r, 3)));
        let a = compare_expr(&x, &y, 60);
        let b = compare_expr(&y, &x, 60);
        prop_assert_eq!(a, b.reverse());
    }

    #[test]
    fn compare_exact_matches_rational_order(x in quadratic(), p in -300i64..300, q in 1i64..50) {
        let t = Threshold::Exact(rat(p, q));
        let want = x.cmp_exact(&ExactReal::rational(p, q)).unwrap();
        prop_assert_eq!(compare(&x, &t, 50), Comparison::from_ordering(want));
    }

    #[test]
    fn ln_cells_nest(p in 1i64..10_000, q in 1i64..1000, s in 1u32..25) {
        let r = rat(p, q);
        let ten = BigInt::from(10);
        let coarse = ln_interval(&r, &BigRational::new(BigInt::one(), ten.pow(s)));
        let fine = ln_interval(&r, &BigRational::new(BigInt::one(), ten.pow(s + 1)));
        prop_assert!(coarse.lo() <= fine.lo() && fine.hi() <= coarse.hi());
        prop_assert!(fine.width() <= BigRational::new(BigInt::one(), ten.pow(s + 1)));
    }

    #[test]
    fn convergent_identities(x in quadratic()) {
        let deep = expand(&x, 60).unwrap();
        let shallow = expand(&x, 20).unwrap();
        for k in 1..=20 {
            prop_assert_eq!(shallow.digit(k), deep.digit(k));
        }
        let t = convergents(&deep, 60).unwrap();
        for k in 0..=60isize {
            let det = t.p(k) * t.q(k - 1) - t.p(k - 1) * t.q(k);
            let want = if k % 2 == 0 { -BigInt::one() } else { BigInt::one() };
            prop_assert_eq!(det, want);
            prop_assert!(t.p(k).gcd(t.q(k)).is_one());
        }
    }

    #[test]
    fn three_gaps(x in quadratic(), m in 1u64..400) {
        let g = gap_structure(&x, m).unwrap();
        prop_assert!(!g.distinct_gaps.is_empty() && g.distinct_gaps.len() <= 3);
        prop_assert!(g.sums_to_one());
    }

    #[test]
    fn ostrowski_digit_rules(alpha in quadratic(), gamma in rational()) {
        let depth = 25;
        let o = ostrowski_expand(&gamma, &alpha, depth).unwrap();
        let cf = expand(&alpha, depth + 2).unwrap();
        for (i, c) in o.digits.iter().enumerate() {
            let a = cf.digit(i + 1).unwrap();
            prop_assert!(!c.is_negative() && c <= &a);
            if i > 0 && c == &a {
                prop_assert!(o.digits[i - 1].is_zero());
            }
        }
        prop_assert!(o.residual.abs().cmp_exact(&o.residual_bound).unwrap() != Ordering::Greater);
    }

    #[test]
    fn window_search_matches_brute_force(x in quadratic(), g in rational(), k in 1usize..7) {
        let t = convergents(&expand(&x, k + 2).unwrap(), k + 2).unwrap();
        let m = window_size(&t, k);
        if m > BigInt::from(20_000) {
            return Ok(());
        }
        let cert = find_shifted_approx(&x, &g, k).unwrap();
        prop_assert_eq!(&cert.m, &m);
        let bound = ExactReal::Rational(BigRational::new(BigInt::one(), t.q(k as isize).clone()));
        let m: u64 = m.try_into().unwrap();
        let (b, _) = brute_force_smallest(&x, &g, &bound, m).unwrap().unwrap();
        prop_assert_eq!(cert.b, b);
    }

    #[test]
    fn littlewood_counts_are_monotone(
        a in quadratic(), g in rational(), d in rational(),
        mut cps in prop::collection::vec(2u64..3000, 1..6),
    ) {
        cps.sort_unstable();
        cps.dedup();
        let beta = ExactReal::sqrt_of(3).unwrap();
        let c = littlewood_count(&a, &g, &beta, &d, 3000, &cps, 10_000, 60).unwrap();
        prop_assert!(c.series.is_monotone());
        prop_assert_eq!(c.series.points.len(), cps.len());
    }

    #[test]
    fn fm_samples_are_badly_approximable(m in 1u64..6, len in 1usize..8, seed in any::<u64>()) {
        let s = sample_fm(m, len, seed, DigitWeights::GaussKuzmin, 0).unwrap();
        let t = convergents(&expand(&s.value, 60).unwrap(), 60).unwrap();
        let floor = ExactReal::rational(1, m as i64 + 2);
        for k in 0..=60isize {
            let d = shift_distance(t.q(k), &s.value, &ExactReal::zero()).unwrap();
            let v = d.scale_int(t.q(k));
            prop_assert!(v.cmp_exact(&floor).unwrap() != Ordering::Less);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fourier_estimates_are_bounded(seed in any::<u64>(), m in 1u64..5) {
        let cfg = FourierConfig {
            m,
            weights: DigitWeights::Uniform,
            depth: 30,
            samples: 2000,
            freqs: vec![0, 1, -1, 7, 40, 41, 42, 1000],
            seed,
        };
        let run = fourier_surrogate(&cfg).unwrap();
        prop_assert_eq!((run.points[0].re, run.points[0].im), (1.0, 0.0));
        prop_assert_eq!(run.points[2], run.points[1].conj());
        for p in &run.points {
            prop_assert!(p.within_noise(3.0));
        }
    }
}

/// At `T <= 2` the uniform threshold is zero, so a zero distance is not a
/// strict hit; from `T = 3` on it is.
#[test]
fn strict_boundary_at_zero_threshold() {
    let alpha = ExactReal::golden_ratio();
    let seq = build(&alpha, &ExactReal::zero(), 4).unwrap();
    let beta = ExactReal::sqrt_of(5).unwrap();
    let delta = beta.scale_int(&seq.entries[0].n_t).fract().unwrap();
    // with a large B only the constructed zero distance can be a hit
    let b = rat(1_000_000_000, 1);
    let r = tk_sequence(&beta, &delta, &seq, &b, &rat(1, 2), 1, 4, 60).unwrap();
    assert_eq!(r.counts[..3], [0, 0, 1]);
    assert_eq!(r.values, vec![(1, Some(3))]);
}

#[test]
fn equal_exact_threshold_compares_equal() {
    let x = ExactReal::rational(3, 7);
    assert_eq!(
        compare(&x, &Threshold::Exact(rat(3, 7)), 50),
        Comparison::Equal
    );
    assert_eq!(
        compare(&ExactReal::zero(), &Threshold::zero(), 50),
        Comparison::Equal
    );
}
