use murmur_core::classnum::{sieve_class_numbers, ClassNumberTable};
use murmur_core::compare::{compare, Curve};
use murmur_core::interval::{Endpoint, Interval};
use murmur_core::murmur::{compute_series, MurmurationRequest};
use murmur_core::nu::{NuContext, NuWeight};
use murmur_core::trace::{ExactInt, TraceContext};
use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;

fn zero_two() -> Interval {
    Interval::exact((0, 1), (2, 1)).unwrap()
}

#[test]
fn cached_table_gives_identical_series() {
    let req = MurmurationRequest::new(1, 300.0, 30.0, zero_two()).unwrap();
    let table = sieve_class_numbers(req.required_bound()).unwrap();
    let mut bytes = Vec::new();
    table.write_to(&mut bytes).unwrap();
    let reloaded = ClassNumberTable::read_from(bytes.as_slice()).unwrap();
    let a = compute_series(&req, &TraceContext::from_table(table)).unwrap();
    let b = compute_series(&req, &TraceContext::from_table(reloaded)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn small_run_tracks_nu() {
    let nu = NuContext::new(1_000_000).unwrap();
    let grid: Vec<Endpoint> = (1..=40).map(|j| Endpoint::Exact(Ratio::new(j, 20))).collect();
    let t: Vec<f64> = grid.iter().map(Endpoint::value).collect();
    let nu_curve = Curve::new(t.clone(), nu.cumulative(&grid, 2000, NuWeight::Cubic).unwrap()).unwrap();

    let req = MurmurationRequest::new(0, 600.0, 60.0, zero_two()).unwrap();
    let ctx = TraceContext::from_table(sieve_class_numbers(req.required_bound()).unwrap());
    for delta in 0..=1u8 {
        let req = MurmurationRequest::new(delta, 600.0, 60.0, zero_two()).unwrap();
        let series = compute_series(&req, &ctx).unwrap();
        let r: Vec<f64> = series.cumulative_curve(&t).unwrap().iter().map(|c| c.r).collect();
        let sign = if delta == 0 { 1.0 } else { -1.0 };
        let cmp = compare(&Curve::new(t.clone(), r).unwrap(), &nu_curve, sign, 2.0).unwrap();
        assert!(cmp.deviation_at.1.abs() < 0.15, "δ={delta}: {cmp:?}");
        assert!(cmp.pearson.unwrap() > 0.9, "δ={delta}: {cmp:?}");
    }
}

#[test]
fn spectral_and_exact_traces_agree_at_composites() {
    let ctx = TraceContext::new(200).unwrap();
    for n in [4u64, 6, 12, 30, 49, 120] {
        for k in [12u32, 24, 36] {
            let exact = ctx.trace_hecke::<BigInt>(k, n).unwrap().to_f64();
            let scaled = exact * (n as f64).powf((1.0 - k as f64) / 2.0);
            let spectral = ctx.eigenvalue_sum(k, n).unwrap();
            assert!((spectral - scaled).abs() <= 1e-9 * scaled.abs().max(1.0), "k={k} n={n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nu_is_additive_over_splits(a in 1i64..40, b in 1i64..40, c in 1i64..40) {
        let nu = NuContext::new(1_000_000).unwrap();
        let mut cuts = [a, a + b, a + b + c];
        cuts.sort();
        let value = |lo: i64, hi: i64| {
            let e = Interval::exact((lo, 10), (hi, 10)).unwrap();
            nu.nu_rational(&e, 300, NuWeight::Cubic).unwrap().value
        };
        let whole = value(cuts[0], cuts[2]);
        let parts = value(cuts[0], cuts[1]) + value(cuts[1], cuts[2]);
        prop_assert!((whole - parts).abs() < 1e-12);
    }
}
