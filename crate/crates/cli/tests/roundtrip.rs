//! parse(emit(report)) == report for every report type.

use std::collections::BTreeMap;

use cbm_core::contact_domains::{BoundInterval, BridgeReport, SqueezeVerdict};
use cbm_core::starshape::QiReport;
use cbm_core::{Element, GrowthRateReport, NormReport, RateMethod};
use cbm_lab::accept::{CriterionReport, SuiteReport};
use cbm_lab::json::to_report_string;
use cbm_lab::report::{DeltaReport, FormsReport, NormOutput};
use proptest::collection::vec;
use proptest::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn roundtrip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(value: &T) -> Result<(), TestCaseError> {
    let text = to_report_string(value);
    let back: T = serde_json::from_str(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, value);
    // emitting again gives the same bytes
    prop_assert_eq!(to_report_string(&back), text);
    Ok(())
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -1e3f64..1e3]
}

proptest! {
    #[test]
    fn growth(r in real(), m in real(), l in 1u64..100_000, i in 0usize..3) {
        let method = [RateMethod::LimitSequence, RateMethod::PairInfimum, RateMethod::PrimePairs][i];
        roundtrip(&GrowthRateReport { rho_plus: r, rho_minus: m, gamma: r.abs(), distance: m, l_max: l, method })?;
    }

    #[test]
    fn norm(p in -100i64..100, q in -100i64..100, base in vec(real(), 1..5), s in real()) {
        let norm = NormReport {
            nu_plus: p,
            nu_minus: q,
            nu: p.unsigned_abs().max(q.unsigned_abs()),
            base: Element::Grid(base.clone()),
            arg: Element::Grid(base),
        };
        roundtrip(&NormOutput { norm, stabilization: s })?;
    }

    #[test]
    fn intervals(lo in real(), hi in real(), text in "[a-z ⊂]{0,20}") {
        roundtrip(&BoundInterval { lower: lo, upper: hi, lower_certificate: text.clone(), upper_certificate: text.clone() })?;
        roundtrip(&SqueezeVerdict { verdict: lo < hi, certificate: text })?;
    }

    #[test]
    fn small_reports(a in real(), b in real(), c in real(), flag in any::<bool>(), w in proptest::option::of(0usize..10)) {
        roundtrip(&DeltaReport { delta: a, log_delta: b, volume_a: c, volume_b: a })?;
        roundtrip(&FormsReport { upper: a, lower: b, pinched: flag, witness: w, unverified_maps: w.into_iter().collect() })?;
        roundtrip(&QiReport { sup_distance: a, log_delta: b, lower: c, upper: a, pass: flag })?;
        roundtrip(&BridgeReport { d_order: a, d_cbm: b, gap: c, tolerance: a, holds: flag })?;
    }

    #[test]
    fn suite(values in vec(real(), 0..4), seed in any::<u64>()) {
        let measured: BTreeMap<String, f64> = values.iter().enumerate().map(|(i, v)| (format!("m{i}"), *v)).collect();
        let c = CriterionReport { id: 1, name: "x".into(), pass: true, cases: 3, measured, detail: "ok".into() };
        roundtrip(&SuiteReport { seed, l_max: 1000, prime_bound: 10_000, resolution: 1024, criteria: vec![c], passed: 1, failed: 0 })?;
    }
}
