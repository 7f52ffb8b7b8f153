use cbm_core::contact_forms::{
    dcbm_forms_lower_volume, dcbm_forms_upper, pullback, w_alpha_volume, ContactFormDoc,
};
use cbm_core::{ContactFormRep, ContactMapRep, SampledManifold};
use proptest::collection::vec;
use proptest::prelude::*;

const SITES: usize = 24;

fn shifts(m: &SampledManifold) -> Vec<ContactMapRep> {
    (1..m.sites())
        .map(|s| ContactMapRep::volume_consistent((0..m.sites()).map(|i| (i + s) % m.sites()).collect(), m).unwrap())
        .collect()
}

fn manifold() -> impl Strategy<Value = SampledManifold> {
    (vec(0.5f64..2.0, SITES), 1u32..=3).prop_map(|(w, n)| SampledManifold::new(w, n).unwrap())
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    vec(-2.0f64..2.0, SITES)
}

/// Dyadic values, so that differences and shifts by `g = 0` are exact.
fn dyadic_values() -> impl Strategy<Value = Vec<f64>> {
    vec((-128i32..128).prop_map(|k| k as f64 / 64.0), SITES)
}

fn form(m: &SampledManifold, f: Vec<f64>) -> ContactFormRep {
    ContactFormRep::new(m.clone(), f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn upper_bound_is_pseudo_metric_over_a_group(m in manifold(), a in values(), b in values(), c in values()) {
        let group = shifts(&m);
        let (f1, f2, f3) = (form(&m, a), form(&m, b), form(&m, c));
        let d = |x: &ContactFormRep, y: &ContactFormRep| dcbm_forms_upper(x, y, &group).unwrap();
        prop_assert_eq!(d(&f1, &f1), 0.0);
        prop_assert!((d(&f1, &f2) - d(&f2, &f1)).abs() <= 1e-12);
        prop_assert!(d(&f1, &f3) <= d(&f1, &f2) + d(&f2, &f3) + 1e-12);
    }

    #[test]
    fn common_pullback_invariance_exact(a in dyadic_values(), b in dyadic_values(), s in 1usize..SITES) {
        // equal weights: every shift has g = 0 and all arithmetic is exact
        let m = SampledManifold::uniform(SITES, 2).unwrap();
        let group = shifts(&m);
        let (f1, f2) = (form(&m, a), form(&m, b));
        let chi = &group[s - 1];
        let before = dcbm_forms_upper(&f1, &f2, &group).unwrap();
        let after = dcbm_forms_upper(&pullback(&f1, chi).unwrap(), &pullback(&f2, chi).unwrap(), &group).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn common_pullback_invariance_weighted(m in manifold(), a in values(), b in values(), s in 1usize..SITES) {
        let group = shifts(&m);
        let (f1, f2) = (form(&m, a), form(&m, b));
        let chi = &group[s - 1];
        let before = dcbm_forms_upper(&f1, &f2, &group).unwrap();
        let after = dcbm_forms_upper(&pullback(&f1, chi).unwrap(), &pullback(&f2, chi).unwrap(), &group).unwrap();
        prop_assert!((before - after).abs() <= 1e-12);
    }

    #[test]
    fn volume_bound_below_upper_bound(m in manifold(), a in values(), b in values()) {
        let group = shifts(&m);
        let (f1, f2) = (form(&m, a), form(&m, b));
        let lower = dcbm_forms_lower_volume(&f1, &f2).unwrap();
        prop_assert!(lower <= dcbm_forms_upper(&f1, &f2, &group).unwrap() + 1e-12);
        prop_assert!(lower <= dcbm_forms_upper(&f1, &f2, &[]).unwrap() + 1e-12);
    }

    #[test]
    fn rescaling_pinches(m in manifold(), a in values(), c in 1.0f64..100.0) {
        let f1 = form(&m, a);
        let f2 = f1.rescaled(c).unwrap();
        let upper = dcbm_forms_upper(&f1, &f2, &shifts(&m)).unwrap();
        let lower = dcbm_forms_lower_volume(&f1, &f2).unwrap();
        prop_assert!((upper - c.ln()).abs() <= 1e-9);
        prop_assert!((lower - c.ln()).abs() <= 1e-9);
    }

    #[test]
    fn volume_monotone_and_homogeneous(m in manifold(), a in values(), bump in vec(0.0f64..1.0, SITES), c in 0.1f64..10.0) {
        let f = form(&m, a.clone());
        let g = form(&m, a.iter().zip(&bump).map(|(x, y)| x + y).collect());
        prop_assert!(f.precedes(&g).unwrap());
        prop_assert!(w_alpha_volume(&f) <= w_alpha_volume(&g));
        let scaled = w_alpha_volume(&f.rescaled(c).unwrap());
        let expected = c.powi(m.half_dim as i32) * w_alpha_volume(&f);
        prop_assert!((scaled - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn consistent_maps_compose(m in manifold(), i in 1usize..SITES, j in 1usize..SITES) {
        let group = shifts(&m);
        let composed = group[i - 1].compose(&group[j - 1]).unwrap();
        prop_assert!(composed.is_volume_consistent(&m, 1e-12));
        prop_assert!(group[i - 1].inverse().is_volume_consistent(&m, 1e-12));
    }
}

#[test]
fn doc_roundtrip() {
    let m = SampledManifold::new(vec![0.25, 0.5, 1.0], 2).unwrap();
    let f = form(&m, vec![0.1, -0.2, 0.3]);
    let text = serde_json::to_string(&f.to_doc()).unwrap();
    assert_eq!(ContactFormRep::from_doc(serde_json::from_str::<ContactFormDoc>(&text).unwrap()).unwrap(), f);
    let bad = ContactFormDoc {
        sites: 4,
        ..f.to_doc()
    };
    assert!(ContactFormRep::from_doc(bad).is_err());
}
