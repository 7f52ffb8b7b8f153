//! Relative growth rates `rho+`, `rho-`, `gamma` and the pseudo-metric
//! `d = ln gamma` on the dominants of an [`OrderedModel`].
//!
//! `rho+(a, b)` is estimated two ways from the same least-power oracle:
//!
//! * **limit sequence**: `min_power(a, b, l_max) / l_max`;
//! * **pair infimum**: `min { min_power(a, b, l) / l : 1 <= l <= l_max }`.
//!
//! A third estimate restricts ordering pairs `(p, q)` to primes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Element, OrderedModel};
use crate::sieve::SegmentedSieve;

/// Largest exponent magnitude the least-power search will try. Exponents stay
/// exactly representable as `f64`.
pub const POWER_SEARCH_BOUND: i64 = 1 << 50;

/// Exponent of the prime window `[k, k + k^0.6]` searched for a prime witness.
pub const PRIME_WINDOW_EXPONENT: f64 = 0.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateMethod {
    LimitSequence,
    PairInfimum,
    PrimePairs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRateReport {
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub gamma: f64,
    /// `ln gamma`.
    pub distance: f64,
    pub l_max: u64,
    pub method: RateMethod,
}

/// Both truncated forms of `rho+`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    pub limit: f64,
    pub pair_infimum: f64,
    pub l_max: u64,
}

fn require_dominant(model: &OrderedModel, a: &Element, which: &str) -> Result<()> {
    model.check(a)?;
    if !model.is_intrinsically_dominant(a) {
        return Err(Error::Precondition(format!("{which} is not a dominant")));
    }
    Ok(())
}

/// Least `k` with `a^k >= b^l`: exponential doubling away from zero, then
/// bisection. Relies on `k -> (a^k >= b^l)` being upward closed, which both
/// concrete models satisfy for dominant `a`.
pub fn min_power(model: &OrderedModel, a: &Element, b: &Element, l: u64) -> Result<i64> {
    require_dominant(model, a, "a")?;
    model.check(b)?;
    if l == 0 {
        return Err(Error::InvalidInput("l must be positive".into()));
    }
    min_power_unchecked(model, a, b, l as i64)
}

fn min_power_unchecked(model: &OrderedModel, a: &Element, b: &Element, l: i64) -> Result<i64> {
    let holds = |k: i64| model.ge_powers_unchecked(a, k, b, l);
    // invariant: holds(hi) && !holds(lo)
    let (mut lo, mut hi) = if holds(0) {
        let mut step = 1i64;
        while holds(-step) {
            if step >= POWER_SEARCH_BOUND {
                return Err(Error::Overflow {
                    bound: -step,
                    what: format!("a^k >= b^{l} holds for every k searched"),
                });
            }
            step *= 2;
        }
        (-step, -step / 2)
    } else {
        let mut step = 1i64;
        while !holds(step) {
            if step >= POWER_SEARCH_BOUND {
                return Err(Error::Overflow {
                    bound: step,
                    what: format!("a^k >= b^{l} fails for every k searched"),
                });
            }
            step *= 2;
        }
        (step / 2, step)
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Limit-sequence and pair-infimum estimates of `rho+(a, b)`.
pub fn rho_plus(model: &OrderedModel, a: &Element, b: &Element, l_max: u64) -> Result<RhoEstimate> {
    require_dominant(model, a, "a")?;
    model.check(b)?;
    if l_max == 0 {
        return Err(Error::InvalidInput("l_max must be positive".into()));
    }
    let ratios: Vec<f64> = (1..=l_max as i64)
        .into_par_iter()
        .map(|l| min_power_unchecked(model, a, b, l).map(|k| k as f64 / l as f64))
        .collect::<Result<_>>()?;
    let pair_infimum = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let limit = *ratios.last().expect("l_max >= 1");
    Ok(RhoEstimate {
        limit,
        pair_infimum,
        l_max,
    })
}

/// `inf { p/q : p, q prime <= prime_bound, a^p >= b^q }`.
///
/// For each prime `q` the witness `p` is the first prime in
/// `[k, k + k^0.6]`, `k = min_power(a, b, q)`.
pub fn rho_plus_primes(model: &OrderedModel, a: &Element, b: &Element, prime_bound: u64) -> Result<f64> {
    require_dominant(model, a, "a")?;
    require_dominant(model, b, "b")?;
    let sieve = SegmentedSieve::new(prime_bound);
    let best = sieve
        .primes_up_to(prime_bound)
        .into_par_iter()
        .map(|q| -> Result<Option<f64>> {
            let k = min_power_unchecked(model, a, b, q as i64)?;
            if k < 1 {
                return Ok(None);
            }
            let k = k as u64;
            let hi = k + (k as f64).powf(PRIME_WINDOW_EXPONENT).ceil() as u64;
            Ok(sieve.first_prime_in(k, hi).map(|p| p as f64 / q as f64))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NoPrimePair { bound: prime_bound })
    }
}

/// One-sided rate `rho+(a, b)` by the chosen method.
pub fn rate(
    model: &OrderedModel,
    a: &Element,
    b: &Element,
    method: RateMethod,
    l_max: u64,
    prime_bound: u64,
) -> Result<f64> {
    match method {
        RateMethod::LimitSequence => Ok(rho_plus(model, a, b, l_max)?.limit),
        RateMethod::PairInfimum => Ok(rho_plus(model, a, b, l_max)?.pair_infimum),
        RateMethod::PrimePairs => rho_plus_primes(model, a, b, prime_bound),
    }
}

/// `rho+`, `rho- = rho+(b, a)`, `gamma` and `d = ln gamma` by the pair infimum.
pub fn growth_distance(model: &OrderedModel, a: &Element, b: &Element, l_max: u64) -> Result<GrowthRateReport> {
    growth_distance_by(model, a, b, RateMethod::PairInfimum, l_max, crate::DEFAULT_PRIME_BOUND)
}

pub fn growth_distance_by(
    model: &OrderedModel,
    a: &Element,
    b: &Element,
    method: RateMethod,
    l_max: u64,
    prime_bound: u64,
) -> Result<GrowthRateReport> {
    require_dominant(model, a, "a")?;
    require_dominant(model, b, "b")?;
    let rho_plus = rate(model, a, b, method, l_max, prime_bound)?;
    let rho_minus = rate(model, b, a, method, l_max, prime_bound)?;
    let product_floor = 1.0 - 2.0 / l_max as f64;
    if rho_plus * rho_minus < product_floor {
        return Err(Error::Violation(format!(
            "rho+ rho- = {} < {product_floor}",
            rho_plus * rho_minus
        )));
    }
    let gamma = rho_plus.abs().max(rho_minus.abs());
    Ok(GrowthRateReport {
        rho_plus,
        rho_minus,
        gamma,
        distance: gamma.ln(),
        l_max,
        method,
    })
}

/// `a` is a dominant: intrinsically (`min a > 0` or `a > 1`) and, for every
/// probe, some finite power of `a` dominates it.
pub fn is_dominant(model: &OrderedModel, a: &Element, probes: &[Element]) -> bool {
    if !model.is_intrinsically_dominant(a) {
        return false;
    }
    probes
        .iter()
        .all(|b| model.check(b).is_ok() && min_power_unchecked(model, a, b, 1).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OrderVariant;
    use std::f64::consts::E;

    fn add(n: usize) -> OrderedModel {
        OrderedModel::additive(n, OrderVariant::NonStrict)
    }

    fn mul() -> OrderedModel {
        OrderedModel::multiplicative(OrderVariant::NonStrict)
    }

    /// Independent scan: first k in the range with a^k >= b^l.
    fn scan(model: &OrderedModel, a: &Element, b: &Element, l: i64, ks: std::ops::RangeInclusive<i64>) -> i64 {
        ks.into_iter()
            .find(|&k| model.ge(&model.power(a, k).unwrap(), &model.power(b, l).unwrap()).unwrap())
            .unwrap()
    }

    #[test]
    fn min_power_matches_scan() {
        let m = add(3);
        let a = Element::constant(3, 1.0);
        let b = Element::constant(3, 2.5);
        assert_eq!(scan(&m, &a, &b, 2, 1..=10), 5);
        assert_eq!(min_power(&m, &a, &b, 2).unwrap(), 5);
    }

    #[test]
    fn min_power_equal_elements() {
        let m = add(2);
        let a = Element::constant(2, 1.0);
        assert_eq!(min_power(&m, &a, &a, 7).unwrap(), 7);
    }

    #[test]
    fn min_power_multiplicative() {
        let m = mul();
        let (a, b) = (Element::Scalar(E), Element::Scalar(E * E));
        let want = (0..=20).find(|&k| k as f64 * E.ln() >= 3.0 * (E * E).ln()).unwrap();
        assert_eq!(want, 6);
        assert_eq!(min_power(&m, &a, &b, 3).unwrap(), 6);
    }

    #[test]
    fn min_power_negative_and_zero_answers() {
        let m = add(2);
        let a = Element::constant(2, 1.0);
        assert_eq!(min_power(&m, &a, &Element::constant(2, -2.5), 2).unwrap(), -5);
        assert_eq!(min_power(&m, &a, &Element::constant(2, 0.0), 4).unwrap(), 0);
        assert_eq!(min_power(&m, &a, &Element::Grid(vec![-0.5, 0.25]), 1).unwrap(), 1);
    }

    #[test]
    fn min_power_rejects_non_dominant() {
        let m = add(2);
        let err = min_power(&m, &Element::Grid(vec![0.0, 1.0]), &Element::constant(2, 1.0), 1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn min_power_overflow_reports_bound() {
        let m = add(1);
        let err = min_power(&m, &Element::Grid(vec![1e-300]), &Element::Grid(vec![1e300]), 1).unwrap_err();
        assert!(matches!(err, Error::Overflow { bound, .. } if bound >= POWER_SEARCH_BOUND));
    }

    #[test]
    fn rho_plus_exact_multiplicative() {
        for l_max in [1, 7, 100] {
            let r = rho_plus(&mul(), &Element::Scalar(E), &Element::Scalar(E * E), l_max).unwrap();
            assert_eq!(r.limit, 2.0);
            assert_eq!(r.pair_infimum, 2.0);
        }
    }

    #[test]
    fn rho_plus_of_self_is_one() {
        let a = Element::Grid(vec![0.3, 1.7, 2.0]);
        let r = rho_plus(&add(3), &a, &a, 50).unwrap();
        assert_eq!((r.limit, r.pair_infimum), (1.0, 1.0));
    }

    #[test]
    fn rho_plus_additive_sup_ratio() {
        let a = Element::constant(4, 1.0);
        let b = Element::Grid(vec![0.5, 3.5, 2.0, 1.0]);
        let l_max = 1000;
        let r = rho_plus(&add(4), &a, &b, l_max).unwrap();
        for v in [r.limit, r.pair_infimum] {
            assert!((3.5..=3.5 + 1.0 / l_max as f64).contains(&v), "{v}");
        }
    }

    #[test]
    fn primes_multiplicative_brute_force() {
        let m = mul();
        let (a, b) = (Element::Scalar(E), Element::Scalar(E * E));
        let primes = SegmentedSieve::new(10_000).primes_up_to(10_000);
        let mut brute = f64::INFINITY;
        for &q in &primes {
            // smallest prime p with p >= 2q, since a^p >= b^q iff p >= 2q
            let i = primes.partition_point(|&p| (p as f64) < 2.0 * q as f64);
            if let Some(&p) = primes.get(i) {
                brute = brute.min(p as f64 / q as f64);
            }
        }
        let got = rho_plus_primes(&m, &a, &b, 10_000).unwrap();
        assert!((2.0..=2.05).contains(&got));
        assert!((got - brute).abs() < 1e-12, "{got} vs {brute}");
    }

    #[test]
    fn primes_on_equal_elements() {
        let a = Element::constant(3, 0.7);
        assert_eq!(rho_plus_primes(&add(3), &a, &a, 1000).unwrap(), 1.0);
    }

    #[test]
    fn primes_no_pair_below_bound() {
        // rho+ = 1000, so p >= 2000 is needed even for q = 2
        let err = rho_plus_primes(&add(1), &Element::Grid(vec![0.001]), &Element::Grid(vec![1.0]), 100).unwrap_err();
        assert_eq!(err, Error::NoPrimePair { bound: 100 });
    }

    #[test]
    fn distance_examples() {
        let a = Element::Scalar(E);
        let r = growth_distance(&mul(), &a, &a, 100).unwrap();
        assert_eq!(r.distance, 0.0);
        let r = growth_distance(&mul(), &a, &Element::Scalar(E * E), 100).unwrap();
        assert_eq!((r.rho_plus, r.rho_minus, r.gamma), (2.0, 0.5, 2.0));
        assert_eq!(r.distance, 2f64.ln());
    }

    #[test]
    fn dominance_examples() {
        let m = add(3);
        let probes = vec![Element::constant(3, 100.0), Element::Grid(vec![-4.0, 5.0, 1e6])];
        assert!(is_dominant(&m, &Element::constant(3, 0.1), &probes));
        assert!(!is_dominant(&m, &Element::Grid(vec![0.1, 0.0, 0.1]), &probes));
        assert!(!is_dominant(&mul(), &Element::Scalar(0.5), &[]));
        assert!(is_dominant(&mul(), &Element::Scalar(1.01), &[Element::Scalar(1e300)]));
    }
}
