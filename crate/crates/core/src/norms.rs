//! Order-derived norms on the additive grid group.
//!
//! For a dominant `base` and any `arg`:
//!
//! ```text
//! nu+(arg) = min { k : k base >= arg }    nu-(arg) = max { l : arg >= l base }
//! nu(arg)  = max(|nu+|, |nu-|)
//! ```
//!
//! In the additive model these are `ceil(sup arg/base)` and `floor(inf arg/base)`.
//! The closed forms only centre a search window; the reported values come from
//! the order oracle itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::rho_plus;
use crate::model::{Element, OrderVariant, OrderedModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub nu_plus: i64,
    pub nu_minus: i64,
    pub nu: u64,
    pub base: Element,
    pub arg: Element,
}

fn group_model(base: &Element, arg: &Element) -> Result<(OrderedModel, Vec<f64>, Vec<f64>)> {
    let (Some(b), Some(g)) = (base.as_grid(), arg.as_grid()) else {
        return Err(Error::InvalidInput("norms are defined on the additive grid group".into()));
    };
    let model = OrderedModel::additive(b.len(), OrderVariant::NonStrict);
    model.check(base)?;
    model.check(arg)?;
    if !model.is_intrinsically_dominant(base) {
        return Err(Error::Precondition("norm base must have strictly positive minimum".into()));
    }
    Ok((model, b.to_vec(), g.to_vec()))
}

/// Closed-form `(sup arg/base, inf arg/base)`.
fn ratio_extremes(base: &[f64], arg: &[f64]) -> (f64, f64) {
    base.iter().zip(arg).map(|(b, g)| g / b).fold(
        (f64::NEG_INFINITY, f64::INFINITY),
        |(hi, lo), r| (hi.max(r), lo.min(r)),
    )
}

/// Scan window `[-10 m, 10 m]` with `m = max(1, ceil(sup |arg/base|))`.
fn window(base: &[f64], arg: &[f64]) -> i64 {
    let m = base
        .iter()
        .zip(arg)
        .map(|(b, g)| (g / b).abs())
        .fold(0.0, f64::max)
        .ceil()
        .max(1.0);
    10 * m as i64
}

/// Boundary of a monotone predicate on `[lo, hi]` where `pred(lo) != pred(hi)`:
/// returns the `k` with `pred(k) == pred(hi)` and `pred(k - 1) == pred(lo)`.
fn bisect(mut lo: i64, mut hi: i64, pred: impl Fn(i64) -> bool) -> i64 {
    let at_hi = pred(hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) == at_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn norm(base: &Element, arg: &Element) -> Result<NormReport> {
    let (model, b, g) = group_model(base, arg)?;
    let w = window(&b, &g);
    let multiple = |k: i64| Element::Grid(b.iter().map(|x| k as f64 * x).collect());
    let dominates = |k: i64| model.ge_powers_unchecked(&multiple(k), 1, arg, 1);
    let dominated = |k: i64| model.ge_powers_unchecked(arg, 1, &multiple(k), 1);

    if dominates(-w) || !dominates(w) || !dominated(-w) || dominated(w) {
        return Err(Error::Violation(format!("scan window [-{w}, {w}] does not bracket nu+/nu-")));
    }
    let nu_plus = bisect(-w, w, dominates);
    let nu_minus = bisect(-w, w, dominated) - 1;

    let (sup, inf) = ratio_extremes(&b, &g);
    debug_assert!((nu_plus as f64 - sup.ceil()).abs() <= 1.0);
    debug_assert!((nu_minus as f64 - inf.floor()).abs() <= 1.0);

    Ok(NormReport {
        nu_plus,
        nu_minus,
        nu: nu_plus.unsigned_abs().max(nu_minus.unsigned_abs()),
        base: base.clone(),
        arg: arg.clone(),
    })
}

/// `nu(l_max * arg) / l_max`, checked against
/// `max(|rho+(base, arg)|, |rho+(base, -arg)|)` within `2 / l_max`.
pub fn stabilization(base: &Element, arg: &Element, l_max: u64) -> Result<f64> {
    let (model, _, g) = group_model(base, arg)?;
    if l_max == 0 {
        return Err(Error::InvalidInput("l_max must be positive".into()));
    }
    let scaled = Element::Grid(g.iter().map(|x| l_max as f64 * x).collect());
    let value = norm(base, &scaled)?.nu as f64 / l_max as f64;

    let neg = model.inverse(arg)?;
    let forward = rho_plus(&model, base, arg, l_max)?.pair_infimum;
    let backward = rho_plus(&model, base, &neg, l_max)?.pair_infimum;
    let rates = forward.abs().max(backward.abs());
    let tol = 2.0 / l_max as f64;
    if (value - rates).abs() > tol {
        return Err(Error::Violation(format!(
            "stabilized norm {value} differs from growth rates {rates} by more than {tol}"
        )));
    }
    Ok(value)
}
