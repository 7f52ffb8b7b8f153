//! Finite models of bi-invariantly ordered semigroups.
//!
//! Two concrete models are provided:
//!
//! * positive reals under multiplication, ordered by `>=`;
//! * real grid functions under pointwise addition. This is the autonomous,
//!   commuting contact-Hamiltonian model: composing the flows of two
//!   time-independent Hamiltonians that Poisson-commute adds the Hamiltonians.
//!
//! Powers are never materialized. `a^k >= b^l` is decided directly from the
//! stored values (`k ln a >= l ln b`, or `k a_i >= l b_i` at every site), which
//! keeps the comparison free of overflow for large exponents.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    MultiplicativeReals,
    AdditiveGridFunctions,
}

/// Which partial order the oracle implements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderVariant {
    /// Pointwise comparison of Hamiltonians.
    NonStrict,
    /// `a >= b` iff `a = b` or `a = b c` with `c` strictly positive.
    StrictPositive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderedModel {
    pub kind: ModelKind,
    /// Number of grid sites; ignored by the multiplicative model.
    pub site_count: usize,
    pub order: OrderVariant,
}

/// An element of one of the models. Serializes as a bare number (multiplicative)
/// or a JSON array of numbers (grid function).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Scalar(f64),
    Grid(Vec<f64>),
}

impl Element {
    pub fn constant(site_count: usize, value: f64) -> Self {
        Element::Grid(vec![value; site_count])
    }

    pub fn as_grid(&self) -> Option<&[f64]> {
        match self {
            Element::Grid(v) => Some(v),
            Element::Scalar(_) => None,
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Element::Scalar(x) => Some(*x),
            Element::Grid(_) => None,
        }
    }
}

impl OrderedModel {
    pub fn multiplicative(order: OrderVariant) -> Self {
        OrderedModel {
            kind: ModelKind::MultiplicativeReals,
            site_count: 1,
            order,
        }
    }

    pub fn additive(site_count: usize, order: OrderVariant) -> Self {
        OrderedModel {
            kind: ModelKind::AdditiveGridFunctions,
            site_count,
            order,
        }
    }

    /// Same model with the other order variant.
    pub fn with_order(self, order: OrderVariant) -> Self {
        OrderedModel { order, ..self }
    }

    /// Validates that `e` belongs to this model.
    pub fn check(&self, e: &Element) -> Result<()> {
        match (self.kind, e) {
            (ModelKind::MultiplicativeReals, Element::Scalar(x)) => {
                if !(x.is_finite() && *x > 0.0) {
                    return invalid(format!("multiplicative element must be positive and finite, got {x}"));
                }
                Ok(())
            }
            (ModelKind::AdditiveGridFunctions, Element::Grid(v)) => {
                if v.len() != self.site_count {
                    return invalid(format!(
                        "grid element has {} sites, model has {}",
                        v.len(),
                        self.site_count
                    ));
                }
                if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                    return invalid(format!("grid element is not finite at site {i}"));
                }
                Ok(())
            }
            (ModelKind::MultiplicativeReals, Element::Grid(_)) => {
                invalid("grid element given to the multiplicative model")
            }
            (ModelKind::AdditiveGridFunctions, Element::Scalar(_)) => {
                invalid("scalar element given to the additive grid model")
            }
        }
    }

    pub fn identity(&self) -> Element {
        match self.kind {
            ModelKind::MultiplicativeReals => Element::Scalar(1.0),
            ModelKind::AdditiveGridFunctions => Element::constant(self.site_count, 0.0),
        }
    }

    pub fn compose(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Element::Scalar(x), Element::Scalar(y)) => Element::Scalar(x * y),
            (Element::Grid(x), Element::Grid(y)) => {
                Element::Grid(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(match a {
            Element::Scalar(x) => Element::Scalar(1.0 / x),
            Element::Grid(v) => Element::Grid(v.iter().map(|x| -x).collect()),
        })
    }

    /// `a^k`, materialized. Only used for small exponents (tests, norms).
    pub fn power(&self, a: &Element, k: i64) -> Result<Element> {
        self.check(a)?;
        Ok(match a {
            Element::Scalar(x) => Element::Scalar(x.powi(k as i32)),
            Element::Grid(v) => Element::Grid(v.iter().map(|x| k as f64 * x).collect()),
        })
    }

    /// Order oracle `a >= b`.
    pub fn ge(&self, a: &Element, b: &Element) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.ge_powers_unchecked(a, 1, b, 1))
    }

    /// `a^k >= b^l`, validating both elements first.
    pub fn ge_powers(&self, a: &Element, k: i64, b: &Element, l: i64) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.ge_powers_unchecked(a, k, b, l))
    }

    pub(crate) fn ge_powers_unchecked(&self, a: &Element, k: i64, b: &Element, l: i64) -> bool {
        let (k, l) = (k as f64, l as f64);
        match (a, b) {
            (Element::Scalar(x), Element::Scalar(y)) => k * x.ln() >= l * y.ln(),
            (Element::Grid(x), Element::Grid(y)) => {
                let mut iter = x.iter().zip(y).map(|(p, q)| (k * p, l * q));
                match self.order {
                    OrderVariant::NonStrict => iter.all(|(p, q)| p >= q),
                    OrderVariant::StrictPositive => {
                        let pairs: Vec<(f64, f64)> = iter.collect();
                        pairs.iter().all(|(p, q)| p == q) || pairs.iter().all(|(p, q)| p > q)
                    }
                }
            }
            _ => unreachable!("elements validated against the model"),
        }
    }

    /// Intrinsic dominance test: `min a > 0` (additive) or `a > 1` (multiplicative).
    pub fn is_intrinsically_dominant(&self, a: &Element) -> bool {
        if self.check(a).is_err() {
            return false;
        }
        match a {
            Element::Scalar(x) => *x > 1.0,
            Element::Grid(v) => !v.is_empty() && v.iter().all(|x| *x > 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add(n: usize) -> OrderedModel {
        OrderedModel::additive(n, OrderVariant::NonStrict)
    }

    #[test]
    fn constant_comparison() {
        let m = add(3);
        assert!(m.ge(&Element::constant(3, 2.0), &Element::constant(3, 1.0)).unwrap());
    }

    #[test]
    fn fails_at_second_site() {
        let m = add(2);
        let a = Element::constant(2, 1.0);
        let b = Element::Grid(vec![0.5, 1.5]);
        assert!(!m.ge(&a, &b).unwrap());
    }

    #[test]
    fn multiplicative_reflexive() {
        let m = OrderedModel::multiplicative(OrderVariant::NonStrict);
        assert!(m.ge(&Element::Scalar(3.0), &Element::Scalar(3.0)).unwrap());
    }

    #[test]
    fn site_count_mismatch_is_invalid_input() {
        let m = add(2);
        let err = m.ge(&Element::constant(2, 1.0), &Element::constant(3, 1.0)).unwrap_err();
        assert!(matches!(err, crate::Error::InvalidInput(_)));
    }

    #[test]
    fn strict_positive_needs_every_site() {
        let m = OrderedModel::additive(2, OrderVariant::StrictPositive);
        let a = Element::Grid(vec![2.0, 1.0]);
        let b = Element::Grid(vec![1.0, 1.0]);
        assert!(!m.ge(&a, &b).unwrap());
        assert!(m.ge(&a, &a).unwrap());
        assert!(m.ge(&Element::Grid(vec![2.0, 1.5]), &b).unwrap());
        // the non-strict order accepts the partial improvement
        assert!(m.with_order(OrderVariant::NonStrict).ge(&a, &b).unwrap());
    }

    #[test]
    fn powers_are_compared_without_overflow() {
        let m = OrderedModel::multiplicative(OrderVariant::NonStrict);
        let e = std::f64::consts::E;
        assert!(m.ge_powers(&Element::Scalar(e), 6000, &Element::Scalar(e * e), 3000).unwrap());
        assert!(!m.ge_powers(&Element::Scalar(e), 5999, &Element::Scalar(e * e), 3000).unwrap());
    }

    #[test]
    fn dominance_is_intrinsic() {
        assert!(add(2).is_intrinsically_dominant(&Element::constant(2, 0.1)));
        assert!(!add(2).is_intrinsically_dominant(&Element::Grid(vec![0.0, 1.0])));
        let m = OrderedModel::multiplicative(OrderVariant::NonStrict);
        assert!(!m.is_intrinsically_dominant(&Element::Scalar(0.5)));
    }
}
