//! Split fiberwise star-shaped domains `T^n x A x S^1` of `T^*T^n x S^1` and the
//! contact Banach-Mazur distance between them.
//!
//! For a torus base the contact shape invariant of the domain is its fiber `A`,
//! and covering rescales act on it by `A -> A/k`. This gives both sides of
//! `d_CBM`:
//!
//! * lower: any isotopy with `phi(U/k) ⊂ V/l` forces `csh(U)/k ⊂ csh(V)/l`,
//!   so `ln delta(A_U, A_V) <= d_CBM`;
//! * upper: the identity isotopy realizes `U/k ⊂ V/l` whenever
//!   `A_U/k ⊂ A_V/l` on the fibers.
//!
//! On toric inputs the two coincide and the interval collapses.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::growth::growth_distance;
use crate::model::{Element, OrderVariant, OrderedModel};
use crate::starshape::{self, DirectionGrid, RadialSet, RadialSetDoc};

/// Largest denominator tried when exhibiting a rational covering witness.
const WITNESS_DENOMINATOR: u64 = 1000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    /// `T^*T^n`; the shape invariant is the fiber.
    #[default]
    Torus,
    /// Any other Liouville manifold, e.g. the symplectization coordinate of a
    /// domain built from a Hamiltonian. No shape invariant is available.
    Other,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitToricDomain {
    pub base_dim: usize,
    pub base: BaseKind,
    /// Fiber of the undivided domain.
    fiber: RadialSet,
    pub liouville_weight: f64,
    pub label: String,
    /// `k` of `U/k`; the `S^1` factor of `U/k` is the `k`-fold cover of the
    /// original one. Bookkeeping only: split domains never depend on it for
    /// containment.
    pub cover_degree: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_certificate: String,
    pub upper_certificate: String,
}

impl BoundInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitToricDomainDoc {
    pub base_dim: usize,
    pub liouville_weight: f64,
    pub fiber: RadialSetDoc,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub base: BaseKind,
    #[serde(default = "one")]
    pub cover_degree: u64,
}

fn one() -> u64 {
    1
}

impl SplitToricDomain {
    pub fn new(base_dim: usize, fiber: RadialSet, liouville_weight: f64, label: impl Into<String>) -> Result<Self> {
        Self::with_base(BaseKind::Torus, base_dim, fiber, liouville_weight, label)
    }

    pub fn with_base(
        base: BaseKind,
        base_dim: usize,
        fiber: RadialSet,
        liouville_weight: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if base_dim == 0 {
            return invalid("base dimension must be at least 1");
        }
        if !(liouville_weight > 0.0 && liouville_weight <= 1.0) {
            return invalid(format!("Liouville weight must lie in (0, 1], got {liouville_weight}"));
        }
        if base == BaseKind::Torus && fiber.dimension() != base_dim {
            return invalid(format!(
                "torus base of dimension {base_dim} needs a fiber in R^{base_dim}, got R^{}",
                fiber.dimension()
            ));
        }
        Ok(SplitToricDomain {
            base_dim,
            base,
            fiber,
            liouville_weight,
            label: label.into(),
            cover_degree: 1,
        })
    }

    /// Fiber of this domain, `A / cover_degree^weight`.
    pub fn fiber(&self) -> Result<RadialSet> {
        if self.cover_degree == 1 {
            Ok(self.fiber.clone())
        } else {
            self.fiber.scale_pow(self.cover_degree, self.liouville_weight)
        }
    }

    pub fn is_toric(&self) -> bool {
        self.base == BaseKind::Torus && self.liouville_weight == 1.0
    }

    /// `C U`: Liouville flow for time `ln C`, fibers scaled by `C^weight`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return invalid(format!("scale factor must be positive, got {c}"));
        }
        let factor = if self.liouville_weight == 1.0 {
            c
        } else {
            c.powf(self.liouville_weight)
        };
        Ok(SplitToricDomain {
            fiber: self.fiber.scale(factor)?,
            ..self.clone()
        })
    }

    /// Relabel the direction sites of the fiber.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Ok(SplitToricDomain {
            fiber: self.fiber.permuted(perm)?,
            ..self.clone()
        })
    }

    pub fn to_doc(&self) -> SplitToricDomainDoc {
        SplitToricDomainDoc {
            base_dim: self.base_dim,
            liouville_weight: self.liouville_weight,
            fiber: self.fiber.to_doc(),
            label: self.label.clone(),
            base: self.base,
            cover_degree: self.cover_degree,
        }
    }

    pub fn from_doc(doc: SplitToricDomainDoc) -> Result<Self> {
        if doc.cover_degree == 0 {
            return invalid("cover degree must be at least 1");
        }
        let fiber = RadialSet::from_doc(doc.fiber)?;
        let mut d = Self::with_base(doc.base, doc.base_dim, fiber, doc.liouville_weight, doc.label)?;
        d.cover_degree = doc.cover_degree;
        Ok(d)
    }
}

/// `U/k = tau_k^{-1}(U)`.
pub fn rescale_cover(u: &SplitToricDomain, k: u64) -> Result<SplitToricDomain> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let cover_degree = u
        .cover_degree
        .checked_mul(k)
        .ok_or_else(|| Error::InvalidInput("cover degree overflows".into()))?;
    Ok(SplitToricDomain {
        cover_degree,
        ..u.clone()
    })
}

fn require_toric(u: &SplitToricDomain) -> Result<()> {
    if u.base != BaseKind::Torus {
        return Err(Error::UnsupportedDomain(format!(
            "'{}' is not torus-based; its shape invariant has no closed form here",
            u.label
        )));
    }
    if u.liouville_weight != 1.0 {
        return Err(Error::UnsupportedDomain(format!(
            "'{}' has Liouville weight {}; torus-based domains scale cotangent fibers with weight 1",
            u.label, u.liouville_weight
        )));
    }
    Ok(())
}

/// Contact shape invariant of a torus-based split domain: its fiber.
pub fn csh(u: &SplitToricDomain) -> Result<RadialSet> {
    require_toric(u)?;
    u.fiber()
}

/// `rho_c(U, V)` realized by the identity isotopy: the least `k/l` with
/// `A_U / k^w ⊂ A_V / l^w`, i.e. `(max A_U/A_V)^{1/w}`.
fn identity_rho(u: &RadialSet, v: &RadialSet, weight: f64) -> Result<f64> {
    let f = u.containment_factor(v)?;
    Ok(if weight == 1.0 { f } else { f.powf(1.0 / weight) })
}

/// Best rational `k/l >= rho` with `l <= WITNESS_DENOMINATOR` whose covering
/// inclusion `A_U / k ⊂ A_V / l` holds on the grid.
fn rational_witness(u: &RadialSet, v: &RadialSet, rho: f64) -> Option<(u64, u64)> {
    (1..=WITNESS_DENOMINATOR)
        .filter_map(|l| {
            let k = (rho * l as f64).ceil().max(1.0) as u64;
            (k..k + 2)
                .find(|&k| {
                    u.radii()
                        .iter()
                        .zip(v.radii())
                        .all(|(a, b)| a / k as f64 <= b / l as f64)
                })
                .map(|k| (k, l))
        })
        .min_by(|(k1, l1), (k2, l2)| (k1 * l2).cmp(&(k2 * l1)))
}

/// Upper bound on `d_CBM(U, V)` from identity inclusions between covering
/// rescales. Valid for any pair of split domains with the same weight.
pub fn dcbm_split_upper(u: &SplitToricDomain, v: &SplitToricDomain) -> Result<(f64, String)> {
    if u.liouville_weight != v.liouville_weight {
        return invalid("domains have different Liouville weights");
    }
    let (a, b) = (u.fiber()?, v.fiber()?);
    let forward = identity_rho(&a, &b, u.liouville_weight)?;
    let backward = identity_rho(&b, &a, u.liouville_weight)?;
    let gamma = forward.max(backward).max(1.0);
    let mut cert = format!(
        "identity isotopy: rho_c(U,V) <= {forward:.17e}, rho_c(V,U) <= {backward:.17e} \
         (inclusions of covering rescales of the fibers, limit over rationals)"
    );
    if u.liouville_weight == 1.0 {
        if let (Some((k1, l1)), Some((k2, l2))) = (
            rational_witness(&a, &b, forward),
            rational_witness(&b, &a, backward),
        ) {
            cert.push_str(&format!("; witnesses U/{k1} ⊂ V/{l1} and V/{k2} ⊂ U/{l2}"));
        }
    }
    Ok((gamma.ln(), cert))
}

/// Certified interval for `d_CBM(T^n x A_U x S^1, T^n x A_V x S^1)`.
pub fn dcbm_toric(u: &SplitToricDomain, v: &SplitToricDomain) -> Result<BoundInterval> {
    require_toric(u)?;
    require_toric(v)?;
    if u.base_dim != v.base_dim {
        return invalid(format!("base dimensions differ: {} vs {}", u.base_dim, v.base_dim));
    }
    let (cu, cv) = (csh(u)?, csh(v)?);
    let lower = starshape::log_delta(&cu, &cv)?;
    let (upper, upper_certificate) = dcbm_split_upper(u, v)?;
    Ok(BoundInterval {
        lower,
        upper,
        lower_certificate: format!(
            "shape invariant: phi(U/k) ⊂ V/l implies csh(U)/k ⊂ csh(V)/l with csh = fiber, \
             so d_CBM >= ln delta(A_U, A_V) = {lower:.17e}"
        ),
        upper_certificate,
    })
}

/// Coarse symplectic Banach-Mazur distance between `T^n x A_U` and `T^n x A_V`:
/// identity inclusions `U ⊂ C V ⊂ C^2 U` bound it above by `ln delta`, the
/// shape-invariant chain bounds it below by the same value.
pub fn dc_toric(u_fiber: &RadialSet, v_fiber: &RadialSet) -> Result<f64> {
    starshape::log_delta(u_fiber, v_fiber)
}

pub fn dc_toric_certified(u_fiber: &RadialSet, v_fiber: &RadialSet) -> Result<BoundInterval> {
    let d = dc_toric(u_fiber, v_fiber)?;
    Ok(BoundInterval {
        lower: d,
        upper: d,
        lower_certificate: "d_c >= d_CBM of the contactizations >= ln delta (shape invariant)".into(),
        upper_certificate: "identity inclusions U ⊂ delta V and V ⊂ delta U".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeVerdict {
    pub verdict: bool,
    pub certificate: String,
}

/// Squeezability of a torus-based split domain: never, for a bounded fiber with
/// the origin in its interior.
pub fn is_squeezable_toric(u: &SplitToricDomain) -> Result<SqueezeVerdict> {
    require_toric(u)?;
    let a = csh(u)?;
    if let Some(i) = a.radii().iter().position(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::UnknownVerdict(format!("fiber radius at direction {i} is unbounded or degenerate")));
    }
    // inf { c : A ⊂ c A } on the grid
    let self_factor = a.containment_factor(&a)?;
    let (i, r) = a
        .radii()
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    Ok(SqueezeVerdict {
        verdict: false,
        certificate: format!(
            "non-squeezable: phi(U/k) ⊂ U/l with k < l would give csh(U)/k ⊂ csh(U)/l by monotonicity \
             of the shape invariant, i.e. A ⊂ (k/l) A with k/l < 1; but inf {{c : A ⊂ c A}} = {self_factor} \
             (direction {i} has radius {r} > 0 and would need {r} <= (k/l) {r})"
        ),
    })
}

/// Squeezability straight from a document, reporting an unknown verdict when
/// the fiber is unbounded or touches the origin.
pub fn is_squeezable_doc(doc: SplitToricDomainDoc) -> Result<SqueezeVerdict> {
    if let Some(i) = doc.fiber.radii.iter().position(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::UnknownVerdict(format!(
            "fiber radius {} at direction {i}: no certificate for unbounded or degenerate fibers",
            doc.fiber.radii[i]
        )));
    }
    is_squeezable_toric(&SplitToricDomain::from_doc(doc)?)
}

/// `U(h) = { s h < 1 }` for an autonomous positive contact Hamiltonian `h`,
/// with `s` the symplectization coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianDomain {
    pub domain: SplitToricDomain,
    pub m_minus: f64,
    pub m_plus: f64,
}

impl HamiltonianDomain {
    /// Slices `U|_s` are empty for `s >= 1/m_-`.
    pub fn empty_from(&self) -> f64 {
        1.0 / self.m_minus
    }

    /// Slices `U|_s` are all of `M` for `s <= 1/m_+`.
    pub fn full_up_to(&self) -> f64 {
        1.0 / self.m_plus
    }

    /// Sites `x` present in the slice at `s`, i.e. `h(x) < 1/s`.
    pub fn slice(&self, s: f64) -> Result<Vec<bool>> {
        Ok(self.domain.fiber()?.radii().iter().map(|r| s < *r).collect())
    }
}

pub fn hamiltonian_to_domain(h: &Element, grid: Option<Arc<DirectionGrid>>) -> Result<HamiltonianDomain> {
    let Some(values) = h.as_grid() else {
        return invalid("the Hamiltonian must be a grid function");
    };
    if let Some(i) = values.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Precondition(format!(
            "Hamiltonian must be positive, got {} at site {i}",
            values[i]
        )));
    }
    let grid = match grid {
        Some(g) => g,
        None => Arc::new(DirectionGrid::uniform_circle(values.len())?),
    };
    let fiber = RadialSet::new(grid, values.iter().map(|x| 1.0 / x).collect())?;
    let dim = fiber.dimension();
    let domain = SplitToricDomain::with_base(BaseKind::Other, dim, fiber, 1.0, "U(h)")?;
    let (m_minus, m_plus) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    Ok(HamiltonianDomain {
        domain,
        m_minus,
        m_plus,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub d_order: f64,
    pub d_cbm: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Growth distance of two positive autonomous Hamiltonians under the strict
/// order against `d_CBM` of their domains. In this commuting model both equal
/// `ln max(sup h1/h2, sup h2/h1)`, so the gap is also bounded.
pub fn rgr_vs_cbm(h1: &Element, h2: &Element, l_max: u64) -> Result<BridgeReport> {
    let (Some(a), Some(b)) = (h1.as_grid(), h2.as_grid()) else {
        return invalid("Hamiltonians must be grid functions");
    };
    if a.len() != b.len() {
        return invalid("Hamiltonians live on different site sets");
    }
    let model = OrderedModel::additive(a.len(), OrderVariant::StrictPositive);
    let d_order = growth_distance(&model, h1, h2, l_max)?.distance;
    let u = hamiltonian_to_domain(h1, None)?;
    let v = hamiltonian_to_domain(h2, Some(u.domain.fiber()?.grid().clone()))?;
    let (d_cbm, _) = dcbm_split_upper(&u.domain, &v.domain)?;
    let tolerance = 3.0 / l_max as f64;
    let gap = d_order - d_cbm;
    let holds = gap >= -tolerance && gap.abs() <= tolerance;
    if !holds {
        return Err(Error::Violation(format!(
            "d_order = {d_order}, d_CBM = {d_cbm}, gap {gap} outside tolerance {tolerance}"
        )));
    }
    Ok(BridgeReport {
        d_order,
        d_cbm,
        gap,
        tolerance,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Arc<DirectionGrid> {
        Arc::new(DirectionGrid::uniform_circle(256).unwrap())
    }

    fn toric(radius: f64) -> SplitToricDomain {
        SplitToricDomain::new(2, RadialSet::ball(grid(), radius).unwrap(), 1.0, "ball").unwrap()
    }

    fn ellipse(g: Arc<DirectionGrid>, a: f64, b: f64) -> RadialSet {
        RadialSet::from_angle_fn(g, |t| 1.0 / ((t.cos() / a).powi(2) + (t.sin() / b).powi(2)).sqrt()).unwrap()
    }

    #[test]
    fn cover_of_ball_capacity() {
        let g = Arc::new(DirectionGrid::sphere(4, 128).unwrap());
        let r = 2.0;
        let u = SplitToricDomain::with_base(BaseKind::Other, 2, RadialSet::ball(g, (r / PI).sqrt()).unwrap(), 0.5, "B(2)")
            .unwrap();
        let small = rescale_cover(&u, 4).unwrap().fiber().unwrap();
        for x in small.radii() {
            assert!((PI * x * x - r / 4.0).abs() < 1e-12);
        }
        assert_eq!(rescale_cover(&u, 1).unwrap(), u);
    }

    #[test]
    fn cover_of_toric_fiber_nests() {
        let u = SplitToricDomain::new(2, ellipse(grid(), 1.0, 3.0), 1.0, "E").unwrap();
        let half = rescale_cover(&u, 2).unwrap();
        let a = u.fiber().unwrap();
        assert_eq!(half.fiber().unwrap(), a.shrink(2.0).unwrap());
        assert!(half.fiber().unwrap().is_subset_of(&a).unwrap());
        let composed = rescale_cover(&rescale_cover(&u, 2).unwrap(), 3).unwrap();
        assert_eq!(composed, rescale_cover(&u, 6).unwrap());
    }

    #[test]
    fn shape_invariant_closed_form() {
        let u = SplitToricDomain::new(2, ellipse(grid(), 2.0, 0.5), 1.0, "E").unwrap();
        let a = u.fiber().unwrap();
        assert_eq!(csh(&u).unwrap(), a);
        assert_eq!(csh(&rescale_cover(&u, 5).unwrap()).unwrap(), a.shrink(5.0).unwrap());
        assert_eq!(csh(&u.scale(2.5).unwrap()).unwrap(), a.scale(2.5).unwrap());
    }

    #[test]
    fn csh_rejects_non_toric() {
        let u = SplitToricDomain::with_base(BaseKind::Other, 2, RadialSet::ball(grid(), 1.0).unwrap(), 1.0, "x").unwrap();
        assert!(matches!(csh(&u), Err(Error::UnsupportedDomain(_))));
        let w = SplitToricDomain::new(2, RadialSet::ball(grid(), 1.0).unwrap(), 0.5, "x").unwrap();
        assert!(matches!(csh(&w), Err(Error::UnsupportedDomain(_))));
    }

    #[test]
    fn dcbm_examples() {
        let (u, v) = (toric(1.0), toric(2.0));
        let d = dcbm_toric(&u, &v).unwrap();
        assert_eq!((d.lower, d.upper), (2f64.ln(), 2f64.ln()));
        assert!(d.upper_certificate.contains("U/1 ⊂ V/2"), "{}", d.upper_certificate);
        let z = dcbm_toric(&u, &u).unwrap();
        assert_eq!((z.lower, z.upper), (0.0, 0.0));
        let dc = dc_toric(&u.fiber().unwrap(), &v.fiber().unwrap()).unwrap();
        assert!(d.upper <= dc);
    }

    #[test]
    fn dc_rescaling_axis() {
        let a = ellipse(grid(), 1.0, 2.0);
        assert_eq!(dc_toric(&a, &a).unwrap(), 0.0);
        let c = 3.7;
        assert!((dc_toric(&a.scale(c).unwrap(), &a).unwrap() - c.ln()).abs() < 1e-15);
    }

    #[test]
    fn dcbm_dimension_mismatch() {
        let g3 = Arc::new(DirectionGrid::sphere(3, 128).unwrap());
        let w = SplitToricDomain::new(3, RadialSet::ball(g3, 1.0).unwrap(), 1.0, "b3").unwrap();
        assert!(dcbm_toric(&toric(1.0), &w).is_err());
    }

    #[test]
    fn balls_are_not_squeezable() {
        for r in [0.1, 1.0, 10.0] {
            let v = is_squeezable_toric(&toric(r)).unwrap();
            assert!(!v.verdict);
            assert!(v.certificate.contains("monotonicity"));
        }
    }

    #[test]
    fn unbounded_fiber_has_no_verdict() {
        let mut doc = toric(1.0).to_doc();
        doc.fiber.radii[5] = f64::INFINITY;
        assert!(matches!(is_squeezable_doc(doc), Err(Error::UnknownVerdict(_))));
    }

    #[test]
    fn reeb_flow_domain_is_unit_ball() {
        let h = hamiltonian_to_domain(&Element::constant(128, 1.0), None).unwrap();
        assert!(h.domain.fiber().unwrap().radii().iter().all(|&r| r == 1.0));
        assert_eq!((h.m_minus, h.m_plus), (1.0, 1.0));
        let doubled = hamiltonian_to_domain(&Element::constant(128, 2.0), None).unwrap();
        assert!(doubled.domain.fiber().unwrap().radii().iter().all(|&r| r == 0.5));
    }

    #[test]
    fn hamiltonian_slices() {
        let mut v = vec![1.0; 64];
        v[0] = 4.0;
        v[1] = 0.5;
        let h = hamiltonian_to_domain(&Element::Grid(v), None).unwrap();
        assert_eq!(h.empty_from(), 2.0);
        assert_eq!(h.full_up_to(), 0.25);
        assert!(h.slice(2.0).unwrap().iter().all(|p| !p));
        assert!(h.slice(0.25 - 1e-9).unwrap().iter().all(|p| *p));
        let mid = h.slice(0.5).unwrap();
        assert!(!mid[0] && mid[1] && mid[2]);
    }

    #[test]
    fn hamiltonian_must_be_positive() {
        let mut v = vec![1.0; 64];
        v[7] = 0.0;
        assert!(matches!(hamiltonian_to_domain(&Element::Grid(v), None), Err(Error::Precondition(_))));
    }

    #[test]
    fn bridge_examples() {
        let h = Element::constant(64, 1.0);
        let r = rgr_vs_cbm(&h, &h, 1000).unwrap();
        assert_eq!((r.d_order, r.d_cbm), (0.0, 0.0));
        let r = rgr_vs_cbm(&h, &Element::constant(64, 2.0), 1000).unwrap();
        assert_eq!(r.d_order, 2f64.ln());
        assert_eq!(r.d_cbm, 2f64.ln());
    }
}
