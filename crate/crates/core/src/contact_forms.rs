//! Contact forms `alpha = e^f alpha_0` on a sampled closed manifold.
//!
//! A contactomorphism is represented by a site map `phi` (a permutation) and
//! its conformal factor `g`, with `phi^* (e^f alpha_0) = e^{f o phi + g} alpha_0`.
//! No check that `(phi, g)` comes from an actual contactomorphism is possible at
//! this resolution; [`ContactMapRep::is_volume_consistent`] tests the one
//! necessary condition that is visible, namely that `g` is the Jacobian of
//! `phi` for the contact volume `alpha_0 ∧ (d alpha_0)^{n'-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::starshape::grid_is_permutation;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledManifold {
    /// Quadrature weights of `alpha_0 ∧ (d alpha_0)^{n'-1}`, one per site.
    pub weights: Vec<f64>,
    /// `n'`: half the real dimension of the filling.
    pub half_dim: u32,
}

impl SampledManifold {
    pub fn new(weights: Vec<f64>, half_dim: u32) -> Result<Self> {
        if weights.is_empty() {
            return invalid("manifold needs at least one site");
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return invalid(format!("weight at site {i} must be positive and finite"));
        }
        if half_dim == 0 {
            return invalid("half dimension must be at least 1");
        }
        Ok(SampledManifold { weights, half_dim })
    }

    pub fn uniform(sites: usize, half_dim: u32) -> Result<Self> {
        Self::new(vec![1.0 / sites as f64; sites], half_dim)
    }

    pub fn sites(&self) -> usize {
        self.weights.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactFormRep {
    pub manifold: SampledManifold,
    pub f: Vec<f64>,
}

/// `{sites, weights, half_dim, f}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactFormDoc {
    pub sites: usize,
    pub weights: Vec<f64>,
    pub half_dim: u32,
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactMapRep {
    /// `phi(i) = perm[i]`.
    pub perm: Vec<usize>,
    /// Conformal factor `g_{phi, alpha_0}` per site.
    pub g: Vec<f64>,
}

impl ContactFormRep {
    pub fn new(manifold: SampledManifold, f: Vec<f64>) -> Result<Self> {
        if f.len() != manifold.sites() {
            return invalid(format!("{} values for {} sites", f.len(), manifold.sites()));
        }
        if let Some(i) = f.iter().position(|x| !x.is_finite()) {
            return invalid(format!("f is not finite at site {i}"));
        }
        Ok(ContactFormRep { manifold, f })
    }

    /// `C alpha`, i.e. `f + ln C`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return invalid(format!("rescaling constant must be positive, got {c}"));
        }
        let shift = c.ln();
        Self::new(self.manifold.clone(), self.f.iter().map(|x| x + shift).collect())
    }

    /// `self ⪯ other`: `f_self <= f_other` at every site.
    pub fn precedes(&self, other: &ContactFormRep) -> Result<bool> {
        require_shared(self, other)?;
        Ok(self.f.iter().zip(&other.f).all(|(a, b)| a <= b))
    }

    pub fn from_doc(doc: ContactFormDoc) -> Result<Self> {
        if doc.sites != doc.weights.len() {
            return invalid(format!("sites = {} but {} weights given", doc.sites, doc.weights.len()));
        }
        Self::new(SampledManifold::new(doc.weights, doc.half_dim)?, doc.f)
    }

    pub fn to_doc(&self) -> ContactFormDoc {
        ContactFormDoc {
            sites: self.manifold.sites(),
            weights: self.manifold.weights.clone(),
            half_dim: self.manifold.half_dim,
            f: self.f.clone(),
        }
    }
}

fn require_shared(a: &ContactFormRep, b: &ContactFormRep) -> Result<()> {
    if a.manifold != b.manifold {
        return invalid("contact forms live on different sampled manifolds");
    }
    Ok(())
}

impl ContactMapRep {
    pub fn new(perm: Vec<usize>, g: Vec<f64>) -> Result<Self> {
        if !grid_is_permutation(&perm, perm.len()) {
            return invalid("site map must be a permutation");
        }
        if g.len() != perm.len() {
            return invalid(format!("{} conformal factors for {} sites", g.len(), perm.len()));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return invalid("conformal factor must be finite");
        }
        Ok(ContactMapRep { perm, g })
    }

    pub fn identity(sites: usize) -> Self {
        ContactMapRep {
            perm: (0..sites).collect(),
            g: vec![0.0; sites],
        }
    }

    /// Site permutation carrying the conformal factor forced by the contact
    /// volume: `e^{n' g_i} w_i = w_{phi(i)}`.
    pub fn volume_consistent(perm: Vec<usize>, manifold: &SampledManifold) -> Result<Self> {
        if perm.len() != manifold.sites() {
            return invalid("permutation length differs from the site count");
        }
        let n = manifold.half_dim as f64;
        let w = &manifold.weights;
        let g = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| (w[j] / w[i]).ln() / n)
            .collect();
        Self::new(perm, g)
    }

    pub fn sites(&self) -> usize {
        self.perm.len()
    }

    /// `self ∘ other`, so that pulling back by it equals pulling back by
    /// `self` and then by `other`.
    pub fn compose(&self, other: &ContactMapRep) -> Result<Self> {
        if self.sites() != other.sites() {
            return invalid("maps act on different site counts");
        }
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let g = other
            .perm
            .iter()
            .zip(&other.g)
            .map(|(&j, gi)| self.g[j] + gi)
            .collect();
        Ok(ContactMapRep { perm, g })
    }

    pub fn inverse(&self) -> Self {
        let mut perm = vec![0; self.sites()];
        for (i, &j) in self.perm.iter().enumerate() {
            perm[j] = i;
        }
        let g = perm.iter().map(|&i| -self.g[i]).collect();
        ContactMapRep { perm, g }
    }

    /// Whether `g` matches the volume Jacobian of the permutation within `tol`.
    pub fn is_volume_consistent(&self, manifold: &SampledManifold, tol: f64) -> bool {
        let n = manifold.half_dim as f64;
        let w = &manifold.weights;
        self.sites() == manifold.sites()
            && self
                .perm
                .iter()
                .zip(&self.g)
                .enumerate()
                .all(|(i, (&j, g))| ((n * g).exp() * w[i] - w[j]).abs() <= tol * w[j])
    }
}

/// `phi^* alpha`: `f' = f o phi + g`.
pub fn pullback(alpha: &ContactFormRep, map: &ContactMapRep) -> Result<ContactFormRep> {
    if map.sites() != alpha.manifold.sites() {
        return invalid(format!(
            "map acts on {} sites, form lives on {}",
            map.sites(),
            alpha.manifold.sites()
        ));
    }
    let f = map
        .perm
        .iter()
        .zip(&map.g)
        .map(|(&j, g)| alpha.f[j] + g)
        .collect();
    ContactFormRep::new(alpha.manifold.clone(), f)
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `min over candidates ∪ {id} of |f1 - phi^* f2|_inf`, and the index of the
/// minimizing candidate (`None` for the identity).
pub fn dcbm_forms_upper_with_witness(
    f1: &ContactFormRep,
    f2: &ContactFormRep,
    candidates: &[ContactMapRep],
) -> Result<(f64, Option<usize>)> {
    require_shared(f1, f2)?;
    let mut best = (sup_distance(&f1.f, &f2.f), None);
    for (i, map) in candidates.iter().enumerate() {
        let d = sup_distance(&f1.f, &pullback(f2, map)?.f);
        if d < best.0 {
            best = (d, Some(i));
        }
    }
    Ok(best)
}

/// Upper bound on `d_CBM(alpha_1, alpha_2)` over the candidate maps.
pub fn dcbm_forms_upper(f1: &ContactFormRep, f2: &ContactFormRep, candidates: &[ContactMapRep]) -> Result<f64> {
    Ok(dcbm_forms_upper_with_witness(f1, f2, candidates)?.0)
}

/// `ln vol(W^alpha)` via log-sum-exp, so large `f` do not overflow.
fn ln_w_alpha_volume(alpha: &ContactFormRep) -> f64 {
    let n = alpha.manifold.half_dim as f64;
    let terms: Vec<f64> = alpha
        .f
        .iter()
        .zip(&alpha.manifold.weights)
        .map(|(f, w)| n * f + w.ln())
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln() - n.ln()
}

/// Symplectic volume of `W^alpha = { u < e^f }` in the symplectization:
/// `(1/n') sum_i e^{n' f_i} w_i`.
pub fn w_alpha_volume(alpha: &ContactFormRep) -> f64 {
    let n = alpha.manifold.half_dim as f64;
    alpha
        .f
        .iter()
        .zip(&alpha.manifold.weights)
        .map(|(f, w)| (n * f).exp() * w)
        .sum::<f64>()
        / n
}

/// Lower bound on `d_CBM` from volumes: a sandwich `W1/C ⊂ phi(W2) ⊂ C W1` by a
/// volume-preserving map forces `C^{n'} >= vol ratio` both ways, so
/// `d_CBM >= (1/n') |ln(vol W1 / vol W2)|`.
pub fn dcbm_forms_lower_volume(f1: &ContactFormRep, f2: &ContactFormRep) -> Result<f64> {
    require_shared(f1, f2)?;
    let n = f1.manifold.half_dim as f64;
    Ok((ln_w_alpha_volume(f1) - ln_w_alpha_volume(f2)).abs() / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifold() -> SampledManifold {
        SampledManifold::new(vec![0.5, 1.0, 1.5, 2.0], 2).unwrap()
    }

    fn form(f: &[f64]) -> ContactFormRep {
        ContactFormRep::new(manifold(), f.to_vec()).unwrap()
    }

    #[test]
    fn pullback_examples() {
        let a = form(&[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(pullback(&a, &ContactMapRep::identity(4)).unwrap(), a);
        let shifted = pullback(&a, &ContactMapRep::new(vec![0, 1, 2, 3], vec![0.5; 4]).unwrap()).unwrap();
        assert_eq!(shifted.f, vec![0.6, 0.7, 0.8, 0.9]);
        let perm = pullback(&a, &ContactMapRep::new(vec![3, 2, 1, 0], vec![0.0; 4]).unwrap()).unwrap();
        assert_eq!(perm.f, vec![0.4, 0.3, 0.2, 0.1]);
    }

    #[test]
    fn compose_and_inverse() {
        let m = manifold();
        let phi = ContactMapRep::volume_consistent(vec![1, 2, 3, 0], &m).unwrap();
        let psi = ContactMapRep::volume_consistent(vec![2, 0, 3, 1], &m).unwrap();
        let a = form(&[0.25, -1.0, 2.0, 0.5]);
        let two_step = pullback(&pullback(&a, &phi).unwrap(), &psi).unwrap();
        let one_step = pullback(&a, &phi.compose(&psi).unwrap()).unwrap();
        for (x, y) in two_step.f.iter().zip(&one_step.f) {
            assert!((x - y).abs() < 1e-15);
        }
        let id = phi.compose(&phi.inverse()).unwrap();
        assert_eq!(id.perm, vec![0, 1, 2, 3]);
        assert!(id.g.iter().all(|g| g.abs() < 1e-15));
        assert!(phi.is_volume_consistent(&m, 1e-12));
        assert!(!ContactMapRep::new(vec![1, 2, 3, 0], vec![0.0; 4])
            .unwrap()
            .is_volume_consistent(&m, 1e-12));
    }

    #[test]
    fn consistent_maps_preserve_volume() {
        let m = manifold();
        let phi = ContactMapRep::volume_consistent(vec![3, 0, 1, 2], &m).unwrap();
        let a = form(&[0.3, -0.2, 0.9, 0.0]);
        let b = pullback(&a, &phi).unwrap();
        assert!((w_alpha_volume(&a) - w_alpha_volume(&b)).abs() < 1e-12);
    }

    #[test]
    fn upper_examples() {
        let a = form(&[0.0, 0.5, -0.25, 1.0]);
        let b = form(&[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(dcbm_forms_upper(&a, &b, &[]).unwrap(), 1.0);
        assert_eq!(dcbm_forms_upper(&a, &a, &[]).unwrap(), 0.0);
        // b = a o phi^{-1} - g o phi^{-1}, so phi^* b = a exactly
        let phi = ContactMapRep::new(vec![1, 2, 3, 0], vec![0.0; 4]).unwrap();
        let moved = pullback(&a, &phi.inverse()).unwrap();
        let (d, which) = dcbm_forms_upper_with_witness(&a, &moved, &[phi]).unwrap();
        assert_eq!((d, which), (0.0, Some(0)));
    }

    #[test]
    fn volume_examples() {
        let zero = form(&[0.0; 4]);
        assert_eq!(w_alpha_volume(&zero), manifold().total_weight() / 2.0);
        let c = 3.0;
        let scaled = zero.rescaled(c).unwrap();
        assert!((w_alpha_volume(&scaled) - c * c * w_alpha_volume(&zero)).abs() < 1e-12);
        let bigger = form(&[0.0, 0.1, 0.0, 0.2]);
        assert!(zero.precedes(&bigger).unwrap());
        assert!(w_alpha_volume(&zero) <= w_alpha_volume(&bigger));
    }

    #[test]
    fn lower_examples() {
        let a = form(&[0.1, -0.3, 0.7, 0.0]);
        for c in [2.0, std::f64::consts::E, 10.0] {
            let d = dcbm_forms_lower_volume(&a, &a.rescaled(c).unwrap()).unwrap();
            assert!((d - c.ln()).abs() < 1e-12);
        }
        assert_eq!(dcbm_forms_lower_volume(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn lower_quarter_volume_ratio() {
        // n' = 2, f1 = 0, sum e^{2 f2} w = 4 sum w
        let m = SampledManifold::new(vec![1.0, 3.0], 2).unwrap();
        let f1 = ContactFormRep::new(m.clone(), vec![0.0, 0.0]).unwrap();
        let f2 = ContactFormRep::new(m, vec![(13f64).ln() / 2.0, 1f64.ln()]).unwrap();
        // brute-force quadrature of the ratio
        let ratio = (13.0 * 1.0 + 1.0 * 3.0) / (1.0 + 3.0);
        assert_eq!(ratio, 4.0);
        let d = dcbm_forms_lower_volume(&f1, &f2).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-12, "{d}");
    }

    #[test]
    fn manifold_mismatch() {
        let a = form(&[0.0; 4]);
        let other = ContactFormRep::new(SampledManifold::uniform(4, 2).unwrap(), vec![0.0; 4]).unwrap();
        assert!(dcbm_forms_upper(&a, &other, &[]).is_err());
        assert!(dcbm_forms_lower_volume(&a, &other).is_err());
        assert!(pullback(&a, &ContactMapRep::identity(3)).is_err());
    }
}
