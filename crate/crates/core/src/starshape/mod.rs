//! Star-shaped subsets of `R^n` about the origin, stored as radial functions
//! sampled on a [`DirectionGrid`].
//!
//! A set is faithfully represented when its radial function is the stored one
//! at every grid direction; containment and the scaling distance `delta` are
//! then exact on the representation. For a set whose radial function is
//! Lipschitz with constant `K`, sampling at angular step `h` perturbs `ln delta`
//! by `O(K h)`.

mod grid;
mod skeleton;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use grid::{sphere_area, DirectionGrid, DEFAULT_PLANAR_COUNT, MIN_DIRECTIONS};
pub(crate) use grid::is_permutation as grid_is_permutation;
pub use skeleton::{lshape, qi_verify, skeleton_grid, skeleton_region, QiReport, SkeletonSpec, QI_LOWER_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct RadialSet {
    grid: Arc<DirectionGrid>,
    radii: Vec<f64>,
}

/// On-disk form of a [`RadialSet`]. Without `directions` the default grid for
/// `dimension` with `radii.len()` directions is regenerated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSetDoc {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub radii: Vec<f64>,
}

impl RadialSet {
    pub fn new(grid: Arc<DirectionGrid>, radii: Vec<f64>) -> Result<Self> {
        if radii.len() != grid.len() {
            return invalid(format!("{} radii for {} directions", radii.len(), grid.len()));
        }
        if let Some(i) = radii.iter().position(|r| !(r.is_finite() && *r > 0.0)) {
            return invalid(format!(
                "radius {} at direction {i}: the set must be bounded with the origin in its interior",
                radii[i]
            ));
        }
        Ok(RadialSet { grid, radii })
    }

    /// Samples `radial(direction)` on every grid direction.
    pub fn from_fn(grid: Arc<DirectionGrid>, radial: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let radii = grid.directions().iter().map(|d| radial(d)).collect();
        Self::new(grid, radii)
    }

    /// Planar sets given by their radial function in the polar angle.
    pub fn from_angle_fn(grid: Arc<DirectionGrid>, radial: impl Fn(f64) -> f64) -> Result<Self> {
        let Some(angles) = grid.angles() else {
            return invalid("angle-parametrized sets need a planar grid");
        };
        let radii = angles.iter().map(|&a| radial(a)).collect();
        Self::new(grid, radii)
    }

    pub fn ball(grid: Arc<DirectionGrid>, radius: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![radius; n])
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn same_grid(&self, other: &RadialSet) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }

    fn require_same_grid(&self, other: &RadialSet) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            invalid("radial sets are sampled on different direction grids")
        }
    }

    /// `c A`: every radius multiplied by `c`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.radii.iter().map(|r| r * c).collect())
    }

    /// `(1/k) A`: every radius divided by `k`.
    pub fn shrink(&self, k: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.radii.iter().map(|r| r / k).collect())
    }

    /// Image under the Liouville flow for time `-ln k` when the flow scales this
    /// factor with homogeneity `weight`: radii times `k^-weight`. Weight 1
    /// divides by `k` directly.
    pub fn scale_pow(&self, k: u64, weight: f64) -> Result<Self> {
        if k == 0 {
            return invalid("k must be at least 1");
        }
        if !(weight > 0.0 && weight <= 1.0) {
            return invalid(format!("Liouville weight must lie in (0, 1], got {weight}"));
        }
        if weight == 1.0 {
            self.shrink(k as f64)
        } else {
            self.scale((k as f64).powf(-weight))
        }
    }

    /// `A ⊂ B` on the grid.
    pub fn is_subset_of(&self, other: &RadialSet) -> Result<bool> {
        self.require_same_grid(other)?;
        Ok(self.radii.iter().zip(&other.radii).all(|(a, b)| a <= b))
    }

    /// Least `c` with `A ⊂ c B`, i.e. `max_i rA(i) / rB(i)`.
    pub fn containment_factor(&self, other: &RadialSet) -> Result<f64> {
        self.require_same_grid(other)?;
        Ok(self
            .radii
            .par_iter()
            .zip(other.radii.par_iter())
            .map(|(a, b)| a / b)
            .reduce(|| 0.0, f64::max))
    }

    /// Volume by polar integration, `(1/n) sum_i r_i^n w_i`.
    pub fn volume(&self) -> f64 {
        let n = self.dimension() as i32;
        self.radii
            .iter()
            .zip(self.grid.weights())
            .map(|(r, w)| r.powi(n) * w)
            .sum::<f64>()
            / n as f64
    }

    /// Same set listed on the permuted grid.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let grid = Arc::new(self.grid.permuted(perm)?);
        Self::new(grid, perm.iter().map(|&i| self.radii[i]).collect())
    }

    pub fn to_doc(&self) -> RadialSetDoc {
        RadialSetDoc {
            dimension: self.dimension(),
            directions: Some(self.grid.directions().to_vec()),
            weights: Some(self.grid.weights().to_vec()),
            radii: self.radii.clone(),
        }
    }

    pub fn from_doc(doc: RadialSetDoc) -> Result<Self> {
        let grid = match doc.directions {
            Some(dirs) => DirectionGrid::new(doc.dimension, dirs, doc.weights)?,
            None => DirectionGrid::sphere(doc.dimension, doc.radii.len())?,
        };
        Self::new(Arc::new(grid), doc.radii)
    }
}

/// `delta(A, B) = inf { C > 1 : A/C ⊂ B ⊂ C A }`, i.e. the larger of the two
/// containment factors, clamped below at 1.
pub fn delta(a: &RadialSet, b: &RadialSet) -> Result<f64> {
    let forward = a.containment_factor(b)?;
    let backward = b.containment_factor(a)?;
    Ok(forward.max(backward).max(1.0))
}

pub fn log_delta(a: &RadialSet, b: &RadialSet) -> Result<f64> {
    Ok(delta(a, b)?.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn circle(n: usize) -> Arc<DirectionGrid> {
        Arc::new(DirectionGrid::uniform_circle(n).unwrap())
    }

    fn square(g: Arc<DirectionGrid>) -> RadialSet {
        RadialSet::from_angle_fn(g, |t| 1.0 / t.cos().abs().max(t.sin().abs())).unwrap()
    }

    #[test]
    fn delta_of_balls() {
        let g = circle(1024);
        let b1 = RadialSet::ball(g.clone(), 1.0).unwrap();
        let b2 = RadialSet::ball(g, 2.0).unwrap();
        assert_eq!(delta(&b1, &b2).unwrap(), 2.0);
        assert_eq!(delta(&b1, &b1).unwrap(), 1.0);
    }

    #[test]
    fn delta_square_disk() {
        let g = circle(1024);
        let d = delta(&square(g.clone()), &RadialSet::ball(g, 1.0).unwrap()).unwrap();
        assert!((d - SQRT_2).abs() < 1e-12, "{d}");
    }

    #[test]
    fn grid_mismatch_is_invalid() {
        let a = RadialSet::ball(circle(64), 1.0).unwrap();
        let b = RadialSet::ball(circle(128), 1.0).unwrap();
        assert!(matches!(delta(&a, &b), Err(crate::Error::InvalidInput(_))));
    }

    #[test]
    fn origin_on_boundary_rejected() {
        let g = circle(64);
        assert!(RadialSet::from_angle_fn(g, |t| t.cos().max(0.0)).is_err());
    }

    #[test]
    fn ball_capacity_rescale() {
        // B(R) = { pi |p|^2 < R }; in R^4 with weight 1/2 the cover by k = 4 gives B(R/4)
        let g = Arc::new(DirectionGrid::sphere(4, 256).unwrap());
        let r = 3.0;
        let ball = RadialSet::ball(g.clone(), (r / PI).sqrt()).unwrap();
        let small = ball.scale_pow(4, 0.5).unwrap();
        for x in small.radii() {
            assert!((PI * x * x - r / 4.0).abs() < 1e-12);
        }
        assert_eq!(ball.scale_pow(1, 0.5).unwrap(), ball);
    }

    #[test]
    fn fiber_rescale_weight_one() {
        let s = square(circle(256));
        assert_eq!(s.scale_pow(3, 1.0).unwrap(), s.shrink(3.0).unwrap());
    }

    #[test]
    fn disk_area_and_homogeneity() {
        let disk = RadialSet::ball(circle(1024), 1.0).unwrap();
        assert!((disk.volume() - PI).abs() / PI < 5e-3);
        let s = square(circle(1024));
        assert_eq!(s.scale(2.0).unwrap().volume(), 4.0 * s.volume());
        let g3 = Arc::new(DirectionGrid::sphere(3, 4096).unwrap());
        let ball3 = RadialSet::ball(g3, 1.0).unwrap();
        assert!((ball3.volume() - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn doc_roundtrip_with_regenerated_grid() {
        let doc = RadialSetDoc {
            dimension: 2,
            directions: None,
            weights: None,
            radii: vec![2.0; 64],
        };
        let set = RadialSet::from_doc(doc).unwrap();
        let again = RadialSet::from_doc(set.to_doc()).unwrap();
        assert_eq!(delta(&set, &again).unwrap(), 1.0);
        assert!((again.volume() - 4.0 * PI).abs() < 1e-12);
    }
}
