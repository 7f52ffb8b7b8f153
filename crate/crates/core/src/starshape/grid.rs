use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Smallest direction count a grid may have.
pub const MIN_DIRECTIONS: usize = 64;

/// Default resolution for planar grids.
pub const DEFAULT_PLANAR_COUNT: usize = 1024;

const UNIT_TOL: f64 = 1e-12;

/// Sample directions on the unit sphere `S^{n-1}` together with quadrature
/// weights that sum to the sphere's area.
///
/// Planar grids also keep the polar angle of every direction, so shapes can be
/// evaluated by angle without re-deriving it from `(cos, sin)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionGrid {
    dimension: usize,
    directions: Vec<Vec<f64>>,
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angles: Option<Vec<f64>>,
}

// angles are derived data and may differ from atan2 of the stored directions by an ulp
impl PartialEq for DirectionGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension
            && self.directions == other.directions
            && self.weights == other.weights
    }
}

/// Area of the unit sphere `S^{n-1}`: `2 pi^{n/2} / Gamma(n/2)`.
pub fn sphere_area(dimension: usize) -> f64 {
    // S^0 has two points; area(S^{n+1}) = 2 pi area(S^{n-1}) / n
    match dimension {
        0 => 0.0,
        1 => 2.0,
        2 => TAU,
        n => TAU * sphere_area(n - 2) / (n - 2) as f64,
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

const HALTON_BASES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

impl DirectionGrid {
    /// `count` equally spaced angles `2 pi j / count`, starting at 0.
    pub fn uniform_circle(count: usize) -> Result<Self> {
        let angles = (0..count).map(|j| TAU * j as f64 / count as f64).collect();
        Self::from_angles(angles)
    }

    /// Planar grid from arbitrary distinct angles in `[0, 2 pi)`. Weights are the
    /// periodic trapezoid rule in the angle.
    pub fn from_angles(mut angles: Vec<f64>) -> Result<Self> {
        if angles.len() < MIN_DIRECTIONS {
            return invalid(format!("need at least {MIN_DIRECTIONS} directions, got {}", angles.len()));
        }
        if angles.iter().any(|a| !(0.0..TAU).contains(a)) {
            return invalid("angles must lie in [0, 2pi)");
        }
        angles.sort_by(f64::total_cmp);
        if angles.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate direction angle");
        }
        let n = angles.len();
        let weights = (0..n)
            .map(|j| {
                let next = if j + 1 < n { angles[j + 1] } else { angles[0] + TAU };
                let prev = if j > 0 { angles[j - 1] } else { angles[n - 1] - TAU };
                0.5 * (next - prev)
            })
            .collect();
        let directions = angles.iter().map(|a| vec![a.cos(), a.sin()]).collect();
        Ok(DirectionGrid {
            dimension: 2,
            directions,
            weights,
            angles: Some(angles),
        })
    }

    /// Default grid for `dimension`: uniform angles for the plane, a Fibonacci
    /// lattice on `S^2`, and Halton points pushed through Box-Muller above that.
    /// Directions are equally weighted for `n >= 3`.
    pub fn sphere(dimension: usize, count: usize) -> Result<Self> {
        match dimension {
            0 => invalid("dimension must be at least 1"),
            1 => invalid("the 0-sphere has only two directions; use dimension >= 2"),
            2 => Self::uniform_circle(count),
            3 => {
                let golden = PI * (3.0 - 5f64.sqrt());
                let dirs = (0..count)
                    .map(|i| {
                        let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * i as f64;
                        vec![r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect();
                Self::equal_weights(3, dirs)
            }
            n if n <= HALTON_BASES.len() => {
                let dirs = (1..=count as u64)
                    .map(|i| {
                        let mut g: Vec<f64> = Vec::with_capacity(n);
                        for pair in 0..n.div_ceil(2) {
                            let u1 = radical_inverse(i, HALTON_BASES[2 * pair]).max(f64::MIN_POSITIVE);
                            let u2 = HALTON_BASES
                                .get(2 * pair + 1)
                                .map_or(0.5, |&b| radical_inverse(i, b));
                            let rad = (-2.0 * u1.ln()).sqrt();
                            g.push(rad * (TAU * u2).cos());
                            g.push(rad * (TAU * u2).sin());
                        }
                        g.truncate(n);
                        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                        g.iter().map(|x| x / norm).collect()
                    })
                    .collect();
                Self::equal_weights(n, dirs)
            }
            n => invalid(format!("dimension {n} exceeds the supported maximum {}", HALTON_BASES.len())),
        }
    }

    fn equal_weights(dimension: usize, directions: Vec<Vec<f64>>) -> Result<Self> {
        let w = sphere_area(dimension) / directions.len() as f64;
        let weights = vec![w; directions.len()];
        Self::new(dimension, directions, Some(weights))
    }

    /// Grid from explicit unit vectors. Missing weights default to the angular
    /// trapezoid rule in the plane and to equal weights otherwise.
    pub fn new(dimension: usize, directions: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        if dimension < 2 {
            return invalid("dimension must be at least 2");
        }
        if directions.len() < MIN_DIRECTIONS {
            return invalid(format!(
                "need at least {MIN_DIRECTIONS} directions, got {}",
                directions.len()
            ));
        }
        for (i, d) in directions.iter().enumerate() {
            if d.len() != dimension {
                return invalid(format!("direction {i} has length {}, expected {dimension}", d.len()));
            }
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs().is_nan() || (norm - 1.0).abs() > UNIT_TOL {
                return invalid(format!("direction {i} is not a unit vector (norm {norm})"));
            }
        }
        let angles = (dimension == 2).then(|| {
            directions
                .iter()
                .map(|d| d[1].atan2(d[0]).rem_euclid(TAU))
                .collect::<Vec<_>>()
        });
        let weights = match weights {
            Some(w) => {
                if w.len() != directions.len() || w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return invalid("weights must be positive, one per direction");
                }
                w
            }
            None if dimension == 2 => {
                // angular trapezoid weights, reported back in input order
                let a = angles.as_ref().expect("planar");
                let sorted = Self::from_angles(a.clone())?;
                let sa = sorted.angles.as_ref().expect("planar");
                a.iter()
                    .map(|x| sorted.weights[sa.partition_point(|y| y < x)])
                    .collect()
            }
            None => vec![sphere_area(dimension) / directions.len() as f64; directions.len()],
        };
        Ok(DirectionGrid {
            dimension,
            directions,
            weights,
            angles,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Polar angles in `[0, 2 pi)`; planar grids only.
    pub fn angles(&self) -> Option<&[f64]> {
        self.angles.as_deref()
    }

    /// The same directions listed in a different order.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if !is_permutation(perm, self.len()) {
            return invalid("not a permutation of the grid sites");
        }
        Ok(DirectionGrid {
            dimension: self.dimension,
            directions: perm.iter().map(|&i| self.directions[i].clone()).collect(),
            weights: perm.iter().map(|&i| self.weights[i]).collect(),
            angles: self.angles.as_ref().map(|a| perm.iter().map(|&i| a[i]).collect()),
        })
    }
}

pub(crate) fn is_permutation(perm: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    perm.len() == n
        && perm
            .iter()
            .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}
