//! Thickened spoke skeletons in the plane and the L-shape map, the two
//! ingredients of the quasi-isometric embedding of `(R^k, |.|_inf)` into
//! star-shaped domains of `T^*T^n`.
//!
//! The skeleton for `v in [0, inf)^{2k}` is the union of `2k` rectangles of
//! width `eps(v)`, the `i`-th running from the origin to `C0 e^{v_i}` along the
//! unit vector at angle `i pi / 2k` (`i = 0..2k`), plus a disk of radius
//! `eps(v) / 2` so that the origin is interior. The width is set by the leading
//! term of the area, `eps(v) C0 sum_i e^{v_i} = target_volume`.
//!
//! Only the `x1 x2`-plane is built. The remaining `[0, 1)^{n-2}` cube factor is
//! identical for every `v`, contributes a factor 1 to `delta`, and is left
//! implicit.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{delta, DirectionGrid, RadialSet};
use crate::error::{invalid, Result};

/// Ratio between consecutive refinement offsets around each spoke.
const GRADING_RATIO: f64 = 1.02;
/// Smallest angular offset placed next to a spoke.
const GRADING_START: f64 = 1e-9;

/// Lower-side slack of the quasi-isometry check, `|v - w|_inf - tol <= ln delta`.
pub const QI_LOWER_TOL: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSpec {
    pub v: Vec<f64>,
    pub k: usize,
    pub c0: f64,
    pub epsilon: f64,
    pub target_volume: f64,
}

/// `L(x) = (1, 1 - x)` for `x < 0` and `(1 + x, 1)` otherwise, componentwise.
pub fn lshape(x: &[f64]) -> Vec<f64> {
    x.iter()
        .flat_map(|&t| if t < 0.0 { [1.0, 1.0 - t] } else { [1.0 + t, 1.0] })
        .collect()
}

fn spoke_angle(i: usize, k: usize) -> f64 {
    i as f64 * PI / (2 * k) as f64
}

/// Signed angle difference folded into `(-pi, pi]`.
fn wrap(d: f64) -> f64 {
    let r = d.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

impl SkeletonSpec {
    pub fn new(v: Vec<f64>, c0: f64, target_volume: f64) -> Result<Self> {
        if v.is_empty() || !v.len().is_multiple_of(2) {
            return invalid(format!("need an even, nonzero number of spoke exponents, got {}", v.len()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return invalid("spoke exponents must be finite");
        }
        if !(c0 > 1.0 && c0.is_finite()) {
            return invalid(format!("C0 must exceed 1, got {c0}"));
        }
        if !(target_volume > 0.0 && target_volume.is_finite()) {
            return invalid(format!("target volume must be positive, got {target_volume}"));
        }
        let spread: f64 = v.iter().map(|x| x.exp()).sum();
        let epsilon = target_volume / (c0 * spread);
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return invalid(format!("degenerate width {epsilon}"));
        }
        Ok(SkeletonSpec {
            k: v.len() / 2,
            v,
            c0,
            epsilon,
            target_volume,
        })
    }

    pub fn spoke_count(&self) -> usize {
        2 * self.k
    }

    pub fn spoke_length(&self, i: usize) -> f64 {
        self.c0 * self.v[i].exp()
    }

    /// Leading-order area `eps C0 sum e^{v_i}`.
    pub fn leading_volume(&self) -> f64 {
        self.epsilon * self.c0 * self.v.iter().map(|x| x.exp()).sum::<f64>()
    }

    /// Set when the width is not small against the gap between neighbouring
    /// spokes at radius `C0`.
    pub fn warning(&self) -> Option<String> {
        let spacing = 2.0 * self.c0 * (PI / (4 * self.k) as f64).sin();
        (self.epsilon >= spacing).then(|| {
            format!(
                "width {} is not below the spoke spacing {spacing} at radius C0",
                self.epsilon
            )
        })
    }
}

/// Planar grid for `2k` spokes: a uniform lattice whose size is a multiple of
/// `4k` (so every spoke angle is a lattice angle, stored bit-identically to the
/// value used by [`skeleton_region`]), refined geometrically on both sides of
/// each spoke where the thin rectangles live.
pub fn skeleton_grid(k: usize, resolution: usize) -> Result<Arc<DirectionGrid>> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let period = 4 * k;
    let n = resolution.max(period).div_ceil(period) * period;
    let per_spoke = n / period * 2;
    let step = TAU / n as f64;

    let mut angles: Vec<f64> = (0..n)
        .map(|j| {
            if j % (per_spoke / 2) == 0 && (j / (per_spoke / 2)) < 2 * k {
                spoke_angle(j / (per_spoke / 2), k)
            } else {
                TAU * j as f64 / n as f64
            }
        })
        .collect();
    for i in 0..2 * k {
        let phi = spoke_angle(i, k);
        let mut beta = GRADING_START;
        while beta < 0.5 * step {
            angles.push(phi + beta);
            angles.push((phi - beta).rem_euclid(TAU));
            beta *= GRADING_RATIO;
        }
    }
    Ok(Arc::new(DirectionGrid::from_angles(angles)?))
}

/// Radial function of the thickened skeleton on a planar grid.
pub fn skeleton_region(spec: &SkeletonSpec, grid: &Arc<DirectionGrid>) -> Result<RadialSet> {
    if spec.epsilon.is_nan() || spec.epsilon <= 0.0 {
        return invalid("skeleton width must be positive");
    }
    let half = 0.5 * spec.epsilon;
    let spokes: Vec<(f64, f64)> = (0..spec.spoke_count())
        .map(|i| (spoke_angle(i, spec.k), spec.spoke_length(i)))
        .collect();
    RadialSet::from_angle_fn(grid.clone(), |theta| {
        spokes.iter().fold(half, |r, &(phi, len)| {
            let beta = wrap(theta - phi);
            if beta.abs() >= FRAC_PI_2 {
                return r;
            }
            let through_end = len / beta.cos();
            let through_side = if beta == 0.0 {
                f64::INFINITY
            } else {
                half / beta.sin().abs()
            };
            r.max(through_end.min(through_side))
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiReport {
    /// `|v - w|_inf`.
    pub sup_distance: f64,
    pub log_delta: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

/// `ln delta(A_v, A_w)` against `[|v-w|_inf - tol, |v-w|_inf + ln c1]`.
pub fn qi_verify(
    v: &[f64],
    w: &[f64],
    c0: f64,
    target_volume: f64,
    grid: &Arc<DirectionGrid>,
    c1: f64,
) -> Result<QiReport> {
    if v.len() != w.len() {
        return invalid("v and w must have the same length");
    }
    let a = skeleton_region(&SkeletonSpec::new(v.to_vec(), c0, target_volume)?, grid)?;
    let b = skeleton_region(&SkeletonSpec::new(w.to_vec(), c0, target_volume)?, grid)?;
    let sup_distance = v
        .iter()
        .zip(w)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let log_delta = delta(&a, &b)?.ln();
    let lower = sup_distance - QI_LOWER_TOL;
    let upper = sup_distance + c1.ln();
    Ok(QiReport {
        sup_distance,
        log_delta,
        lower,
        upper,
        pass: lower <= log_delta && log_delta <= upper,
    })
}
