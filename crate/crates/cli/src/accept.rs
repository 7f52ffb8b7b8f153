//! Acceptance suite.
//!
//! Every criterion draws its random cases from ChaCha8 (`rand_chacha`) seeded
//! with `seed_from_u64(seed)` and switched to a stream named by the criterion,
//! so a criterion's cases do not depend on which other criteria run, in which
//! order, or on how many threads are used. The growth-rate criteria 1-3 share
//! one stream and therefore one set of pairs.

use std::collections::BTreeMap;
use std::f64::consts::{E, SQRT_2};
use std::sync::Arc;
use std::time::{Duration, Instant};

use cbm_core::contact_domains::{
    csh, dc_toric_certified, dcbm_toric, hamiltonian_to_domain, is_squeezable_toric, rescale_cover, rgr_vs_cbm,
};
use cbm_core::contact_forms::{dcbm_forms_lower_volume, dcbm_forms_upper, ContactMapRep};
use cbm_core::growth::{growth_distance, rho_plus, rho_plus_primes};
use cbm_core::norms::{norm, stabilization};
use cbm_core::starshape::{delta, lshape, qi_verify, skeleton_grid, QI_LOWER_TOL};
use cbm_core::{
    ContactFormRep, DirectionGrid, Element, OrderVariant, OrderedModel, RadialSet, SampledManifold,
    SplitToricDomain,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::RunConfig;

/// Stream shared by criteria 1-3.
const GROWTH_PAIR_STREAM: u64 = 100;
const GROWTH_PAIRS: usize = 100;
/// Measured `C1` must stay below this.
pub const C1_BOUND: f64 = 1.5;
/// Multiplicative constant allowed after composing with the L-shape map.
pub const L_COMPOSED_BOUND: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub l_max: u64,
    pub prime_bound: u64,
    pub resolution: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            l_max: cbm_core::DEFAULT_L_MAX,
            prime_bound: cbm_core::DEFAULT_PRIME_BOUND,
            resolution: cbm_core::starshape::DEFAULT_PLANAR_COUNT,
        }
    }

    pub fn from_run(config: &RunConfig) -> Self {
        SuiteConfig {
            seed: config.seed,
            l_max: config.l_max,
            prime_bound: config.prime_bound,
            resolution: config.resolution,
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub cases: u64,
    pub measured: BTreeMap<String, f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub l_max: u64,
    pub prime_bound: u64,
    pub resolution: usize,
    pub criteria: Vec<CriterionReport>,
    pub passed: usize,
    pub failed: usize,
}

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "growth-rate oracle equivalence"),
    (2, "prime-pair formula"),
    (3, "rho+ rho- product bound"),
    (4, "pseudo-metric, norm axioms and stabilization"),
    (5, "delta anchors"),
    (6, "toric exactness"),
    (7, "shape-invariant functoriality"),
    (8, "quasi-isometry harness"),
    (9, "forms pinch"),
    (10, "Hamiltonian bridge"),
    (11, "squeezability certificate"),
    (12, "determinism"),
];

/// Wall-clock budget of a criterion, where one is part of the criterion.
pub fn budget(id: u32) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(5)),
        2 => Some(Duration::from_secs(10)),
        8 => Some(Duration::from_secs(30)),
        _ => None,
    }
}

pub fn name(id: u32) -> &'static str {
    CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown")
}

/// Measurements and failures collected while a criterion runs.
#[derive(Default)]
struct Tally {
    measured: BTreeMap<String, f64>,
    failures: Vec<String>,
    failure_count: u64,
    cases: u64,
}

const LISTED_FAILURES: usize = 5;

impl Tally {
    fn max(&mut self, key: &str, value: f64) {
        let slot = self.measured.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        *slot = slot.max(value);
    }

    fn min(&mut self, key: &str, value: f64) {
        let slot = self.measured.entry(key.to_string()).or_insert(f64::INFINITY);
        *slot = slot.min(value);
    }

    fn set(&mut self, key: &str, value: f64) {
        self.measured.insert(key.to_string(), value);
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < LISTED_FAILURES {
                self.failures.push(what());
            }
        }
    }

    fn finish(self, id: u32) -> CriterionReport {
        let pass = self.failure_count == 0;
        let detail = if pass {
            "ok".to_string()
        } else {
            let mut d = self.failures.join("; ");
            if self.failure_count as usize > self.failures.len() {
                d.push_str(&format!("; {} failures in total", self.failure_count));
            }
            d
        };
        CriterionReport {
            id,
            name: name(id).to_string(),
            pass,
            cases: self.cases,
            measured: self.measured,
            detail,
        }
    }
}

type Outcome = cbm_core::Result<Tally>;

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

fn max_ratio(num: &[f64], den: &[f64]) -> f64 {
    num.iter().zip(den).map(|(x, y)| x / y).fold(f64::NEG_INFINITY, f64::max)
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Positive grid-function pairs on 1..=8 sites with values in `[1/4, 4)`.
fn growth_pairs(cfg: &SuiteConfig) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = cfg.rng(GROWTH_PAIR_STREAM);
    (0..GROWTH_PAIRS)
        .map(|_| {
            let n = rng.gen_range(1..=8);
            (uniform_vec(&mut rng, n, 0.25, 4.0), uniform_vec(&mut rng, n, 0.25, 4.0))
        })
        .collect()
}

/// `exp` of a short random trigonometric polynomial: smooth, positive, bounded.
fn random_fiber(rng: &mut ChaCha8Rng, grid: &Arc<DirectionGrid>) -> cbm_core::Result<RadialSet> {
    let offset = rng.gen_range(-0.5..0.5);
    let coeffs: Vec<(f64, f64)> = (1..=3)
        .map(|m| {
            let s = 0.3 / m as f64;
            (rng.gen_range(-s..s), rng.gen_range(-s..s))
        })
        .collect();
    RadialSet::from_angle_fn(grid.clone(), |t| {
        let series: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(m, (a, b))| {
                let m = (m + 1) as f64;
                a * (m * t).cos() + b * (m * t).sin()
            })
            .sum();
        (offset + series).exp()
    })
}

fn planar_grid(cfg: &SuiteConfig) -> cbm_core::Result<Arc<DirectionGrid>> {
    Ok(Arc::new(DirectionGrid::uniform_circle(cfg.resolution)?))
}

fn criterion_growth_oracle(cfg: &SuiteConfig) -> Outcome {
    let tol = 1e-3;
    let results: Vec<_> = growth_pairs(cfg)
        .par_iter()
        .map(|(a, b)| {
            let model = OrderedModel::additive(a.len(), OrderVariant::NonStrict);
            let est = rho_plus(&model, &Element::Grid(a.clone()), &Element::Grid(b.clone()), cfg.l_max)?;
            Ok((max_ratio(b, a), est))
        })
        .collect::<cbm_core::Result<_>>()?;
    let mut t = Tally::default();
    for (i, (oracle, est)) in results.into_iter().enumerate() {
        t.cases += 1;
        let (e_pair, e_limit) = ((est.pair_infimum - oracle).abs(), (est.limit - oracle).abs());
        let agree = (est.limit - est.pair_infimum).abs();
        t.max("max_pair_infimum_error", e_pair);
        t.max("max_limit_error", e_limit);
        t.max("max_formulation_gap", agree);
        t.check(e_pair <= tol && e_limit <= tol && agree <= tol, || {
            format!("pair {i}: oracle {oracle}, pair infimum {}, limit {}", est.pair_infimum, est.limit)
        });
    }
    t.set("tolerance", tol);
    Ok(t)
}

fn criterion_prime_pairs(cfg: &SuiteConfig) -> Outcome {
    let tol = 0.05;
    let results: Vec<_> = growth_pairs(cfg)
        .par_iter()
        .map(|(a, b)| {
            let model = OrderedModel::additive(a.len(), OrderVariant::NonStrict);
            let (ea, eb) = (Element::Grid(a.clone()), Element::Grid(b.clone()));
            let all = rho_plus(&model, &ea, &eb, cfg.l_max)?.pair_infimum;
            let primes = rho_plus_primes(&model, &ea, &eb, cfg.prime_bound)?;
            Ok((max_ratio(b, a), all, primes))
        })
        .collect::<cbm_core::Result<_>>()?;
    let mut t = Tally::default();
    for (i, (oracle, all, primes)) in results.into_iter().enumerate() {
        t.cases += 1;
        let gap = (primes - all).abs();
        t.max("max_prime_gap", gap);
        t.min("min_prime_minus_oracle", primes - oracle);
        // prime pairs are a subset of all pairs, so never below the exact infimum
        t.check(gap <= tol && primes >= oracle - 1e-12, || {
            format!("pair {i}: primes {primes}, all pairs {all}, oracle {oracle}")
        });
    }
    t.set("tolerance", tol);
    Ok(t)
}

fn criterion_product(cfg: &SuiteConfig) -> Outcome {
    let floor = 1.0 - 2e-3;
    let mut t = Tally::default();
    let check = |t: &mut Tally, model: &OrderedModel, a: Element, b: Element, label: String| {
        let p = rho_plus(model, &a, &b, cfg.l_max)?.pair_infimum;
        let m = rho_plus(model, &b, &a, cfg.l_max)?.pair_infimum;
        t.cases += 1;
        t.min("min_product", p * m);
        t.check(p * m >= floor, || format!("{label}: rho+ rho- = {}", p * m));
        cbm_core::Result::Ok(())
    };
    for (i, (a, b)) in growth_pairs(cfg).into_iter().enumerate() {
        for order in [OrderVariant::NonStrict, OrderVariant::StrictPositive] {
            let model = OrderedModel::additive(a.len(), order);
            check(&mut t, &model, Element::Grid(a.clone()), Element::Grid(b.clone()), format!("pair {i} {order:?}"))?;
        }
    }
    let mut rng = cfg.rng(3);
    for i in 0..50 {
        let (a, b) = (rng.gen_range(1.1..20.0), rng.gen_range(1.1..20.0));
        let model = OrderedModel::multiplicative(OrderVariant::NonStrict);
        check(&mut t, &model, Element::Scalar(a), Element::Scalar(b), format!("reals {i}"))?;
    }
    t.set("floor", floor);
    Ok(t)
}

/// Grid values on the lattice `2^-6 Z`, so sums and differences are exact.
fn dyadic_vec(rng: &mut ChaCha8Rng, n: usize, lo: i32, hi: i32) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo * 64..hi * 64) as f64 / 64.0).collect()
}

fn criterion_axioms(cfg: &SuiteConfig) -> Outcome {
    let mut rng = cfg.rng(4);
    let l = cfg.l_max as f64;
    let mut t = Tally::default();
    for case in 0..50 {
        t.cases += 1;
        let n = rng.gen_range(1..=8);
        let model = OrderedModel::additive(n, OrderVariant::NonStrict);
        let [a, b, c] = [0; 3].map(|_| Element::Grid(uniform_vec(&mut rng, n, 0.25, 4.0)));
        let d = |x: &Element, y: &Element| growth_distance(&model, x, y, cfg.l_max).map(|r| r.distance);
        let (daa, dab, dba, dbc, dac) = (d(&a, &a)?, d(&a, &b)?, d(&b, &a)?, d(&b, &c)?, d(&a, &c)?);
        t.max("max_self_distance", daa.abs());
        t.max("max_asymmetry", (dab - dba).abs());
        t.max("max_triangle_excess", dac - dab - dbc);
        t.check(daa == 0.0 && dab == dba && dac <= dab + dbc + 3.0 / l, || {
            format!("case {case}: d(a,a) = {daa}, d(a,b) = {dab}, d(b,a) = {dba}, triangle {dac} vs {dab} + {dbc}")
        });

        // norms on dyadic elements, so inverses and conjugates are exact
        let base = Element::Grid(dyadic_vec(&mut rng, n, 1, 4).iter().map(|x| x.max(0.25)).collect());
        let p1 = Element::Grid(dyadic_vec(&mut rng, n, -6, 6));
        let p2 = Element::Grid(dyadic_vec(&mut rng, n, -6, 6));
        let conj = Element::Grid(dyadic_vec(&mut rng, n, -6, 6));
        let zero = model.identity();
        let nu = |x: &Element| norm(&base, x);
        let (n1, n2) = (nu(&p1)?, nu(&p2)?);
        let sum = nu(&model.compose(&p1, &p2)?)?;
        let neg = nu(&model.inverse(&p1)?)?;
        let conjugated = model.compose(&model.compose(&conj, &p1)?, &model.inverse(&conj)?)?;
        let nc = nu(&conjugated)?;
        let nz = nu(&zero)?;
        let (bv, pv) = (base.as_grid().unwrap(), p1.as_grid().unwrap());
        let closed_plus = pv.iter().zip(bv).map(|(p, b)| p / b).fold(f64::NEG_INFINITY, f64::max).ceil();
        let closed_minus = pv.iter().zip(bv).map(|(p, b)| p / b).fold(f64::INFINITY, f64::min).floor();
        let nonzero = pv.iter().any(|x| *x != 0.0);
        t.check(
            nz.nu == 0
                && (n1.nu > 0) == nonzero
                && neg.nu == n1.nu
                && sum.nu <= n1.nu + n2.nu
                && nc.nu == n1.nu
                && n1.nu_minus <= n1.nu_plus
                && n1.nu_plus as f64 == closed_plus
                && n1.nu_minus as f64 == closed_minus,
            || format!("case {case}: norm axioms fail for {pv:?} over {bv:?}"),
        );

        let s = stabilization(&base, &p1, cfg.l_max)?;
        let closed = pv
            .iter()
            .zip(bv)
            .map(|(p, b)| (p / b).abs())
            .fold(0.0, f64::max);
        t.max("max_stabilization_error", (s - closed).abs());
        t.check((s - closed).abs() <= 2.0 / l, || {
            format!("case {case}: stabilization {s} vs closed form {closed}")
        });
    }
    t.set("triangle_tolerance", 3.0 / l);
    t.set("stabilization_tolerance", 2.0 / l);
    Ok(t)
}

fn criterion_delta(cfg: &SuiteConfig) -> Outcome {
    let mut t = Tally::default();
    let g = planar_grid(cfg)?;
    let b1 = RadialSet::ball(g.clone(), 1.0)?;
    let b2 = RadialSet::ball(g.clone(), 2.0)?;
    let balls = delta(&b1, &b2)?;
    t.cases += 1;
    t.set("delta_balls", balls);
    t.check(balls == 2.0, || format!("delta(ball1, ball2) = {balls}"));

    let square = RadialSet::from_angle_fn(g.clone(), |a| 1.0 / a.cos().abs().max(a.sin().abs()))?;
    let sq = delta(&square, &b1)?;
    t.cases += 1;
    t.set("delta_square_disk", sq);
    t.check((sq - SQRT_2).abs() <= 1e-3, || format!("delta(square, disk) = {sq}"));

    let mut rng = cfg.rng(5);
    for i in 0..20 {
        let a = random_fiber(&mut rng, &g)?;
        // dyadic factors scale radii exactly
        let c = 2f64.powi(rng.gen_range(-6..=6));
        let d = delta(&a.scale(c)?, &a)?;
        t.cases += 1;
        t.check(d == c.max(1.0 / c) && d.ln() == c.ln().abs(), || {
            format!("set {i}: delta(cA, A) = {d} for c = {c}")
        });
        let c = rng.gen_range(0.1..10.0);
        let err = (delta(&a.scale(c)?, &a)?.ln() - c.ln().abs()).abs();
        t.max("max_log_scale_error_real_c", err);
        t.check(err <= 1e-15, || format!("set {i}: |ln delta(cA, A) - |ln c|| = {err} for c = {c}"));
    }
    Ok(t)
}

fn toric_domain(rng: &mut ChaCha8Rng, g: &Arc<DirectionGrid>, label: &str) -> cbm_core::Result<SplitToricDomain> {
    SplitToricDomain::new(2, random_fiber(rng, g)?, 1.0, label)
}

fn criterion_toric(cfg: &SuiteConfig) -> Outcome {
    let mut rng = cfg.rng(6);
    let g = planar_grid(cfg)?;
    let mut t = Tally::default();
    for i in 0..20 {
        t.cases += 1;
        let u = toric_domain(&mut rng, &g, "U")?;
        let v = toric_domain(&mut rng, &g, "V")?;
        let iv = dcbm_toric(&u, &v)?;
        t.max("max_interval_width", iv.width());
        t.check(iv.width().abs() <= 1e-6, || format!("pair {i}: [{}, {}]", iv.lower, iv.upper));

        let c = rng.gen_range(1.0..10.0);
        let scaled = dcbm_toric(&u.scale(c)?, &u)?;
        let err = (scaled.lower - c.ln()).abs().max((scaled.upper - c.ln()).abs());
        t.max("max_scaling_error", err);
        t.check(err <= 1e-9, || format!("pair {i}: d_CBM(cU, U) = [{}, {}], ln c = {}", scaled.lower, scaled.upper, c.ln()));

        let dc = dc_toric_certified(&u.fiber()?, &v.fiber()?)?;
        t.max("max_cbm_minus_c", iv.upper - dc.lower);
        t.check(iv.upper <= dc.lower + 1e-12, || format!("pair {i}: d_CBM upper {} > d_c lower {}", iv.upper, dc.lower));
    }
    Ok(t)
}

fn criterion_csh(cfg: &SuiteConfig) -> Outcome {
    let mut rng = cfg.rng(7);
    let g = planar_grid(cfg)?;
    let mut t = Tally::default();
    for i in 0..20 {
        t.cases += 1;
        let u = toric_domain(&mut rng, &g, "U")?;
        let a = csh(&u)?;
        let (k, m) = (rng.gen_range(2..=50u64), rng.gen_range(2..=50u64));
        let c = rng.gen_range(0.1..10.0);
        let cover = csh(&rescale_cover(&u, k)?)?;
        let twice = csh(&rescale_cover(&rescale_cover(&u, k)?, m)?)?;
        let once = csh(&rescale_cover(&u, k * m)?)?;
        let scaled = csh(&u.scale(c)?)?;
        t.check(cover.radii() == a.shrink(k as f64)?.radii(), || format!("domain {i}: csh(U/{k}) != A/{k}"));
        t.check(twice.radii() == once.radii(), || format!("domain {i}: (U/{k})/{m} != U/{}", k * m));
        t.check(scaled.radii() == a.scale(c)?.radii(), || format!("domain {i}: csh({c} U) != {c} A"));
        let smaller = SplitToricDomain::new(2, a.scale(0.5)?, 1.0, "V")?;
        t.check(csh(&smaller)?.is_subset_of(&a)?, || format!("domain {i}: csh not monotone"));
    }
    Ok(t)
}

fn criterion_qi(cfg: &SuiteConfig) -> Outcome {
    const K: usize = 3;
    const C0: f64 = 10.0;
    let grid = skeleton_grid(K, cfg.resolution)?;
    let mut rng = cfg.rng(8);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..50)
        .map(|_| (uniform_vec(&mut rng, 2 * K, 0.0, 4.0), uniform_vec(&mut rng, 2 * K, 0.0, 4.0)))
        .collect();
    let lpairs: Vec<(Vec<f64>, Vec<f64>)> = (0..50)
        .map(|_| (uniform_vec(&mut rng, K, -2.0, 2.0), uniform_vec(&mut rng, K, -2.0, 2.0)))
        .collect();
    let reports = pairs
        .par_iter()
        .map(|(v, w)| qi_verify(v, w, C0, 1.0, &grid, C1_BOUND))
        .collect::<cbm_core::Result<Vec<_>>>()?;
    let composed = lpairs
        .par_iter()
        .map(|(x, y)| Ok(qi_verify(&lshape(x), &lshape(y), C0, 1.0, &grid, C1_BOUND)?.log_delta))
        .collect::<cbm_core::Result<Vec<_>>>()?;

    let mut t = Tally::default();
    let mut excess = f64::NEG_INFINITY;
    for (i, r) in reports.iter().enumerate() {
        t.cases += 1;
        excess = excess.max(r.log_delta - r.sup_distance);
        t.min("min_lower_slack", r.log_delta - r.lower);
        t.check(r.pass, || {
            format!("pair {i}: ln delta {} outside [{}, {}]", r.log_delta, r.lower, r.upper)
        });
    }
    let c1 = excess.exp().max(1.0);
    t.set("measured_c1", c1);
    t.check(c1 <= C1_BOUND, || format!("measured C1 = {c1}"));
    for (i, ((x, y), d)) in lpairs.iter().zip(&composed).enumerate() {
        t.cases += 1;
        let s = sup_dist(x, y);
        t.min("min_composed_ratio", d / s);
        t.max("max_composed_ratio", d / s);
        t.check(0.5 * s - QI_LOWER_TOL <= *d && *d <= L_COMPOSED_BOUND * s, || {
            format!("L pair {i}: ln delta {d} for |x - y| = {s}")
        });
    }
    t.set("lower_tolerance", QI_LOWER_TOL);
    Ok(t)
}

/// Cyclic shifts with their volume-consistent conformal factors: a group
/// closed under composition and inversion.
pub fn shift_group(m: &SampledManifold) -> cbm_core::Result<Vec<ContactMapRep>> {
    let n = m.sites();
    (1..n)
        .map(|s| ContactMapRep::volume_consistent((0..n).map(|i| (i + s) % n).collect(), m))
        .collect()
}

fn criterion_forms(cfg: &SuiteConfig) -> Outcome {
    let mut rng = cfg.rng(9);
    let mut t = Tally::default();
    for case in 0..5 {
        let m = SampledManifold::new(uniform_vec(&mut rng, 64, 0.5, 2.0), rng.gen_range(1..=3))?;
        let group = shift_group(&m)?;
        let f1 = ContactFormRep::new(m.clone(), uniform_vec(&mut rng, 64, -1.0, 1.0))?;
        for c in [2.0, E, 10.0] {
            t.cases += 1;
            let f2 = f1.rescaled(c)?;
            let upper = dcbm_forms_upper(&f1, &f2, &group)?;
            let lower = dcbm_forms_lower_volume(&f1, &f2)?;
            let err = (upper - c.ln()).abs().max((lower - c.ln()).abs());
            t.max("max_pinch_error", err);
            t.check(err <= 1e-9, || format!("manifold {case}, C = {c}: lower {lower}, upper {upper}"));
        }
    }
    for i in 0..100 {
        t.cases += 1;
        let sites = rng.gen_range(8..=64);
        let m = SampledManifold::new(uniform_vec(&mut rng, sites, 0.5, 2.0), rng.gen_range(1..=3))?;
        let group = shift_group(&m)?;
        let f1 = ContactFormRep::new(m.clone(), uniform_vec(&mut rng, sites, -2.0, 2.0))?;
        let f2 = ContactFormRep::new(m, uniform_vec(&mut rng, sites, -2.0, 2.0))?;
        let upper = dcbm_forms_upper(&f1, &f2, &group)?;
        let lower = dcbm_forms_lower_volume(&f1, &f2)?;
        t.min("min_upper_minus_lower", upper - lower);
        t.check(lower <= upper + 1e-12, || format!("pair {i}: lower {lower} > upper {upper}"));
    }
    Ok(t)
}

fn criterion_bridge(cfg: &SuiteConfig) -> Outcome {
    const SITES: usize = 64;
    let mut t = Tally::default();
    let unit = hamiltonian_to_domain(&Element::constant(SITES, 1.0), None)?;
    let ball = RadialSet::ball(Arc::new(DirectionGrid::uniform_circle(SITES)?), 1.0)?;
    let fiber = unit.domain.fiber()?;
    t.cases += 1;
    t.check(
        fiber == ball && unit.m_minus == 1.0 && unit.m_plus == 1.0,
        || "U(1) is not the unit radial set".to_string(),
    );

    let mut rng = cfg.rng(10);
    let pairs: Vec<_> = (0..50)
        .map(|_| (uniform_vec(&mut rng, SITES, 0.25, 4.0), uniform_vec(&mut rng, SITES, 0.25, 4.0)))
        .collect();
    let reports: Vec<_> = pairs
        .par_iter()
        .map(|(a, b)| rgr_vs_cbm(&Element::Grid(a.clone()), &Element::Grid(b.clone()), cfg.l_max))
        .collect();
    let tol = 3.0 / cfg.l_max as f64;
    for (i, r) in reports.into_iter().enumerate() {
        t.cases += 1;
        match r {
            Ok(r) => {
                t.max("max_abs_gap", r.gap.abs());
                t.check(r.d_order >= r.d_cbm - tol && r.gap.abs() <= tol, || {
                    format!("pair {i}: d_order {}, d_CBM {}", r.d_order, r.d_cbm)
                });
            }
            Err(e) => t.check(false, || format!("pair {i}: {e}")),
        }
    }
    t.set("tolerance", tol);
    Ok(t)
}

fn criterion_squeeze(cfg: &SuiteConfig) -> Outcome {
    let mut t = Tally::default();
    let grids = [planar_grid(cfg)?, Arc::new(DirectionGrid::sphere(3, 512)?)];
    for g in &grids {
        let n = g.dimension();
        for r in [0.1, 1.0, 10.0] {
            t.cases += 1;
            let u = SplitToricDomain::new(n, RadialSet::ball(g.clone(), r)?, 1.0, format!("B^{n}({r}) x T^{n} x S^1"))?;
            let v = is_squeezable_toric(&u)?;
            t.check(!v.verdict && v.certificate.contains("monotonicity"), || {
                format!("B^{n}({r}): verdict {}, certificate '{}'", v.verdict, v.certificate)
            });
        }
    }
    Ok(t)
}

/// Runs criterion `id` in 1..=11. Criterion 12 needs the others; see [`run_suite`].
pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> CriterionReport {
    let outcome = match id {
        1 => criterion_growth_oracle(cfg),
        2 => criterion_prime_pairs(cfg),
        3 => criterion_product(cfg),
        4 => criterion_axioms(cfg),
        5 => criterion_delta(cfg),
        6 => criterion_toric(cfg),
        7 => criterion_csh(cfg),
        8 => criterion_qi(cfg),
        9 => criterion_forms(cfg),
        10 => criterion_bridge(cfg),
        11 => criterion_squeeze(cfg),
        _ => Ok(Tally {
            failures: vec![format!("no criterion {id}")],
            failure_count: 1,
            ..Tally::default()
        }),
    };
    match outcome {
        Ok(t) => t.finish(id),
        Err(e) => {
            let mut t = Tally::default();
            t.check(false, || e.to_string());
            t.finish(id)
        }
    }
}

fn independent(cfg: &SuiteConfig) -> (Vec<CriterionReport>, Vec<Duration>) {
    (1..=11)
        .map(|id| {
            let start = Instant::now();
            let r = run_criterion(id, cfg);
            (r, start.elapsed())
        })
        .unzip()
}

/// Reruns criteria 1-11 on a single thread and compares serialized bytes with
/// the multithreaded run.
fn determinism(cfg: &SuiteConfig, first: &[CriterionReport]) -> CriterionReport {
    let mut t = Tally {
        cases: 1,
        ..Tally::default()
    };
    let rerun = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map(|pool| pool.install(|| independent(cfg).0));
    match rerun {
        Ok(second) => {
            let (a, b) = (crate::json::to_report_string(&first), crate::json::to_report_string(&second));
            t.set("report_bytes", a.len() as f64);
            t.check(a == b, || "single-threaded rerun differs from the first run".to_string());
        }
        Err(e) => t.check(false, || format!("cannot build a single-thread pool: {e}")),
    }
    t.finish(12)
}

pub fn run_suite_timed(cfg: &SuiteConfig) -> (SuiteReport, Vec<Duration>) {
    let (mut criteria, mut timings) = independent(cfg);
    let start = Instant::now();
    criteria.push(determinism(cfg, &criteria));
    timings.push(start.elapsed());
    let passed = criteria.iter().filter(|c| c.pass).count();
    let report = SuiteReport {
        seed: cfg.seed,
        l_max: cfg.l_max,
        prime_bound: cfg.prime_bound,
        resolution: cfg.resolution,
        failed: criteria.len() - passed,
        passed,
        criteria,
    };
    (report, timings)
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_suite_timed(cfg).0
}

/// One human-readable line per criterion.
pub fn summary_line(c: &CriterionReport, elapsed: Duration) -> String {
    let over = budget(c.id).is_some_and(|b| elapsed > b);
    let status = if c.pass && !over { "PASS" } else { "FAIL" };
    let budget = budget(c.id).map_or(String::new(), |b| format!(", budget {} s", b.as_secs()));
    let measured: Vec<String> = c.measured.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
    format!(
        "[{status}] {:>2} {} ({} cases, {:.2} s{budget}) {} {}",
        c.id,
        c.name,
        c.cases,
        elapsed.as_secs_f64(),
        measured.join(" "),
        if c.pass { String::new() } else { format!("| {}", c.detail) }
    )
    .trim_end()
    .to_string()
}
