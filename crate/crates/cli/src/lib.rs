//! `cbm-lab`: command-line front end for `cbm-core`.
//!
//! Every subcommand reads JSON inputs, writes one JSON report and maps the
//! outcome to an exit code: 0 on success, 1 when a checked inequality fails,
//! 2 on bad input.

pub mod accept;
pub mod json;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use cbm_core::contact_domains::{
    dc_toric_certified, dcbm_toric, hamiltonian_to_domain, is_squeezable_doc, rgr_vs_cbm, SplitToricDomainDoc,
};
use cbm_core::contact_forms::{
    dcbm_forms_lower_volume, dcbm_forms_upper_with_witness, ContactFormDoc, ContactMapRep,
};
use cbm_core::growth::growth_distance_by;
use cbm_core::norms::{norm, stabilization};
use cbm_core::starshape::{self, qi_verify, skeleton_grid, skeleton_region, RadialSetDoc, SkeletonSpec};
use cbm_core::{ContactFormRep, Element, OrderVariant, OrderedModel, RadialSet, RateMethod, SplitToricDomain};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use report::{DeltaReport, FormsReport, HamiltonianReport, NormOutput, SkeletonReport};

/// Two bounds closer than this count as pinched.
pub const PINCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Parser)]
#[command(name = "cbm-lab", version, about = "Growth rates, contact Banach-Mazur distances and their checks")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Truncation of growth-rate sequences.
    #[arg(long, global = true, default_value_t = cbm_core::DEFAULT_L_MAX)]
    pub l_max: u64,
    /// Upper bound for prime-pair searches.
    #[arg(long, global = true, default_value_t = cbm_core::DEFAULT_PRIME_BOUND)]
    pub prime_bound: u64,
    /// Direction count for generated planar grids.
    #[arg(long, global = true, default_value_t = starshape::DEFAULT_PLANAR_COUNT)]
    pub resolution: usize,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Report path; stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    NonStrict,
    StrictPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    PairInfimum,
    LimitSequence,
    PrimePairs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// rho+, rho-, gamma and d for two elements (numbers or arrays of numbers).
    Growth {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderArg::NonStrict)]
        order: OrderArg,
        #[arg(long, value_enum, default_value_t = MethodArg::PairInfimum)]
        method: MethodArg,
    },
    /// nu+, nu-, nu of `arg` relative to a dominant `base`, with stabilization.
    Norm { base: PathBuf, arg: PathBuf },
    /// Scaling distance between two radial sets.
    Delta { a: PathBuf, b: PathBuf },
    /// Thickened spoke skeleton for exponents `v`.
    Skeleton {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        v: Vec<f64>,
        #[arg(long, default_value_t = 10.0)]
        c0: f64,
        #[arg(long, default_value_t = 1.0)]
        target_volume: f64,
    },
    /// Check `ln delta(A_v, A_w)` against `|v - w|_inf`.
    QiVerify {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        v: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        w: Vec<f64>,
        #[arg(long, default_value_t = 10.0)]
        c0: f64,
        #[arg(long, default_value_t = 1.0)]
        target_volume: f64,
        #[arg(long, default_value_t = 1.5)]
        c1: f64,
    },
    /// Certified interval for d_CBM between two torus-based split domains.
    DcbmToric { u: PathBuf, v: PathBuf },
    /// Coarse symplectic distance between the Liouville domains of two fibers.
    DcToric { a: PathBuf, b: PathBuf },
    /// Contact shape invariant of a torus-based split domain.
    Csh { u: PathBuf },
    /// Squeezability verdict with certificate.
    Squeezable { u: PathBuf },
    /// Domain of a positive Hamiltonian; with a second one, the order/CBM bridge.
    Ham2dom { h: PathBuf, h2: Option<PathBuf> },
    /// Upper and lower bounds for d_CBM between two contact forms.
    DcbmForms {
        f1: PathBuf,
        f2: PathBuf,
        /// Candidate maps, one `{perm, g}` object or an array of them per file.
        #[arg(long, num_args = 1..)]
        maps: Vec<PathBuf>,
    },
    /// Run the acceptance suite.
    Accept,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<cbm_core::Error> for CliError {
    fn from(e: cbm_core::Error) -> Self {
        match e {
            cbm_core::Error::Violation(m) => CliError::Violation(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Result of one run: the report (if any was produced) and the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub report: Option<String>,
    pub code: i32,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome {
            report: Some(report),
            code: 0,
            message: None,
        }
    }

    fn failed(report: String, message: String) -> Self {
        Outcome {
            report: Some(report),
            code: 1,
            message: Some(message),
        }
    }

    fn error(e: CliError) -> Self {
        Outcome {
            report: None,
            code: e.exit_code(),
            message: Some(e.to_string()),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "{}:{}:{}: {}",
            path.display(),
            e.line(),
            e.column(),
            e
        ))
    })
}

fn model_for(a: &Element, b: &Element, order: OrderVariant) -> Result<OrderedModel, CliError> {
    match (a, b) {
        (Element::Scalar(_), Element::Scalar(_)) => Ok(OrderedModel::multiplicative(order)),
        (Element::Grid(x), Element::Grid(_)) => Ok(OrderedModel::additive(x.len(), order)),
        _ => Err(CliError::Input("cannot mix a number and a grid function".into())),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapFile {
    One(ContactMapRep),
    Many(Vec<ContactMapRep>),
}

fn load_maps(paths: &[PathBuf]) -> Result<Vec<ContactMapRep>, CliError> {
    let mut maps = Vec::new();
    for p in paths {
        match read_json::<MapFile>(p)? {
            MapFile::One(m) => maps.push(m),
            MapFile::Many(ms) => maps.extend(ms),
        }
    }
    // re-validate: deserialization does not run the constructor checks
    maps.into_iter()
        .map(|m| ContactMapRep::new(m.perm, m.g).map_err(CliError::from))
        .collect()
}

fn emit<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(json::to_report_string(value))
}

fn load_set(path: &Path) -> Result<RadialSet, CliError> {
    Ok(RadialSet::from_doc(read_json::<RadialSetDoc>(path)?)?)
}

fn load_domain(path: &Path) -> Result<SplitToricDomain, CliError> {
    Ok(SplitToricDomain::from_doc(read_json::<SplitToricDomainDoc>(path)?)?)
}

fn load_form(path: &Path) -> Result<ContactFormRep, CliError> {
    Ok(ContactFormRep::from_doc(read_json::<ContactFormDoc>(path)?)?)
}

/// Runs one subcommand. The report is not written anywhere; see [`write_outcome`].
pub fn run(config: &RunConfig) -> Outcome {
    match execute(config) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::error(e),
    }
}

fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    let l_max = config.l_max;
    if l_max == 0 {
        return Err(CliError::Input("--l-max must be positive".into()));
    }
    let report = match &config.command {
        Command::Growth { a, b, order, method } => {
            let (a, b): (Element, Element) = (read_json(a)?, read_json(b)?);
            let order = match order {
                OrderArg::NonStrict => OrderVariant::NonStrict,
                OrderArg::StrictPositive => OrderVariant::StrictPositive,
            };
            let method = match method {
                MethodArg::PairInfimum => RateMethod::PairInfimum,
                MethodArg::LimitSequence => RateMethod::LimitSequence,
                MethodArg::PrimePairs => RateMethod::PrimePairs,
            };
            let model = model_for(&a, &b, order)?;
            emit(&growth_distance_by(&model, &a, &b, method, l_max, config.prime_bound)?)?
        }
        Command::Norm { base, arg } => {
            let (base, arg): (Element, Element) = (read_json(base)?, read_json(arg)?);
            let norm = norm(&base, &arg)?;
            let stabilization = stabilization(&base, &arg, l_max)?;
            emit(&NormOutput { norm, stabilization })?
        }
        Command::Delta { a, b } => {
            let (a, b) = (load_set(a)?, load_set(b)?);
            let delta = starshape::delta(&a, &b)?;
            emit(&DeltaReport {
                delta,
                log_delta: delta.ln(),
                volume_a: a.volume(),
                volume_b: b.volume(),
            })?
        }
        Command::Skeleton { v, c0, target_volume } => {
            let spec = SkeletonSpec::new(v.clone(), *c0, *target_volume)?;
            let grid = skeleton_grid(spec.k, config.resolution)?;
            let region = skeleton_region(&spec, &grid)?;
            emit(&SkeletonReport {
                leading_volume: spec.leading_volume(),
                volume: region.volume(),
                warning: spec.warning(),
                region: region.to_doc(),
                v: spec.v,
                k: spec.k,
                c0: spec.c0,
                epsilon: spec.epsilon,
                target_volume: spec.target_volume,
            })?
        }
        Command::QiVerify { v, w, c0, target_volume, c1 } => {
            if v.len() % 2 != 0 {
                return Err(CliError::Input("v needs an even number of entries".into()));
            }
            let grid = skeleton_grid(v.len() / 2, config.resolution)?;
            let qi = qi_verify(v, w, *c0, *target_volume, &grid, *c1)?;
            let text = emit(&qi)?;
            if !qi.pass {
                return Ok(Outcome::failed(
                    text,
                    format!("ln delta = {} outside [{}, {}]", qi.log_delta, qi.lower, qi.upper),
                ));
            }
            text
        }
        Command::DcbmToric { u, v } => emit(&dcbm_toric(&load_domain(u)?, &load_domain(v)?)?)?,
        Command::DcToric { a, b } => emit(&dc_toric_certified(&load_set(a)?, &load_set(b)?)?)?,
        Command::Csh { u } => emit(&cbm_core::contact_domains::csh(&load_domain(u)?)?.to_doc())?,
        Command::Squeezable { u } => emit(&is_squeezable_doc(read_json(u)?)?)?,
        Command::Ham2dom { h, h2 } => {
            let h: Element = read_json(h)?;
            let dom = hamiltonian_to_domain(&h, None)?;
            let bridge = match h2 {
                Some(p) => Some(rgr_vs_cbm(&h, &read_json(p)?, l_max)?),
                None => None,
            };
            emit(&HamiltonianReport {
                empty_from: dom.empty_from(),
                full_up_to: dom.full_up_to(),
                m_minus: dom.m_minus,
                m_plus: dom.m_plus,
                domain: dom.domain.to_doc(),
                bridge,
            })?
        }
        Command::DcbmForms { f1, f2, maps } => {
            let (f1, f2) = (load_form(f1)?, load_form(f2)?);
            let maps = load_maps(maps)?;
            let (upper, witness) = dcbm_forms_upper_with_witness(&f1, &f2, &maps)?;
            let lower = dcbm_forms_lower_volume(&f1, &f2)?;
            let unverified_maps: Vec<usize> = maps
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_volume_consistent(&f1.manifold, 1e-12))
                .map(|(i, _)| i)
                .collect();
            let report = FormsReport {
                upper,
                lower,
                pinched: (upper - lower).abs() <= PINCH_TOL,
                witness,
                unverified_maps,
            };
            let text = emit(&report)?;
            let trusted = witness.is_none_or(|i| !report.unverified_maps.contains(&i));
            if trusted && lower > upper + PINCH_TOL {
                return Ok(Outcome::failed(
                    text,
                    format!("volume lower bound {lower} exceeds upper bound {upper}"),
                ));
            }
            text
        }
        Command::Accept => {
            let suite = accept::SuiteConfig::from_run(config);
            let (report, timings) = accept::run_suite_timed(&suite);
            for (c, t) in report.criteria.iter().zip(&timings) {
                eprintln!("{}", accept::summary_line(c, *t));
            }
            let text = emit(&report)?;
            if report.failed > 0 {
                return Ok(Outcome::failed(text, format!("{} acceptance criteria failed", report.failed)));
            }
            text
        }
    };
    Ok(Outcome::ok(report))
}

/// Writes the report to `--output` or stdout and any message to stderr.
pub fn write_outcome(config: &RunConfig, outcome: &Outcome) -> std::io::Result<()> {
    if let Some(report) = &outcome.report {
        match &config.output {
            Some(path) => fs::write(path, report)?,
            None => print!("{report}"),
        }
    }
    if let Some(m) = &outcome.message {
        eprintln!("cbm-lab: {m}");
    }
    Ok(())
}
