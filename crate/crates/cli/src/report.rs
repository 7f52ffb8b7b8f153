//! JSON reports emitted by the subcommands. Every type parses back from its own
//! output.

use cbm_core::contact_domains::{BridgeReport, SplitToricDomainDoc};
use cbm_core::starshape::RadialSetDoc;
use cbm_core::NormReport;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormOutput {
    #[serde(flatten)]
    pub norm: NormReport,
    /// `nu(l_max arg) / l_max`.
    pub stabilization: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta: f64,
    pub log_delta: f64,
    pub volume_a: f64,
    pub volume_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonReport {
    pub v: Vec<f64>,
    pub k: usize,
    pub c0: f64,
    pub epsilon: f64,
    pub target_volume: f64,
    pub leading_volume: f64,
    pub volume: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub region: RadialSetDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianReport {
    pub domain: SplitToricDomainDoc,
    pub m_minus: f64,
    pub m_plus: f64,
    pub empty_from: f64,
    pub full_up_to: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormsReport {
    pub upper: f64,
    pub lower: f64,
    pub pinched: bool,
    /// Index into the supplied maps of the minimizing candidate; absent when
    /// the identity attains the upper bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
    /// Supplied maps whose conformal factor is not the volume Jacobian of
    /// their permutation. Upper bounds from them are unverified.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unverified_maps: Vec<usize>,
}
