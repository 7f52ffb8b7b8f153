//! Growth rates on bi-invariantly ordered semigroups, order-derived norms, and
//! Banach-Mazur type distances between star-shaped, toric contact domains and
//! between contact forms.
//!
//! Every distance the underlying theory only bounds is returned as a
//! [`BoundInterval`] whose two sides each carry the method that certifies them.

pub mod contact_domains;
pub mod contact_forms;
pub mod error;
pub mod growth;
pub mod model;
pub mod norms;
pub mod sieve;
pub mod starshape;

pub use contact_domains::{BoundInterval, SplitToricDomain};
pub use contact_forms::{ContactFormRep, ContactMapRep, SampledManifold};
pub use error::{Error, Result};
pub use growth::{GrowthRateReport, RateMethod};
pub use model::{Element, ModelKind, OrderVariant, OrderedModel};
pub use norms::NormReport;
pub use starshape::{DirectionGrid, RadialSet, SkeletonSpec};

/// Default truncation for growth-rate sequences.
pub const DEFAULT_L_MAX: u64 = 1000;
/// Default prime bound for the prime-pair formulation.
pub const DEFAULT_PRIME_BOUND: u64 = 10_000;
