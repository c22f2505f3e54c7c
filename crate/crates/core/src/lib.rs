//! Simplicial 2-complexes, shellings, collapses and weak K₃-saturation,
//! with certificate converters between them.
//!
//! Every search takes a [`Budget`] and reports [`Outcome::BudgetExceeded`]
//! instead of running unbounded; every certificate has a verifier returning
//! a [`Verdict`].

pub mod certificates;
pub mod collapse;
pub mod complex;
pub mod format;
pub mod harness;
pub mod search;
pub mod shelling;
pub mod wsat;

pub use certificates::{run_chain, ChainError, ChainReport, Stage, StageStatus};
pub use collapse::{CollapseCertificate, CollapseError, CollapseStep};
pub use complex::{Complex, ComplexError, FVector, Face, Labels, VertexId};
pub use search::{Budget, Outcome, Verdict, DEFAULT_BUDGET};
pub use shelling::{ShellingCertificate, ShellingError};
pub use wsat::{Edge, Graph, SaturationCertificate, WsatError};
