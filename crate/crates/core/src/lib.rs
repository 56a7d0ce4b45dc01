//! Core algorithms for traffic incident response planning.
//!
//! Everything in this crate is allocation-only and IO-free, so it builds for
//! `no_std` targets with `alloc`. Text generation is reached through the
//! [`synthesis::GenerationBackend`] trait; the `tidss` companion crate carries
//! file formats, the HTTP backend, the service and the CLI.
//!
//! Module map:
//!
//! * [`catalog`]: permitted lane actions, strategies and the ten canonical
//!   response actions with their impact and resource-engagement scores.
//! * [`topsis`]: the TOPSIS engine that turns a decision matrix into
//!   per-action weights.
//! * [`plan`]: binary action vectors, robust extraction from model output,
//!   weighted scoring and model-vs-manual comparison.
//! * [`fusion`]: late fusion of several generations by averaging and rounding.
//! * [`synthesis`]: chunking, the S-cycle loop and the guideline synthesis
//!   dataflow over a pluggable backend.
//! * [`metrics`]: traffic performance measures and the normalized heuristic.
//! * [`incident`]: accident records and the canonical report text.
//! * [`orchestrate`]: prompt assembly and the generate/extract/fuse/score flow.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod catalog;
pub mod fusion;
pub mod incident;
pub mod metrics;
pub mod orchestrate;
pub mod plan;
pub mod synthesis;
pub mod topsis;

pub use catalog::{
    canonical_catalog, CatalogAction, Closure, NetworkLane, PermittedAction, Strategy,
};
pub use fusion::fuse;
pub use plan::{BinaryPlan, WeightTable};
pub use topsis::{CriterionKind, CriterionSpec, DecisionMatrix, TopsisResult};

macro_rules! impl_error {
    ($($ty:ty),* $(,)?) => {
        $(impl core::error::Error for $ty {})*
    };
}

impl_error!(
    catalog::ActionError,
    fusion::FusionError,
    incident::FieldError,
    metrics::MetricsError,
    orchestrate::OrchestrateError,
    plan::ExtractError,
    plan::PlanError,
    synthesis::BackendError,
    synthesis::RetryExhausted,
    synthesis::SchemaError,
    synthesis::SynthesisError,
    synthesis::TableError,
    topsis::TopsisError,
);
