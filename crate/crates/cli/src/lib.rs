//! Library surface of the manifest runner, shared by the binary and the
//! test suites.

pub mod catalog;
pub mod manifest;
pub mod runner;

pub use manifest::{CheckSpec, FamilySpec, Manifest, ManifoldSpec, SamplingSpec, TransformSpec};
pub use runner::{run, CheckOutcome, ReportDocument, RunOutcome, REPORT_SCHEMA};
