//! Counterfeiting with a (possibly invalid) label: counterfeiter stand-ins,
//! the reduction from COMPONENT SUPERPOSITION, and the distinguishing
//! experiments behind it.

pub mod algorithms;
pub mod grover_embed;
pub mod reduction;

pub use algorithms::{label_scanning_counterfeiter, reference_counterfeiter, Counterfeiter, LabelScanning, Reference};
pub use grover_embed::{grover_embedding_query_experiment, GroverEmbedReport, Tester};
pub use reduction::{
    distinguishing_experiment, hiding_soundness_check, solve_component_superposition_via_counterfeiter,
    solve_with_hiding, CounterfeitOutput, DistinguishingReport, HidingSoundness, PointChoice,
};
