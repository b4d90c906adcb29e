//! Component mixers and the experiments built on them.
//!
//! * [`partition`], [`oracle`], [`verify`]: the data model, metered query
//!   access, and definition checks.
//! * [`instances`]: offset, graph-isomorphism, coset, Grover and layered
//!   families, plus permutation hiding.
//! * [`quantum`]: a dense state-vector engine with the component-projector
//!   measurement, swap tests and trace distance.
//! * [`protocols`]: Arthur-Merlin protocols, the quantum witness verifier,
//!   statistical-difference reductions and amplification.
//! * [`counterfeit`]: the counterfeiting reduction and its experiments.
//! * [`experiment`]: JSON-configured experiment dispatch used by the CLI.

pub mod bits;
pub mod counterfeit;
pub mod error;
pub mod experiment;
pub mod instances;
pub mod oracle;
pub mod partition;
pub mod protocols;
pub mod quantum;
pub mod stats;
pub mod verify;

pub use bits::Bits;
pub use error::{MixError, Result};
pub use oracle::{LabelOracle, Mixer, MixerOracle, Mode, QueryCounts, QuerySession};
pub use partition::GroundTruthPartition;
