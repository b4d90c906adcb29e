//! Dense state-vector simulation of quantum query access.

pub mod density;
pub mod engine;
pub mod state;

pub use density::{trace_distance, DensityAccumulator, DensityMatrix};
pub use engine::{
    apply_cm, average_mixer_matrix, component_projector_matrix, component_state,
    component_superposition_via_projection, measure_component_projector, prepare_uniform_ind,
    prepare_uniform_s, project_uniform_ind, project_uniform_s, reflection_unitary, swap_test,
    swap_test_registers, Alpha, ProjectionSuccess, ProjectorOutcome, SwapOutcome,
};
pub use state::{Measurement, QuantumState, Register};

/// Largest state vector (and density matrix, counted in entries) we build.
pub const MAX_STATE_ENTRIES: usize = 1 << 22;
pub const NORM_TOL: f64 = 1e-12;
pub const FIDELITY_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-10;
