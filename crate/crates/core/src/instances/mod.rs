//! Concrete mixer families.

pub mod coset;
pub mod graph_iso;
pub mod grover;
pub mod layered;
pub mod offset;
pub mod spec;

pub use coset::make_coset_mixer;
pub use graph_iso::make_graph_iso_mixer;
pub use grover::{make_grover_mixer, GroverStep, PointFunction};
pub use layered::{
    hide_instance, is_label_consistent, make_layered_instance, Hiding, LayeredInstance, LayeredVariant,
};
pub use offset::make_offset_mixer;
pub use spec::{BuiltInstance, InstanceSpec};
