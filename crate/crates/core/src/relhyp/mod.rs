//! Peripheral cosets, triangle centres and central decompositions.

mod decomp;
mod peripheral;
mod triangle;
mod verify;

pub use decomp::{
    count_bound_fit, decomposition_index, CentralDecomposition, Companion, CountFit, CountRow, DecompositionIndex,
    DeltaSet, Triple,
};
pub use peripheral::{Coset, Peripheral, PeripheralKind, PeripheralStructure};
pub use triangle::{CentralCoset, EntryExitRecord, Passage, StarConstants, StarGeometry};
pub use verify::{calibrate_constants, verify_star, Calibration, GeodesicMode, StarReport, EXHAUSTIVE_MAX_RADIUS};
