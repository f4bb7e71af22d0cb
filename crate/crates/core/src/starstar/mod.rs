//! Triangle-center maps `T: G × G → G × ⋃ H_i × H_i` and their checks.

mod tmap;
mod verify;

pub use tmap::{tmap_from_star, tmap_polygrowth, tmap_z2, TMap, TMapKind, TValue};
pub use verify::{verify_tmap, CountCell, TMapReport};
