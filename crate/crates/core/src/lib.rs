//! Finite-scale experiments on Cayley balls: relative hyperbolicity checks,
//! central decompositions, sphere-restricted convolution norms and
//! triangle-center maps.

pub mod error;
pub mod fit;
pub mod group;
pub mod rd;
pub mod relhyp;
pub mod seed;
pub mod starstar;
pub mod workbench;

pub use error::{Error, Result};
pub use group::{enumerate_ball, BallIndex, Element, Family, GroupModel, Letter};
