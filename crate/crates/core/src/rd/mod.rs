//! Sphere-restricted convolution norms and their polynomial bounds.

mod chain;
mod constant;
mod function;
mod opnorm;
mod poly;

pub use chain::{
    complex_reduction_check, default_peripheral_bound, fit_k1, trace_proof_chain, ChainConstants, ChainReport,
    ChainStep, ReductionReport, XYPair, CHAIN_TOLERANCE,
};
pub use constant::{
    best_constant, brute_constant, rd_profile, BestConstantEstimate, RdProfile, SphereTensor, UpperBounds,
    BRUTE_MAX_DIMENSION, DEFAULT_RESTARTS, DEFAULT_TOLERANCE,
};
pub use function::{convolve, nonnegative_parts, restrict_sphere, FiniteFunction, Value};
pub use opnorm::{op_norm_lower, OpNormEstimate, OPNORM_TOLERANCE};
pub use poly::{assemble_p, PolynomialBound};
