//! Monte Carlo detector shots and the delay-sweep reconstruction pipeline.

pub mod reconstruct;
pub mod sampler;

pub use reconstruct::{
    quadrature_estimates, sweep, sweep_and_reconstruct, Corrections, DelayPoint,
    QuadratureEstimate, ReconstructionResult, RunConfig, Trace,
};
pub use sampler::{sample, AliasTable, CountSums, Sampler, ShotRecord};
