//! Physical configuration: crystal, pump, probe filter, MIR pulse and state.

pub mod crystal;
pub mod mir;
pub mod probe;
pub mod pump;
pub mod setup;

pub use crystal::{Crystal, RefractiveModel};
pub use mir::{MirPulse, MirState, PulseProfile};
pub use probe::{ProbeFilter, SubBand};
pub use pump::Pump;
pub use setup::{JsaModel, Setup, SpectralFactors};
