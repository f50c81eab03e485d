//! Ready-made setups for the standard ZnTe configuration: a 100 µm crystal,
//! 300 THz probe with 1 THz filter, 350 THz pump and a 25 THz / 5 THz MIR pulse.

use num_complex::Complex64;

use crate::error::Result;
use crate::model::{Crystal, JsaModel, MirPulse, ProbeFilter, Pump, Setup};
use crate::units::AngularFrequency;

pub const PUMP_AMPLITUDE: f64 = 2e6;
pub const PROBE_AMPLITUDE: f64 = 50.0;

/// Scalar knobs of the standard configuration, in THz, µm and ps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub length_um: f64,
    pub probe_thz: f64,
    pub probe_bandwidth_thz: f64,
    pub pump_thz: f64,
    pub pump_bandwidth_thz: f64,
    pub pump_cep_time_ps: f64,
    pub pump_amplitude: f64,
    pub mir_thz: f64,
    pub mir_bandwidth_thz: f64,
    pub probe_amplitude: f64,
    pub jsa_model: JsaModel,
}

impl Default for Preset {
    fn default() -> Self {
        Self {
            length_um: 100.0,
            probe_thz: 300.0,
            probe_bandwidth_thz: 1.0,
            pump_thz: 350.0,
            pump_bandwidth_thz: 35.0,
            pump_cep_time_ps: 0.0,
            pump_amplitude: PUMP_AMPLITUDE,
            mir_thz: 25.0,
            mir_bandwidth_thz: 5.0,
            probe_amplitude: PROBE_AMPLITUDE,
            jsa_model: JsaModel::Exact,
        }
    }
}

impl Preset {
    /// Standard configuration with the given pump bandwidth.
    pub fn with_pump_bandwidth(pump_bandwidth_thz: f64) -> Self {
        Self {
            pump_bandwidth_thz,
            ..Self::default()
        }
    }

    /// 6 µm crystal with the pump matched to the MIR pulse: σ_p = σ_Ω̃ and
    /// ω_p − ω̃ = Ω̃.
    pub fn thin_crystal_matched() -> Self {
        Self {
            length_um: 6.0,
            pump_thz: 325.0,
            pump_bandwidth_thz: 5.0,
            ..Self::default()
        }
    }

    pub fn build(&self) -> Result<Setup> {
        let crystal = Crystal::zinc_telluride(self.length_um)?;
        let pump = Pump::new(
            Complex64::new(self.pump_amplitude, 0.0),
            AngularFrequency::from_thz(self.pump_thz),
            AngularFrequency::from_thz(self.pump_bandwidth_thz),
            self.pump_cep_time_ps,
        )?;
        let probe = ProbeFilter::balanced(
            AngularFrequency::from_thz(self.probe_thz),
            AngularFrequency::from_thz(self.probe_bandwidth_thz),
            Complex64::new(self.probe_amplitude, 0.0),
        )?;
        let pulse = MirPulse::gaussian(
            AngularFrequency::from_thz(self.mir_thz),
            AngularFrequency::from_thz(self.mir_bandwidth_thz),
            0.0,
        )?;
        Setup::new(crystal, pump, probe, pulse, self.jsa_model)
    }
}
