#![allow(dead_code)]

pub mod bigfloat;

use eos_tomo::coefficients::{coefficient_numeric, CoefficientPair, Component};
use eos_tomo::decomposition::{
    decompose, output_mode, Decomposition, ModeModel, DEFAULT_GRID_POINTS,
};
use eos_tomo::model::Setup;
use eos_tomo::presets::Preset;

/// Standard configuration with the given pump bandwidth in THz.
pub fn setup(pump_bandwidth_thz: f64) -> Setup {
    Preset::with_pump_bandwidth(pump_bandwidth_thz)
        .build()
        .unwrap()
}

pub fn decomposition(setup: &Setup) -> Decomposition {
    decompose(&output_mode(setup, ModeModel::Narrowband, DEFAULT_GRID_POINTS).unwrap()).unwrap()
}

pub fn standard(pump_bandwidth_thz: f64) -> Decomposition {
    decomposition(&setup(pump_bandwidth_thz))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Numeric (A_SA, A_TH) at the sampled lobe Δt = η_c.
pub fn gate_coefficients(d: &Decomposition) -> CoefficientPair {
    let delay = d.setup().walk_off().unwrap();
    let pulse = &d.setup().pulse;
    CoefficientPair::new(
        coefficient_numeric(Component::Sampled, pulse, d, delay).unwrap(),
        coefficient_numeric(Component::Thermalized, pulse, d, delay).unwrap(),
    )
}
