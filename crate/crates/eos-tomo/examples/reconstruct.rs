//! Reconstructs the width and center of a coherent mid-infrared pulse from a
//! simulated delay sweep and compares the errors with their closed forms.

use eos_tomo::coefficients::{delay_grid, CoefficientSource};
use eos_tomo::decomposition::{decompose, output_mode, ModeModel, DEFAULT_GRID_POINTS};
use eos_tomo::model::MirState;
use eos_tomo::presets::Preset;
use eos_tomo::tomography::{sweep_and_reconstruct, RunConfig};
use num_complex::Complex64;

fn main() -> eos_tomo::Result<()> {
    let setup = Preset::with_pump_bandwidth(35.0).build()?;
    let d = decompose(&output_mode(
        &setup,
        ModeModel::Narrowband,
        DEFAULT_GRID_POINTS,
    )?)?;
    let eta = setup.walk_off()?;
    let state = MirState::Coherent {
        alpha: Complex64::new(10.0, 0.0),
    };
    for noiseless in [true, false] {
        let run = RunConfig {
            seed: 7,
            shots: 100_000,
            delays: delay_grid(eta - 0.06, eta + 0.06, 0.001)?,
            source: CoefficientSource::AnalyticGaussian,
            noiseless,
            ..RunConfig::default()
        };
        let r = sweep_and_reconstruct(&state, &d, &run)?;
        println!(
            "{}: width error {:.5} ± {:.1e} (closed form {:.5}), center error {:.5} ± {:.1e} (closed form {:.5})",
            if noiseless { "noiseless" } else { "sampled" },
            r.rel_err_sigma,
            r.rel_err_sigma_se,
            r.predicted_rel_err_sigma,
            r.rel_err_omega,
            r.rel_err_omega_se,
            r.predicted_rel_err_omega
        );
    }
    Ok(())
}
