//! Prints the mode decomposition and the gate coefficients at the sampled lobe
//! for the three standard pump bandwidths.

use eos_tomo::coefficients::{coefficient_numeric, Component};
use eos_tomo::decomposition::{decompose, output_mode, ModeModel, DEFAULT_GRID_POINTS};
use eos_tomo::presets::Preset;

fn main() -> eos_tomo::Result<()> {
    println!("sigma_p  theta    theta_perp  phi_perp  s_tilde    |A_SA|  |A_TH|");
    for sp in [15.0, 35.0, 50.0] {
        let setup = Preset::with_pump_bandwidth(sp).build()?;
        let d = decompose(&output_mode(
            &setup,
            ModeModel::Narrowband,
            DEFAULT_GRID_POINTS,
        )?)?;
        let eta = setup.walk_off()?;
        let sa = coefficient_numeric(Component::Sampled, &setup.pulse, &d, eta)?;
        let th = coefficient_numeric(Component::Thermalized, &setup.pulse, &d, eta)?;
        println!(
            "{sp:7.1}  {:.5}  {:.5}     {:+.4}   {:9.2}  {:.4}  {:.4}",
            d.theta,
            d.theta_perp,
            d.phi_perp,
            d.s_tilde,
            sa.norm(),
            th.norm()
        );
    }
    Ok(())
}
