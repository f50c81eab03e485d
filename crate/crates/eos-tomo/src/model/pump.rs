//! Gaussian NIR pump pulse.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::crystal::Crystal;
use crate::numerics::erfc;
use crate::units::{AngularFrequency, EPSILON0_SI, HBAR_SI, SPEED_OF_LIGHT_SI};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pump {
    /// Coherent amplitude α_p.
    pub amplitude: Complex64,
    pub center: AngularFrequency,
    pub bandwidth: AngularFrequency,
    /// Carrier-envelope time t_p in ps.
    pub cep_time_ps: f64,
}

impl Pump {
    pub fn new(
        amplitude: Complex64,
        center: AngularFrequency,
        bandwidth: AngularFrequency,
        cep_time_ps: f64,
    ) -> Result<Self> {
        if !(center.rad_per_ps() > 0.0 && center.rad_per_ps().is_finite()) {
            return Err(Error::invalid("pump.center_thz", "must be positive"));
        }
        if !(bandwidth.rad_per_ps() > 0.0 && bandwidth.rad_per_ps().is_finite()) {
            return Err(Error::invalid("pump.bandwidth_thz", "must be positive"));
        }
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::invalid("pump.amplitude", "must be finite"));
        }
        if !cep_time_ps.is_finite() {
            return Err(Error::invalid("pump.cep_time_ps", "must be finite"));
        }
        Ok(Self {
            amplitude,
            center,
            bandwidth,
            cep_time_ps,
        })
    }

    /// N_p, fixing ∫ sign(ω)|f_p(ω)|² dω = 1.
    pub fn normalization(&self) -> f64 {
        let wp = self.center.rad_per_ps();
        let sp = self.bandwidth.rad_per_ps();
        let x = wp / (2.0f64.sqrt() * sp);
        let weight = (PI / 2.0).sqrt() * sp * (erfc(-x) - erfc(x));
        weight.powf(-0.5)
    }

    /// f_p(ω) = N_p·exp[−(ω−ω_p)²/(2σ_p)² − i·t_p·ω].
    pub fn envelope(&self, w: f64) -> Complex64 {
        self.envelope_with(self.normalization(), w)
    }

    pub(crate) fn envelope_with(&self, norm: f64, w: f64) -> Complex64 {
        let x = (w - self.center.rad_per_ps()) / (2.0 * self.bandwidth.rad_per_ps());
        Complex64::from_polar(norm * (-x * x).exp(), -self.cep_time_ps * w)
    }

    /// E_p(ω) = i·√(ħ/(4πcε₀A))·√(|ω|/n_ω)·f_p(ω).
    ///
    /// With ω in rad/ps and f_p normalized in ps^{1/2}, the unit factors of
    /// √|ω| and f_p cancel, so the value is the SI spectral field in V·s/m.
    pub fn field(&self, w: f64, crystal: &Crystal) -> Complex64 {
        let scale = field_prefactor(crystal) * (w.abs() / crystal.refractive_index(w)).sqrt();
        Complex64::i() * scale * self.envelope(w)
    }
}

/// √(ħ/(4πcε₀A)) in SI units.
pub fn field_prefactor(crystal: &Crystal) -> f64 {
    (HBAR_SI / (4.0 * PI * SPEED_OF_LIGHT_SI * EPSILON0_SI * crystal.beam_area_m2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_peaks_at_center() {
        let p = Pump::new(
            Complex64::new(1.0, 0.0),
            AngularFrequency::from_thz(350.0),
            AngularFrequency::from_thz(35.0),
            0.01,
        )
        .unwrap();
        let wp = p.center.rad_per_ps();
        let peak = p.envelope(wp).norm();
        for dw in [-1.0, -0.1, 0.1, 1.0] {
            assert!(p.envelope(wp + dw).norm() < peak);
        }
    }

    #[test]
    fn rejects_nonpositive_bandwidth() {
        assert!(Pump::new(
            Complex64::new(1.0, 0.0),
            AngularFrequency::from_thz(350.0),
            AngularFrequency::ZERO,
            0.0
        )
        .is_err());
    }
}
