//! The full two-channel sampling configuration and its joint spectral amplitude.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::crystal::Crystal;
use crate::model::mir::MirPulse;
use crate::model::probe::ProbeFilter;
use crate::model::pump::{field_prefactor, Pump};
use crate::units::sinc;

/// Which joint spectral amplitude drives the mode construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JsaModel {
    /// Full dispersion of the refractive model in every factor.
    #[default]
    Exact,
    /// Linearized phase mismatch η ≈ η_c(ω)·Ω with the slowly varying
    /// amplitude factors frozen at n(0), n(ω) and ω_p. This is the regime in
    /// which the closed-form delay coefficients are exact.
    LowDispersion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Setup {
    pub crystal: Crystal,
    pub pump: Pump,
    pub probe: ProbeFilter,
    pub pulse: MirPulse,
    pub jsa_model: JsaModel,
}

impl Setup {
    /// Checks that the cutoff Λ separates the MIR pulse band (Ω̃ + 5σ_Ω̃)
    /// from the lower edge of the probe band.
    pub fn new(
        crystal: Crystal,
        pump: Pump,
        probe: ProbeFilter,
        pulse: MirPulse,
        jsa_model: JsaModel,
    ) -> Result<Self> {
        let cutoff = crystal.cutoff.rad_per_ps();
        let mir_edge = pulse.center.rad_per_ps() + 5.0 * pulse.bandwidth.rad_per_ps();
        if !(mir_edge < cutoff) {
            return Err(Error::invalid(
                "crystal.cutoff_thz",
                format!(
                    "cutoff {:.3} THz must exceed the MIR band edge {:.3} THz",
                    crystal.cutoff.thz(),
                    crate::units::angular_to_thz(mir_edge)
                ),
            ));
        }
        if !(probe.lower() > cutoff) {
            return Err(Error::invalid(
                "crystal.cutoff_thz",
                format!(
                    "cutoff {:.3} THz must lie below the probe band edge {:.3} THz",
                    crystal.cutoff.thz(),
                    crate::units::angular_to_thz(probe.lower())
                ),
            ));
        }
        Ok(Self {
            crystal,
            pump,
            probe,
            pulse,
            jsa_model,
        })
    }

    /// Non-fatal modelling caveats.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.probe.bandwidth.rad_per_ps() > 0.1 * self.pump.bandwidth.rad_per_ps() {
            out.push(format!(
                "probe bandwidth {:.3} THz exceeds σ_p/10; the narrowband mode is inaccurate",
                self.probe.bandwidth.thz()
            ));
        }
        if self.pulse.spills_to_negative_frequencies() {
            out.push(format!(
                "MIR center {:.3} THz ≤ 3σ: the Gaussian extends into negative frequencies",
                self.pulse.center.thz()
            ));
        }
        out
    }

    /// d = −n(ω_p)⁴·r41 in m/V.
    pub fn coupling(&self) -> f64 {
        self.crystal.coupling(self.pump.center.rad_per_ps())
    }

    /// η_c at the probe center, in ps.
    pub fn walk_off(&self) -> Result<f64> {
        self.crystal.walk_off(self.probe.center.rad_per_ps())
    }

    /// S(Ω, ω) in ps, for |Ω| < Λ ≤ |ω|.
    pub fn joint_spectral_amplitude(&self, big: f64, small: f64) -> Result<Complex64> {
        let cutoff = self.crystal.cutoff.rad_per_ps();
        if !(big.abs() < cutoff && small.abs() >= cutoff) {
            return Err(Error::FrequencyDomain(format!(
                "joint spectral amplitude needs |Ω| < Λ ≤ |ω| (Ω = {big:.4}, ω = {small:.4}, Λ = {cutoff:.4} rad/ps)"
            )));
        }
        Ok(self.jsa_kernel().eval(self, big, small))
    }

    /// The two factors of the exact JSA at any (Ω, ω), without the domain
    /// check: the pump up/down-conversion term and ζ_{Ω,ω}.
    pub fn spectral_factors(&self, big: f64, small: f64) -> SpectralFactors {
        let cr = &self.crystal;
        let norm = self.pump.normalization();
        let field = |w: f64| {
            Complex64::new(0.0, (w.abs() / cr.refractive_index(w)).sqrt())
                * self.pump.envelope_with(norm, w)
        };
        let up = self.pump.amplitude * field(big - small);
        let down = (self.pump.amplitude * field(small - big)).conj();
        let pump = 1e12 * field_prefactor(cr) * (up + down);
        let phase_matching = cr.phase_matching(big, small, self.coupling());
        SpectralFactors {
            pump,
            phase_matching,
            jsa: pump * phase_matching,
        }
    }

    /// Precomputed JSA constants; evaluation skips the domain check.
    pub(crate) fn jsa_kernel(&self) -> JsaKernel {
        let coupling = self.coupling();
        JsaKernel {
            pump_norm: self.pump.normalization(),
            scale: 1e12 * field_prefactor(&self.crystal) * coupling,
        }
    }
}

/// S(Ω, ω) = pump·phase_matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralFactors {
    pub pump: Complex64,
    pub phase_matching: Complex64,
    pub jsa: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct JsaKernel {
    pump_norm: f64,
    /// 1e12·√(ħ/(4πcε₀A))·d converts the product to ps.
    scale: f64,
}

impl JsaKernel {
    pub fn eval(&self, s: &Setup, big: f64, small: f64) -> Complex64 {
        let cr = &s.crystal;
        let product = big * small;
        if product == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match s.jsa_model {
            JsaModel::Exact => {
                let field = |w: f64| {
                    Complex64::new(0.0, (w.abs() / cr.refractive_index(w)).sqrt())
                        * s.pump.envelope_with(self.pump_norm, w)
                };
                let up = s.pump.amplitude * field(big - small);
                let down = (s.pump.amplitude * field(small - big)).conj();
                let gate = cr.phase_matching(big, small, 1.0);
                self.scale * (up + down) * gate
            }
            JsaModel::LowDispersion => {
                let wp = s.pump.center.rad_per_ps();
                let carrier = Complex64::new(0.0, (wp / cr.refractive_index(wp)).sqrt());
                let env = |w: f64| carrier * s.pump.envelope_with(self.pump_norm, w);
                let up = s.pump.amplitude * env(big - small);
                let down = (s.pump.amplitude * env(small - big)).conj();
                let n0 = cr.refractive_index(0.0);
                let eta_c =
                    cr.half_transit_time() * (cr.refractive.group_index_unchecked(small) - n0);
                let gate = product.signum()
                    * (product.abs() / (n0 * cr.refractive_index(small))).sqrt()
                    * cr.half_transit_time()
                    * sinc(eta_c * big);
                self.scale * (up + down) * Complex64::new(0.0, -gate)
            }
        }
    }
}
