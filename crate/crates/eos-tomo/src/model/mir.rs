//! The MIR pulse mode and the quantum state it carries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{erfc, ComplexGridFunction};
use crate::units::AngularFrequency;

/// Spectral shape of the MIR mode function on Ω > 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub enum PulseProfile {
    /// N·√Ω·exp[−(Ω−Ω̃)²/(2σ)²].
    #[default]
    Gaussian,
    /// Linearly interpolated samples, zero outside the grid; renormalized on load.
    Tabulated(ComplexGridFunction),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MirPulse {
    pub center: AngularFrequency,
    pub bandwidth: AngularFrequency,
    /// Carrier-envelope time t_Ω̃ in ps. Downstream code only sees Δt = t_Ω̃ − t_p.
    pub cep_time_ps: f64,
    pub profile: PulseProfile,
    #[serde(skip)]
    norm: f64,
}

impl MirPulse {
    pub fn gaussian(
        center: AngularFrequency,
        bandwidth: AngularFrequency,
        cep_time_ps: f64,
    ) -> Result<Self> {
        let (c, s) = (center.rad_per_ps(), bandwidth.rad_per_ps());
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("mir_pulse.center_thz", "must be positive"));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::invalid(
                "mir_pulse.bandwidth_thz",
                "must be positive",
            ));
        }
        let weight = s * s * (-c * c / (2.0 * s * s)).exp()
            + c * s * (PI / 2.0).sqrt() * erfc(-c / (2.0f64.sqrt() * s));
        Ok(Self {
            center,
            bandwidth,
            cep_time_ps,
            profile: PulseProfile::Gaussian,
            norm: weight.powf(-0.5),
        })
    }

    /// A grid-defined mode. `center` and `bandwidth` are kept as nominal
    /// values for reporting; the Gaussian error formulas do not apply.
    pub fn tabulated(
        samples: ComplexGridFunction,
        center: AngularFrequency,
        bandwidth: AngularFrequency,
    ) -> Result<Self> {
        if samples.grid.start < 0.0 {
            return Err(Error::invalid(
                "mir_pulse.samples",
                "grid must lie on positive frequencies",
            ));
        }
        let norm = samples.norm_sqr();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("mir_pulse.samples", "mode has zero norm"));
        }
        Ok(Self {
            center,
            bandwidth,
            cep_time_ps: 0.0,
            profile: PulseProfile::Tabulated(samples),
            norm: norm.powf(-0.5),
        })
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.profile, PulseProfile::Gaussian)
    }

    /// N_Ω̃ for the Gaussian profile, or the renormalization factor of a table.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// True when Ω̃ ≤ 3σ_Ω̃ and the Gaussian leaks materially below Ω = 0.
    pub fn spills_to_negative_frequencies(&self) -> bool {
        self.center.rad_per_ps() <= 3.0 * self.bandwidth.rad_per_ps()
    }

    /// f_Ω̃(Ω), zero for Ω ≤ 0.
    pub fn mode(&self, w: f64) -> Complex64 {
        if w <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match &self.profile {
            PulseProfile::Gaussian => {
                let x = (w - self.center.rad_per_ps()) / (2.0 * self.bandwidth.rad_per_ps());
                Complex64::new(self.norm * w.sqrt() * (-x * x).exp(), 0.0)
            }
            PulseProfile::Tabulated(f) => {
                let g = &f.grid;
                let t = (w - g.start) / g.step;
                if t < 0.0 || t > (g.count - 1) as f64 {
                    return Complex64::new(0.0, 0.0);
                }
                let i = (t.floor() as usize).min(g.count - 2);
                let frac = t - i as f64;
                (f.values[i] * (1.0 - frac) + f.values[i + 1] * frac) * self.norm
            }
        }
    }

    /// Frequency range outside of which the mode is negligible (< e⁻²⁵ in amplitude
    /// relative to the peak for the Gaussian).
    pub fn support(&self) -> (f64, f64) {
        match &self.profile {
            PulseProfile::Gaussian => {
                let (c, s) = (self.center.rad_per_ps(), self.bandwidth.rad_per_ps());
                ((c - 10.0 * s).max(0.0), c + 10.0 * s)
            }
            PulseProfile::Tabulated(f) => (f.grid.start.max(0.0), f.grid.end()),
        }
    }
}

/// Quantum state of the MIR mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MirState {
    Vacuum,
    Coherent {
        alpha: Complex64,
    },
    /// Even cat N_cat(|α⟩ + |−α⟩).
    Cat {
        alpha: Complex64,
    },
    SqueezedVacuum {
        zeta: Complex64,
    },
}

impl MirState {
    pub fn name(&self) -> &'static str {
        match self {
            MirState::Vacuum => "vacuum",
            MirState::Coherent { .. } => "coherent",
            MirState::Cat { .. } => "cat",
            MirState::SqueezedVacuum { .. } => "squeezed_vacuum",
        }
    }

    /// (μ, ν) = (cosh|ζ|, e^{i·arg ζ}·sinh|ζ|); (1, 0) for unsqueezed states.
    pub fn squeeze_factors(&self) -> (f64, Complex64) {
        match self {
            MirState::SqueezedVacuum { zeta } => {
                let r = zeta.norm();
                let phase = if r == 0.0 { 0.0 } else { zeta.arg() };
                (r.cosh(), Complex64::from_polar(r.sinh(), phase))
            }
            _ => (1.0, Complex64::new(0.0, 0.0)),
        }
    }

    /// N_cat = (2 + 2e^{−2|α|²})^{−1/2}.
    pub fn cat_normalization(alpha: Complex64) -> f64 {
        (2.0 + 2.0 * (-2.0 * alpha.norm_sqr()).exp()).powf(-0.5)
    }

    /// Displacement of the coherent states involved, zero for the vacua.
    pub fn amplitude(&self) -> Complex64 {
        match self {
            MirState::Coherent { alpha } | MirState::Cat { alpha } => *alpha,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// The state after the phase rotation a → e^{iφ}a.
    pub fn rotated(&self, phi: f64) -> MirState {
        let r = Complex64::from_polar(1.0, phi);
        match *self {
            MirState::Vacuum => MirState::Vacuum,
            MirState::Coherent { alpha } => MirState::Coherent { alpha: alpha * r },
            MirState::Cat { alpha } => MirState::Cat { alpha: alpha * r },
            MirState::SqueezedVacuum { zeta } => MirState::SqueezedVacuum { zeta: zeta * r * r },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match self {
            MirState::Vacuum => Ok(()),
            MirState::Coherent { alpha } | MirState::Cat { alpha } if finite(alpha) => Ok(()),
            MirState::SqueezedVacuum { zeta } if finite(zeta) && zeta.norm() < 20.0 => Ok(()),
            _ => Err(Error::invalid(
                "mir_state",
                "state parameters must be finite (|ζ| < 20)",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squeeze_factors_hyperbolic() {
        let s = MirState::SqueezedVacuum {
            zeta: Complex64::new(1.0, 1.1),
        };
        let (mu, nu) = s.squeeze_factors();
        assert!((mu * mu - nu.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cat_normalization() {
        assert_eq!(MirState::cat_normalization(Complex64::new(0.0, 0.0)), 0.5);
    }

    #[test]
    fn mode_vanishes_off_positive_axis() {
        let p = MirPulse::gaussian(
            AngularFrequency::from_thz(25.0),
            AngularFrequency::from_thz(5.0),
            0.0,
        )
        .unwrap();
        assert_eq!(p.mode(0.0).norm(), 0.0);
        assert_eq!(p.mode(-3.0).norm(), 0.0);
    }
}
