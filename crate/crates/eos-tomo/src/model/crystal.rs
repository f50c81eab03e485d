//! Nonlinear crystal: dispersion, phase mismatch and the phase-matching kernel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{angular_to_thz, sinc, AngularFrequency, SPEED_OF_LIGHT_UM_PER_PS};

/// Two-branch refractive index of zinc telluride.
///
/// Both branches are polynomials in ordinary frequency ν = |ω|/2π (THz):
/// a linear MIR branch `a1·ν + c1` below the seam and a quadratic NIR branch
/// `a2·(ν − b)² + c2` at and above it. The index jumps at the seam, which is
/// harmless as long as no band straddles it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefractiveModel {
    pub seam_thz: f64,
    pub a1_ps: f64,
    pub a2_ps2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for RefractiveModel {
    fn default() -> Self {
        Self {
            seam_thz: 140.0,
            a1_ps: 3.5e-4,
            a2_ps2: 2.6e-6,
            c1: 2.55,
            c2: 2.75,
        }
    }
}

impl RefractiveModel {
    /// n(ω) for ω in rad/ps. Even in ω.
    pub fn index(&self, w: f64) -> f64 {
        let nu = angular_to_thz(w.abs());
        if nu < self.seam_thz {
            self.a1_ps * nu + self.c1
        } else {
            let x = nu - self.seam_thz;
            self.a2_ps2 * x * x + self.c2
        }
    }

    /// n_g = n + ω·dn/dω, which equals n + ν·dn/dν.
    pub fn group_index(&self, w: f64) -> Result<f64> {
        let nu = angular_to_thz(w.abs());
        if (nu - self.seam_thz).abs() <= 1e-12 * self.seam_thz.max(1.0) {
            return Err(Error::RefractiveSeam { thz: nu });
        }
        Ok(self.group_index_unchecked(w))
    }

    /// Group index using whichever branch `|ω|` falls on, seam included.
    pub(crate) fn group_index_unchecked(&self, w: f64) -> f64 {
        let nu = angular_to_thz(w.abs());
        let slope = if nu < self.seam_thz {
            self.a1_ps
        } else {
            2.0 * self.a2_ps2 * (nu - self.seam_thz)
        };
        self.index(w) + nu * slope
    }
}

/// Crystal geometry and material constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crystal {
    pub length_um: f64,
    pub r41_pm_per_v: f64,
    pub beam_area_m2: f64,
    /// Frequency Λ separating the MIR band |Ω| < Λ from the NIR band.
    pub cutoff: AngularFrequency,
    pub refractive: RefractiveModel,
}

impl Crystal {
    /// Beam area for a 25 µm waist radius.
    pub const DEFAULT_BEAM_AREA_M2: f64 = 1.963e-9;
    pub const DEFAULT_R41_PM_PER_V: f64 = 4.0;
    pub const DEFAULT_CUTOFF_THZ: f64 = 140.0;

    pub fn new(
        length_um: f64,
        r41_pm_per_v: f64,
        beam_area_m2: f64,
        cutoff: AngularFrequency,
        refractive: RefractiveModel,
    ) -> Result<Self> {
        if !(length_um > 0.0 && length_um.is_finite()) {
            return Err(Error::invalid("crystal.length_um", "must be positive"));
        }
        if !(beam_area_m2 > 0.0 && beam_area_m2.is_finite()) {
            return Err(Error::invalid("crystal.beam_area_m2", "must be positive"));
        }
        if !(cutoff.rad_per_ps() > 0.0 && cutoff.rad_per_ps().is_finite()) {
            return Err(Error::invalid("crystal.cutoff_thz", "must be positive"));
        }
        if !r41_pm_per_v.is_finite() {
            return Err(Error::invalid("crystal.r41_pm_per_v", "must be finite"));
        }
        Ok(Self {
            length_um,
            r41_pm_per_v,
            beam_area_m2,
            cutoff,
            refractive,
        })
    }

    /// ZnTe with default beam area, r41 and cutoff.
    pub fn zinc_telluride(length_um: f64) -> Result<Self> {
        Self::new(
            length_um,
            Self::DEFAULT_R41_PM_PER_V,
            Self::DEFAULT_BEAM_AREA_M2,
            AngularFrequency::from_thz(Self::DEFAULT_CUTOFF_THZ),
            RefractiveModel::default(),
        )
    }

    pub fn refractive_index(&self, w: f64) -> f64 {
        self.refractive.index(w)
    }

    pub fn group_index(&self, w: f64) -> Result<f64> {
        self.refractive.group_index(w)
    }

    /// L/(2c) in ps.
    pub fn half_transit_time(&self) -> f64 {
        self.length_um / (2.0 * SPEED_OF_LIGHT_UM_PER_PS)
    }

    /// η_{Ω,ω}, antisymmetric under Ω ↔ ω.
    pub fn phase_mismatch(&self, big: f64, small: f64) -> f64 {
        let n = |w| self.refractive.index(w);
        self.half_transit_time()
            * (small * (n(small) - n(small - big)) - big * (n(big) - n(big - small)))
    }

    /// Coupling d = −n(ω_p)⁴·r41 in m/V.
    pub fn coupling(&self, pump_center: f64) -> f64 {
        -self.refractive.index(pump_center).powi(4) * self.r41_pm_per_v * 1e-12
    }

    /// ζ_{Ω,ω} for a coupling `d` in m/V.
    pub fn phase_matching(&self, big: f64, small: f64, d: f64) -> Complex64 {
        let n_big = self.refractive.index(big);
        let n_small = self.refractive.index(small);
        let product = small * big;
        let sign = if product == 0.0 {
            0.0
        } else {
            product.signum()
        };
        let magnitude = d
            * sign
            * (product.abs() / (n_big * n_small)).sqrt()
            * self.half_transit_time()
            * sinc(self.phase_mismatch(big, small));
        Complex64::new(0.0, -magnitude)
    }

    /// Half period η_c = L/(2c)·[n_g(ω̃) − n(0)] of the phase-matching gate, in ps.
    pub fn walk_off(&self, probe_center: f64) -> Result<f64> {
        Ok(self.half_transit_time()
            * (self.group_index(probe_center)? - self.refractive.index(0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::thz_to_angular;

    #[test]
    fn origin_values() {
        let m = RefractiveModel::default();
        assert_eq!(m.index(0.0), 2.55);
        assert_eq!(m.group_index(0.0).unwrap(), 2.55);
    }

    #[test]
    fn seam_rejected_for_group_index() {
        let m = RefractiveModel::default();
        assert!(matches!(
            m.group_index(thz_to_angular(140.0)),
            Err(Error::RefractiveSeam { .. })
        ));
    }

    #[test]
    fn diagonal_mismatch_vanishes() {
        let c = Crystal::zinc_telluride(100.0).unwrap();
        for w in [-300.0, -20.0, 0.0, 5.0, 1800.0] {
            assert_eq!(c.phase_mismatch(w, w), 0.0);
        }
    }
}
