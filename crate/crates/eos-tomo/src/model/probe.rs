//! Spectral filtering of the probe into detection channels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::AngularFrequency;

/// Rectangular pass band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubBand {
    pub center: AngularFrequency,
    pub width: AngularFrequency,
}

impl SubBand {
    pub fn lower(&self) -> f64 {
        self.center.rad_per_ps() - 0.5 * self.width.rad_per_ps()
    }

    pub fn upper(&self) -> f64 {
        self.center.rad_per_ps() + 0.5 * self.width.rad_per_ps()
    }
}

/// Filtered probe: a total band [ω̃ − Δω/2, ω̃ + Δω/2] split into sub-bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeFilter {
    pub center: AngularFrequency,
    pub bandwidth: AngularFrequency,
    pub bands: Vec<SubBand>,
    /// Post-filter probe amplitude β.
    pub amplitude: Complex64,
}

impl ProbeFilter {
    /// Validates that `bands` tile the total band without gaps or overlaps.
    pub fn new(
        center: AngularFrequency,
        bandwidth: AngularFrequency,
        mut bands: Vec<SubBand>,
        amplitude: Complex64,
    ) -> Result<Self> {
        let w = center.rad_per_ps();
        let dw = bandwidth.rad_per_ps();
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::invalid(
                "probe_filter.center_thz",
                "must be positive",
            ));
        }
        if !(dw > 0.0 && dw.is_finite() && dw < 2.0 * w) {
            return Err(Error::invalid(
                "probe_filter.bandwidth_thz",
                "must be positive and below twice the center",
            ));
        }
        if bands.is_empty() {
            return Err(Error::invalid(
                "probe_filter.bands",
                "at least one band required",
            ));
        }
        if bands.iter().any(|b| !(b.width.rad_per_ps() > 0.0)) {
            return Err(Error::invalid(
                "probe_filter.bands",
                "band widths must be positive",
            ));
        }
        bands.sort_by(|a, b| a.lower().total_cmp(&b.lower()));
        let tol = 1e-9 * dw;
        let mut edge = w - 0.5 * dw;
        for band in &bands {
            if (band.lower() - edge).abs() > tol {
                return Err(Error::invalid(
                    "probe_filter.bands",
                    "sub-bands must be disjoint and cover the total band",
                ));
            }
            edge = band.upper();
        }
        if (edge - (w + 0.5 * dw)).abs() > tol {
            return Err(Error::invalid(
                "probe_filter.bands",
                "sub-bands must be disjoint and cover the total band",
            ));
        }
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::invalid("probe_filter.amplitude", "must be finite"));
        }
        Ok(Self {
            center,
            bandwidth,
            bands,
            amplitude,
        })
    }

    /// Lower half X, upper half Y, so |α̃_X|² = |α̃_Y|² = 1/2.
    pub fn balanced(
        center: AngularFrequency,
        bandwidth: AngularFrequency,
        amplitude: Complex64,
    ) -> Result<Self> {
        let w = center.rad_per_ps();
        let q = 0.25 * bandwidth.rad_per_ps();
        let half = AngularFrequency::from_rad_per_ps(0.5 * bandwidth.rad_per_ps());
        let bands = vec![
            SubBand {
                center: AngularFrequency::from_rad_per_ps(w - q),
                width: half,
            },
            SubBand {
                center: AngularFrequency::from_rad_per_ps(w + q),
                width: half,
            },
        ];
        Self::new(center, bandwidth, bands, amplitude)
    }

    pub fn lower(&self) -> f64 {
        self.center.rad_per_ps() - 0.5 * self.bandwidth.rad_per_ps()
    }

    pub fn upper(&self) -> f64 {
        self.center.rad_per_ps() + 0.5 * self.bandwidth.rad_per_ps()
    }

    /// Splitting weight α̃_i = √(Δω_i/Δω).
    pub fn weight(&self, band: usize) -> f64 {
        (self.bands[band].width.rad_per_ps() / self.bandwidth.rad_per_ps()).sqrt()
    }

    /// β_i = α̃_i·β.
    pub fn band_amplitude(&self, band: usize) -> Complex64 {
        self.amplitude * self.weight(band)
    }

    /// Two-channel detection needs exactly two equal-weight bands and β ≠ 0.
    pub fn require_balanced_pair(&self) -> Result<()> {
        if self.bands.len() != 2 {
            return Err(Error::invalid(
                "probe_filter.bands",
                "two-channel detection needs exactly two bands",
            ));
        }
        if (self.weight(0).powi(2) - 0.5).abs() > 1e-9 {
            return Err(Error::invalid(
                "probe_filter.bands",
                "two-channel detection needs |α̃_X|² = |α̃_Y|² = 1/2",
            ));
        }
        if self.amplitude.norm() == 0.0 {
            return Err(Error::invalid("probe_filter.amplitude", "must be nonzero"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_weights_sum_to_one() {
        let f = ProbeFilter::balanced(
            AngularFrequency::from_thz(300.0),
            AngularFrequency::from_thz(1.0),
            Complex64::new(50.0, 0.0),
        )
        .unwrap();
        let total: f64 = (0..2).map(|i| f.weight(i).powi(2)).sum();
        assert!((total - 1.0).abs() < 1e-15);
        f.require_balanced_pair().unwrap();
    }

    #[test]
    fn gap_is_rejected() {
        let band = |c: f64, w: f64| SubBand {
            center: AngularFrequency::from_thz(c),
            width: AngularFrequency::from_thz(w),
        };
        let r = ProbeFilter::new(
            AngularFrequency::from_thz(300.0),
            AngularFrequency::from_thz(1.0),
            vec![band(299.7, 0.4), band(300.25, 0.5)],
            Complex64::new(1.0, 0.0),
        );
        assert!(r.is_err());
    }
}
