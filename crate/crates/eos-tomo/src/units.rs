//! Unit conventions.
//!
//! Internally every frequency is angular, in rad/ps. Configuration files and
//! user-facing tables use ordinary frequency ν = ω/2π in THz. Lengths are in
//! µm and times in ps.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Speed of light in µm/ps.
pub const SPEED_OF_LIGHT_UM_PER_PS: f64 = 299.792458;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_SI: f64 = 2.99792458e8;
/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054571817e-34;
/// Vacuum permittivity in F/m.
pub const EPSILON0_SI: f64 = 8.8541878128e-12;

/// Angular frequency in rad/ps (1 THz of ordinary frequency is 2π rad/ps).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    pub const ZERO: Self = Self(0.0);

    pub fn from_rad_per_ps(w: f64) -> Self {
        Self(w)
    }

    pub fn from_thz(nu: f64) -> Self {
        Self(thz_to_angular(nu))
    }

    pub fn rad_per_ps(self) -> f64 {
        self.0
    }

    pub fn thz(self) -> f64 {
        angular_to_thz(self.0)
    }
}

/// ν [THz] → ω [rad/ps].
#[inline]
pub fn thz_to_angular(nu: f64) -> f64 {
    2.0 * PI * nu
}

/// ω [rad/ps] → ν [THz].
#[inline]
pub fn angular_to_thz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Unnormalized sinc, sin(x)/x with sinc(0) = 1.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}
