//! Closed-form count moments from the quadrature covariance of the sampled
//! and thermalized modes.
//!
//! The transformed quadrature measured in channel i is
//!
//!   X̃(φ) = μ_Tμ_S·X_SA(φ) + μ_T|ν_S|·X_SA(−φ−Φ⊥) + ν_T·X_TH(−φ) = rᵀ𝔛,
//!
//! with X(φ) = Re(e^{iφ}a), and the modes relate to the pulse mode through
//! a_x = A_x·a + (vacuum orthogonal to a).

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::coefficients::CoefficientPair;
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::model::MirState;

/// Quadrature angle of the X channel.
pub const PHASE_X: f64 = 0.0;
/// Quadrature angle of the Y channel.
pub const PHASE_Y: f64 = -FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelMoments {
    /// φ_i of the measured quadrature.
    pub phase: f64,
    pub count_mean: f64,
    pub count_variance: f64,
    /// ⟨X̃(φ_i)⟩ of the transformed state.
    pub quadrature_mean: f64,
    /// Var X̃(φ_i) of the transformed state, without the −s̃/4 smoothing.
    pub quadrature_variance: f64,
    /// Symmetrized covariance of (X_SA(φ), X_SA(−φ−Φ⊥), X_TH(−φ)).
    pub covariance: [[f64; 3]; 3],
    /// r = (μ_Tμ_S, μ_T|ν_S|, ν_T).
    pub weights: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentPrediction {
    pub x: ChannelMoments,
    pub y: ChannelMoments,
}

/// First and second moments of the pulse mode a.
#[derive(Debug, Clone, Copy)]
struct StateMoments {
    mean: Complex64,
    /// ⟨(a − ⟨a⟩)²⟩.
    pair: Complex64,
    /// ⟨(a − ⟨a⟩)†(a − ⟨a⟩)⟩.
    occupation: f64,
}

impl StateMoments {
    fn of(state: &MirState) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        match *state {
            MirState::Vacuum => Ok(StateMoments {
                mean: zero,
                pair: zero,
                occupation: 0.0,
            }),
            MirState::Coherent { alpha } => Ok(StateMoments {
                mean: alpha,
                pair: zero,
                occupation: 0.0,
            }),
            MirState::SqueezedVacuum { .. } => {
                let (mu, nu) = state.squeeze_factors();
                Ok(StateMoments {
                    mean: zero,
                    pair: -nu * mu,
                    occupation: nu.norm_sqr(),
                })
            }
            MirState::Cat { .. } => Err(Error::UnsupportedMoments("cat")),
        }
    }
}

/// One quadrature Re(c·a_x) of mode x ∈ {SA = 0, TH = 1}.
#[derive(Debug, Clone, Copy)]
struct Quadrature {
    mode: usize,
    rotation: Complex64,
}

fn channel(
    state: &StateMoments,
    decomp: &Decomposition,
    coeffs: CoefficientPair,
    phase: f64,
) -> ChannelMoments {
    let amplitude = [coeffs.sampled, coeffs.thermalized];
    let quads = [
        Quadrature {
            mode: 0,
            rotation: Complex64::from_polar(1.0, phase),
        },
        Quadrature {
            mode: 0,
            rotation: Complex64::from_polar(1.0, -phase - decomp.phi_perp),
        },
        Quadrature {
            mode: 1,
            rotation: Complex64::from_polar(1.0, -phase),
        },
    ];
    let weights = [
        decomp.mu_t * decomp.mu_s,
        decomp.mu_t * decomp.nu_s.norm(),
        decomp.nu_t,
    ];

    let mut covariance = [[0.0; 3]; 3];
    for (i, qi) in quads.iter().enumerate() {
        for (j, qj) in quads.iter().enumerate() {
            let ki = qi.rotation * amplitude[qi.mode];
            let kj = qj.rotation * amplitude[qj.mode];
            let state_part = 0.5 * (ki * kj * state.pair).re
                + 0.5 * (ki * kj.conj()).re * (state.occupation + 0.5);
            let same = if qi.mode == qj.mode { 1.0 } else { 0.0 };
            let commutator = same - amplitude[qi.mode] * amplitude[qj.mode].conj();
            let vacuum_part = 0.25 * (qi.rotation * qj.rotation.conj() * commutator).re;
            covariance[i][j] = state_part + vacuum_part;
        }
    }
    let quadrature_mean: f64 = quads
        .iter()
        .zip(weights)
        .map(|(q, r)| r * (q.rotation * amplitude[q.mode] * state.mean).re)
        .sum();
    let quadrature_variance: f64 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| weights[i] * weights[j] * covariance[i][j])
        .sum();

    ChannelMoments {
        phase,
        count_mean: 0.0,
        count_variance: 0.0,
        quadrature_mean,
        quadrature_variance,
        covariance,
        weights,
    }
}

/// ⟨Δn_i⟩ = √2·sinh θ⁽¹⁾·|β_i|·⟨X̃(φ_i)⟩ and
/// Var Δn_i = 2·sinh²θ⁽¹⁾·|β_i|²·(Var X̃(φ_i) − s̃/4).
pub fn predicted_moments(
    state: &MirState,
    decomp: &Decomposition,
    coeffs: CoefficientPair,
) -> Result<MomentPrediction> {
    state.validate()?;
    let probe = &decomp.setup().probe;
    probe.require_balanced_pair()?;
    let moments = StateMoments::of(state)?;
    let gain = std::f64::consts::SQRT_2 * decomp.strength.sinh();
    let finish = |phase: f64, band: usize| {
        let mut c = channel(&moments, decomp, coeffs, phase);
        let beta = probe.band_amplitude(band).norm();
        c.count_mean = gain * beta * c.quadrature_mean;
        c.count_variance = (gain * beta).powi(2) * (c.quadrature_variance - decomp.s_tilde / 4.0);
        c
    };
    Ok(MomentPrediction {
        x: finish(PHASE_X, 0),
        y: finish(PHASE_Y, 1),
    })
}
