//! Transformed (s_X, s_Y)-quasiprobability distribution of the sampled mode.
//!
//! The transformed characteristic function of every supported state is a sum
//! of Gaussians in β = u + iv,
//!
//!   χ̃(β) = Σ_k c_k · exp(−½ bᵀMb + l_kᵀb),   b = (u, v),
//!
//! so its Fourier transform is a sum of (possibly complex-shifted) Gaussians
//! in z = x + iy:
//!
//!   ρ̃(z) = 2/(π√det M) · Σ_k Re[c_k · exp(½ w_kᵀM⁻¹w_k)],   w_k = l_k + i(2y, −2x).
//!
//! The smoothing enters M as −s_Y on the uu entry and −s_X on the vv entry,
//! because x is conjugate to v and y to u.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::coefficients::CoefficientPair;
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::model::MirState;

/// Real symmetric 2×2 matrix [[uu, uv], [uv, vv]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Sym2 {
    uu: f64,
    vv: f64,
    uv: f64,
}

impl Sym2 {
    const ZERO: Sym2 = Sym2 {
        uu: 0.0,
        vv: 0.0,
        uv: 0.0,
    };

    /// Coefficients of |aβ + bβ̄|² = uu·u² + vv·v² + 2uv·uv.
    fn modulus_form(a: Complex64, b: Complex64) -> Self {
        let p = a + b;
        let q = Complex64::i() * (a - b);
        Sym2 {
            uu: p.norm_sqr(),
            vv: q.norm_sqr(),
            uv: (p.conj() * q).re,
        }
    }

    fn add(self, o: Sym2, weight: f64) -> Self {
        Sym2 {
            uu: self.uu + weight * o.uu,
            vv: self.vv + weight * o.vv,
            uv: self.uv + weight * o.uv,
        }
    }

    fn det(&self) -> f64 {
        self.uu * self.vv - self.uv * self.uv
    }

    fn inverse(&self) -> Sym2 {
        let d = self.det();
        Sym2 {
            uu: self.vv / d,
            vv: self.uu / d,
            uv: -self.uv / d,
        }
    }

    fn quad(&self, w: [Complex64; 2]) -> Complex64 {
        w[0] * w[0] * self.uu + w[1] * w[1] * self.vv + w[0] * w[1] * (2.0 * self.uv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Term {
    /// ln c_k (complex in general; all supported states give real c_k).
    log_weight: Complex64,
    shift: [Complex64; 2],
}

/// Closed-form transformed quasiprobability distribution for one state,
/// one set of coefficients and one smoothing pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianQpd {
    pub state: &'static str,
    pub s_x: f64,
    pub s_y: f64,
    /// Covariance [[xx, xy], [xy, yy]] shared by all Gaussian components,
    /// where z = x + iy.
    pub covariance: [[f64; 2]; 2],
    /// Center of the dominant components (one for Gaussian states, ±α images
    /// for the cat).
    pub centers: Vec<(f64, f64)>,
    /// Pre-exponential factor 2/(π√det M).
    pub normalization: f64,
    m_inv: Sym2,
    terms: Vec<Term>,
}

/// Linear map β ↦ γ = pβ − qβ̄ from the transformed SA displacement to the
/// displacement of the MIR pulse mode.
#[derive(Debug, Clone, Copy)]
struct Displacement {
    p: Complex64,
    q: Complex64,
}

impl Displacement {
    fn new(decomp: &Decomposition, coeffs: CoefficientPair) -> Self {
        let (mu_t, nu_t) = (decomp.mu_t, decomp.nu_t);
        let a_sa = coeffs.sampled.conj();
        let a_th = coeffs.thermalized.conj();
        Displacement {
            p: a_sa * (mu_t * decomp.mu_s),
            q: a_sa * decomp.nu_s * mu_t + a_th * nu_t,
        }
    }

    /// γ = g_u·u + g_v·v.
    fn gradient(&self) -> [Complex64; 2] {
        [self.p - self.q, Complex64::i() * (self.p + self.q)]
    }
}

impl GaussianQpd {
    /// Builds the distribution for s_X, s_Y ≤ s̃, the regime in which it is a
    /// probability density.
    pub fn new(
        state: &MirState,
        decomp: &Decomposition,
        coeffs: CoefficientPair,
        s_x: f64,
        s_y: f64,
    ) -> Result<Self> {
        let s_tilde = decomp.s_tilde;
        let slack = 1e-12 * s_tilde.abs().max(1.0);
        if s_x > s_tilde + slack || s_y > s_tilde + slack {
            return Err(Error::NotPositiveDefinite { s_x, s_y, s_tilde });
        }
        Self::unrestricted(state, decomp, coeffs, s_x, s_y)
    }

    /// Same as [`GaussianQpd::new`] for any smoothing that keeps the Gaussian
    /// kernel positive definite, e.g. the Wigner function s = 0.
    pub fn unrestricted(
        state: &MirState,
        decomp: &Decomposition,
        coeffs: CoefficientPair,
        s_x: f64,
        s_y: f64,
    ) -> Result<Self> {
        state.validate()?;
        if !(s_x.is_finite() && s_y.is_finite()) {
            return Err(Error::invalid("smoothing", "s_X and s_Y must be finite"));
        }
        let disp = Displacement::new(decomp, coeffs);
        let (p, q) = (disp.p, disp.q);

        // |β₁|² + |β₂|² − |γ|² from tracing out the vacuum remainder.
        let mut m = Sym2::ZERO
            .add(
                Sym2::modulus_form(
                    Complex64::from(decomp.mu_t * decomp.mu_s),
                    -decomp.nu_s * decomp.mu_t,
                ),
                1.0,
            )
            .add(
                Sym2::modulus_form(Complex64::new(0.0, 0.0), Complex64::from(-decomp.nu_t)),
                1.0,
            )
            .add(Sym2::modulus_form(p, -q), -1.0);

        // State contribution |γ'|², γ' = μγ + νγ̄ (μ = 1, ν = 0 unless squeezed).
        let (mu, nu) = state.squeeze_factors();
        let a_state = p * mu - nu * q.conj();
        let b_state = nu * p.conj() - q * mu;
        m = m.add(Sym2::modulus_form(a_state, b_state), 1.0);
        m.uu -= s_y;
        m.vv -= s_x;

        let det = m.det();
        if !(m.uu > 0.0 && m.vv > 0.0 && det > 0.0) {
            return Err(Error::NotPositiveDefinite {
                s_x,
                s_y,
                s_tilde: decomp.s_tilde,
            });
        }

        let g = disp.gradient();
        let zero = Complex64::new(0.0, 0.0);
        // exp(γᾱ − γ̄α) = exp(2i·Im(ᾱγ)).
        let coherent_shift = |alpha: Complex64| -> [Complex64; 2] {
            let f = |gj: Complex64| Complex64::new(0.0, 2.0 * (alpha.conj() * gj).im);
            [f(g[0]), f(g[1])]
        };
        let terms = match *state {
            MirState::Vacuum | MirState::SqueezedVacuum { .. } => vec![Term {
                log_weight: zero,
                shift: [zero, zero],
            }],
            MirState::Coherent { alpha } => vec![Term {
                log_weight: zero,
                shift: coherent_shift(alpha),
            }],
            MirState::Cat { alpha } => {
                let n2 = MirState::cat_normalization(alpha).powi(2);
                let direct = Complex64::from(n2.ln());
                let cross = Complex64::from(n2.ln() - 2.0 * alpha.norm_sqr());
                // exp(∓(ᾱγ + αγ̄)) = exp(∓2·Re(ᾱγ)).
                let fringe = |sign: f64| -> [Complex64; 2] {
                    let f = |gj: Complex64| Complex64::from(-sign * 2.0 * (alpha.conj() * gj).re);
                    [f(g[0]), f(g[1])]
                };
                vec![
                    Term {
                        log_weight: direct,
                        shift: coherent_shift(alpha),
                    },
                    Term {
                        log_weight: direct,
                        shift: coherent_shift(-alpha),
                    },
                    Term {
                        log_weight: cross,
                        shift: fringe(1.0),
                    },
                    Term {
                        log_weight: cross,
                        shift: fringe(-1.0),
                    },
                ]
            }
        };

        // Imaginary shifts i·k displace the Gaussian to (x, y) = (k_v, −k_u)/2.
        let centers = terms
            .iter()
            .filter(|t| t.shift.iter().all(|s| s.re == 0.0))
            .map(|t| (t.shift[1].im / 2.0, -t.shift[0].im / 2.0))
            .collect();

        Ok(GaussianQpd {
            state: state.name(),
            s_x,
            s_y,
            covariance: [[m.vv / 4.0, -m.uv / 4.0], [-m.uv / 4.0, m.uu / 4.0]],
            centers,
            normalization: 2.0 / (PI * det.sqrt()),
            m_inv: m.inverse(),
            terms,
        })
    }

    /// Density at z = x + iy; integrates to one over the plane.
    pub fn density(&self, z: Complex64) -> f64 {
        let probe = [
            Complex64::new(0.0, 2.0 * z.im),
            Complex64::new(0.0, -2.0 * z.re),
        ];
        let sum: f64 = self
            .terms
            .iter()
            .map(|t| {
                let w = [t.shift[0] + probe[0], t.shift[1] + probe[1]];
                (t.log_weight + 0.5 * self.m_inv.quad(w)).exp().re
            })
            .sum();
        self.normalization * sum
    }

    /// Axis-aligned box holding every dominant component to `n_sigma`
    /// standard deviations: (x_min, x_max, y_min, y_max).
    pub fn bounding_box(&self, n_sigma: f64) -> (f64, f64, f64, f64) {
        let sx = n_sigma * self.covariance[0][0].sqrt();
        let sy = n_sigma * self.covariance[1][1].sqrt();
        self.centers.iter().fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), &(x, y)| (a.min(x - sx), b.max(x + sx), c.min(y - sy), d.max(y + sy)),
        )
    }

    /// Eigenvalues (larger first) of the component covariance.
    pub fn covariance_eigenvalues(&self) -> (f64, f64) {
        let [[a, b], [_, d]] = self.covariance;
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d).powi(2) + b * b).sqrt();
        (mean + half_gap, mean - half_gap)
    }
}

/// ρ̃_SA(z; s_X, s_Y) for a single point.
pub fn qpd(
    state: &MirState,
    decomp: &Decomposition,
    coeffs: CoefficientPair,
    z: Complex64,
    s_x: f64,
    s_y: f64,
) -> Result<f64> {
    Ok(GaussianQpd::new(state, decomp, coeffs, s_x, s_y)?.density(z))
}
