//! Delay-dependent decomposition of the MIR pulse mode onto the sampled,
//! thermalized and unsampled modes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::model::{Crystal, MirPulse, Setup};
use crate::numerics::{erfcx, integrate, integrate_real, QuadratureSpec};
use crate::units::sinc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Sampled,
    Thermalized,
    /// Magnitude only; its phase carries no signal.
    Unsampled,
}

/// Closed-form variant of the analytic coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticForm {
    /// Exact integrals of the low-dispersion JSA, as erfcx pairs.
    Erfcx,
    /// Two Gaussian lobes at ±η_c, valid once Ω̄ ≫ σ̄.
    Gaussian,
}

/// How coefficient traces are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSource {
    /// Adaptive quadrature of the overlap integrals.
    #[default]
    Numeric,
    AnalyticErfcx,
    AnalyticGaussian,
}

impl CoefficientSource {
    fn analytic(self) -> Option<AnalyticForm> {
        match self {
            CoefficientSource::Numeric => None,
            CoefficientSource::AnalyticErfcx => Some(AnalyticForm::Erfcx),
            CoefficientSource::AnalyticGaussian => Some(AnalyticForm::Gaussian),
        }
    }
}

/// Constants of the low-dispersion approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxParams {
    /// Half period η_c of the phase-matching gate, in ps.
    pub eta_c: f64,
    /// Amplitude S_c of the approximated JSA, pump normalization included.
    pub s_c: Complex64,
    /// σ̄ = σ_pσ_Ω̃/√(σ_p² + σ_Ω̃²).
    pub sigma_bar: f64,
    /// Ω̄₍₋₎, the center of the sampled lobe.
    pub omega_bar_minus: f64,
    /// Ω̄₍₊₎, the center of the thermalized lobe.
    pub omega_bar_plus: f64,
}

/// η_c = L/(2c)·[n_g(ω̃) − n(0)] in ps.
pub fn eta_c(crystal: &Crystal, probe_center: f64) -> Result<f64> {
    crystal.walk_off(probe_center)
}

pub fn approx_params(setup: &Setup, pulse: &MirPulse) -> Result<ApproxParams> {
    let cr = &setup.crystal;
    let probe = setup.probe.center.rad_per_ps();
    let wp = setup.pump.center.rad_per_ps();
    let sp = setup.pump.bandwidth.rad_per_ps();
    let sm = pulse.bandwidth.rad_per_ps();
    let center = pulse.center.rad_per_ps();
    let eta_c = cr.walk_off(probe)?;
    let prefactor = crate::model::pump::field_prefactor(cr);
    let s_c = -setup.pump.amplitude.conj()
        * setup.coupling()
        * prefactor
        * (wp / cr.refractive_index(wp)).sqrt()
        * (probe / cr.refractive_index(probe)).sqrt()
        * cr.half_transit_time()
        / eta_c
        * setup.pump.normalization()
        * 1e12;
    let sigma_bar = sp * sm / (sp * sp + sm * sm).sqrt();
    let detuning = probe - wp;
    let (wp2, wm2) = (
        sigma_bar * sigma_bar / (sp * sp),
        sigma_bar * sigma_bar / (sm * sm),
    );
    Ok(ApproxParams {
        eta_c,
        s_c,
        sigma_bar,
        omega_bar_minus: -detuning * wp2 + center * wm2,
        omega_bar_plus: detuning * wp2 + center * wm2,
    })
}

/// g(Ω) = f_Ω̃(Ω)·e^{−iΔtΩ}.
fn delayed_pulse(pulse: &MirPulse, delay: f64, w: f64) -> Complex64 {
    pulse.mode(w) * Complex64::from_polar(1.0, -delay * w)
}

fn pulse_window(pulse: &MirPulse, cutoff: f64) -> (f64, f64) {
    let (lo, hi) = pulse.support();
    (lo.max(0.0), hi.min(cutoff))
}

/// A_x(Δt) = ∫₀^Λ f_Ω̃·conj(f_x)·e^{−iΔtΩ} dΩ by adaptive quadrature.
pub fn coefficient_numeric(
    component: Component,
    pulse: &MirPulse,
    decomp: &Decomposition,
    delay: f64,
) -> Result<Complex64> {
    let cutoff = decomp.output_mode().cutoff();
    let (lo, hi) = pulse_window(pulse, cutoff);
    let spec = QuadratureSpec::default().for_oscillation(delay);
    match component {
        Component::Sampled => Ok(integrate(
            |w| delayed_pulse(pulse, delay, w) * decomp.sampled_mode(w).conj(),
            lo,
            hi,
            &spec,
        )?
        .value),
        Component::Thermalized => {
            if !decomp.has_thermalized_mode() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(integrate(
                |w| delayed_pulse(pulse, delay, w) * decomp.thermalized_mode(w).conj(),
                lo,
                hi,
                &spec,
            )?
            .value)
        }
        Component::Unsampled => {
            let sa = coefficient_numeric(Component::Sampled, pulse, decomp, delay)?;
            let th = coefficient_numeric(Component::Thermalized, pulse, decomp, delay)?;
            unsampled_magnitude(sa, th).map(|m| Complex64::new(m, 0.0))
        }
    }
}

/// √(1 − |A_SA|² − |A_TH|²); a clearly negative radicand means the modes were
/// not orthonormal.
fn unsampled_magnitude(sa: Complex64, th: Complex64) -> Result<f64> {
    let rest = 1.0 - sa.norm_sqr() - th.norm_sqr();
    if rest < -1e-6 {
        return Err(Error::invalid(
            "coefficients",
            format!("|A_SA|² + |A_TH|² = {} exceeds one", 1.0 - rest),
        ));
    }
    Ok(rest.max(0.0).sqrt())
}

/// Closed-form coefficients of the low-dispersion approximation, using the
/// decomposed θ⁽¹⁾, θ, θ⊥ and Φ⊥.
pub fn coefficient_analytic(
    component: Component,
    form: AnalyticForm,
    pulse: &MirPulse,
    decomp: &Decomposition,
    delay: f64,
) -> Result<Complex64> {
    if !pulse.is_gaussian() {
        return Err(Error::invalid(
            "mir_pulse",
            "analytic coefficients need a Gaussian pulse",
        ));
    }
    let setup = decomp.setup();
    let params = approx_params(setup, pulse)?;
    let sampled = || -> Result<Complex64> {
        let k = lobe_prefactor(setup, &params, decomp, pulse);
        Ok(
            -k * lobe_pair(form, pulse, setup, &params, params.omega_bar_minus, delay)?
                / decomp.theta.cosh(),
        )
    };
    match component {
        Component::Sampled => sampled(),
        Component::Thermalized => {
            if !decomp.has_thermalized_mode() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let k = lobe_prefactor(setup, &params, decomp, pulse);
            let direct = k.conj()
                * lobe_pair(form, pulse, setup, &params, params.omega_bar_plus, delay)?
                / (decomp.theta_perp.cos() * decomp.theta.sinh());
            let cross = Complex64::from_polar(decomp.theta_perp.tan(), -decomp.phi_perp);
            Ok(direct - cross * sampled()?)
        }
        Component::Unsampled => {
            let sa = sampled()?;
            let th = coefficient_analytic(Component::Thermalized, form, pulse, decomp, delay)?;
            Ok(Complex64::new(
                (1.0 - sa.norm_sqr() - th.norm_sqr()).max(0.0).sqrt(),
                0.0,
            ))
        }
    }
}

/// (√Δω/θ⁽¹⁾)·S_c·e^{iω̃t_p}·N_Ω̃/√n(0).
fn lobe_prefactor(
    setup: &Setup,
    params: &ApproxParams,
    decomp: &Decomposition,
    pulse: &MirPulse,
) -> Complex64 {
    let probe = setup.probe.center.rad_per_ps();
    let band = setup.probe.bandwidth.rad_per_ps();
    let n0 = setup.crystal.refractive_index(0.0);
    band.sqrt() / decomp.strength
        * params.s_c
        * Complex64::from_polar(1.0, probe * setup.pump.cep_time_ps)
        * pulse.normalization()
        / n0.sqrt()
}

/// Both gate lobes (at Δt = ±η_c) of the overlap integral whose Gaussian
/// weight is centered at `omega_bar`.
fn lobe_pair(
    form: AnalyticForm,
    pulse: &MirPulse,
    setup: &Setup,
    params: &ApproxParams,
    omega_bar: f64,
    delay: f64,
) -> Result<Complex64> {
    let sb = params.sigma_bar;
    let eta = params.eta_c;
    let sm = pulse.bandwidth.rad_per_ps();
    let center = pulse.center.rad_per_ps();
    let detuning = setup.probe.center.rad_per_ps() - setup.pump.center.rad_per_ps();
    let sp = setup.pump.bandwidth.rad_per_ps();
    let log_e0 = -center * center / (4.0 * sm * sm) - detuning * detuning / (4.0 * sp * sp);
    let front = PI.sqrt() * sb / Complex64::new(0.0, 2.0);
    match form {
        AnalyticForm::Erfcx => {
            let arg = |tau: f64| Complex64::new(-omega_bar / (2.0 * sb), tau * sb);
            let diff = erfcx(arg(delay - eta))? - erfcx(arg(delay + eta))?;
            Ok(front * log_e0.exp() * diff)
        }
        AnalyticForm::Gaussian => {
            let lobe = |tau: f64| {
                let log = log_e0 + omega_bar * omega_bar / (4.0 * sb * sb) - tau * tau * sb * sb;
                Complex64::from_polar(log.exp(), -tau * omega_bar)
            };
            Ok(front * 2.0 * (lobe(delay - eta) - lobe(delay + eta)))
        }
    }
}

/// Any coefficient from any source.
pub fn coefficient(
    source: CoefficientSource,
    component: Component,
    pulse: &MirPulse,
    decomp: &Decomposition,
    delay: f64,
) -> Result<Complex64> {
    match source.analytic() {
        None => coefficient_numeric(component, pulse, decomp, delay),
        Some(form) => coefficient_analytic(component, form, pulse, decomp, delay),
    }
}

/// A_SA and A_TH at one delay, the two coefficients that shape the signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPair {
    pub sampled: Complex64,
    pub thermalized: Complex64,
}

impl CoefficientPair {
    pub fn new(sampled: Complex64, thermalized: Complex64) -> Self {
        Self {
            sampled,
            thermalized,
        }
    }

    pub fn at(
        source: CoefficientSource,
        pulse: &MirPulse,
        decomp: &Decomposition,
        delay: f64,
    ) -> Result<Self> {
        Ok(Self::new(
            coefficient(source, Component::Sampled, pulse, decomp, delay)?,
            coefficient(source, Component::Thermalized, pulse, decomp, delay)?,
        ))
    }
}

/// A_SA, A_TH and |A_UN| over a delay grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTrace {
    pub source: CoefficientSource,
    pub delays: Vec<f64>,
    pub sampled: Vec<Complex64>,
    pub thermalized: Vec<Complex64>,
    pub unsampled: Vec<f64>,
}

impl CoefficientTrace {
    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    pub fn pair(&self, i: usize) -> CoefficientPair {
        CoefficientPair::new(self.sampled[i], self.thermalized[i])
    }

    pub fn max_sampled(&self) -> f64 {
        self.sampled.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn max_thermalized(&self) -> f64 {
        self.thermalized
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max)
    }

    /// Largest |A_SA|² + |A_TH|² + |A_UN|² − 1 over the grid.
    pub fn completeness_defect(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                (self.sampled[i].norm_sqr()
                    + self.thermalized[i].norm_sqr()
                    + self.unsampled[i].powi(2)
                    - 1.0)
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Uniform delay grid [start, end] with the given step, endpoints included.
pub fn delay_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && end >= start && start.is_finite() && end.is_finite()) {
        return Err(Error::invalid(
            "run.delays",
            "need start ≤ end and step > 0",
        ));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Evaluates a trace in parallel; output order follows `delays`.
pub fn coefficient_trace(
    source: CoefficientSource,
    pulse: &MirPulse,
    decomp: &Decomposition,
    delays: &[f64],
) -> Result<CoefficientTrace> {
    let rows = delays
        .par_iter()
        .map(|&t| {
            let sa = coefficient(source, Component::Sampled, pulse, decomp, t)?;
            let th = coefficient(source, Component::Thermalized, pulse, decomp, t)?;
            let un = match source {
                CoefficientSource::Numeric => unsampled_magnitude(sa, th)?,
                _ => (1.0 - sa.norm_sqr() - th.norm_sqr()).max(0.0).sqrt(),
            };
            Ok((sa, th, un))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut sampled, mut thermalized, mut unsampled) = (vec![], vec![], vec![]);
    for (sa, th, un) in rows {
        sampled.push(sa);
        thermalized.push(th);
        unsampled.push(un);
    }
    Ok(CoefficientTrace {
        source,
        delays: delays.to_vec(),
        sampled,
        thermalized,
        unsampled,
    })
}

/// ‖g − A_SA·f_SA − A_TH·f_TH‖² + |A_SA|² + |A_TH|² − 1 with g = f_Ω̃·e^{−iΔtΩ}.
///
/// The residual norm is integrated independently, so this tests the
/// orthonormality of the decomposition and the accuracy of the coefficients
/// rather than restating the definition of |A_UN|.
pub fn projection_defect(
    pulse: &MirPulse,
    decomp: &Decomposition,
    delay: f64,
    sampled: Complex64,
    thermalized: Complex64,
) -> Result<f64> {
    let cutoff = decomp.output_mode().cutoff();
    let (lo, hi) = pulse_window(pulse, cutoff);
    let residual = |w: f64| {
        (delayed_pulse(pulse, delay, w)
            - sampled * decomp.sampled_mode(w)
            - thermalized * decomp.thermalized_mode(w))
        .norm_sqr()
    };
    let smooth = QuadratureSpec::default();
    let oscillating = smooth.for_oscillation(delay);
    let mut total = integrate_real(residual, lo, hi, &oscillating)?.0;
    if lo > 0.0 {
        total += integrate_real(residual, 0.0, lo, &smooth)?.0;
    }
    if hi < cutoff {
        total += integrate_real(residual, hi, cutoff, &smooth)?.0;
    }
    Ok(total + sampled.norm_sqr() + thermalized.norm_sqr() - 1.0)
}

/// σ_Ω̃²/(σ_Ω̃² + σ_p²), the relative error of the reconstructed variance.
pub fn rel_error_variance(sigma_mir: f64, sigma_pump: f64) -> f64 {
    let (m, p) = (sigma_mir * sigma_mir, sigma_pump * sigma_pump);
    m / (m + p)
}

/// |1 + (ω̃ − ω_p)/Ω̃|·σ_Ω̃²/(σ_Ω̃² + σ_p²), the relative error of the
/// reconstructed central frequency.
pub fn rel_error_frequency(
    mir_center: f64,
    sigma_mir: f64,
    sigma_pump: f64,
    probe_center: f64,
    pump_center: f64,
) -> f64 {
    (1.0 + (probe_center - pump_center) / mir_center).abs()
        * rel_error_variance(sigma_mir, sigma_pump)
}

/// exp(−η_c²σ_Ω̃²/2)·sinc(η_cΩ̃), the peak sampled coefficient of a matched setup.
pub fn deamplification_estimate(
    crystal: &Crystal,
    pulse: &MirPulse,
    probe_center: f64,
) -> Result<f64> {
    let eta = crystal.walk_off(probe_center)?;
    let s = pulse.bandwidth.rad_per_ps();
    Ok((-eta * eta * s * s / 2.0).exp() * sinc(eta * pulse.center.rad_per_ps()))
}
