//! Delay sweep, quadrature estimation and waveform reconstruction.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, SQRT_2};

use super::sampler::{CountSums, Sampler};
use crate::coefficients::{
    approx_params, rel_error_frequency, rel_error_variance, CoefficientPair, CoefficientSource,
};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::model::MirState;
use crate::numerics::{fit_gaussian_envelope, EnvelopeFit};
use crate::quasiprob::{count_lattice, predicted_moments, LatticeExtent};

/// Zero-padding factor of the spectral reweighting.
pub const REWEIGHT_PADDING: usize = 4;

/// Post-processing steps applied to the measured trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Corrections {
    /// Shift the delay axis by −η_c so the sampled lobe sits at zero.
    pub desync: bool,
    /// Undo the exchange of real and imaginary parts: W → i·conj(W).
    pub swap_quadratures: bool,
    /// Multiply the spectrum by √(Ω/Ω̃).
    pub spectral_reweighting: bool,
}

impl Default for Corrections {
    fn default() -> Self {
        Self {
            desync: true,
            swap_quadratures: true,
            spectral_reweighting: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub shots: usize,
    pub delays: Vec<f64>,
    pub corrections: Corrections,
    pub source: CoefficientSource,
    /// Take quadrature means from the moment oracle instead of shots.
    pub noiseless: bool,
    /// Measure every delay with α and iα to cancel the counter-rotating part.
    pub phase_diverse: bool,
    pub extent: LatticeExtent,
    /// Fit window half-width in ps; defaults to min(5/σ̄, η_c/2).
    pub fit_half_width: Option<f64>,
    /// Fails the run if any waveform standard error exceeds this.
    pub max_standard_error: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            shots: 100_000,
            delays: Vec::new(),
            corrections: Corrections::default(),
            source: CoefficientSource::Numeric,
            noiseless: false,
            phase_diverse: true,
            extent: LatticeExtent::default(),
            fit_half_width: None,
            max_standard_error: None,
        }
    }
}

/// Transformed quadrature statistics of one measurement setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureEstimate {
    pub shots: u64,
    /// ⟨X̃(0)⟩.
    pub mean_x: f64,
    /// ⟨X̃(−π/2)⟩.
    pub mean_y: f64,
    /// State variances with the −s̃/4 smoothing removed.
    pub var_x: f64,
    pub var_y: f64,
    pub se_x: f64,
    pub se_y: f64,
}

fn channel_gains(decomp: &Decomposition) -> Result<(f64, f64)> {
    let probe = &decomp.setup().probe;
    probe.require_balanced_pair()?;
    let g = SQRT_2 * decomp.strength.sinh();
    let (bx, by) = (
        probe.band_amplitude(0).norm(),
        probe.band_amplitude(1).norm(),
    );
    if !(g > 0.0 && bx > 0.0 && by > 0.0) {
        return Err(Error::invalid(
            "probe_filter.amplitude",
            "|β_i| and θ⁽¹⁾ must be positive",
        ));
    }
    Ok((g * bx, g * by))
}

/// ⟨X̃(φ_i)⟩ = mean(Δn_i)/(√2·sinh θ⁽¹⁾·|β_i|), variances corrected by +s̃/4.
pub fn quadrature_estimates(
    sums: &CountSums,
    decomp: &Decomposition,
) -> Result<QuadratureEstimate> {
    if sums.shots == 0 {
        return Err(Error::Statistics("no shots to estimate from".into()));
    }
    let (gx, gy) = channel_gains(decomp)?;
    let (mx, my) = sums.mean();
    let (vx, vy) = if sums.shots > 1 {
        sums.variance()
    } else {
        (f64::NAN, f64::NAN)
    };
    let n = sums.shots as f64;
    Ok(QuadratureEstimate {
        shots: sums.shots,
        mean_x: mx / gx,
        mean_y: my / gy,
        var_x: vx / (gx * gx) + decomp.s_tilde / 4.0,
        var_y: vy / (gy * gy) + decomp.s_tilde / 4.0,
        se_x: (vx / n).sqrt() / gx,
        se_y: (vy / n).sqrt() / gy,
    })
}

/// Quadrature means without sampling noise.
fn exact_estimate(
    state: &MirState,
    decomp: &Decomposition,
    coeffs: CoefficientPair,
    extent: LatticeExtent,
) -> Result<QuadratureEstimate> {
    let (mean_x, mean_y, var_x, var_y) = match predicted_moments(state, decomp, coeffs) {
        Ok(m) => (
            m.x.quadrature_mean,
            m.y.quadrature_mean,
            m.x.quadrature_variance,
            m.y.quadrature_variance,
        ),
        Err(Error::UnsupportedMoments(_)) => {
            let (gx, gy) = channel_gains(decomp)?;
            let m = count_lattice(state, decomp, coeffs, extent)?.moments();
            (
                m.mean_x / gx,
                m.mean_y / gy,
                m.var_x / (gx * gx) + decomp.s_tilde / 4.0,
                m.var_y / (gy * gy) + decomp.s_tilde / 4.0,
            )
        }
        Err(e) => return Err(e),
    };
    Ok(QuadratureEstimate {
        shots: 0,
        mean_x,
        mean_y,
        var_x,
        var_y,
        se_x: 0.0,
        se_y: 0.0,
    })
}

/// Everything recorded at one delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayPoint {
    pub delay_ps: f64,
    pub coefficients: CoefficientPair,
    /// Setting with the state as given.
    pub direct: QuadratureEstimate,
    /// Setting with the state rotated by π/2, when phase-diverse.
    pub rotated: Option<QuadratureEstimate>,
    /// Estimate of A₁α: (W(α) − i·W(iα))/2, or W(α) alone.
    pub waveform: Complex64,
    pub waveform_se: f64,
}

/// Uniformly sampled complex trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub delays: Vec<f64>,
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
}

impl Trace {
    /// Same samples on the delay axis t − by.
    pub fn shifted(&self, by: f64) -> Trace {
        Trace {
            delays: self.delays.iter().map(|t| t - by).collect(),
            ..self.clone()
        }
    }

    /// Real and imaginary parts exchanged: (a + ib) → (b + ia).
    pub fn swapped(&self) -> Trace {
        Trace {
            values: self
                .values
                .iter()
                .map(|w| Complex64::new(w.im, w.re))
                .collect(),
            ..self.clone()
        }
    }

    fn uniform_step(&self) -> Result<f64> {
        let n = self.delays.len();
        if n < 2 {
            return Err(Error::invalid("run.delays", "need at least two delays"));
        }
        let step = (self.delays[n - 1] - self.delays[0]) / (n - 1) as f64;
        let uniform = self
            .delays
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs());
        if !uniform || !(step > 0.0) {
            return Err(Error::invalid(
                "run.delays",
                "spectral reweighting needs a uniform delay grid",
            ));
        }
        Ok(step)
    }

    /// Multiplies the spectrum by √(|Ω|/Ω̃) for |Ω| ≥ floor, via a
    /// zero-padded DFT; lower frequencies are left untouched.
    pub fn reweighted(&self, center: f64, floor: f64) -> Result<Trace> {
        let step = self.uniform_step()?;
        let n = self.values.len();
        let m = REWEIGHT_PADDING * n;
        let mut buf = self.values.clone();
        buf.resize(m, Complex64::new(0.0, 0.0));
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_forward(m).process(&mut buf);
        for (k, v) in buf.iter_mut().enumerate() {
            let signed = if k <= m / 2 {
                k as f64
            } else {
                k as f64 - m as f64
            };
            let w = (2.0 * std::f64::consts::PI * signed / (m as f64 * step)).abs();
            if w >= floor {
                *v *= (w / center).sqrt();
            }
        }
        planner.plan_fft_inverse(m).process(&mut buf);
        buf.truncate(n);
        Ok(Trace {
            values: buf.into_iter().map(|v| v / m as f64).collect(),
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub state: MirState,
    pub source: CoefficientSource,
    pub noiseless: bool,
    pub shots_per_setting: usize,
    pub seed: u64,
    pub points: Vec<DelayPoint>,
    /// Measured waveform after all enabled corrections.
    pub corrected: Trace,
    pub corrections: Corrections,
    pub eta_c_ps: f64,
    /// Fit window (lo, hi) on the corrected delay axis.
    pub window_ps: (f64, f64),
    pub fit: EnvelopeFit,
    /// σ̄_rec = 1/(√2·width), rad/ps.
    pub sigma_rec: f64,
    /// Ω̄_rec = |phase slope|, rad/ps.
    pub omega_rec: f64,
    pub sigma_rec_thz: f64,
    pub omega_rec_thz: f64,
    /// |σ_Ω̃² − σ̄_rec²|/σ_Ω̃².
    pub rel_err_sigma: f64,
    pub rel_err_sigma_se: f64,
    /// |Ω̃ − Ω̄_rec|/Ω̃.
    pub rel_err_omega: f64,
    pub rel_err_omega_se: f64,
    pub predicted_rel_err_sigma: f64,
    pub predicted_rel_err_omega: f64,
}

fn measure(
    state: &MirState,
    decomp: &Decomposition,
    coeffs: CoefficientPair,
    run: &RunConfig,
    stream: u64,
) -> Result<QuadratureEstimate> {
    if run.noiseless {
        return exact_estimate(state, decomp, coeffs, run.extent);
    }
    let lattice = count_lattice(state, decomp, coeffs, run.extent)?;
    let sums = Sampler::new(&lattice)?.accumulate(run.seed, stream, run.shots);
    quadrature_estimates(&sums, decomp)
}

/// Measures every delay of `run` and returns the per-delay records with
/// deterministic ordering.
pub fn sweep(state: &MirState, decomp: &Decomposition, run: &RunConfig) -> Result<Vec<DelayPoint>> {
    if !run.noiseless && run.shots < 2 {
        return Err(Error::Statistics(
            "need at least two shots per setting".into(),
        ));
    }
    let pulse = &decomp.setup().pulse;
    run.delays
        .par_iter()
        .enumerate()
        .map(|(k, &delay)| {
            let coeffs = CoefficientPair::at(run.source, pulse, decomp, delay)?;
            let direct = measure(state, decomp, coeffs, run, 2 * k as u64)?;
            let w_direct = Complex64::new(direct.mean_x, direct.mean_y);
            let (rotated, waveform, waveform_se) = if run.phase_diverse {
                let r = measure(
                    &state.rotated(FRAC_PI_2),
                    decomp,
                    coeffs,
                    run,
                    2 * k as u64 + 1,
                )?;
                let w_rot = Complex64::new(r.mean_x, r.mean_y);
                let wave = 0.5 * (w_direct - Complex64::i() * w_rot);
                let se_re = 0.5 * (direct.se_x.powi(2) + r.se_y.powi(2)).sqrt();
                let se_im = 0.5 * (direct.se_y.powi(2) + r.se_x.powi(2)).sqrt();
                (
                    Some(r),
                    wave,
                    (0.5 * (se_re * se_re + se_im * se_im)).sqrt(),
                )
            } else {
                let se = (0.5 * (direct.se_x.powi(2) + direct.se_y.powi(2))).sqrt();
                (None, w_direct, se)
            };
            Ok(DelayPoint {
                delay_ps: delay,
                coefficients: coeffs,
                direct,
                rotated,
                waveform,
                waveform_se,
            })
        })
        .collect()
}

/// Full pipeline: sweep, corrections, Gaussian fit, relative errors.
pub fn sweep_and_reconstruct(
    state: &MirState,
    decomp: &Decomposition,
    run: &RunConfig,
) -> Result<ReconstructionResult> {
    let setup = decomp.setup();
    let pulse = &setup.pulse;
    if !pulse.is_gaussian() {
        return Err(Error::invalid(
            "mir_pulse",
            "the fit stage needs a Gaussian pulse",
        ));
    }
    let params = approx_params(setup, pulse)?;
    let eta_c = params.eta_c;
    let points = sweep(state, decomp, run)?;

    if let Some(limit) = run.max_standard_error {
        if let Some(worst) = points.iter().map(|p| p.waveform_se).reduce(f64::max) {
            if worst > limit {
                return Err(Error::Statistics(format!(
                    "waveform standard error {worst:.3e} exceeds the requested {limit:.3e}; increase shots"
                )));
            }
        }
    }

    let mut trace = Trace {
        delays: points.iter().map(|p| p.delay_ps).collect(),
        values: points.iter().map(|p| p.waveform).collect(),
        errors: points.iter().map(|p| p.waveform_se).collect(),
    };
    let mut lobe = eta_c;
    if run.corrections.desync {
        trace = trace.shifted(eta_c);
        lobe -= eta_c;
    }
    if run.corrections.swap_quadratures {
        trace = trace.swapped();
    }
    let center = pulse.center.rad_per_ps();
    if run.corrections.spectral_reweighting {
        trace = trace.reweighted(center, center - 4.0 * params.sigma_bar)?;
    }

    let half = run
        .fit_half_width
        .unwrap_or_else(|| (5.0 / params.sigma_bar).min(0.5 * eta_c));
    let window = (lobe - half, lobe + half);
    let selected: Vec<usize> = (0..trace.delays.len())
        .filter(|&i| trace.delays[i] >= window.0 && trace.delays[i] <= window.1)
        .collect();
    let xs: Vec<f64> = selected.iter().map(|&i| trace.delays[i]).collect();
    let ys: Vec<Complex64> = selected.iter().map(|&i| trace.values[i]).collect();
    let es: Vec<f64> = selected.iter().map(|&i| trace.errors[i]).collect();
    let fit = fit_gaussian_envelope(&xs, &ys, if run.noiseless { None } else { Some(&es) })?;

    let sigma = pulse.bandwidth.rad_per_ps();
    let sigma_rec = 1.0 / (SQRT_2 * fit.width);
    let omega_rec = fit.phase_slope.abs();
    // d(σ̄²)/dw = −1/w³.
    let rel_err_sigma_se = fit.width_se / (fit.width.powi(3) * sigma * sigma);
    let probe = setup.probe.center.rad_per_ps();
    let pump = setup.pump.center.rad_per_ps();
    let sp = setup.pump.bandwidth.rad_per_ps();

    Ok(ReconstructionResult {
        state: *state,
        source: run.source,
        noiseless: run.noiseless,
        shots_per_setting: if run.noiseless { 0 } else { run.shots },
        seed: run.seed,
        points,
        corrected: trace,
        corrections: run.corrections,
        eta_c_ps: eta_c,
        window_ps: window,
        fit,
        sigma_rec,
        omega_rec,
        sigma_rec_thz: crate::units::angular_to_thz(sigma_rec),
        omega_rec_thz: crate::units::angular_to_thz(omega_rec),
        rel_err_sigma: (sigma * sigma - sigma_rec * sigma_rec).abs() / (sigma * sigma),
        rel_err_sigma_se,
        rel_err_omega: (center - omega_rec).abs() / center,
        rel_err_omega_se: fit.phase_slope_se / center,
        predicted_rel_err_sigma: rel_error_variance(sigma, sp),
        predicted_rel_err_omega: rel_error_frequency(center, sigma, sp, probe, pump),
    })
}
