//! First-order output mode f_ω̃ and its split into sampled and thermalized modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::setup::JsaKernel;
use crate::model::Setup;
use crate::numerics::quadrature::kronrod15;
use crate::numerics::{
    integrate, integrate_real, ComplexGridFunction, QuadratureSpec, UniformGrid,
};
use crate::units::wrap_phase;

/// Default number of grid points on [−Λ, Λ].
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Largest accepted deviation of the grid commutator norm from ±1.
pub const KAPPA_TOLERANCE: f64 = 1e-3;

/// How the probe band enters the mode function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeModel {
    /// S(Ω, ω̃) at the band center, scaled by √Δω.
    #[default]
    Narrowband,
    /// S(Ω, ω) averaged over the rectangular probe band.
    Broadband,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// DFG dominates, commutator −1: the output operator is a creation operator.
    Squeezing,
    /// SFG dominates, commutator +1.
    BeamSplitter,
}

/// Normalized output mode f_ω̃(Ω) on [−Λ, Λ].
#[derive(Debug, Clone, Serialize)]
pub struct OutputMode {
    #[serde(skip)]
    setup: Setup,
    #[serde(skip)]
    kernel: JsaKernel,
    pub model: ModeModel,
    /// θ⁽¹⁾.
    pub strength: f64,
    /// ∫ sign(Ω)|f|² by adaptive quadrature (±1 up to rounding).
    pub kappa: f64,
    /// The same integral by Simpson's rule on `samples`.
    pub kappa_grid: f64,
    pub regime: Regime,
    /// ∫_{−Λ}^0 |f|².
    pub negative_weight: f64,
    /// ∫_0^Λ |f|².
    pub positive_weight: f64,
    /// f_ω̃ on the uniform grid.
    pub samples: ComplexGridFunction,
    /// Extra factor applied to the raw amplitude (θ⁽¹⁾ normalization and any truncation).
    #[serde(skip)]
    scale: f64,
    #[serde(skip)]
    sfg_removed: bool,
}

impl OutputMode {
    pub fn setup(&self) -> &Setup {
        &self.setup
    }

    pub fn cutoff(&self) -> f64 {
        self.setup.crystal.cutoff.rad_per_ps()
    }

    /// f_ω̃(Ω) for |Ω| ≤ Λ. The mode lives on the open band |Ω| < Λ, so the
    /// endpoints take the interior limit.
    pub fn eval(&self, w: f64) -> Complex64 {
        if self.sfg_removed && w > 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        raw_amplitude(
            &self.setup,
            &self.kernel,
            self.model,
            interior(w, self.cutoff()),
        ) * self.scale
    }

    /// The mode with its SFG half (Ω > 0) set to zero and renormalized to κ = −1.
    pub fn without_sfg(&self) -> Result<OutputMode> {
        if self.negative_weight <= 0.0 {
            return Err(Error::invalid("mode", "no DFG weight to keep"));
        }
        let renorm = self.negative_weight.sqrt().recip();
        let mut out = self.clone();
        out.sfg_removed = true;
        out.scale *= renorm;
        out.negative_weight = 1.0;
        out.positive_weight = 0.0;
        out.kappa = -1.0;
        out.regime = Regime::Squeezing;
        let mut samples = self.samples.clone();
        for (w, v) in self.samples.grid.points().zip(samples.values.iter_mut()) {
            *v = if w > 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                *v * renorm
            };
        }
        out.kappa_grid = grid_kappa(&samples);
        out.samples = samples;
        Ok(out)
    }
}

/// √Δω·S(Ω, ω̃)·e^{i t_p Ω} (narrowband) or the band-averaged equivalent, before
/// division by θ⁽¹⁾.
fn raw_amplitude(setup: &Setup, kernel: &JsaKernel, model: ModeModel, w: f64) -> Complex64 {
    let band = setup.probe.bandwidth.rad_per_ps();
    let center = setup.probe.center.rad_per_ps();
    let phase = Complex64::from_polar(1.0, setup.pump.cep_time_ps * w);
    let s = match model {
        ModeModel::Narrowband => band.sqrt() * kernel.eval(setup, w, center),
        ModeModel::Broadband => {
            kronrod15(
                |x| kernel.eval(setup, w, x),
                setup.probe.lower(),
                setup.probe.upper(),
            ) / band.sqrt()
        }
    };
    s * phase
}

fn interior(w: f64, cutoff: f64) -> f64 {
    let edge = cutoff * (1.0 - 4.0 * f64::EPSILON);
    w.clamp(-edge, edge)
}

fn grid_kappa(samples: &ComplexGridFunction) -> f64 {
    samples
        .simpson(|w, v| Complex64::new(w.signum() * v.norm_sqr(), 0.0))
        .re
}

/// Builds f_ω̃ and θ⁽¹⁾ for a setup, sampled on `grid_points` points over [−Λ, Λ].
pub fn output_mode(setup: &Setup, model: ModeModel, grid_points: usize) -> Result<OutputMode> {
    if grid_points < 16 {
        return Err(Error::invalid("run.grid_points", "need at least 16 points"));
    }
    let cutoff = setup.crystal.cutoff.rad_per_ps();
    let kernel = setup.jsa_kernel();
    let spec = QuadratureSpec::default();
    let weight = |a: f64, b: f64| {
        integrate_real(
            |w| raw_amplitude(setup, &kernel, model, w).norm_sqr(),
            a,
            b,
            &spec,
        )
        .map(|(v, _)| v)
    };
    let neg = weight(-cutoff, 0.0)?;
    let pos = weight(0.0, cutoff)?;
    let strength = (pos - neg).abs().sqrt();
    if !(strength > 0.0 && strength.is_finite()) {
        return Err(Error::invalid(
            "pump.amplitude",
            "the nonlinear interaction vanishes (θ⁽¹⁾ = 0)",
        ));
    }
    let scale = strength.recip();
    let negative_weight = neg * scale * scale;
    let positive_weight = pos * scale * scale;
    let kappa = positive_weight - negative_weight;
    let regime = if kappa < 0.0 {
        Regime::Squeezing
    } else {
        Regime::BeamSplitter
    };
    let grid = UniformGrid::linspace(-cutoff, cutoff, grid_points)?;
    let samples = ComplexGridFunction::sample(grid, |w| {
        raw_amplitude(setup, &kernel, model, interior(w, cutoff)) * scale
    });
    let kappa_grid = grid_kappa(&samples);
    if (kappa_grid.abs() - 1.0).abs() > KAPPA_TOLERANCE || kappa_grid.signum() != kappa.signum() {
        return Err(Error::GridResolution { kappa: kappa_grid });
    }
    Ok(OutputMode {
        setup: setup.clone(),
        kernel,
        model,
        strength,
        kappa,
        kappa_grid,
        regime,
        negative_weight,
        positive_weight,
        samples,
        scale,
        sfg_removed: false,
    })
}

/// Effective-mode parameters of the squeezing regime.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    #[serde(skip)]
    mode: OutputMode,
    /// θ⁽¹⁾.
    pub strength: f64,
    pub theta: f64,
    pub theta_perp: f64,
    pub phi_perp: f64,
    pub zeta_s: Complex64,
    pub zeta_t: f64,
    pub mu_s: f64,
    pub nu_s: Complex64,
    pub mu_t: f64,
    pub nu_t: f64,
    /// s̃ = 1 − 2coth²θ⁽¹⁾.
    pub s_tilde: f64,
    /// csch²θ⁽¹⁾/2.
    pub prefactor: f64,
    /// f_SA on a uniform grid over [0, Λ] at the mode grid's spacing.
    pub sampled: ComplexGridFunction,
    /// f_TH on the same grid; absent when the output mode has no SFG part.
    pub thermalized: Option<ComplexGridFunction>,
}

/// Splits a squeezing-regime output mode into f_SA and f_TH.
pub fn decompose(mode: &OutputMode) -> Result<Decomposition> {
    if mode.regime != Regime::Squeezing {
        return Err(Error::UnsupportedRegime { kappa: mode.kappa });
    }
    let cutoff = mode.cutoff();
    let spec = QuadratureSpec::default();
    // sinh²θ = ∫₀^Λ|f|² exactly when κ = −1; this avoids cancellation for small θ
    let theta = mode.positive_weight.max(0.0).sqrt().asinh();
    let (theta_perp, phi_perp) = if mode.positive_weight > 0.0 {
        let overlap = integrate(|w| mode.eval(w) * mode.eval(-w), 0.0, cutoff, &spec)?.value
            / (theta.sinh() * theta.cosh());
        let s = overlap.norm();
        if s > 1.0 + 1e-9 {
            return Err(Error::invalid(
                "mode",
                format!("SFG/DFG overlap {s} exceeds the Cauchy–Schwarz bound"),
            ));
        }
        (s.min(1.0 - f64::EPSILON).asin(), wrap_phase(overlap.arg()))
    } else {
        (0.0, 0.0)
    };

    let (sh, ch) = (theta.sinh(), theta.cosh());
    let sp = theta_perp.sin();
    let zeta_s_abs = (1.0 - (theta.tanh() * sp).powi(2)).powf(-0.5).acosh();
    let zeta_t = (ch * ch - (sh * sp).powi(2)).max(1.0).sqrt().acosh();
    let zeta_s = Complex64::from_polar(zeta_s_abs, phi_perp);
    let strength = mode.strength;
    let coth = strength.cosh() / strength.sinh();

    let decomposition = Decomposition {
        mode: mode.clone(),
        strength,
        theta,
        theta_perp,
        phi_perp,
        zeta_s,
        zeta_t,
        mu_s: zeta_s_abs.cosh(),
        nu_s: Complex64::from_polar(zeta_s_abs.sinh(), phi_perp),
        mu_t: zeta_t.cosh(),
        nu_t: zeta_t.sinh(),
        s_tilde: 1.0 - 2.0 * coth * coth,
        prefactor: 0.5 / strength.sinh().powi(2),
        sampled: ComplexGridFunction {
            grid: UniformGrid::new(0.0, 1.0, 2)?,
            values: vec![],
        },
        thermalized: None,
    };
    let grid = UniformGrid::linspace(0.0, cutoff, mode.samples.grid.count / 2 + 1)?;
    let sampled = ComplexGridFunction::sample(grid, |w| decomposition.sampled_mode(w));
    let thermalized = decomposition
        .has_thermalized_mode()
        .then(|| ComplexGridFunction::sample(grid, |w| decomposition.thermalized_mode(w)));
    Ok(Decomposition {
        sampled,
        thermalized,
        ..decomposition
    })
}

impl Decomposition {
    pub fn output_mode(&self) -> &OutputMode {
        &self.mode
    }

    pub fn setup(&self) -> &Setup {
        self.mode.setup()
    }

    pub fn has_thermalized_mode(&self) -> bool {
        self.theta > 0.0
    }

    /// f_SA(Ω) = sech θ·conj f_ω̃(−Ω), for 0 < Ω ≤ Λ.
    pub fn sampled_mode(&self, w: f64) -> Complex64 {
        self.mode.eval(-w).conj() / self.theta.cosh()
    }

    /// f_TH(Ω) = sec θ⊥·csch θ·f_ω̃(Ω) − tan θ⊥·e^{iΦ⊥}·f_SA(Ω); zero when θ = 0.
    pub fn thermalized_mode(&self, w: f64) -> Complex64 {
        if !self.has_thermalized_mode() {
            return Complex64::new(0.0, 0.0);
        }
        self.mode.eval(w) / (self.theta_perp.cos() * self.theta.sinh())
            - Complex64::from_polar(self.theta_perp.tan(), self.phi_perp) * self.sampled_mode(w)
    }

    /// Largest grid deviation of the two halves of f_ω̃ from their reassembly
    /// out of f_SA and f_TH.
    pub fn reconstruction_residual(&self) -> f64 {
        let (sh, ch) = (self.theta.sinh(), self.theta.cosh());
        let cross = Complex64::from_polar(sh * self.theta_perp.sin(), self.phi_perp);
        let direct = sh * self.theta_perp.cos();
        let mut worst = 0.0f64;
        for (i, w) in self.sampled.grid.points().enumerate() {
            let sa = self.sampled.values[i];
            let th = self
                .thermalized
                .as_ref()
                .map_or(Complex64::new(0.0, 0.0), |t| t.values[i]);
            let dfg = self.mode.eval(-w) - ch * sa.conj();
            let sfg = self.mode.eval(w) - (cross * sa + direct * th);
            worst = worst.max(dfg.norm()).max(sfg.norm());
        }
        worst
    }

    /// (∫|f_SA|² − 1, ∫|f_TH|² − 1, |∫f_SA·conj f_TH|) on the grid.
    pub fn orthonormality_defects(&self) -> Result<(f64, f64, f64)> {
        let sa = self.sampled.norm_sqr() - 1.0;
        match &self.thermalized {
            Some(th) => Ok((sa, th.norm_sqr() - 1.0, self.sampled.inner(th)?.norm())),
            None => Ok((sa, 0.0, 0.0)),
        }
    }
}

/// Φ⊥ predicted by the low-dispersion model for a real pump amplitude:
/// π + 2ω̃t_p, wrapped to (−π, π].
pub fn pump_phase_check(setup: &Setup) -> Result<f64> {
    if setup.pump.amplitude.im != 0.0 {
        return Err(Error::invalid(
            "pump.amplitude",
            "the closed-form Φ⊥ assumes a real pump amplitude",
        ));
    }
    let probe = setup.probe.center.rad_per_ps();
    Ok(wrap_phase(PI + 2.0 * probe * setup.pump.cep_time_ps))
}
