//! Versioned JSON configuration document.
//!
//! Frequencies are ordinary frequencies in THz, lengths in µm, times in ps.
//! Complex numbers are `[re, im]` pairs. Unknown keys are rejected and every
//! omitted optional field takes the default echoed by [`ConfigDocument::resolved`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::coefficients::{delay_grid, CoefficientSource};
use crate::decomposition::{ModeModel, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::model::{
    Crystal, JsaModel, MirPulse, MirState, ProbeFilter, Pump, RefractiveModel, Setup, SubBand,
};
use crate::numerics::{ComplexGridFunction, UniformGrid};
use crate::quasiprob::LatticeExtent;
use crate::tomography::{Corrections, RunConfig};
use crate::units::{thz_to_angular, AngularFrequency};

/// Schema version accepted by this build.
pub const SPEC_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub spec_version: String,
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    pub probe_filter: ProbeSection,
    pub mir_pulse: PulseSection,
    pub mir_state: MirState,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub length_um: f64,
    #[serde(default = "defaults::r41")]
    pub r41_pm_per_v: f64,
    #[serde(default = "defaults::beam_area")]
    pub beam_area_m2: f64,
    #[serde(default = "defaults::cutoff")]
    pub cutoff_thz: f64,
    #[serde(default)]
    pub refractive: RefractiveModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub amplitude: Complex64,
    pub center_thz: f64,
    pub bandwidth_thz: f64,
    #[serde(default)]
    pub cep_time_ps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub center_thz: f64,
    pub width_thz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub center_thz: f64,
    pub bandwidth_thz: f64,
    pub amplitude: Complex64,
    /// Sub-bands; two equal halves (X below, Y above) when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<Vec<BandSection>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedMode {
    pub start_thz: f64,
    pub step_thz: f64,
    /// f_Ω̃ samples (normalized on load).
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub center_thz: f64,
    pub bandwidth_thz: f64,
    #[serde(default)]
    pub cep_time_ps: f64,
    /// Replaces the Gaussian mode by grid samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tabulated: Option<TabulatedMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySection {
    pub start_ps: f64,
    pub end_ps: f64,
    pub step_ps: f64,
}

impl Default for DelaySection {
    fn default() -> Self {
        Self {
            start_ps: -1.0,
            end_ps: 1.0,
            step_ps: 0.001,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub start_thz: f64,
    pub end_thz: f64,
    pub count: usize,
}

impl AxisSection {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 || !(self.start_thz.is_finite() && self.end_thz.is_finite()) {
            return Err(Error::invalid(
                "run axis",
                "need a positive count and finite bounds",
            ));
        }
        if self.count == 1 {
            return Ok(vec![self.start_thz]);
        }
        let step = (self.end_thz - self.start_thz) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| self.start_thz + i as f64 * step)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    pub n_sigma: f64,
    /// Delay of the count distribution; η_c when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_ps: Option<f64>,
    /// Explicit inclusive ranges, overriding n_sigma.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dn_x: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dn_y: Option<(i64, i64)>,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self {
            n_sigma: 8.0,
            delay_ps: None,
            dn_x: None,
            dn_y: None,
        }
    }
}

impl LatticeSection {
    pub fn extent(&self) -> Result<LatticeExtent> {
        match (self.dn_x, self.dn_y) {
            (Some(dn_x), Some(dn_y)) => Ok(LatticeExtent::Explicit { dn_x, dn_y }),
            (None, None) => Ok(LatticeExtent::Auto {
                n_sigma: self.n_sigma,
            }),
            _ => Err(Error::Config {
                path: "run.lattice".into(),
                message: "dn_x and dn_y must be given together".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SqueezeMapSection {
    /// Axis of ω̃ − ω_p.
    pub minus_thz: AxisSection,
    /// Axis of ω̃ + ω_p.
    pub plus_thz: AxisSection,
}

impl Default for SqueezeMapSection {
    fn default() -> Self {
        Self {
            minus_thz: AxisSection {
                start_thz: -150.0,
                end_thz: 50.0,
                count: 21,
            },
            plus_thz: AxisSection {
                start_thz: 450.0,
                end_thz: 850.0,
                count: 21,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub start_thz: f64,
    pub end_thz: f64,
    pub points: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            start_thz: -100.0,
            end_thz: 700.0,
            points: 1601,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table1Section {
    pub pump_bandwidths_thz: Vec<f64>,
}

impl Default for Table1Section {
    fn default() -> Self {
        Self {
            pump_bandwidths_thz: vec![15.0, 35.0, 50.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub shots: usize,
    pub delays: DelaySection,
    pub grid_points: usize,
    pub mode_model: ModeModel,
    pub jsa_model: JsaModel,
    pub coefficient_source: CoefficientSource,
    pub noiseless: bool,
    pub phase_diverse: bool,
    pub corrections: Corrections,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_half_width_ps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_standard_error: Option<f64>,
    pub lattice: LatticeSection,
    pub squeeze_map: SqueezeMapSection,
    pub mode_spectrum: SpectrumSection,
    pub table1: Table1Section,
    /// Carrier-envelope offsets t_step of the gating overlay, in MIR cycles.
    pub cep_ladder: Vec<f64>,
    /// Time axis of the gating overlay.
    pub gating_times: DelaySection,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 0,
            shots: 100_000,
            delays: DelaySection::default(),
            grid_points: DEFAULT_GRID_POINTS,
            mode_model: ModeModel::Narrowband,
            jsa_model: JsaModel::Exact,
            coefficient_source: CoefficientSource::Numeric,
            noiseless: false,
            phase_diverse: true,
            corrections: Corrections::default(),
            fit_half_width_ps: None,
            max_standard_error: None,
            lattice: LatticeSection::default(),
            squeeze_map: SqueezeMapSection::default(),
            mode_spectrum: SpectrumSection::default(),
            table1: Table1Section::default(),
            cep_ladder: vec![2.0, 0.75, 0.125, 0.0],
            gating_times: DelaySection {
                start_ps: -0.3,
                end_ps: 0.3,
                step_ps: 0.001,
            },
        }
    }
}

mod defaults {
    use crate::model::Crystal;

    pub fn r41() -> f64 {
        Crystal::DEFAULT_R41_PM_PER_V
    }

    pub fn beam_area() -> f64 {
        Crystal::DEFAULT_BEAM_AREA_M2
    }

    pub fn cutoff() -> f64 {
        Crystal::DEFAULT_CUTOFF_THZ
    }
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl ConfigDocument {
    /// Parses and fully validates a document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: ConfigDocument = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(path, e.into_inner().to_string())
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(path.display().to_string(), e.to_string()))?;
        Self::from_json_str(&text)
    }

    /// Schema-level checks plus construction of every physical object.
    pub fn validate(&self) -> Result<()> {
        if self.spec_version != SPEC_VERSION {
            return Err(config_error(
                "spec_version",
                format!(
                    "unsupported version {:?}, expected {SPEC_VERSION:?}",
                    self.spec_version
                ),
            ));
        }
        self.setup()?;
        self.run_config()?;
        let run = &self.run;
        if run.grid_points < 16 || run.grid_points % 2 != 0 {
            return Err(config_error(
                "run.grid_points",
                "must be even and at least 16",
            ));
        }
        if run.shots == 0 {
            return Err(config_error("run.shots", "must be at least 1"));
        }
        if run.mode_spectrum.points < 2
            || !(run.mode_spectrum.end_thz > run.mode_spectrum.start_thz)
        {
            return Err(config_error(
                "run.mode_spectrum",
                "need end > start and at least two points",
            ));
        }
        self.gating_times()?;
        run.squeeze_map.minus_thz.values()?;
        run.squeeze_map.plus_thz.values()?;
        if run.table1.pump_bandwidths_thz.iter().any(|s| !(*s > 0.0)) {
            return Err(config_error(
                "run.table1.pump_bandwidths_thz",
                "must be positive",
            ));
        }
        if run.cep_ladder.iter().any(|t| !t.is_finite()) {
            return Err(config_error("run.cep_ladder", "must be finite"));
        }
        Ok(())
    }

    pub fn crystal(&self) -> Result<Crystal> {
        let c = &self.crystal;
        Crystal::new(
            c.length_um,
            c.r41_pm_per_v,
            c.beam_area_m2,
            AngularFrequency::from_thz(c.cutoff_thz),
            c.refractive,
        )
    }

    pub fn pump(&self) -> Result<Pump> {
        let p = &self.pump;
        Pump::new(
            p.amplitude,
            AngularFrequency::from_thz(p.center_thz),
            AngularFrequency::from_thz(p.bandwidth_thz),
            p.cep_time_ps,
        )
    }

    pub fn probe(&self) -> Result<ProbeFilter> {
        let p = &self.probe_filter;
        let center = AngularFrequency::from_thz(p.center_thz);
        let bandwidth = AngularFrequency::from_thz(p.bandwidth_thz);
        match &p.bands {
            None => ProbeFilter::balanced(center, bandwidth, p.amplitude),
            Some(bands) => ProbeFilter::new(
                center,
                bandwidth,
                bands
                    .iter()
                    .map(|b| SubBand {
                        center: AngularFrequency::from_thz(b.center_thz),
                        width: AngularFrequency::from_thz(b.width_thz),
                    })
                    .collect(),
                p.amplitude,
            ),
        }
    }

    pub fn pulse(&self) -> Result<MirPulse> {
        let m = &self.mir_pulse;
        let center = AngularFrequency::from_thz(m.center_thz);
        let bandwidth = AngularFrequency::from_thz(m.bandwidth_thz);
        match &m.tabulated {
            None => MirPulse::gaussian(center, bandwidth, m.cep_time_ps),
            Some(t) => {
                if t.values.len() < 2 {
                    return Err(config_error(
                        "mir_pulse.tabulated.values",
                        "need at least two samples",
                    ));
                }
                let grid = UniformGrid::new(
                    thz_to_angular(t.start_thz),
                    thz_to_angular(t.step_thz),
                    t.values.len(),
                )?;
                let samples = ComplexGridFunction {
                    grid,
                    values: t.values.clone(),
                };
                MirPulse::tabulated(samples, center, bandwidth)
            }
        }
    }

    pub fn setup(&self) -> Result<Setup> {
        Setup::new(
            self.crystal()?,
            self.pump()?,
            self.probe()?,
            self.pulse()?,
            self.run.jsa_model,
        )
    }

    pub fn delays(&self) -> Result<Vec<f64>> {
        let d = self.run.delays;
        delay_grid(d.start_ps, d.end_ps, d.step_ps)
    }

    pub fn gating_times(&self) -> Result<Vec<f64>> {
        let d = self.run.gating_times;
        delay_grid(d.start_ps, d.end_ps, d.step_ps)
            .map_err(|_| config_error("run.gating_times", "need start ≤ end and step > 0"))
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let r = &self.run;
        if let Some(w) = r.fit_half_width_ps {
            if !(w > 0.0) {
                return Err(config_error("run.fit_half_width_ps", "must be positive"));
            }
        }
        Ok(RunConfig {
            seed: r.seed,
            shots: r.shots,
            delays: self.delays()?,
            corrections: r.corrections,
            source: r.coefficient_source,
            noiseless: r.noiseless,
            phase_diverse: r.phase_diverse,
            extent: r.lattice.extent()?,
            fit_half_width: r.fit_half_width_ps,
            max_standard_error: r.max_standard_error,
        })
    }

    /// The document with all defaults filled in.
    pub fn resolved(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
