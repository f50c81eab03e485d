//! The subcommands of the command-line tool, as library functions.
//!
//! Each command reads a validated [`ConfigDocument`], writes its artifacts
//! through an [`ArtifactWriter`] and returns a small JSON summary.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;

use crate::coefficients::{
    coefficient_trace, deamplification_estimate, eta_c, rel_error_frequency, rel_error_variance,
    CoefficientPair, CoefficientSource, CoefficientTrace,
};
use crate::config::ConfigDocument;
use crate::decomposition::{decompose, output_mode, Decomposition};
use crate::error::{Error, Result};
use crate::io::{ArtifactWriter, Heatmap, LinePlot, Marker, PlotSpec, Series};
use crate::model::{ProbeFilter, Pump, Setup, SubBand};
use crate::quasiprob::{count_lattice, predicted_moments, CountLattice};
use crate::tomography::{sample, sweep_and_reconstruct};
use crate::units::{angular_to_thz, thz_to_angular, AngularFrequency};

const HEATMAP_CELLS: usize = 160;

/// Subcommand names, as used on the command line and in provenance records.
pub const COMMANDS: [&str; 8] = [
    "mode-spectrum",
    "squeeze-map",
    "coefficients",
    "table1",
    "countdist",
    "sample",
    "reconstruct",
    "validate",
];

/// Dispatches by subcommand name.
pub fn run(command: &str, doc: &ConfigDocument, out: &mut ArtifactWriter) -> Result<Value> {
    match command {
        "mode-spectrum" => mode_spectrum(doc, out),
        "squeeze-map" => squeeze_map(doc, out),
        "coefficients" => coefficients(doc, out),
        "table1" => table1(doc, out),
        "countdist" => countdist(doc, out),
        "sample" => sample_shots(doc, out),
        "reconstruct" => reconstruct(doc, out),
        "validate" => validate(doc),
        other => Err(Error::Config {
            path: "command".into(),
            message: format!("unknown subcommand {other:?}"),
        }),
    }
}

fn decomposition_of(doc: &ConfigDocument, setup: &Setup) -> Result<Decomposition> {
    decompose(&output_mode(
        setup,
        doc.run.mode_model,
        doc.run.grid_points,
    )?)
}

/// The configured setup with the pump and probe centers moved and the pump
/// bandwidth optionally replaced. Probe sub-bands move with the probe center.
fn retuned(
    setup: &Setup,
    probe_thz: f64,
    pump_thz: f64,
    pump_bandwidth_thz: Option<f64>,
) -> Result<Setup> {
    let p = &setup.pump;
    let pump = Pump::new(
        p.amplitude,
        AngularFrequency::from_thz(pump_thz),
        pump_bandwidth_thz
            .map(AngularFrequency::from_thz)
            .unwrap_or(p.bandwidth),
        p.cep_time_ps,
    )?;
    let old = &setup.probe;
    let shift = thz_to_angular(probe_thz) - old.center.rad_per_ps();
    let probe = ProbeFilter::new(
        AngularFrequency::from_thz(probe_thz),
        old.bandwidth,
        old.bands
            .iter()
            .map(|b| SubBand {
                center: AngularFrequency::from_rad_per_ps(b.center.rad_per_ps() + shift),
                width: b.width,
            })
            .collect(),
        old.amplitude,
    )?;
    Setup::new(
        setup.crystal.clone(),
        pump,
        probe,
        setup.pulse.clone(),
        setup.jsa_model,
    )
}

/// |S(Ω, ω̃)| with its phase-matching and pump factors over the configured Ω range.
pub fn mode_spectrum(doc: &ConfigDocument, out: &mut ArtifactWriter) -> Result<Value> {
    let setup = doc.setup()?;
    let range = doc.run.mode_spectrum;
    let probe = setup.probe.center.rad_per_ps();
    let step = (range.end_thz - range.start_thz) / (range.points - 1) as f64;
    let freqs: Vec<f64> = (0..range.points)
        .map(|i| range.start_thz + i as f64 * step)
        .collect();
    let rows: Vec<Vec<f64>> = freqs
        .iter()
        .map(|&nu| {
            let f = setup.spectral_factors(thz_to_angular(nu), probe);
            vec![nu, f.jsa.norm(), f.phase_matching.norm(), f.pump.norm()]
        })
        .collect();
    out.csv(
        "mode_spectrum.csv",
        &["omega_thz", "jsa_abs", "phase_matching_abs", "pump_abs"],
        &rows,
    )?;

    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let normalized = |k: usize| {
        let c = column(k);
        let max = c.iter().copied().fold(0.0, f64::max);
        let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
        freqs
            .iter()
            .zip(&c)
            .map(|(x, y)| (*x, y * scale))
            .collect::<Vec<_>>()
    };
    let probe_thz = setup.probe.center.thz();
    let pump_thz = setup.pump.center.thz();
    let guides = [
        (probe_thz - pump_thz, "ω̃−ω_p"),
        (probe_thz + pump_thz, "ω̃+ω_p"),
        (0.0, "0"),
        (probe_thz, "ω̃"),
    ];
    let plot = LinePlot {
        series: vec![
            Series::new("|S(Ω, ω̃)|", normalized(1)),
            Series::new("phase matching", normalized(2)),
            Series::new("pump factor", normalized(3)).dashed(),
        ],
        markers: guides
            .iter()
            .map(|(x, l)| Marker::Vertical {
                x: *x,
                label: (*l).into(),
            })
            .collect(),
        x_range: Some((range.start_thz, range.end_thz)),
        y_range: Some((0.0, 1.05)),
    };
    out.svg(
        "mode_spectrum.svg",
        &PlotSpec::line(
            "Joint spectral amplitude",
            "Ω/2π (THz)",
            "normalized magnitude",
            plot,
        ),
    )?;

    // Global maxima of each factor on the DFG (Ω < 0) and SFG (Ω > 0) sides.
    let side_peak = |k: usize, negative: bool| {
        rows.iter()
            .filter(|r| if negative { r[0] < 0.0 } else { r[0] > 0.0 })
            .max_by(|a, b| a[k].total_cmp(&b[k]))
            .map(|r| json!({ "omega_thz": r[0], "value": r[k] }))
    };
    let extrema =
        |k: usize| json!({ "dfg_peak": side_peak(k, true), "sfg_peak": side_peak(k, false) });
    let report = json!({
        "jsa_abs": extrema(1),
        "phase_matching_abs": extrema(2),
        "pump_abs": extrema(3),
        "guides_thz": guides.iter().map(|g| g.0).collect::<Vec<_>>(),
    });
    out.json("mode_spectrum_peaks.json", &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
struct CellFailure {
    minus_thz: f64,
    plus_thz: f64,
    error: String,
}

/// θ⁽¹⁾, |ζ_S| and ζ_T over a grid of (ω̃ − ω_p, ω̃ + ω_p); failed cells are
/// reported and left blank.
pub fn squeeze_map(doc: &ConfigDocument, out: &mut ArtifactWriter) -> Result<Value> {
    let setup = doc.setup()?;
    let minus = doc.run.squeeze_map.minus_thz.values()?;
    let plus = doc.run.squeeze_map.plus_thz.values()?;
    let cells: Vec<(f64, f64)> = plus
        .iter()
        .flat_map(|&p| minus.iter().map(move |&m| (m, p)))
        .collect();
    let results: Vec<std::result::Result<[f64; 3], String>> = cells
        .par_iter()
        .map(|&(m, p)| {
            let probe = 0.5 * (p + m);
            let pump = 0.5 * (p - m);
            retuned(&setup, probe, pump, None)
                .and_then(|s| decomposition_of(doc, &s))
                .map(|d| [d.strength, d.zeta_s.norm(), d.zeta_t])
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    let mut failures = Vec::new();
    for (&(m, p), r) in cells.iter().zip(&results) {
        let v = match r {
            Ok(v) => *v,
            Err(e) => {
                failures.push(CellFailure {
                    minus_thz: m,
                    plus_thz: p,
                    error: e.clone(),
                });
                [f64::NAN; 3]
            }
        };
        rows.push(vec![m, p, 0.5 * (p + m), 0.5 * (p - m), v[0], v[1], v[2]]);
    }
    out.csv(
        "squeeze_map.csv",
        &[
            "minus_thz",
            "plus_thz",
            "probe_thz",
            "pump_thz",
            "theta1",
            "zeta_s_abs",
            "zeta_t",
        ],
        &rows,
    )?;

    let reference = [
        Marker::Vertical {
            x: -50.0,
            label: "−50".into(),
        },
        Marker::Horizontal {
            y: 650.0,
            label: "650".into(),
        },
    ];
    for (k, (name, title)) in [("theta1", "θ⁽¹⁾"), ("zeta_s", "|ζ_S|"), ("zeta_t", "ζ_T")]
        .into_iter()
        .enumerate()
    {
        let values: Vec<Vec<f64>> = (0..plus.len())
            .map(|iy| {
                (0..minus.len())
                    .map(|ix| rows[iy * minus.len() + ix][4 + k])
                    .collect()
            })
            .collect();
        let map = Heatmap {
            xs: minus.clone(),
            ys: plus.clone(),
            values,
            markers: reference.to_vec(),
            color_range: None,
        };
        out.svg(
            &format!("squeeze_map_{name}.svg"),
            &PlotSpec::heatmap(title, "(ω̃−ω_p)/2π (THz)", "(ω̃+ω_p)/2π (THz)", map),
        )?;
    }
    let report = json!({
        "cells": cells.len(),
        "failed_cells": failures.len(),
        "failures": failures,
    });
    out.json("squeeze_map_report.json", &report)?;
    Ok(report)
}

fn trace_rows(numeric: &CoefficientTrace, analytic: &CoefficientTrace) -> Vec<Vec<f64>> {
    (0..numeric.len())
        .map(|i| {
            let (n, a) = (numeric.pair(i), analytic.pair(i));
            vec![
                numeric.delays[i],
                n.sampled.re,
                n.sampled.im,
                n.sampled.norm(),
                n.thermalized.re,
                n.thermalized.im,
                n.thermalized.norm(),
                numeric.unsampled[i],
                a.sampled.re,
                a.sampled.im,
                a.sampled.norm(),
                a.thermalized.re,
                a.thermalized.im,
                a.thermalized.norm(),
                (n.sampled - a.sampled).norm(),
                (n.thermalized - a.thermalized).norm(),
                n.sampled.norm_sqr() + n.thermalized.norm_sqr() + numeric.unsampled[i].powi(2)
                    - 1.0,
            ]
        })
        .collect()
}

/// Numeric and analytic A_SA, A_TH traces with their residuals.
pub fn coefficients(doc: &ConfigDocument, out: &mut ArtifactWriter) -> Result<Value> {
    let setup = doc.setup()?;
    let decomp = decomposition_of(doc, &setup)?;
    let delays = doc.delays()?;
    let pulse = &setup.pulse;
    let numeric = coefficient_trace(CoefficientSource::Numeric, pulse, &decomp, &delays)?;
    let analytic = coefficient_trace(CoefficientSource::AnalyticErfcx, pulse, &decomp, &delays)?;
    let rows = trace_rows(&numeric, &analytic);
    out.csv(
        "coefficients.csv",
        &[
            "delay_ps",
            "sa_re",
            "sa_im",
            "sa_abs",
            "th_re",
            "th_im",
            "th_abs",
            "un_abs",
            "sa_analytic_re",
            "sa_analytic_im",
            "sa_analytic_abs",
            "th_analytic_re",
            "th_analytic_im",
            "th_analytic_abs",
            "sa_residual",
            "th_residual",
            "completeness_defect",
        ],
        &rows,
    )?;
    let curve = |k: usize| rows.iter().map(|r| (r[0], r[k])).collect::<Vec<_>>();
    let plot = LinePlot {
        series: vec![
            Series::new("|A_SA|", curve(3)),
            Series::new("|A_TH|", curve(6)),
            Series::new("|A_UN|", curve(7)),
            Series::new("|A_SA| analytic", curve(10)).dashed(),
            Series::new("|A_TH| analytic", curve(13)).dashed(),
        ],
        markers: Vec::new(),
        x_range: None,
        y_range: Some((0.0, 1.05)),
    };
    out.svg(
        "coefficients.svg",
        &PlotSpec::line("Decomposition coefficients", "Δt (ps)", "magnitude", plot),
    )?;

    let column_max = |k: usize| rows.iter().map(|r| r[k].abs()).fold(0.0, f64::max);
    let report = json!({
        "max_abs_sa": numeric.max_sampled(),
        "max_abs_th": numeric.max_thermalized(),
        "max_abs_sa_analytic": analytic.max_sampled(),
        "max_abs_th_analytic": analytic.max_thermalized(),
        "max_sa_residual": column_max(14),
        "max_th_residual": column_max(15),
        "max_completeness_defect": numeric.completeness_defect(),
        "deamplification_estimate": deamplification_estimate(&setup.crystal, pulse, setup.probe.center.rad_per_ps())?,
        "eta_c_ps": eta_c(&setup.crystal, setup.probe.center.rad_per_ps())?,
    });
    out.json("coefficients_report.json", &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub pump_bandwidth_thz: f64,
    pub max_abs_sa: f64,
    pub max_abs_th: f64,
    pub rel_err_variance: f64,
    pub rel_err_frequency: f64,
}

/// One table row: numeric coefficient maxima and the closed-form errors.
pub fn table1_row(
    doc: &ConfigDocument,
    base: &Setup,
    pump_bandwidth_thz: f64,
) -> Result<Table1Row> {
    let setup = retuned(
        base,
        base.probe.center.thz(),
        base.pump.center.thz(),
        Some(pump_bandwidth_thz),
    )?;
    let decomp = decomposition_of(doc, &setup)?;
    let trace = coefficient_trace(
        CoefficientSource::Numeric,
        &setup.pulse,
        &decomp,
        &doc.delays()?,
    )?;
    let (sm, sp) = (
        setup.pulse.bandwidth.rad_per_ps(),
        setup.pump.bandwidth.rad_per_ps(),
    );
    Ok(Table1Row {
        pump_bandwidth_thz,
        max_abs_sa: trace.max_sampled(),
        max_abs_th: trace.max_thermalized(),
        rel_err_variance: rel_error_variance(sm, sp),
        rel_err_frequency: rel_error_frequency(
            setup.pulse.center.rad_per_ps(),
            sm,
            sp,
            setup.probe.center.rad_per_ps(),
            setup.pump.center.rad_per_ps(),
        ),
    })
}

/// Coefficient maxima and relative errors for each configured pump bandwidth.
pub fn table1(doc: &ConfigDocument, out: &mut ArtifactWriter) -> Result<Value> {
    let base = doc.setup()?;
    let rows = doc
        .run
        .table1
        .pump_bandwidths_thz
        .iter()
        .map(|&sp| table1_row(doc, &base, sp))
        .collect::<Result<Vec<_>>>()?;
    let report = json!({ "rows": rows });
    out.json("table1.json", &report)?;
    Ok(report)
}

fn lattice_at(doc: &ConfigDocument, decomp: &Decomposition) -> Result<(f64, CountLattice)> {
    let setup = decomp.setup();
    let delay = match doc.run.lattice.delay_ps {
        Some(t) => t,
        None => eta_c(&setup.crystal, setup.probe.center.rad_per_ps())?,
    };
    let coeffs = CoefficientPair::at(doc.run.coefficient_source, &setup.pulse, decomp, delay)?;
    let lattice = count_lattice(&doc.mir_state, decomp, coeffs, doc.run.lattice.extent()?)?;
    Ok((delay, lattice))
}

/// Block-averaged view of the lattice with at most `HEATMAP_CELLS` cells per side.
fn lattice_heatmap(lattice: &CountLattice) -> Heatmap {
    let block = |count: usize| count.div_ceil(HEATMAP_CELLS).max(1);
    let (bx, by) = (block(lattice.x.count), block(lattice.y.count));
    let (nx, ny) = (lattice.x.count.div_ceil(bx), lattice.y.count.div_ceil(by));
    let centers = |axis: &crate::quasiprob::LatticeAxis, b: usize, n: usize| -> Vec<f64> {
        (0..n)
            .map(|j| {
                let last = ((j + 1) * b).min(axis.count) - 1;
                0.5 * (axis.representative(j * b) + axis.representative(last))
            })
            .collect()
    };
    let values = (0..ny)
        .map(|jy| {
            (0..nx)
                .map(|jx| {
                    let (mut sum, mut cells) = (0.0, 0usize);
                    for ix in jx * bx..((jx + 1) * bx).min(lattice.x.count) {
                        for iy in jy * by..((jy + 1) * by).min(lattice.y.count) {
                            sum += lattice.probability(ix, iy);
                            cells += 1;
                        }
                    }
                    sum / cells as f64
                })
                .collect()
        })
        .collect();
    Heatmap {
        xs: centers(&lattice.x, bx, nx),
        ys: centers(&lattice.y, by, ny),
        values,
        markers: Vec::new(),
        color_range: None,
    }
}

/// Count-probability lattice at one delay: CSV, binary grid and heatmap.
pub fn countdist(doc: &ConfigDocument, out: &mut ArtifactWriter) -> Result<Value> {
    let setup = doc.setup()?;
    let decomp = decomposition_of(doc, &setup)?;
    let (delay, lattice) = lattice_at(doc, &decomp)?;
    out.raw("countdist.csv", |w, _| lattice.write_csv(w))?;
    out.raw("countdist.bin", |w, provenance| {
        lattice.write_binary(w, provenance)
    })?;

    out.svg(
        "countdist.svg",
        &PlotSpec::heatmap(
            "Count-probability distribution",
            "Δn_X",
            "Δn_Y",
            lattice_heatmap(&lattice),
        ),
    )?;

    let moments = lattice.moments();
    let predicted = match predicted_moments(
        &doc.mir_state,
        &decomp,
        CoefficientPair::at(doc.run.coefficient_source, &setup.pulse, &decomp, delay)?,
    ) {
        Ok(p) => Some(p),
        Err(Error::UnsupportedMoments(_)) => None,
        Err(e) => return Err(e),
    };
    let report = json!({
        "delay_ps": delay,
        "cells": lattice.cells(),
        "bin": lattice.x.bin,
        "truncated_mass": lattice.truncated_mass,
        "s_tilde": lattice.s_tilde,
        "moments": moments,
        "eigenvalue_ratio": moments.eigenvalue_ratio(),
        "predicted": predicted.map(|p| json!({
            "mean_x": p.x.count_mean,
            "mean_y": p.y.count_mean,
            "var_x": p.x.count_variance,
            "var_y": p.y.count_variance,
        })),
    });
    out.json("countdist_report.json", &report)?;
    Ok(report)
}

/// i.i.d. shots from the lattice at the configured delay.
pub fn sample_shots(doc: &ConfigDocument, out: &mut ArtifactWriter) -> Result<Value> {
    let setup = doc.setup()?;
    let decomp = decomposition_of(doc, &setup)?;
    let (delay, lattice) = lattice_at(doc, &decomp)?;
    let shots = sample(&lattice, doc.run.shots, doc.run.seed, 0, delay)?;
    out.csv_records("shots.csv", &shots)?;
    Ok(json!({ "delay_ps": delay, "shots": shots.len(), "seed": doc.run.seed }))
}

/// (1/√2π)·∫ f(Ω)·e^{−iΩt} dΩ by the trapezoid rule on `(start, step)` samples.
fn time_domain(start: f64, step: f64, samples: &[Complex64], t: f64) -> Complex64 {
    let n = samples.len();
    let sum: Complex64 = samples
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let w = start + i as f64 * step;
            let edge = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            f * Complex64::from_polar(edge, -w * t)
        })
        .sum();
    sum * step / (2.0 * PI).sqrt()
}

fn unit_peak(values: &[Complex64]) -> Vec<Complex64> {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    values.iter().map(|v| v * scale).collect()
}

/// Gating envelope |F[f_SA](t)| and the MIR waveform, for each offset of the
/// carrier-envelope ladder t_Ω̃ = η_c − 2π·t_step/Ω̃.
fn gating_overlays(
    doc: &ConfigDocument,
    decomp: &Decomposition,
    out: &mut ArtifactWriter,
) -> Result<()> {
    let setup = decomp.setup();
    let pulse = &setup.pulse;
    let times = doc.gating_times()?;
    let eta = eta_c(&setup.crystal, setup.probe.center.rad_per_ps())?;
    let sa = &decomp.sampled;
    let gating: Vec<Complex64> = times
        .par_iter()
        .map(|&t| time_domain(sa.grid.start, sa.grid.step, &sa.values, t))
        .collect();
    let gating = unit_peak(&gating);

    let (lo, hi) = pulse.support();
    let n = 2049;
    let step = (hi - lo) / (n - 1) as f64;
    let mode: Vec<Complex64> = (0..n).map(|i| pulse.mode(lo + i as f64 * step)).collect();
    let center = pulse.center.rad_per_ps();

    let mut header = vec!["t_ps".to_string(), "gating_abs".to_string()];
    let mut columns: Vec<Vec<f64>> = vec![times.clone(), gating.iter().map(|g| g.norm()).collect()];
    for (k, &t_step) in doc.run.cep_ladder.iter().enumerate() {
        let cep = eta - 2.0 * PI * t_step / center;
        let wave: Vec<Complex64> = times
            .par_iter()
            .map(|&t| time_domain(lo, step, &mode, t - cep))
            .collect();
        let wave = unit_peak(&wave);
        header.push(format!("wave_re_{k}"));
        header.push(format!("wave_im_{k}"));
        columns.push(wave.iter().map(|w| w.re).collect());
        columns.push(wave.iter().map(|w| w.im).collect());

        let points =
            |f: &dyn Fn(usize) -> f64| times.iter().enumerate().map(|(i, t)| (*t, f(i))).collect();
        let plot = LinePlot {
            series: vec![
                Series::new("|F[f_SA]|", points(&|i| gating[i].norm())),
                Series::new("Re waveform", points(&|i| wave[i].re)).dashed(),
                Series::new("Im waveform", points(&|i| wave[i].im)).dashed(),
            ],
            markers: vec![
                Marker::Vertical {
                    x: eta,
                    label: "η_c".into(),
                },
                Marker::Vertical {
                    x: -eta,
                    label: "−η_c".into(),
                },
            ],
            x_range: None,
            y_range: Some((-1.05, 1.05)),
        };
        out.svg(
            &format!("gating_{k}.svg"),
            &PlotSpec::line(
                &format!("Gating envelope and waveform, t_step = {t_step}"),
                "t (ps)",
                "normalized amplitude",
                plot,
            ),
        )?;
    }
    let rows: Vec<Vec<f64>> = (0..times.len())
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    out.csv("gating.csv", &header, &rows)
}

/// Delay sweep, corrections and Gaussian fit, with the gating overlays.
pub fn reconstruct(doc: &ConfigDocument, out: &mut ArtifactWriter) -> Result<Value> {
    let setup = doc.setup()?;
    let decomp = decomposition_of(doc, &setup)?;
    let run = doc.run_config()?;
    let result = sweep_and_reconstruct(&doc.mir_state, &decomp, &run)?;
    out.json("reconstruction.json", &result)?;

    let fit = result.fit;
    let trace = &result.corrected;
    let envelope =
        |t: f64| fit.amplitude * (-(t - fit.center).powi(2) / (2.0 * fit.width * fit.width)).exp();
    let (w0, w1) = result.window_ps;
    let plot = LinePlot {
        series: vec![
            Series::new(
                "Re",
                trace
                    .delays
                    .iter()
                    .zip(&trace.values)
                    .map(|(t, v)| (*t, v.re))
                    .collect(),
            ),
            Series::new(
                "Im",
                trace
                    .delays
                    .iter()
                    .zip(&trace.values)
                    .map(|(t, v)| (*t, v.im))
                    .collect(),
            ),
            Series::new(
                "fitted envelope",
                trace
                    .delays
                    .iter()
                    .filter(|t| **t >= w0 && **t <= w1)
                    .map(|t| (*t, envelope(*t)))
                    .collect(),
            )
            .dashed(),
        ],
        markers: vec![
            Marker::Vertical {
                x: w0,
                label: "window".into(),
            },
            Marker::Vertical {
                x: w1,
                label: String::new(),
            },
        ],
        x_range: None,
        y_range: None,
    };
    out.svg(
        "reconstruction.svg",
        &PlotSpec::line(
            "Reconstructed waveform",
            "Δt (ps)",
            "quadrature waveform",
            plot,
        ),
    )?;
    gating_overlays(doc, &decomp, out)?;

    Ok(json!({
        "sigma_rec_thz": result.sigma_rec_thz,
        "omega_rec_thz": result.omega_rec_thz,
        "rel_err_sigma": result.rel_err_sigma,
        "rel_err_sigma_se": result.rel_err_sigma_se,
        "rel_err_omega": result.rel_err_omega,
        "rel_err_omega_se": result.rel_err_omega_se,
        "predicted_rel_err_sigma": result.predicted_rel_err_sigma,
        "predicted_rel_err_omega": result.predicted_rel_err_omega,
    }))
}

/// The resolved document with derived quantities and modelling warnings.
pub fn validate(doc: &ConfigDocument) -> Result<Value> {
    let setup = doc.setup()?;
    let probe = setup.probe.center.rad_per_ps();
    Ok(json!({
        "config": doc.resolved(),
        "warnings": setup.warnings(),
        "derived": {
            "eta_c_ps": eta_c(&setup.crystal, probe)?,
            "delays": doc.delays()?.len(),
            "probe_lower_thz": angular_to_thz(setup.probe.lower()),
            "probe_upper_thz": angular_to_thz(setup.probe.upper()),
        },
    }))
}
