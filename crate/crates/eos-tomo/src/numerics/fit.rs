//! Complex Gaussian-envelope fit: y(x) ≈ A·exp(−(x−c)²/(2w²))·exp(i(φ + k(x−c))).

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix5, Vector5};
use num_complex::Complex64;
use serde::Serialize;

/// Fitted envelope parameters with their 1σ uncertainties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub center: f64,
    /// Standard deviation of the envelope |y|.
    pub width: f64,
    pub amplitude: f64,
    /// Phase at the center.
    pub phase: f64,
    /// d arg(y)/dx.
    pub phase_slope: f64,
    /// √(Σ|r|²) of the (weighted) complex residuals.
    pub residual_norm: f64,
    pub center_se: f64,
    pub width_se: f64,
    pub phase_slope_se: f64,
}

/// Per-sample standard errors of the complex data (applied to both parts).
pub type SampleErrors<'a> = Option<&'a [f64]>;

fn local_maxima(mags: &[f64]) -> Vec<usize> {
    let n = mags.len();
    (0..n)
        .filter(|&i| {
            let left = if i == 0 {
                f64::NEG_INFINITY
            } else {
                mags[i - 1]
            };
            let right = if i + 1 == n {
                f64::NEG_INFINITY
            } else {
                mags[i + 1]
            };
            mags[i] >= left && mags[i] > right
        })
        .collect()
}

/// Rejects flat data and data with more than one significant lobe.
fn check_single_lobe(mags: &[f64]) -> Result<usize> {
    let (peak, &max) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Fit("no samples".into()))?;
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::Fit("flat or non-finite data".into()));
    }
    let min = mags.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.5 * max {
        return Err(Error::Fit(format!(
            "flat data: dynamic range {:.3} below 2",
            max / min
        )));
    }
    for i in local_maxima(mags) {
        if i == peak || mags[i] < 0.25 * max {
            continue;
        }
        let (lo, hi) = if i < peak { (i, peak) } else { (peak, i) };
        let dip = mags[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
        if dip < 0.5 * mags[i] {
            return Err(Error::Fit(format!(
                "multiple lobes: secondary maximum {:.3} of peak at index {i}",
                mags[i] / max
            )));
        }
    }
    Ok(peak)
}

fn unwrap_around(phases: &mut [f64], anchor: usize) {
    use std::f64::consts::TAU;
    for i in anchor + 1..phases.len() {
        let d = phases[i] - phases[i - 1];
        phases[i] -= TAU * (d / TAU).round();
    }
    for i in (0..anchor).rev() {
        let d = phases[i] - phases[i + 1];
        phases[i] -= TAU * (d / TAU).round();
    }
}

fn weighted_polyfit(xs: &[f64], ys: &[f64], ws: &[f64], degree: usize) -> Option<Vec<f64>> {
    let cols = degree + 1;
    let mut a = DMatrix::<f64>::zeros(xs.len(), cols);
    let mut b = DVector::<f64>::zeros(xs.len());
    for (r, ((&x, &y), &w)) in xs.iter().zip(ys).zip(ws).enumerate() {
        let sw = w.sqrt();
        let mut p = 1.0;
        for c in 0..cols {
            a[(r, c)] = sw * p;
            p *= x;
        }
        b[r] = sw * y;
    }
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-14)
        .ok()
        .map(|v| v.iter().copied().collect())
}

/// Initial guess: log-quadratic fit of |y| (weights |y|²) and linear fit of
/// the unwrapped phase, both over the samples above 20% of the peak.
fn initial_guess(xs: &[f64], ys: &[Complex64], peak: usize) -> Result<Vector5<f64>> {
    let max = ys[peak].norm();
    let mut lo = peak;
    while lo > 0 && ys[lo - 1].norm() > 0.2 * max {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < ys.len() && ys[hi + 1].norm() > 0.2 * max {
        hi += 1;
    }
    if hi - lo < 2 {
        return Err(Error::Fit(
            "lobe resolved by fewer than three samples".into(),
        ));
    }
    let x0 = xs[peak];
    let sx: Vec<f64> = xs[lo..=hi].iter().map(|x| x - x0).collect();
    let mags: Vec<f64> = ys[lo..=hi].iter().map(|y| y.norm()).collect();
    let logs: Vec<f64> = mags.iter().map(|m| m.ln()).collect();
    let ws: Vec<f64> = mags.iter().map(|m| m * m).collect();
    let q = weighted_polyfit(&sx, &logs, &ws, 2)
        .ok_or_else(|| Error::Fit("envelope least squares is singular".into()))?;
    if !(q[2] < 0.0) {
        return Err(Error::Fit("envelope is not concave".into()));
    }
    let width = (-1.0 / (2.0 * q[2])).sqrt();
    let center = x0 - q[1] / (2.0 * q[2]);
    let amplitude = (q[0] - q[1] * q[1] / (4.0 * q[2])).exp();
    let mut phases: Vec<f64> = ys[lo..=hi].iter().map(|y| y.arg()).collect();
    unwrap_around(&mut phases, peak - lo);
    let p = weighted_polyfit(&sx, &phases, &ws, 1)
        .ok_or_else(|| Error::Fit("phase least squares is singular".into()))?;
    let slope = p[1];
    let phase = p[0] + slope * (center - x0);
    Ok(Vector5::new(amplitude, center, width, phase, slope))
}

fn model(p: &Vector5<f64>, x: f64) -> (Complex64, [Complex64; 5]) {
    let (a, c, w, phi, k) = (p[0], p[1], p[2], p[3], p[4]);
    let u = x - c;
    let env = (-u * u / (2.0 * w * w)).exp();
    let rot = Complex64::from_polar(1.0, phi + k * u);
    let y = rot * (a * env);
    let i = Complex64::i();
    let grads = [
        rot * env,
        y * (u / (w * w)) - i * k * y,
        y * (u * u / (w * w * w)),
        i * y,
        i * u * y,
    ];
    (y, grads)
}

fn normal_equations(
    p: &Vector5<f64>,
    xs: &[f64],
    ys: &[Complex64],
    inv_se: &[f64],
) -> (Matrix5<f64>, Vector5<f64>, f64) {
    let mut jtj = Matrix5::zeros();
    let mut jtr = Vector5::zeros();
    let mut chi2 = 0.0;
    for ((&x, &y), &s) in xs.iter().zip(ys).zip(inv_se) {
        let (m, g) = model(p, x);
        let r = (y - m) * s;
        chi2 += r.norm_sqr();
        for a in 0..5 {
            let ga = g[a] * s;
            jtr[a] += ga.re * r.re + ga.im * r.im;
            for b in a..5 {
                let gb = g[b] * s;
                jtj[(a, b)] += ga.re * gb.re + ga.im * gb.im;
            }
        }
    }
    for a in 0..5 {
        for b in 0..a {
            jtj[(a, b)] = jtj[(b, a)];
        }
    }
    (jtj, jtr, chi2)
}

/// Fits a single complex Gaussian lobe. `errors`, when given, are the
/// per-sample standard errors; parameter uncertainties are then absolute.
/// Without them the residual scatter sets the scale.
pub fn fit_gaussian_envelope(
    xs: &[f64],
    ys: &[Complex64],
    errors: SampleErrors<'_>,
) -> Result<EnvelopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::Fit("abscissa and sample lengths differ".into()));
    }
    if xs.len() < 8 {
        return Err(Error::Fit(format!("{} samples, need at least 8", xs.len())));
    }
    let mags: Vec<f64> = ys.iter().map(|y| y.norm()).collect();
    let peak = check_single_lobe(&mags)?;
    let inv_se: Vec<f64> = match errors {
        Some(se) if se.len() == xs.len() => se
            .iter()
            .map(|&s| if s > 0.0 { 1.0 / s } else { 0.0 })
            .collect(),
        Some(_) => return Err(Error::Fit("error vector length mismatch".into())),
        None => vec![1.0; xs.len()],
    };
    let mut p = initial_guess(xs, ys, peak)?;
    let (mut jtj, mut jtr, mut chi2) = normal_equations(&p, xs, ys, &inv_se);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let mut damped = jtj;
        for a in 0..5 {
            damped[(a, a)] *= 1.0 + lambda;
        }
        let Some(step) = damped.lu().solve(&jtr) else {
            lambda *= 10.0;
            continue;
        };
        let trial = p + step;
        if !(trial[2] > 0.0 && trial[0] > 0.0) {
            lambda *= 10.0;
            continue;
        }
        let (tj, tr, tc) = normal_equations(&trial, xs, ys, &inv_se);
        if tc <= chi2 {
            let converged = (chi2 - tc) <= 1e-15 * chi2.max(1e-300)
                || step
                    .iter()
                    .zip(trial.iter())
                    .all(|(s, v)| s.abs() <= 1e-13 * v.abs().max(1e-12));
            p = trial;
            jtj = tj;
            jtr = tr;
            chi2 = tc;
            lambda = (lambda * 0.3).max(1e-12);
            if converged {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let dof = (2 * xs.len()).saturating_sub(5).max(1) as f64;
    let scale = if errors.is_some() { 1.0 } else { chi2 / dof };
    let cov = jtj
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular normal matrix at solution".into()))?
        * scale;
    Ok(EnvelopeFit {
        center: p[1],
        width: p[2],
        amplitude: p[0],
        phase: p[3],
        phase_slope: p[4],
        residual_norm: chi2.sqrt(),
        center_se: cov[(1, 1)].max(0.0).sqrt(),
        width_se: cov[(2, 2)].max(0.0).sqrt(),
        phase_slope_se: cov[(4, 4)].max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lobe(x: f64, c: f64, w: f64, k: f64) -> Complex64 {
        Complex64::from_polar(
            (-(x - c).powi(2) / (2.0 * w * w)).exp() * 1.7,
            0.3 + k * (x - c),
        )
    }

    #[test]
    fn recovers_exact_model() {
        let xs: Vec<f64> = (0..200).map(|i| -1.0 + i as f64 * 0.01).collect();
        let ys: Vec<Complex64> = xs.iter().map(|&x| lobe(x, 0.123, 0.17, 40.0)).collect();
        let fit = fit_gaussian_envelope(&xs, &ys, None).unwrap();
        assert!((fit.center - 0.123).abs() < 1e-8);
        assert!((fit.width - 0.17).abs() < 1e-8);
        assert!((fit.phase_slope - 40.0).abs() < 1e-8);
    }

    #[test]
    fn two_lobes_rejected() {
        let xs: Vec<f64> = (0..200).map(|i| -1.0 + i as f64 * 0.01).collect();
        let ys: Vec<Complex64> = xs
            .iter()
            .map(|&x| lobe(x, -0.5, 0.08, 10.0) + lobe(x, 0.5, 0.08, 10.0) * 0.8)
            .collect();
        assert!(matches!(
            fit_gaussian_envelope(&xs, &ys, None),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn flat_rejected() {
        let xs: Vec<f64> = (0..20).map(f64::from).collect();
        let ys = vec![Complex64::new(0.0, 0.0); 20];
        assert!(fit_gaussian_envelope(&xs, &ys, None).is_err());
    }
}
