//! Probability table over the photon-count differences (Δn_X, Δn_Y).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;

use super::moments::predicted_moments;
use super::qpd::GaussianQpd;
use crate::coefficients::CoefficientPair;
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::model::MirState;

/// Cell budget; larger extents are coarsened by integer binning.
pub const MAX_CELLS: usize = 4_000_000;
/// Largest probability mass the extent may leave out.
pub const TRUNCATION_LIMIT: f64 = 1e-3;
/// Magic line opening the binary lattice format.
pub const BINARY_MAGIC: &[u8; 8] = b"EOSLAT1\n";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LatticeExtent {
    /// Mean ± n_sigma standard deviations per axis.
    Auto { n_sigma: f64 },
    /// Inclusive count ranges.
    Explicit { dn_x: (i64, i64), dn_y: (i64, i64) },
}

impl Default for LatticeExtent {
    fn default() -> Self {
        LatticeExtent::Auto { n_sigma: 8.0 }
    }
}

/// One lattice axis: `count` cells of `bin` consecutive integers from `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatticeAxis {
    pub start: i64,
    pub count: usize,
    pub bin: i64,
}

impl LatticeAxis {
    fn covering(lo: i64, hi: i64, bin: i64) -> Self {
        let span = hi - lo + 1;
        let count = ((span + bin - 1) / bin) as usize;
        // Center the binned range on the requested one.
        let start = lo - (count as i64 * bin - span) / 2;
        LatticeAxis { start, count, bin }
    }

    /// Smallest count in cell `i`.
    pub fn cell_start(&self, i: usize) -> i64 {
        self.start + i as i64 * self.bin
    }

    /// Mean count of cell `i`.
    pub fn representative(&self, i: usize) -> f64 {
        self.cell_start(i) as f64 + 0.5 * (self.bin - 1) as f64
    }

    pub fn last(&self) -> i64 {
        self.cell_start(self.count - 1) + self.bin - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
    pub skew_x: f64,
    pub skew_y: f64,
}

impl LatticeMoments {
    /// Larger over smaller eigenvalue of the (Δn_X, Δn_Y) covariance.
    pub fn eigenvalue_ratio(&self) -> f64 {
        let mean = 0.5 * (self.var_x + self.var_y);
        let gap = (0.25 * (self.var_x - self.var_y).powi(2) + self.cov_xy.powi(2)).sqrt();
        (mean + gap) / (mean - gap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountLattice {
    pub state: &'static str,
    pub x: LatticeAxis,
    pub y: LatticeAxis,
    /// Row-major table, index `ix * y.count + iy`; sums to one.
    pub probabilities: Vec<f64>,
    pub beta_x: f64,
    pub beta_y: f64,
    pub s_tilde: f64,
    /// N = csch²θ⁽¹⁾/2.
    pub prefactor: f64,
    /// z = z_scale·(Δn_X/|β_X| + iΔn_Y/|β_Y|).
    pub z_scale: f64,
    /// Mass outside the extent before renormalization.
    pub truncated_mass: f64,
    /// p = table_scale · N·ρ̃(z(Δn)) on every cell.
    pub table_scale: f64,
}

fn gain(decomp: &Decomposition, beta: f64) -> f64 {
    std::f64::consts::SQRT_2 * decomp.strength.sinh() * beta
}

fn auto_range(mean: f64, sd: f64, n_sigma: f64) -> (i64, i64) {
    let half = n_sigma * sd;
    ((mean - half).floor() as i64, (mean + half).ceil() as i64)
}

/// Builds p(Δn_X, Δn_Y) ∝ ρ̃_SA(z(Δn); s̃) for one coefficient pair.
pub fn count_lattice(
    state: &MirState,
    decomp: &Decomposition,
    coeffs: CoefficientPair,
    extent: LatticeExtent,
) -> Result<CountLattice> {
    let probe = &decomp.setup().probe;
    probe.require_balanced_pair()?;
    if !(decomp.strength > 0.0) {
        return Err(Error::invalid("pump.amplitude", "θ⁽¹⁾ must be positive"));
    }
    let beta_x = probe.band_amplitude(0).norm();
    let beta_y = probe.band_amplitude(1).norm();
    let qpd = GaussianQpd::new(state, decomp, coeffs, decomp.s_tilde, decomp.s_tilde)?;
    let (gx, gy) = (gain(decomp, beta_x), gain(decomp, beta_y));

    let (rx, ry) = match extent {
        LatticeExtent::Explicit { dn_x, dn_y } => {
            if dn_x.0 > dn_x.1 || dn_y.0 > dn_y.1 {
                return Err(Error::invalid("lattice.extent", "empty count range"));
            }
            (dn_x, dn_y)
        }
        LatticeExtent::Auto { n_sigma } => {
            if !(n_sigma > 0.0) {
                return Err(Error::invalid("lattice.n_sigma", "must be positive"));
            }
            match predicted_moments(state, decomp, coeffs) {
                Ok(m) => (
                    auto_range(m.x.count_mean, m.x.count_variance.sqrt(), n_sigma),
                    auto_range(m.y.count_mean, m.y.count_variance.sqrt(), n_sigma),
                ),
                Err(Error::UnsupportedMoments(_)) => {
                    let (x0, x1, y0, y1) = qpd.bounding_box(n_sigma);
                    (
                        ((x0 * gx).floor() as i64, (x1 * gx).ceil() as i64),
                        ((y0 * gy).floor() as i64, (y1 * gy).ceil() as i64),
                    )
                }
                Err(e) => return Err(e),
            }
        }
    };

    let (nx, ny) = ((rx.1 - rx.0 + 1) as f64, (ry.1 - ry.0 + 1) as f64);
    let mut bin = (nx * ny / MAX_CELLS as f64).sqrt().ceil().max(1.0) as i64;
    while (((nx as i64 + bin - 1) / bin) * ((ny as i64 + bin - 1) / bin)) as usize > MAX_CELLS {
        bin += 1;
    }
    let x = LatticeAxis::covering(rx.0, rx.1, bin);
    let y = LatticeAxis::covering(ry.0, ry.1, bin);

    let z_scale = 1.0 / (std::f64::consts::SQRT_2 * decomp.strength.sinh());
    let raw: Vec<f64> = (0..x.count)
        .into_par_iter()
        .flat_map_iter(|ix| {
            let zx = z_scale * x.representative(ix) / beta_x;
            let qpd = &qpd;
            (0..y.count).map(move |iy| {
                let zy = z_scale * y.representative(iy) / beta_y;
                qpd.density(Complex64::new(zx, zy)).max(0.0)
            })
        })
        .collect();

    // Each cell is a Riemann element of the unit-mass continuum density.
    let cell_area = (z_scale * z_scale / (beta_x * beta_y)) * (bin * bin) as f64;
    let mass: f64 = raw.iter().sum::<f64>() * cell_area;
    let truncated_mass = 1.0 - mass;
    if !(truncated_mass < TRUNCATION_LIMIT) || !(mass > 0.0) {
        return Err(Error::ExtentTooSmall { truncated_mass });
    }
    let total: f64 = raw.iter().sum();
    let prefactor = decomp.prefactor;
    let probabilities = raw.iter().map(|r| r / total).collect();

    Ok(CountLattice {
        state: state.name(),
        x,
        y,
        probabilities,
        beta_x,
        beta_y,
        s_tilde: decomp.s_tilde,
        prefactor,
        z_scale,
        truncated_mass,
        table_scale: 1.0 / (total * prefactor),
    })
}

impl CountLattice {
    pub fn cells(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probability(&self, ix: usize, iy: usize) -> f64 {
        self.probabilities[ix * self.y.count + iy]
    }

    /// Cell indices of a flat table index.
    pub fn cell(&self, flat: usize) -> (usize, usize) {
        (flat / self.y.count, flat % self.y.count)
    }

    /// Lattice point z(Δn) for real-valued counts.
    pub fn z(&self, dn_x: f64, dn_y: f64) -> Complex64 {
        Complex64::new(
            self.z_scale * dn_x / self.beta_x,
            self.z_scale * dn_y / self.beta_y,
        )
    }

    /// Whether an integer count pair lies inside the table.
    pub fn contains(&self, dn_x: i64, dn_y: i64) -> bool {
        (self.x.start..=self.x.last()).contains(&dn_x)
            && (self.y.start..=self.y.last()).contains(&dn_y)
    }

    /// Moments of the table; each binned cell is spread uniformly over its
    /// integer counts.
    pub fn moments(&self) -> LatticeMoments {
        let mut s = [0.0f64; 2];
        for ix in 0..self.x.count {
            let dx = self.x.representative(ix);
            for iy in 0..self.y.count {
                let p = self.probability(ix, iy);
                s[0] += p * dx;
                s[1] += p * self.y.representative(iy);
            }
        }
        let (mx, my) = (s[0], s[1]);
        let (mut vxx, mut vyy, mut vxy, mut tx, mut ty) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ix in 0..self.x.count {
            let dx = self.x.representative(ix) - mx;
            for iy in 0..self.y.count {
                let dy = self.y.representative(iy) - my;
                let p = self.probability(ix, iy);
                vxx += p * dx * dx;
                vyy += p * dy * dy;
                vxy += p * dx * dy;
                tx += p * dx * dx * dx;
                ty += p * dy * dy * dy;
            }
        }
        let within = ((self.x.bin * self.x.bin - 1) as f64) / 12.0;
        let (var_x, var_y) = (vxx + within, vyy + within);
        LatticeMoments {
            mean_x: mx,
            mean_y: my,
            var_x,
            var_y,
            cov_xy: vxy,
            skew_x: tx / var_x.powf(1.5),
            skew_y: ty / var_y.powf(1.5),
        }
    }

    /// RFC-4180 table with columns dnX, dnY, p (cell start counts when
    /// binned).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["dnX", "dnY", "p"])?;
        for ix in 0..self.x.count {
            for iy in 0..self.y.count {
                w.write_record([
                    self.x.cell_start(ix).to_string(),
                    self.y.cell_start(iy).to_string(),
                    format!("{:e}", self.probability(ix, iy)),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Dense little-endian f64 grid after a JSON header:
    /// magic, u32 header length, header, data.
    pub fn write_binary<W: Write>(&self, mut out: W, provenance: &serde_json::Value) -> Result<()> {
        let data: Vec<u8> = self
            .probabilities
            .iter()
            .flat_map(|p| p.to_le_bytes())
            .collect();
        let header = BinaryHeader {
            format: "row-major f64 little-endian, index ix*ny + iy",
            dimensions: [self.x.count, self.y.count],
            dn_x: [self.x.start, self.x.last()],
            dn_y: [self.y.start, self.y.last()],
            bin: self.x.bin,
            s_tilde: self.s_tilde,
            prefactor: self.prefactor,
            z_scale: self.z_scale,
            beta_x: self.beta_x,
            beta_y: self.beta_y,
            truncated_mass: self.truncated_mass,
            sha256: hex(&Sha256::digest(&data)),
            provenance,
        };
        let header = serde_json::to_vec(&header)?;
        let len = u32::try_from(header.len()).map_err(|_| Error::Overflow("lattice header"))?;
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&len.to_le_bytes())?;
        out.write_all(&header)?;
        out.write_all(&data)?;
        out.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct BinaryHeader<'a> {
    format: &'static str,
    dimensions: [usize; 2],
    dn_x: [i64; 2],
    dn_y: [i64; 2],
    bin: i64,
    s_tilde: f64,
    prefactor: f64,
    z_scale: f64,
    beta_x: f64,
    beta_y: f64,
    truncated_mass: f64,
    sha256: String,
    provenance: &'a serde_json::Value,
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
