//! Counter-based Monte Carlo sampling of detector shots from a count lattice.
//!
//! Shot k of stream s under master seed S always consumes the same three
//! 64-bit words of ChaCha8(S, stream s), so any partition of the shots over
//! workers yields identical records.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quasiprob::CountLattice;

/// 32-bit words consumed per shot.
const WORDS_PER_SHOT: u128 = 6;
/// Shots per independently seeded work unit.
const CHUNK: usize = 1 << 15;

/// One detector realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShotRecord {
    #[serde(rename = "dt_ps")]
    pub delay_ps: f64,
    #[serde(rename = "dnX")]
    pub dn_x: i64,
    #[serde(rename = "dnY")]
    pub dn_y: i64,
}

/// Walker/Vose alias table over the flattened lattice.
#[derive(Debug, Clone)]
pub struct AliasTable {
    threshold: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        if n == 0 || n > u32::MAX as usize {
            return Err(Error::invalid("lattice", "alias table needs 1..2³² cells"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::invalid(
                "lattice",
                "weights must be non-negative with positive sum",
            ));
        }
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let mut small: Vec<u32> = Vec::new();
        let mut large: Vec<u32> = Vec::new();
        for (i, &p) in scaled.iter().enumerate() {
            if p < 1.0 {
                small.push(i as u32);
            } else {
                large.push(i as u32);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s as usize] = l;
            scaled[l as usize] -= 1.0 - scaled[s as usize];
            if scaled[l as usize] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            scaled[i as usize] = 1.0;
        }
        Ok(Self {
            threshold: scaled,
            alias,
        })
    }

    pub fn len(&self) -> usize {
        self.threshold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threshold.is_empty()
    }

    /// Cell from one uniform 64-bit column word and one acceptance word.
    pub fn pick(&self, column: u64, accept: u64) -> usize {
        let i = ((column as u128 * self.len() as u128) >> 64) as usize;
        let u = (accept >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u < self.threshold[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }
}

/// Draws shots from one lattice.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    lattice: &'a CountLattice,
    table: AliasTable,
}

impl<'a> Sampler<'a> {
    pub fn new(lattice: &'a CountLattice) -> Result<Self> {
        Ok(Self {
            lattice,
            table: AliasTable::new(&lattice.probabilities)?,
        })
    }

    fn rng(seed: u64, stream: u64, shot: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng.set_word_pos(shot as u128 * WORDS_PER_SHOT);
        rng
    }

    fn draw_one(&self, rng: &mut ChaCha8Rng) -> (i64, i64) {
        let column = rng.next_u64();
        let accept = rng.next_u64();
        let offset = rng.next_u64();
        let (ix, iy) = self.lattice.cell(self.table.pick(column, accept));
        let (x, y) = (&self.lattice.x, &self.lattice.y);
        if x.bin == 1 {
            return (x.cell_start(ix), y.cell_start(iy));
        }
        // Spread a binned cell uniformly over its integer counts.
        let b = x.bin as u64;
        let within = ((offset as u128 * (b * b) as u128) >> 64) as u64;
        (
            x.cell_start(ix) + (within / b) as i64,
            y.cell_start(iy) + (within % b) as i64,
        )
    }

    /// Count pairs of shots `first..first + shots` on `stream`.
    pub fn draw(&self, seed: u64, stream: u64, first: usize, shots: usize) -> Vec<(i64, i64)> {
        let mut rng = Self::rng(seed, stream, first);
        (0..shots).map(|_| self.draw_one(&mut rng)).collect()
    }

    /// All shots of a stream, generated in parallel chunks.
    pub fn draw_parallel(&self, seed: u64, stream: u64, shots: usize) -> Vec<(i64, i64)> {
        let chunks = shots.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let first = c * CHUNK;
                self.draw(seed, stream, first, CHUNK.min(shots - first))
            })
            .collect()
    }

    /// Streaming sums of the shots, without materializing them.
    pub fn accumulate(&self, seed: u64, stream: u64, shots: usize) -> CountSums {
        let chunks = shots.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let first = c * CHUNK;
                let mut rng = Self::rng(seed, stream, first);
                let mut sums = CountSums::default();
                for _ in 0..CHUNK.min(shots - first) {
                    let (x, y) = self.draw_one(&mut rng);
                    sums.push(x, y);
                }
                sums
            })
            .reduce(CountSums::default, CountSums::merge)
    }
}

/// i.i.d. shots at one delay; `stream` separates delays and phase settings.
pub fn sample(
    lattice: &CountLattice,
    shots: usize,
    seed: u64,
    stream: u64,
    delay_ps: f64,
) -> Result<Vec<ShotRecord>> {
    let sampler = Sampler::new(lattice)?;
    Ok(sampler
        .draw_parallel(seed, stream, shots)
        .into_iter()
        .map(|(dn_x, dn_y)| ShotRecord {
            delay_ps,
            dn_x,
            dn_y,
        })
        .collect())
}

/// Exact integer sums of counts; merging is associative and commutative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CountSums {
    pub shots: u64,
    pub sum_x: i128,
    pub sum_y: i128,
    pub sum_xx: i128,
    pub sum_yy: i128,
    pub sum_xy: i128,
}

impl CountSums {
    pub fn push(&mut self, x: i64, y: i64) {
        let (x, y) = (x as i128, y as i128);
        self.shots += 1;
        self.sum_x += x;
        self.sum_y += y;
        self.sum_xx += x * x;
        self.sum_yy += y * y;
        self.sum_xy += x * y;
    }

    pub fn merge(self, o: Self) -> Self {
        CountSums {
            shots: self.shots + o.shots,
            sum_x: self.sum_x + o.sum_x,
            sum_y: self.sum_y + o.sum_y,
            sum_xx: self.sum_xx + o.sum_xx,
            sum_yy: self.sum_yy + o.sum_yy,
            sum_xy: self.sum_xy + o.sum_xy,
        }
    }

    pub fn from_records(records: &[ShotRecord]) -> Self {
        records.iter().fold(Self::default(), |mut s, r| {
            s.push(r.dn_x, r.dn_y);
            s
        })
    }

    pub fn mean(&self) -> (f64, f64) {
        let n = self.shots as f64;
        (self.sum_x as f64 / n, self.sum_y as f64 / n)
    }

    /// Unbiased sample variances (x, y).
    pub fn variance(&self) -> (f64, f64) {
        let n = self.shots as i128;
        let var = |s: i128, ss: i128| {
            // n·Σx² − (Σx)² is exact in integers.
            (n * ss - s * s) as f64 / (n as f64 * (n as f64 - 1.0))
        };
        (var(self.sum_x, self.sum_xx), var(self.sum_y, self.sum_yy))
    }
}
