use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Uniform abscissa `start + i·step`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || count < 2 || !start.is_finite() {
            return Err(Error::invalid("grid", "requires step > 0 and count ≥ 2"));
        }
        Ok(Self { start, step, count })
    }

    /// `count` points spanning [lo, hi] inclusive.
    pub fn linspace(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return Err(Error::invalid("grid", "requires hi > lo and count ≥ 2"));
        }
        Self::new(lo, (hi - lo) / (count - 1) as f64, count)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }
}

/// Complex samples of a mode function on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexGridFunction {
    pub grid: UniformGrid,
    pub values: Vec<Complex64>,
}

impl ComplexGridFunction {
    pub fn sample<F: Fn(f64) -> Complex64>(grid: UniformGrid, f: F) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    /// Composite Simpson sum of `g(x, f(x))` (trapezoid on a trailing odd panel).
    pub fn simpson<G: Fn(f64, Complex64) -> Complex64>(&self, g: G) -> Complex64 {
        simpson_sum(self.values.len(), self.grid.step, |i| {
            g(self.grid.point(i), self.values[i])
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.simpson(|_, v| Complex64::new(v.norm_sqr(), 0.0)).re
    }

    /// ∫ self·conj(other) on a shared grid.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::invalid(
                "grid",
                "inner product of functions on different grids",
            ));
        }
        Ok(simpson_sum(self.values.len(), self.grid.step, |i| {
            self.values[i] * other.values[i].conj()
        }))
    }
}

fn simpson_sum(n: usize, h: f64, term: impl Fn(usize) -> Complex64) -> Complex64 {
    let panels = if (n - 1) % 2 == 0 { n - 1 } else { n - 2 };
    let mut acc = Complex64::new(0.0, 0.0);
    if panels >= 2 {
        acc += term(0) + term(panels);
        for i in 1..panels {
            acc += term(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc *= h / 3.0;
    }
    if panels < n - 1 {
        acc += (term(n - 2) + term(n - 1)) * (0.5 * h);
    }
    acc
}
