//! Real functions sampled on a uniform grid over `[0, pi]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Number of grid points used when none is given.
///
/// Resolves oscillations up to n = 60 with about 30 points per wavelength.
pub const DEFAULT_POINTS: usize = 2049;

/// Samples `values[i] = f(i * pi / (n_points - 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at index {i}")));
        }
        Ok(Self { values })
    }

    pub fn from_fn(n_points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = step_for(n_points);
        Self::new((0..n_points).map(|i| f(i as f64 * h)).collect())
    }

    pub fn constant(n_points: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n_points])
    }

    pub fn zeros(n_points: usize) -> Result<Self> {
        Self::constant(n_points, 0.0)
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid spacing `pi / (n_points - 1)`.
    pub fn step(&self) -> f64 {
        step_for(self.n_points())
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        (0..self.n_points()).map(move |i| i as f64 * h)
    }

    /// Trapezoid approximation of the integral over `[0, pi]`.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.step())
    }

    /// `omega = (1/2) * integral of q over [0, pi]`.
    pub fn half_integral(&self) -> f64 {
        0.5 * self.integral()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise `self + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v + c).collect() }
    }

    /// L2 norm on `[0, pi]` by the trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        trapezoid(&sq, self.step()).sqrt()
    }

    /// L2 distance to `other`; both must live on the same grid.
    pub fn l2_distance(&self, other: &GridFunction) -> Result<f64> {
        self.ensure_same_grid(other)?;
        let sq: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .collect();
        Ok(trapezoid(&sq, self.step()).sqrt())
    }

    pub fn ensure_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.n_points() != other.n_points() {
            return Err(Error::InvalidGrid(format!(
                "grid mismatch: {} vs {} points",
                self.n_points(),
                other.n_points()
            )));
        }
        Ok(())
    }
}

pub fn step_for(n_points: usize) -> f64 {
    PI / (n_points as f64 - 1.0)
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Trapezoid quadrature weights on `n_points` uniform nodes over `[0, pi]`.
pub fn trapezoid_weights(n_points: usize) -> Vec<f64> {
    let h = step_for(n_points);
    let mut w = vec![h; n_points];
    w[0] = 0.5 * h;
    w[n_points - 1] = 0.5 * h;
    w
}
