//! Edge Weyl functions `M_j = -S_j'(pi)/S_j(pi)` and the interpolation data
//! `g_nk = -sum_{j>=2} M_j(lambda_nk)` that `M_1` must match.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpectrumTable;
use crate::grid::GridFunction;
use crate::sl::{s_end_vanishes, BoundarySample, EdgePropagator};

/// More infinite `g_n1` than this aborts the inverse algorithm.
pub const MAX_EXCEPTIONAL: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeylValue {
    Finite(f64),
    /// `S(pi, lambda)` is numerically zero.
    Pole,
}

impl WeylValue {
    pub fn from_sample(b: BoundarySample, lambda: f64) -> Self {
        if s_end_vanishes(b.s_end, lambda) {
            WeylValue::Pole
        } else {
            WeylValue::Finite(-b.s_prime_end / b.s_end)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            WeylValue::Finite(v) => Some(v),
            WeylValue::Pole => None,
        }
    }

    pub fn is_pole(self) -> bool {
        matches!(self, WeylValue::Pole)
    }
}

pub fn weyl_function(q: &GridFunction, lambda: f64) -> Result<WeylValue> {
    let b = EdgePropagator::new(q).endpoint(lambda)?;
    Ok(WeylValue::from_sample(b, lambda))
}

/// The two eigenvalue subsequences given to the inverse problem:
/// `lambda_n1` and `lambda_n2` for `n = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PartialSpectrum {
    pub family1: Vec<f64>,
    pub family2: Vec<f64>,
}

impl PartialSpectrum {
    pub fn new(family1: Vec<f64>, family2: Vec<f64>) -> Self {
        Self { family1, family2 }
    }

    /// `lambda_n1` for `n <= n_max + 1` and `lambda_n2` for `n <= n_max`,
    /// which is what a moment system truncated at `n_max` consumes.
    pub fn from_table(table: &SpectrumTable, n_max: usize) -> Result<Self> {
        let f1 = table.family(1);
        let f2 = table.family(2);
        if f1.len() < n_max + 1 {
            return Err(Error::MissingEigenvalue { n: f1.len() + 1, k: 1 });
        }
        if f2.len() < n_max {
            return Err(Error::MissingEigenvalue { n: f2.len() + 1, k: 2 });
        }
        Ok(Self { family1: f1[..=n_max].to_vec(), family2: f2[..n_max].to_vec() })
    }

    /// `(n, k, lambda)` for both families, family 1 first.
    pub fn labelled(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let a = self.family1.iter().enumerate().map(|(i, &l)| (i + 1, 1, l));
        let b = self.family2.iter().enumerate().map(|(i, &l)| (i + 1, 2, l));
        a.chain(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GValue {
    Finite(f64),
    /// Exactly one known edge has `S_j(pi, lambda) = 0`, which forces
    /// `S_1(pi, lambda) = 0` at an eigenvalue: `M_1` has a pole there.
    Infinite,
}

impl GValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            GValue::Finite(v) => Some(v),
            GValue::Infinite => None,
        }
    }
}

/// `g_nk` for `k = 1, 2`, indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GTable {
    pub family1: Vec<GValue>,
    pub family2: Vec<GValue>,
}

impl GTable {
    pub fn get(&self, n: usize, k: usize) -> Option<GValue> {
        let fam = match k {
            1 => &self.family1,
            2 => &self.family2,
            _ => return None,
        };
        n.checked_sub(1).and_then(|i| fam.get(i)).copied()
    }

    pub fn labelled(&self) -> impl Iterator<Item = (usize, usize, GValue)> + '_ {
        let a = self.family1.iter().enumerate().map(|(i, &g)| (i + 1, 1, g));
        let b = self.family2.iter().enumerate().map(|(i, &g)| (i + 1, 2, g));
        a.chain(b)
    }
}

/// `g` at one `lambda` from the known edges `q_2..q_m`.
pub fn g_at(tail: &[EdgePropagator], lambda: f64, n: usize, k: usize) -> Result<GValue> {
    let mut vanishing = Vec::new();
    let mut sum = 0.0;
    for (idx, p) in tail.iter().enumerate() {
        let b = p.endpoint(lambda)?;
        if s_end_vanishes(b.s_end, lambda) {
            vanishing.push(idx + 2);
        } else {
            sum += b.s_prime_end / b.s_end;
        }
    }
    match vanishing.as_slice() {
        [] => Ok(GValue::Finite(sum)),
        [_] => Ok(GValue::Infinite),
        [j, ..] => Err(Error::AssumptionThreeViolation { edge: *j, n, k }),
    }
}

/// Computes `g_nk = -sum_{j=2}^m M_j(lambda_nk)` from the known potentials.
///
/// When two or more known edges vanish at `lambda_nk` the eigenvalue says
/// nothing about `q_1` and the call fails with
/// [`Error::AssumptionThreeViolation`].
pub fn aggregate_g(tail: &[GridFunction], spectra: &PartialSpectrum) -> Result<GTable> {
    let props: Vec<EdgePropagator> = tail.iter().map(EdgePropagator::new).collect();
    let mut table = GTable::default();
    for (n, k, lambda) in spectra.labelled() {
        let g = g_at(&props, lambda, n, k)?;
        if k == 1 {
            table.family1.push(g);
        } else {
            table.family2.push(g);
        }
    }
    let exceptional = table.family1.iter().filter(|g| matches!(g, GValue::Infinite)).count();
    if exceptional > MAX_EXCEPTIONAL {
        return Err(Error::TooManyExceptional {
            count: exceptional,
            limit: MAX_EXCEPTIONAL,
            window: table.family1.len(),
        });
    }
    Ok(table)
}

/// Deviations from the large-`n` behaviour of `g`:
/// `g_n1 - (omega_hat - omega)` and `g_n2 / n^2 - 1/(omega - z_1)`.
/// Both should tend to zero; infinite entries give `NaN`.
pub fn g_asymptotic_deviation(
    table: &GTable,
    omega_hat: f64,
    omega: f64,
    z1: f64,
) -> (Vec<f64>, Vec<f64>) {
    let d1 = table
        .family1
        .iter()
        .map(|g| g.finite().map_or(f64::NAN, |v| v - (omega_hat - omega)))
        .collect();
    let d2 = table
        .family2
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let n2 = ((i + 1) * (i + 1)) as f64;
            g.finite().map_or(f64::NAN, |v| v / n2 - 1.0 / (omega - z1))
        })
        .collect();
    (d1, d2)
}
