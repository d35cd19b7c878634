//! The moment problem `(f, v_nk) = f_nk` for the Cauchy data `f = (N, K)` of
//! the transformation operator on edge 1, and its truncated least-squares
//! solution.
//!
//! Every row is a multiple of the product form
//! `P = [rho sin(rho t); g cos(rho t)]` with target
//! `T = -rho^2 cos(rho pi) - (omega + g) rho sin(rho pi) + omega g cos(rho pi)`,
//! which is the identity `S_1'(pi) + g S_1(pi) = 0` written in terms of
//! `(N, K)`. The family-1 rows divide by `rho`, the family-2 rows by `g`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{trapezoid_weights, GridFunction};
use crate::weyl::{GTable, GValue, PartialSpectrum};

/// A family-1 row is rescaled when `|g| / rho` exceeds this, a family-2 row
/// when `rho / |g|` does.
const RESCALE_RATIO: f64 = 1e3;

/// Gram matrices with `min_eig < BASIS_FLOOR * max_eig` are rejected.
pub const BASIS_FLOOR: f64 = 1e-6;

/// Relative tolerance for calling two input eigenvalues equal.
const DUPLICATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowForm {
    /// `[sin; (g/rho) cos]` for family 1, `[(rho/g) sin; cos]` for family 2.
    Standard,
    /// The product form scaled to unit norm, used when `g` is near zero for
    /// family 2 or very large for family 1.
    Unnormalized,
    /// `g` infinite: the limit direction `[0; cos(rho t)]`, which reduces to
    /// `[0; 1]` for the constant row.
    ConstantK2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub top: GridFunction,
    pub bottom: GridFunction,
    pub label: (usize, usize),
    pub form: RowForm,
}

impl MomentVector {
    /// Inner product in `L2 + L2` by the trapezoid rule.
    pub fn dot(&self, top: &[f64], bottom: &[f64]) -> f64 {
        let w = trapezoid_weights(self.top.n_points());
        let mut s = 0.0;
        for i in 0..w.len() {
            s += w[i] * (self.top.values()[i] * top[i] + self.bottom.values()[i] * bottom[i]);
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.dot(self.top.values(), self.bottom.values()).sqrt()
    }

    pub fn distance(&self, other: &MomentVector) -> f64 {
        let dt: Vec<f64> = self.top.values().iter().zip(other.top.values()).map(|(a, b)| a - b).collect();
        let db: Vec<f64> =
            self.bottom.values().iter().zip(other.bottom.values()).map(|(a, b)| a - b).collect();
        let w = trapezoid_weights(dt.len());
        (0..w.len()).map(|i| w[i] * (dt[i] * dt[i] + db[i] * db[i])).sum::<f64>().sqrt()
    }

    fn scaled(mut self, c: f64) -> Self {
        self.top = GridFunction::new(self.top.values().iter().map(|v| v * c).collect())
            .expect("finite scaling");
        self.bottom = GridFunction::new(self.bottom.values().iter().map(|v| v * c).collect())
            .expect("finite scaling");
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTarget {
    pub value: f64,
    pub label: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSystem {
    pub vectors: Vec<MomentVector>,
    pub targets: Vec<MomentTarget>,
    pub n_max: usize,
    pub omega: f64,
}

impl MomentSystem {
    pub fn n_points(&self) -> usize {
        self.vectors[0].top.n_points()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Multiplies row `i` (vector and target) by `c`.
    pub fn scale_row(&mut self, i: usize, c: f64) {
        let v = self.vectors[i].clone().scaled(c);
        self.vectors[i] = v;
        self.targets[i].value *= c;
    }

    /// Row index of label `(n, k)`.
    pub fn row(&self, n: usize, k: usize) -> Option<usize> {
        self.vectors.iter().position(|v| v.label == (n, k))
    }

    /// Rows sampled on the grid and multiplied by the square roots of the
    /// quadrature weights, so that the Euclidean product is the `H` product.
    fn weighted_matrix(&self) -> DMatrix<f64> {
        let np = self.n_points();
        let sw: Vec<f64> = trapezoid_weights(np).iter().map(|w| w.sqrt()).collect();
        DMatrix::from_fn(self.len(), 2 * np, |r, c| {
            let v = &self.vectors[r];
            if c < np {
                v.top.values()[c] * sw[c]
            } else {
                v.bottom.values()[c - np] * sw[c - np]
            }
        })
    }
}

/// Cauchy data `(N, K)` of edge 1 together with `omega = omega_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub n_func: GridFunction,
    pub k_func: GridFunction,
    pub omega: f64,
}

impl CauchyData {
    pub fn zero(n_points: usize) -> Result<Self> {
        Ok(Self {
            n_func: GridFunction::zeros(n_points)?,
            k_func: GridFunction::zeros(n_points)?,
            omega: 0.0,
        })
    }

    /// `||f||_H`.
    pub fn norm(&self) -> f64 {
        let a = self.n_func.l2_norm();
        let b = self.k_func.l2_norm();
        (a * a + b * b).sqrt()
    }

    pub fn distance(&self, other: &CauchyData) -> Result<f64> {
        let a = self.n_func.l2_distance(&other.n_func)?;
        let b = self.k_func.l2_distance(&other.k_func)?;
        Ok((a * a + b * b).sqrt())
    }
}

fn trig_vector(n_points: usize, rho: f64, a: f64, b: f64) -> Result<(GridFunction, GridFunction)> {
    let top = GridFunction::from_fn(n_points, |t| a * (rho * t).sin())?;
    let bottom = GridFunction::from_fn(n_points, |t| b * (rho * t).cos())?;
    Ok((top, bottom))
}

fn product_row(
    n_points: usize,
    lambda: f64,
    g: GValue,
    omega: f64,
    label: (usize, usize),
) -> Result<(MomentVector, MomentTarget)> {
    let (n, k) = label;
    let rho = lambda.sqrt();
    let (s, c) = ((rho * std::f64::consts::PI).sin(), (rho * std::f64::consts::PI).cos());
    let g = match g {
        GValue::Infinite => {
            let (top, bottom) = trig_vector(n_points, rho, 0.0, 1.0)?;
            let v = MomentVector { top, bottom, label, form: RowForm::ConstantK2 };
            let t = MomentTarget { value: -rho * s + omega * c, label };
            return Ok((v, t));
        }
        GValue::Finite(g) => g,
    };
    let target = -rho * rho * c - (omega + g) * rho * s + omega * g * c;
    let standard = match k {
        1 => g.abs() <= RESCALE_RATIO * rho,
        _ => rho <= RESCALE_RATIO * g.abs(),
    };
    let scale = match (standard, k) {
        (true, 1) => 1.0 / rho,
        (true, _) => 1.0 / g,
        // normalised below
        (false, _) => 1.0,
    };
    let (top, bottom) = trig_vector(n_points, rho, rho * scale, g * scale)?;
    let mut v = MomentVector {
        top,
        bottom,
        label: (n, k),
        form: if standard { RowForm::Standard } else { RowForm::Unnormalized },
    };
    let mut t = MomentTarget { value: target * scale, label };
    if !standard {
        let norm = v.norm();
        v = v.scaled(1.0 / norm);
        t.value /= norm;
    }
    Ok((v, t))
}

/// Builds the `2 n_max + 2` rows: `(n, 1)` for `n = 0..=n_max` from
/// `lambda_{n+1,1}`, then `(0, 2)` and `(n, 2)` for `n = 1..=n_max`.
pub fn build_moment_system(
    spectra: &PartialSpectrum,
    g: &GTable,
    omega: f64,
    n_max: usize,
    n_points: usize,
) -> Result<MomentSystem> {
    if spectra.family1.len() < n_max + 1 {
        return Err(Error::MissingEigenvalue { n: spectra.family1.len() + 1, k: 1 });
    }
    if spectra.family2.len() < n_max {
        return Err(Error::MissingEigenvalue { n: spectra.family2.len() + 1, k: 2 });
    }
    let mut vectors = Vec::with_capacity(2 * n_max + 2);
    let mut targets = Vec::with_capacity(2 * n_max + 2);
    for n in 1..=n_max + 1 {
        let lambda = spectra.family1[n - 1];
        if lambda.is_nan() || lambda <= 0.0 {
            return Err(Error::NonPositiveEigenvalue { n, k: 1, lambda });
        }
        let gv = g.get(n, 1).ok_or(Error::MissingEigenvalue { n, k: 1 })?;
        let (v, t) = product_row(n_points, lambda, gv, omega, (n - 1, 1))?;
        vectors.push(v);
        targets.push(t);
    }
    vectors.push(MomentVector {
        top: GridFunction::zeros(n_points)?,
        bottom: GridFunction::constant(n_points, 1.0)?,
        label: (0, 2),
        form: RowForm::Standard,
    });
    targets.push(MomentTarget { value: omega, label: (0, 2) });
    for n in 1..=n_max {
        let lambda = spectra.family2[n - 1];
        if lambda.is_nan() || lambda <= 0.0 {
            return Err(Error::NonPositiveEigenvalue { n, k: 2, lambda });
        }
        let gv = g.get(n, 2).ok_or(Error::MissingEigenvalue { n, k: 2 })?;
        let (v, t) = product_row(n_points, lambda, gv, omega, (n, 2))?;
        vectors.push(v);
        targets.push(t);
    }
    Ok(MomentSystem { vectors, targets, n_max, omega })
}

/// `v0_n1 = [sin((n + 1/2) t); 0]`, `v0_n2 = [0; cos(n t)]`.
pub fn reference_basis(n: usize, k: usize, n_points: usize) -> Result<MomentVector> {
    let (top, bottom) = match k {
        1 => trig_vector(n_points, n as f64 + 0.5, 1.0, 0.0)?,
        2 => trig_vector(n_points, n as f64, 0.0, 1.0)?,
        _ => return Err(Error::InvalidProblem(format!("family k = {k} has no reference vector"))),
    };
    Ok(MomentVector { top, bottom, label: (n, k), form: RowForm::Standard })
}

/// The reference vectors in the row order of [`build_moment_system`].
pub fn reference_system(n_max: usize, n_points: usize) -> Result<MomentSystem> {
    let mut vectors = Vec::with_capacity(2 * n_max + 2);
    for n in 0..=n_max {
        vectors.push(reference_basis(n, 1, n_points)?);
    }
    for n in 0..=n_max {
        vectors.push(reference_basis(n, 2, n_points)?);
    }
    let targets = vectors.iter().map(|v| MomentTarget { value: 0.0, label: v.label }).collect();
    Ok(MomentSystem { vectors, targets, n_max, omega: 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub min_eig: f64,
    pub max_eig: f64,
    /// `sqrt(sum ||v_nk - v0_nk||^2)`.
    pub l2_distance_to_reference: f64,
}

/// `||v_nk - v0_nk||^2` per row, in row order.
pub fn reference_distances(system: &MomentSystem) -> Result<Vec<f64>> {
    let np = system.n_points();
    system
        .vectors
        .iter()
        .map(|v| {
            let r = reference_basis(v.label.0, v.label.1, np)?;
            let d = v.distance(&r);
            Ok(d * d)
        })
        .collect()
}

fn duplicate_rows(system: &MomentSystem) -> Option<((usize, usize), (usize, usize))> {
    let unit: Vec<Vec<f64>> = system
        .vectors
        .iter()
        .map(|v| {
            let nrm = v.norm();
            v.top.values().iter().chain(v.bottom.values()).map(|x| x / nrm).collect()
        })
        .collect();
    for i in 0..unit.len() {
        for j in i + 1..unit.len() {
            let same = unit[i].iter().zip(&unit[j]).all(|(a, b)| (a - b).abs() <= DUPLICATE_TOL);
            let opposite = unit[i].iter().zip(&unit[j]).all(|(a, b)| (a + b).abs() <= DUPLICATE_TOL);
            if same || opposite {
                return Some((system.vectors[i].label, system.vectors[j].label));
            }
        }
    }
    None
}

/// Extreme eigenvalues of the Gram matrix `(v_i, v_j)_H` and the distance to
/// the reference basis.
pub fn gram_condition_report(system: &MomentSystem) -> Result<GramReport> {
    let a = system.weighted_matrix();
    let gram = &a * a.transpose();
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let min_eig = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = BASIS_FLOOR * max_eig;
    if min_eig.is_nan() || floor.is_nan() || min_eig < floor {
        let cause = match duplicate_rows(system) {
            Some((a, b)) => format!(
                "rows ({}, {}) and ({}, {}) coincide; assumption (i) (distinct eigenvalues) violated",
                a.0, a.1, b.0, b.1
            ),
            None => "Gram matrix numerically singular".to_string(),
        };
        return Err(Error::NotABasis { min_eig, max_eig, cause });
    }
    let l2 = reference_distances(system)?.iter().sum::<f64>().sqrt();
    Ok(GramReport { min_eig, max_eig, l2_distance_to_reference: l2 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSolution {
    pub cauchy: CauchyData,
    /// `(f, v_i)_H - f_i` per row.
    pub residuals: Vec<f64>,
    pub gram: GramReport,
}

impl MomentSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `sqrt(sum residual^2)`.
    pub fn residual_norm(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum::<f64>().sqrt()
    }
}

/// Minimum-norm `f` with `(f, v_i)_H = f_i` on all rows, computed from a QR
/// factorisation of the weighted row matrix.
pub fn solve_moments(system: &MomentSystem) -> Result<MomentSolution> {
    let gram = gram_condition_report(system)?;
    let np = system.n_points();
    let a = system.weighted_matrix();
    let b = DVector::from_iterator(system.len(), system.targets.iter().map(|t| t.value));

    // A^T = Q R, so A x = b with x = Q y becomes R^T y = b.
    let qr = a.transpose().qr();
    let (q, r) = (qr.q(), qr.r());
    let y = r.transpose().solve_lower_triangular(&b).ok_or_else(|| Error::NotABasis {
        min_eig: gram.min_eig,
        max_eig: gram.max_eig,
        cause: "triangular factor is singular".to_string(),
    })?;
    let x = &q * y;

    let w = trapezoid_weights(np);
    let n_vals: Vec<f64> = (0..np).map(|i| x[i] / w[i].sqrt()).collect();
    let k_vals: Vec<f64> = (0..np).map(|i| x[np + i] / w[i].sqrt()).collect();

    let residuals: Vec<f64> = system
        .vectors
        .iter()
        .zip(&system.targets)
        .map(|(v, t)| v.dot(&n_vals, &k_vals) - t.value)
        .collect();
    let target_norm = b.norm();
    let res_norm = residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
    let limit = 1e-4 * target_norm.max(f64::MIN_POSITIVE);
    if res_norm > limit && res_norm > 1e-12 {
        return Err(Error::IllConditioned { residual: res_norm, limit });
    }
    let cauchy = CauchyData {
        n_func: GridFunction::new(n_vals)?,
        k_func: GridFunction::new(k_vals)?,
        omega: system.omega,
    };
    Ok(MomentSolution { cauchy, residuals, gram })
}
