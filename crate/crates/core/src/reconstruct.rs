//! From Cauchy data to the potential on edge 1: the endpoint functions
//! `S_1(pi, lambda)`, `S_1'(pi, lambda)`, their zeros (a Dirichlet and a mixed
//! spectrum) and a cosine-series fit of `q_1` to those two spectra.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::estimate_omega_hat;
use crate::grid::{trapezoid_weights, GridFunction};
use crate::moments::{build_moment_system, solve_moments, CauchyData};
use crate::roots::{scan_roots, sigma_of, SCAN_STEP};
use crate::sl::{sin_cos_entire, sin_entire, BoundarySample, EdgePropagator, EndCondition};
use crate::weyl::{aggregate_g, GValue, PartialSpectrum, WeylValue};

use std::f64::consts::PI;

/// Default number of cosine modes in the potential fit.
pub const DEFAULT_BASIS_DIM: usize = 12;

/// Finite-difference step for the fit Jacobian.
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointFunctions {
    cauchy: CauchyData,
    weights: Vec<f64>,
    ts: Vec<f64>,
}

/// Validates `cd` and re-projects `K` so that its integral equals `omega`.
pub fn build_endpoint_functions(cd: CauchyData) -> Result<EndpointFunctions> {
    cd.n_func.ensure_same_grid(&cd.k_func)?;
    let gap = cd.k_func.integral() - cd.omega;
    if gap.abs() > 1e-6 * (1.0 + cd.omega.abs()) {
        return Err(Error::OmegaMismatch { mismatch: gap });
    }
    let k_func = cd.k_func.shifted(-gap / PI);
    let weights = trapezoid_weights(k_func.n_points());
    let ts = k_func.xs().collect();
    Ok(EndpointFunctions { cauchy: CauchyData { k_func, ..cd }, weights, ts })
}

impl EndpointFunctions {
    pub fn cauchy(&self) -> &CauchyData {
        &self.cauchy
    }

    /// `S_1(pi, lambda)` and `S_1'(pi, lambda)`.
    ///
    /// With `s(x) = sin(rho x)/rho` and `int K = omega`,
    /// `S_1 = s(pi) + int K(t) (cos(rho t) - cos(rho pi)) / rho^2 dt`
    /// `    = s(pi) + int K(t) 2 s((pi+t)/2) s((pi-t)/2) dt`,
    /// which stays finite at `lambda = 0`.
    pub fn evaluate(&self, lambda: f64) -> BoundarySample {
        let (s_pi, c_pi) = sin_cos_entire(lambda, PI);
        let kv = self.cauchy.k_func.values();
        let nv = self.cauchy.n_func.values();
        let mut ik = 0.0;
        let mut in_ = 0.0;
        for i in 0..self.ts.len() {
            let t = self.ts[i];
            let w = self.weights[i];
            ik += w * kv[i] * 2.0 * sin_entire(lambda, 0.5 * (PI + t)) * sin_entire(lambda, 0.5 * (PI - t));
            in_ += w * nv[i] * sin_entire(lambda, t);
        }
        BoundarySample {
            s_end: s_pi + ik,
            s_prime_end: c_pi + self.cauchy.omega * s_pi + in_,
        }
    }

    pub fn s1(&self, lambda: f64) -> f64 {
        self.evaluate(lambda).s_end
    }

    pub fn s1_prime(&self, lambda: f64) -> f64 {
        self.evaluate(lambda).s_prime_end
    }
}

/// `M_1(lambda) = -S_1'(pi, lambda) / S_1(pi, lambda)`.
pub fn weyl_m1(ef: &EndpointFunctions, lambda: f64) -> WeylValue {
    WeylValue::from_sample(ef.evaluate(lambda), lambda)
}

/// Zeros `mu_n` (`n >= 1`) of `S_1(pi, .)` and `nu_n` (`n >= 0`) of `S_1'(pi, .)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoSpectra {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

impl TwoSpectra {
    /// Checks `nu_0 < mu_1 < nu_1 < mu_2 < ...`.
    pub fn check_interlacing(&self) -> Result<()> {
        for (i, &m) in self.mu.iter().enumerate() {
            let below = self.nu.get(i).is_some_and(|&v| v < m);
            let above = self.nu.get(i + 1).is_none_or(|&v| m < v);
            if !below || !above {
                return Err(Error::InterlacingViolation(format!(
                    "mu_{} = {m} is not between nu_{i} and nu_{}",
                    i + 1,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// The spectra of the free equation shifted by `c`.
    pub fn shifted_free(count: usize, c: f64) -> Self {
        Self {
            mu: (1..=count).map(|n| (n * n) as f64 + c).collect(),
            nu: (0..count).map(|n| (n as f64 + 0.5).powi(2) + c).collect(),
        }
    }
}

/// A `lambda` below every zero of both endpoint functions: far enough left
/// that both are within a factor of their free counterparts.
fn lower_bound(ef: &EndpointFunctions) -> f64 {
    let mut lambda = -1.0;
    for _ in 0..60 {
        let b = ef.evaluate(lambda);
        let (s, c) = sin_cos_entire(lambda, PI);
        let rs = b.s_end / s;
        let rc = b.s_prime_end / c;
        if (0.5..1.5).contains(&rs) && (0.5..1.5).contains(&rc) {
            return lambda;
        }
        lambda *= 2.0;
    }
    lambda
}

/// The first `n_count` zeros of each endpoint function.
pub fn extract_two_spectra(ef: &EndpointFunctions, n_count: usize) -> Result<TwoSpectra> {
    let lo = sigma_of(lower_bound(ef));
    let mut hi = n_count as f64 + 1.0;
    let (mut mu, mut nu);
    loop {
        mu = scan_roots(|l| Ok(ef.s1(l)), lo, hi, SCAN_STEP)?;
        nu = scan_roots(|l| Ok(ef.s1_prime(l)), lo, hi, SCAN_STEP)?;
        if (mu.len() >= n_count && nu.len() >= n_count) || hi > 4.0 * (n_count as f64 + 4.0) {
            break;
        }
        hi += 2.0;
    }
    if mu.len() < n_count || nu.len() < n_count {
        return Err(Error::InterlacingViolation(format!(
            "found {} and {} zeros below sigma = {hi}, need {n_count}",
            mu.len(),
            nu.len()
        )));
    }
    mu.truncate(n_count);
    nu.truncate(n_count);
    let ts = TwoSpectra { mu, nu };
    ts.check_interlacing()?;
    Ok(ts)
}

fn cosine_series(coeffs: &[f64], n_points: usize) -> Result<GridFunction> {
    GridFunction::from_fn(n_points, |x| {
        coeffs[0] + coeffs[1..].iter().enumerate().map(|(i, c)| c * ((i + 1) as f64 * x).cos()).sum::<f64>()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialFit {
    /// `c_0, c_1, ..., c_basis_dim` of `q = c_0 + sum c_i cos(i x)`.
    pub coefficients: Vec<f64>,
    /// Sum of squared eigenvalue misfits.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub basis_dim: usize,
    pub max_iterations: usize,
    pub n_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { basis_dim: DEFAULT_BASIS_DIM, max_iterations: 40, n_points: crate::DEFAULT_POINTS }
    }
}

struct Forward {
    mu: Vec<f64>,
    nu: Vec<f64>,
}

impl Forward {
    fn compute(coeffs: &[f64], n_points: usize, warm: Option<&Forward>, count: usize) -> Result<Self> {
        let prop = EdgePropagator::new(&cosine_series(coeffs, n_points)?);
        let (mu, nu) = match warm {
            Some(w) => (
                prop.refine_eigenvalues(EndCondition::Dirichlet, &w.mu)?,
                prop.refine_eigenvalues(EndCondition::Neumann, &w.nu)?,
            ),
            None => (
                prop.first_eigenvalues(EndCondition::Dirichlet, count)?,
                prop.first_eigenvalues(EndCondition::Neumann, count)?,
            ),
        };
        Ok(Self { mu, nu })
    }

    fn residual(&self, ts: &TwoSpectra) -> DVector<f64> {
        let it = self.mu.iter().zip(&ts.mu).chain(self.nu.iter().zip(&ts.nu));
        DVector::from_iterator(ts.mu.len() + ts.nu.len(), it.map(|(a, b)| a - b))
    }
}

/// Gauss-Newton fit of `q = c_0 + sum_{i=1}^{basis_dim} c_i cos(i x)` to the
/// two spectra, with a forward-difference Jacobian and step halving.
pub fn fit_potential(ts: &TwoSpectra, opts: &FitOptions) -> Result<PotentialFit> {
    let count = ts.mu.len().min(ts.nu.len());
    let ts = TwoSpectra { mu: ts.mu[..count].to_vec(), nu: ts.nu[..count].to_vec() };
    let p = opts.basis_dim + 1;
    let mut c = vec![0.0; p];
    c[0] = ts.mu.iter().enumerate().map(|(i, m)| m - ((i + 1) * (i + 1)) as f64).sum::<f64>()
        / count.max(1) as f64;

    let mut fwd = Forward::compute(&c, opts.n_points, None, count)?;
    let mut r = fwd.residual(&ts);
    let mut rss = r.norm_squared();
    for iter in 1..=opts.max_iterations {
        if rss < 1e-8 {
            return Ok(PotentialFit { coefficients: c, residual: rss, iterations: iter - 1 });
        }
        let mut jac = DMatrix::zeros(r.len(), p);
        for j in 0..p {
            let mut cj = c.clone();
            cj[j] += FD_STEP;
            let f = Forward::compute(&cj, opts.n_points, Some(&fwd), count)?;
            let col = (f.residual(&ts) - &r) / FD_STEP;
            jac.set_column(j, &col);
        }
        let delta = jac
            .svd(true, true)
            .solve(&(-&r), 1e-12)
            .map_err(|_| Error::NoConvergence { iterations: iter, residual: rss })?;
        let mut t = 1.0;
        loop {
            let step: Vec<f64> = delta.iter().map(|d| t * d).collect();
            let step_norm = step.iter().map(|s| s * s).sum::<f64>().sqrt();
            if step_norm < 1e-10 {
                return Ok(PotentialFit { coefficients: c, residual: rss, iterations: iter });
            }
            let trial: Vec<f64> = c.iter().zip(&step).map(|(a, b)| a + b).collect();
            // a failed warm start (eigenvalue ordering lost) counts as no decrease
            if let Ok(f) = Forward::compute(&trial, opts.n_points, Some(&fwd), count) {
                let rt = f.residual(&ts);
                let rss_t = rt.norm_squared();
                if rss_t < rss {
                    c = trial;
                    fwd = f;
                    r = rt;
                    rss = rss_t;
                    if step_norm < 1e-10 * (1.0 + c.iter().map(|v| v * v).sum::<f64>().sqrt()) {
                        return Ok(PotentialFit { coefficients: c, residual: rss, iterations: iter });
                    }
                    break;
                }
            }
            t *= 0.5;
        }
    }
    if rss < 1e-8 {
        return Ok(PotentialFit { coefficients: c, residual: rss, iterations: opts.max_iterations });
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual: rss })
}

/// The fitted potential on `opts.n_points` grid points.
pub fn recover_potential(ts: &TwoSpectra, opts: &FitOptions) -> Result<GridFunction> {
    let fit = fit_potential(ts, opts)?;
    cosine_series(&fit.coefficients, opts.n_points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseOptions {
    /// Truncation of the moment system; the largest the data allows if unset.
    pub n_max: Option<usize>,
    pub basis_dim: usize,
    pub max_iterations: usize,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self { n_max: None, basis_dim: DEFAULT_BASIS_DIM, max_iterations: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub m: usize,
    pub n_max: usize,
    pub basis_dim: usize,
    pub omega_hat: f64,
    pub omega1: f64,
    pub known_omegas: Vec<f64>,
    /// Labels `(n, k)` whose `g` is infinite.
    pub infinite_g: Vec<(usize, usize)>,
    pub moment_residual_max: f64,
    pub moment_residual_norm: f64,
    pub gram_min_eig: f64,
    pub gram_max_eig: f64,
    pub gram_l2_distance: f64,
    /// `int K - omega` before re-projection.
    pub k_integral_gap: f64,
    pub two_spectra: TwoSpectra,
    pub fit_residual: f64,
    pub fit_iterations: usize,
    pub coefficients: Vec<f64>,
    /// `omega_1 - (1/2) int q1_rec`.
    pub omega_chain_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub q1: GridFunction,
    pub diagnostics: Diagnostics,
}

/// Minimum number of `(lambda_n1, lambda_n2)` pairs accepted.
pub const MIN_PAIRS: usize = 8;

/// Recovers `q_1` from `q_2..q_m`, `lambda_n1` and `lambda_n2`.
///
/// Errors are wrapped with the index of the step that raised them:
/// 1 `omega`, 2-3 Weyl functions and `g`, 4 moments, 5 two spectra, 6 fit.
pub fn full_inverse(
    known: &[GridFunction],
    lambda1: &[f64],
    lambda2: &[f64],
    opts: &InverseOptions,
) -> Result<ReconstructionResult> {
    let step1 = || -> Result<(usize, usize, f64, f64, Vec<f64>)> {
        let first = known
            .first()
            .ok_or_else(|| Error::InvalidProblem("need at least one known potential".into()))?;
        let np = first.n_points();
        for q in known {
            first.ensure_same_grid(q)?;
        }
        let pairs = lambda1.len().saturating_sub(1).min(lambda2.len());
        if pairs < MIN_PAIRS {
            return Err(Error::InvalidProblem(format!(
                "need at least {MIN_PAIRS} eigenvalue pairs, got {} and {}",
                lambda1.len(),
                lambda2.len()
            )));
        }
        let n_max = opts.n_max.unwrap_or(pairs);
        if n_max == 0 || n_max > pairs {
            return Err(Error::InvalidProblem(format!("n_max = {n_max} outside 1..={pairs}")));
        }
        let m = known.len() + 1;
        let omegas: Vec<f64> = known.iter().map(GridFunction::half_integral).collect();
        let omega_hat = estimate_omega_hat(lambda1);
        let omega1 = m as f64 * omega_hat - omegas.iter().sum::<f64>();
        Ok((np, n_max, omega_hat, omega1, omegas))
    };
    let (np, n_max, omega_hat, omega1, known_omegas) = step1().map_err(|e| e.at_step(1))?;

    let spectra = PartialSpectrum::new(lambda1[..=n_max].to_vec(), lambda2[..n_max].to_vec());
    let g = aggregate_g(known, &spectra).map_err(|e| e.at_step(3))?;
    let infinite_g = g.labelled().filter(|(_, _, v)| *v == GValue::Infinite).map(|(n, k, _)| (n, k)).collect();

    let system = build_moment_system(&spectra, &g, omega1, n_max, np).map_err(|e| e.at_step(4))?;
    let sol = solve_moments(&system).map_err(|e| e.at_step(4))?;
    let k_integral_gap = sol.cauchy.k_func.integral() - omega1;

    let ef = build_endpoint_functions(sol.cauchy.clone()).map_err(|e| e.at_step(5))?;
    let ts = extract_two_spectra(&ef, n_max).map_err(|e| e.at_step(5))?;

    let fit_opts = FitOptions { basis_dim: opts.basis_dim, max_iterations: opts.max_iterations, n_points: np };
    let fit = fit_potential(&ts, &fit_opts).map_err(|e| e.at_step(6))?;
    let q1 = cosine_series(&fit.coefficients, np).map_err(|e| e.at_step(6))?;

    let diagnostics = Diagnostics {
        m: known.len() + 1,
        n_max,
        basis_dim: opts.basis_dim,
        omega_hat,
        omega1,
        known_omegas,
        infinite_g,
        moment_residual_max: sol.max_residual(),
        moment_residual_norm: sol.residual_norm(),
        gram_min_eig: sol.gram.min_eig,
        gram_max_eig: sol.gram.max_eig,
        gram_l2_distance: sol.gram.l2_distance_to_reference,
        k_integral_gap,
        two_spectra: ts,
        fit_residual: fit.residual,
        fit_iterations: fit.iterations,
        omega_chain_gap: omega1 - q1.half_integral(),
        coefficients: fit.coefficients,
    };
    Ok(ReconstructionResult { q1, diagnostics })
}
