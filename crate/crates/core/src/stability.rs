//! Empirical stability of the inverse algorithm under eigenvalue noise with
//! `sum (n delta_rho_nk)^2 < eps^2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{compute_spectrum, StarGraphProblem};
use crate::grid::GridFunction;
use crate::reconstruct::{full_inverse, InverseOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub epsilon: f64,
    pub trial: usize,
    /// `sqrt(sum (n delta_rho_nk)^2)`, always below `epsilon`.
    pub weighted_l2_perturbation: f64,
    /// Distance of the reconstruction to the true `q_1`.
    pub q1_error_l2: f64,
    /// Distance of the reconstruction to the unperturbed reconstruction.
    pub q1_shift_l2: f64,
    /// `q1_shift_l2 / epsilon`; `NaN` for `epsilon = 0`.
    pub ratio: f64,
    pub converged: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub epsilon: f64,
    pub median_ratio: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n_max: usize,
    pub seed: u64,
    pub baseline_error_l2: f64,
    pub rows: Vec<StabilityRow>,
    pub summary: Vec<StabilitySummary>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.retain(|x| x.is_finite());
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Perturbs `rho_nk = sqrt(lambda_nk)` by `delta_rho_nk = u_nk / n`, where `u`
/// is uniform in direction with `|u| = r eps`, `r ~ U(0, 1)`. Returns the
/// perturbed families and `|u|`.
pub fn perturb(
    lambda1: &[f64],
    lambda2: &[f64],
    eps: f64,
    rng: &mut impl Rng,
) -> (Vec<f64>, Vec<f64>, f64) {
    let total = lambda1.len() + lambda2.len();
    let u: Vec<f64> = (0..total).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let radius = rng.random::<f64>() * eps;
    let scale = if norm > 0.0 { radius / norm } else { 0.0 };
    if scale == 0.0 {
        return (lambda1.to_vec(), lambda2.to_vec(), 0.0);
    }
    let apply = |fam: &[f64], u: &[f64]| -> Vec<f64> {
        fam.iter()
            .zip(u)
            .enumerate()
            .map(|(i, (l, ui))| {
                let rho = l.sqrt() + scale * ui / (i + 1) as f64;
                rho * rho
            })
            .collect()
    };
    let p1 = apply(lambda1, &u[..lambda1.len()]);
    let p2 = apply(lambda2, &u[lambda1.len()..]);
    let weighted = scale * norm;
    (p1, p2, weighted)
}

/// Runs the inverse algorithm on `trials` perturbations of the spectrum of
/// `problem` for every `eps`. Failed reconstructions become rows with
/// `converged = false`.
pub fn run_stability(
    problem: &StarGraphProblem,
    epsilons: &[f64],
    trials: usize,
    seed: u64,
    opts: &InverseOptions,
) -> Result<StabilityReport> {
    let n_max = opts
        .n_max
        .ok_or_else(|| Error::InvalidProblem("stability runs need an explicit n_max".into()))?;
    let table = compute_spectrum(problem, n_max + 1)?;
    let lambda1 = table.family(1);
    let lambda2 = table.family(2)[..n_max].to_vec();
    let known: Vec<GridFunction> = problem.potentials()[1..].to_vec();
    let q_true = problem.potential(1);

    let baseline = full_inverse(&known, &lambda1, &lambda2, opts)?;
    let baseline_error_l2 = baseline.q1.l2_distance(q_true)?;

    let mut rows = Vec::with_capacity(epsilons.len() * trials);
    for (ei, &eps) in epsilons.iter().enumerate() {
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((ei * trials + trial) as u64);
            let (p1, p2, weighted) = perturb(&lambda1, &lambda2, eps, &mut rng);
            let row = match full_inverse(&known, &p1, &p2, opts) {
                Ok(r) => {
                    let shift = r.q1.l2_distance(&baseline.q1)?;
                    StabilityRow {
                        epsilon: eps,
                        trial,
                        weighted_l2_perturbation: weighted,
                        q1_error_l2: r.q1.l2_distance(q_true)?,
                        q1_shift_l2: shift,
                        ratio: if eps > 0.0 { shift / eps } else { f64::NAN },
                        converged: true,
                        failure: None,
                    }
                }
                Err(e) => StabilityRow {
                    epsilon: eps,
                    trial,
                    weighted_l2_perturbation: weighted,
                    q1_error_l2: f64::NAN,
                    q1_shift_l2: f64::NAN,
                    ratio: f64::NAN,
                    converged: false,
                    failure: Some(e.to_string()),
                },
            };
            rows.push(row);
        }
    }
    let summary = epsilons
        .iter()
        .map(|&eps| {
            let these: Vec<&StabilityRow> = rows.iter().filter(|r| r.epsilon == eps).collect();
            StabilitySummary {
                epsilon: eps,
                median_ratio: median(these.iter().filter(|r| r.converged).map(|r| r.ratio).collect()),
                failures: these.iter().filter(|r| !r.converged).count(),
            }
        })
        .collect();
    Ok(StabilityReport { n_max, seed, baseline_error_l2, rows, summary })
}
