//! Sturm-Liouville equation `-y'' + q y = lambda y` on `[0, pi]`.
//!
//! The potential is replaced by its cell-midpoint value on every grid cell and
//! each cell is crossed with the exact constant-coefficient propagator. The
//! error of this scheme is `O(h^2)` and stays bounded as `lambda` grows, which
//! matters because the inverse algorithm samples `S(pi, lambda)` high up in
//! the spectrum.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::roots::{brent, scan_roots, sigma_of, SCAN_STEP};

/// Below this value of `|lambda| x^2` the entire functions switch to series.
const SERIES_CUTOFF: f64 = 1e-4;

/// `sin(sqrt(lambda) x) / sqrt(lambda)`, entire in `lambda`.
#[inline]
pub fn sin_entire(lambda: f64, x: f64) -> f64 {
    sin_cos_entire(lambda, x).0
}

/// `cos(sqrt(lambda) x)`, entire in `lambda`.
#[inline]
pub fn cos_entire(lambda: f64, x: f64) -> f64 {
    sin_cos_entire(lambda, x).1
}

/// Both `sin(rho x)/rho` and `cos(rho x)` with `rho = sqrt(lambda)`.
#[inline]
pub fn sin_cos_entire(lambda: f64, x: f64) -> (f64, f64) {
    let z = lambda * x * x;
    if z.abs() < SERIES_CUTOFF {
        let s = x * (1.0 - z / 6.0 * (1.0 - z / 20.0 * (1.0 - z / 42.0)));
        let c = 1.0 - z / 2.0 * (1.0 - z / 12.0 * (1.0 - z / 30.0));
        (s, c)
    } else if lambda > 0.0 {
        let r = lambda.sqrt();
        let (sn, cs) = (r * x).sin_cos();
        (sn / r, cs)
    } else {
        let r = (-lambda).sqrt();
        let (sh, ch) = ((r * x).sinh(), (r * x).cosh());
        (sh / r, ch)
    }
}

/// Whether `S(pi, lambda)` counts as zero: `|s| <= 1e-8 / sqrt(max(1, |lambda|))`,
/// matching the `1/rho` decay of `S`.
pub fn s_end_vanishes(s: f64, lambda: f64) -> bool {
    s.abs() <= 1e-8 / lambda.abs().max(1.0).sqrt()
}

/// `S(pi, lambda)` and `S'(pi, lambda)` for the solution with
/// `S(0) = 0`, `S'(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub s_end: f64,
    pub s_prime_end: f64,
}

/// Which condition at `x = pi` closes the edge problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndCondition {
    /// `y(pi) = 0`: zeros of `S(pi, lambda)`.
    Dirichlet,
    /// `y'(pi) = 0`: zeros of `S'(pi, lambda)`.
    Neumann,
}

/// Per-cell midpoint potential, reusable across many `lambda`.
#[derive(Debug, Clone)]
pub struct EdgePropagator {
    h: f64,
    cells: Vec<f64>,
    q_min: f64,
    q_max: f64,
}

impl EdgePropagator {
    pub fn new(q: &GridFunction) -> Self {
        let cells: Vec<f64> = q.values().windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Self { h: q.step(), cells, q_min: q.min(), q_max: q.max() }
    }

    pub fn n_points(&self) -> usize {
        self.cells.len() + 1
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    /// Calls `visit(y, y')` after each cell.
    #[inline]
    fn sweep(&self, lambda: f64, mut visit: impl FnMut(f64, f64)) -> (f64, f64) {
        let (mut y, mut yp) = (0.0_f64, 1.0_f64);
        let mut last_q = f64::NAN;
        let (mut s, mut c, mut kappa) = (0.0, 0.0, 0.0);
        for &qc in &self.cells {
            if qc != last_q {
                kappa = lambda - qc;
                (s, c) = sin_cos_entire(kappa, self.h);
                last_q = qc;
            }
            let ny = c * y + s * yp;
            yp = c * yp - kappa * s * y;
            y = ny;
            visit(y, yp);
        }
        (y, yp)
    }

    pub fn endpoint(&self, lambda: f64) -> Result<BoundarySample> {
        let (y, yp) = self.sweep(lambda, |_, _| {});
        if y.is_finite() && yp.is_finite() {
            Ok(BoundarySample { s_end: y, s_prime_end: yp })
        } else {
            Err(Error::StepFailure { lambda })
        }
    }

    /// Nodal values `(S(x_i), S'(x_i))`, `i = 0..n_points`.
    pub fn solution(&self, lambda: f64) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(self.n_points());
        out.push((0.0, 1.0));
        let (y, yp) = self.sweep(lambda, |y, yp| out.push((y, yp)));
        if y.is_finite() && yp.is_finite() {
            Ok(out)
        } else {
            Err(Error::StepFailure { lambda })
        }
    }

    /// Zeros of `S(., lambda)` in `(0, pi)`, which by Sturm oscillation equals
    /// the number of Dirichlet eigenvalues below `lambda`.
    pub fn dirichlet_count(&self, lambda: f64) -> Result<usize> {
        Ok(self.counts(lambda)?.0)
    }

    /// Number of `y(0) = y'(pi) = 0` eigenvalues below `lambda`.
    pub fn neumann_count(&self, lambda: f64) -> Result<usize> {
        Ok(self.counts(lambda)?.1)
    }

    pub fn count(&self, cond: EndCondition, lambda: f64) -> Result<usize> {
        let (d, n) = self.counts(lambda)?;
        Ok(match cond {
            EndCondition::Dirichlet => d,
            EndCondition::Neumann => n,
        })
    }

    fn counts(&self, lambda: f64) -> Result<(usize, usize)> {
        let mut zeros = 0usize;
        let mut positive = true;
        let (y, yp) = self.sweep(lambda, |y, _| {
            if y != 0.0 && (y > 0.0) != positive {
                zeros += 1;
                positive = y > 0.0;
            }
        });
        if !(y.is_finite() && yp.is_finite()) {
            return Err(Error::StepFailure { lambda });
        }
        // a zero landing exactly on x = pi is a Dirichlet eigenvalue, not one below
        if y == 0.0 {
            return Ok((zeros, zeros + 1));
        }
        let neumann = zeros + usize::from(y * yp < 0.0);
        Ok((zeros, neumann))
    }

    fn end_value(&self, cond: EndCondition, lambda: f64) -> Result<f64> {
        let b = self.endpoint(lambda)?;
        Ok(match cond {
            EndCondition::Dirichlet => b.s_end,
            EndCondition::Neumann => b.s_prime_end,
        })
    }

    /// All eigenvalues of the edge problem with the given end condition lying
    /// strictly below `lambda_max`, ascending.
    pub fn eigenvalues_below(&self, cond: EndCondition, lambda_max: f64) -> Result<Vec<f64>> {
        let expected = self.count(cond, lambda_max)?;
        let sigma_lo = sigma_of(self.q_min);
        let sigma_hi = sigma_of(lambda_max);
        if sigma_hi <= sigma_lo {
            return Ok(Vec::new());
        }
        let mut step = SCAN_STEP;
        for _ in 0..8 {
            let mut roots =
                scan_roots(|l| self.end_value(cond, l), sigma_lo, sigma_hi, step)?;
            roots.retain(|&r| r < lambda_max);
            if roots.len() == expected {
                return Ok(roots);
            }
            step *= 0.5;
        }
        Err(Error::NumberingAmbiguity(format!(
            "scan found a different number of {cond:?} eigenvalues than the oscillation count \
             ({expected}) below {lambda_max}"
        )))
    }

    /// The first `count` eigenvalues for the given end condition.
    pub fn first_eigenvalues(&self, cond: EndCondition, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let c = count as f64;
        let mut lambda_max = (c + 0.5) * (c + 0.5) + self.q_max.max(0.0) + 1.0;
        while self.count(cond, lambda_max)? < count {
            lambda_max = 2.0 * lambda_max + 1.0;
        }
        let mut all = self.eigenvalues_below(cond, lambda_max)?;
        all.truncate(count);
        Ok(all)
    }

    /// Refines eigenvalues starting from nearby guesses (e.g. those of a
    /// slightly different potential). Falls back to a full scan when a guess
    /// cannot be bracketed without approaching its neighbours.
    pub fn refine_eigenvalues(&self, cond: EndCondition, guesses: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(guesses.len());
        for (i, &g) in guesses.iter().enumerate() {
            let gap_lo = if i > 0 { g - guesses[i - 1] } else { f64::INFINITY };
            let gap_hi = guesses.get(i + 1).map_or(f64::INFINITY, |&n| n - g);
            let mut cap = 0.45 * gap_lo.min(gap_hi);
            if !cap.is_finite() {
                cap = 0.45 * (1.0 + g.abs().sqrt());
            }
            match self.bracket_near(cond, g, cap)? {
                Some(root) => out.push(root),
                None => return self.first_eigenvalues(cond, guesses.len()),
            }
        }
        Ok(out)
    }

    fn bracket_near(&self, cond: EndCondition, guess: f64, cap: f64) -> Result<Option<f64>> {
        let f = |l: f64| self.end_value(cond, l);
        let mut d = (1e-6 * guess.abs().max(1.0)).min(cap);
        loop {
            let (a, b) = (guess - d, guess + d);
            let (fa, fb) = (f(a)?, f(b)?);
            if fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0) {
                return Ok(Some(brent(f, a, b, fa, fb, 0.0)?));
            }
            if d >= cap {
                return Ok(None);
            }
            d = (d * 16.0).min(cap);
        }
    }
}

/// `omega = (1/2) * integral of q`.
pub fn integrate_potential(q: &GridFunction) -> f64 {
    q.half_integral()
}

pub fn solve_edge(q: &GridFunction, lambda: f64) -> Result<BoundarySample> {
    EdgePropagator::new(q).endpoint(lambda)
}

/// Elementwise [`solve_edge`] sharing one propagator setup.
pub fn solve_edge_batch(q: &GridFunction, lambdas: &[f64]) -> Vec<Result<BoundarySample>> {
    let prop = EdgePropagator::new(q);
    lambdas.iter().map(|&l| prop.endpoint(l)).collect()
}

/// Dirichlet eigenvalues `mu_n`, `n = 1..=count`, of a single edge.
pub fn dirichlet_eigenvalues(q: &GridFunction, count: usize) -> Result<Vec<f64>> {
    EdgePropagator::new(q).first_eigenvalues(EndCondition::Dirichlet, count)
}

/// Eigenvalues `nu_n`, `n = 0..count`, for `y(0) = y'(pi) = 0`.
pub fn neumann_eigenvalues(q: &GridFunction, count: usize) -> Result<Vec<f64>> {
    EdgePropagator::new(q).first_eigenvalues(EndCondition::Neumann, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DEFAULT_POINTS;
    use std::f64::consts::PI;

    fn zero() -> GridFunction {
        GridFunction::zeros(DEFAULT_POINTS).unwrap()
    }

    #[test]
    fn free_solution_at_quarter() {
        let b = solve_edge(&zero(), 0.25).unwrap();
        assert!((b.s_end - 2.0).abs() < 1e-12);
        assert!(b.s_prime_end.abs() < 1e-12);
    }

    #[test]
    fn constant_potential_shifts_frequency() {
        let q = GridFunction::constant(DEFAULT_POINTS, 1.0).unwrap();
        let b = solve_edge(&q, 2.0).unwrap();
        assert!(b.s_end.abs() < 1e-12);
        assert!((b.s_prime_end + 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_lambda_is_hyperbolic() {
        // closed-form oracle: sinh(pi), cosh(pi)
        let b = solve_edge(&zero(), -1.0).unwrap();
        assert!((b.s_end - PI.sinh()).abs() < 1e-10 * PI.sinh());
        assert!((b.s_prime_end - PI.cosh()).abs() < 1e-10 * PI.cosh());
        assert!((b.s_end - 11.548739).abs() < 1e-6);
        assert!((b.s_prime_end - 11.591953).abs() < 1e-6);
    }

    #[test]
    fn entire_across_zero() {
        for l in [1e-8, -1e-8] {
            let b = solve_edge(&zero(), l).unwrap();
            assert!((b.s_end - PI).abs() <= 1e-6);
            assert!((b.s_prime_end - 1.0).abs() <= 1e-6);
        }
        let (s, c) = sin_cos_entire(0.0, 2.0);
        assert_eq!((s, c), (2.0, 1.0));
    }

    #[test]
    fn series_matches_closed_form_at_cutoff() {
        for l in [0.99e-4, -0.99e-4, 1.01e-4, -1.01e-4] {
            let (s, c) = sin_cos_entire(l, 1.0);
            let (rs, rc) = if l > 0.0 {
                let r = l.sqrt();
                (r.sin() / r, r.cos())
            } else {
                let r = (-l).sqrt();
                (r.sinh() / r, r.cosh())
            };
            assert!((s - rs).abs() < 1e-15 && (c - rc).abs() < 1e-15);
        }
    }

    #[test]
    fn free_dirichlet_zeros() {
        let prop = EdgePropagator::new(&zero());
        for n in 1..=20 {
            let l = (n * n) as f64;
            assert!(prop.endpoint(l).unwrap().s_end.abs() <= 1e-10, "n = {n}");
        }
    }

    #[test]
    fn batch_examples() {
        let out: Vec<f64> = solve_edge_batch(&zero(), &[0.25, 1.0, 2.25])
            .into_iter()
            .map(|r| r.unwrap().s_end)
            .collect();
        assert!((out[0] - 2.0).abs() < 1e-12);
        assert!(out[1].abs() < 1e-12);
        assert!((out[2] + 2.0 / 3.0).abs() < 1e-12);
        assert!(solve_edge_batch(&zero(), &[]).is_empty());
    }

    #[test]
    fn counts_follow_free_spectrum() {
        let prop = EdgePropagator::new(&zero());
        assert_eq!(prop.dirichlet_count(0.5).unwrap(), 0);
        assert_eq!(prop.dirichlet_count(3.0).unwrap(), 1);
        assert_eq!(prop.dirichlet_count(24.0).unwrap(), 4);
        // nu_n = (n + 1/2)^2
        assert_eq!(prop.neumann_count(0.2).unwrap(), 0);
        assert_eq!(prop.neumann_count(0.3).unwrap(), 1);
        assert_eq!(prop.neumann_count(2.0).unwrap(), 1);
        assert_eq!(prop.neumann_count(2.3).unwrap(), 2);
    }

    #[test]
    fn free_eigenvalues() {
        let mu = dirichlet_eigenvalues(&zero(), 10).unwrap();
        let nu = neumann_eigenvalues(&zero(), 10).unwrap();
        for n in 0..10 {
            let a = (n + 1) as f64;
            let b = n as f64 + 0.5;
            assert!((mu[n] - a * a).abs() < 1e-10);
            assert!((nu[n] - b * b).abs() < 1e-10);
        }
    }

    #[test]
    fn refine_from_nearby_guesses() {
        let q = GridFunction::from_fn(DEFAULT_POINTS, |x| x.cos()).unwrap();
        let prop = EdgePropagator::new(&q);
        let exact = prop.first_eigenvalues(EndCondition::Dirichlet, 8).unwrap();
        let guesses: Vec<f64> = exact.iter().map(|l| l + 3e-3).collect();
        let refined = prop.refine_eigenvalues(EndCondition::Dirichlet, &guesses).unwrap();
        for (a, b) in exact.iter().zip(&refined) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn step_failure_on_overflow() {
        let q = GridFunction::zeros(5).unwrap();
        assert!(matches!(solve_edge(&q, -1e300), Err(Error::StepFailure { .. })));
    }
}
