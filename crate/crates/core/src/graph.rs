//! The star graph: characteristic function, numbered spectrum, and the
//! assumption checks needed by the inverse algorithm.
//!
//! Eigenvalues are located through the sum of edge Weyl functions
//! `F(lambda) = sum_j M_j(lambda)`. Each `M_j` increases strictly between
//! its poles (the Dirichlet eigenvalues of edge `j`), so `F` has exactly one
//! zero between consecutive distinct poles, and a pole shared by `r` edges is
//! an eigenvalue of multiplicity `r - 1`. This gives a complete eigenvalue
//! count without relying on sign changes of `Delta`, which disappear at
//! multiple eigenvalues.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::roots::{brent, sigma_of};
use crate::sl::{s_end_vanishes, BoundarySample, EdgePropagator, EndCondition};

/// Roots closer than this in `rho` are treated as one multiple eigenvalue.
pub const MERGE_TOL: f64 = 1e-6;

/// `m` edges of length `pi` joined at one vertex, Dirichlet at the free ends,
/// continuity and Kirchhoff at the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct StarGraphProblem {
    potentials: Vec<GridFunction>,
}

impl StarGraphProblem {
    pub fn new(potentials: Vec<GridFunction>) -> Result<Self> {
        if potentials.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "a star graph needs at least 2 edges, got {}",
                potentials.len()
            )));
        }
        let n = potentials[0].n_points();
        if potentials.iter().any(|q| q.n_points() != n) {
            return Err(Error::InvalidProblem("all potentials must share one grid".into()));
        }
        Ok(Self { potentials })
    }

    /// Edge count `m`.
    pub fn m(&self) -> usize {
        self.potentials.len()
    }

    pub fn n_points(&self) -> usize {
        self.potentials[0].n_points()
    }

    pub fn potentials(&self) -> &[GridFunction] {
        &self.potentials
    }

    /// `q_j`, 1-based.
    pub fn potential(&self, j: usize) -> &GridFunction {
        &self.potentials[j - 1]
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.potentials.iter().map(GridFunction::half_integral).collect()
    }

    pub fn omega_hat(&self) -> f64 {
        let w = self.omegas();
        w.iter().sum::<f64>() / w.len() as f64
    }

    /// Adds `c` to every potential (shifts the whole spectrum by `c`).
    pub fn shifted(&self, c: f64) -> Self {
        Self { potentials: self.potentials.iter().map(|q| q.shifted(c)).collect() }
    }
}

/// Edge propagators for repeated evaluation of graph quantities.
#[derive(Debug, Clone)]
pub struct GraphEvaluator {
    props: Vec<EdgePropagator>,
}

impl GraphEvaluator {
    pub fn new(problem: &StarGraphProblem) -> Self {
        Self { props: problem.potentials().iter().map(EdgePropagator::new).collect() }
    }

    pub fn from_propagators(props: Vec<EdgePropagator>) -> Self {
        Self { props }
    }

    pub fn m(&self) -> usize {
        self.props.len()
    }

    pub fn samples(&self, lambda: f64) -> Result<Vec<BoundarySample>> {
        self.props.iter().map(|p| p.endpoint(lambda)).collect()
    }

    pub fn delta(&self, lambda: f64) -> Result<f64> {
        Ok(delta_from_samples(&self.samples(lambda)?))
    }

    /// `sum_j M_j(lambda) = -sum_j S_j'(pi)/S_j(pi)`; increasing between poles.
    pub fn weyl_sum(&self, lambda: f64) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.props {
            let b = p.endpoint(lambda)?;
            total -= b.s_prime_end / b.s_end;
        }
        Ok(total)
    }

    fn q_min(&self) -> f64 {
        self.props.iter().map(EdgePropagator::q_min).fold(f64::INFINITY, f64::min)
    }

    fn q_max(&self) -> f64 {
        self.props.iter().map(EdgePropagator::q_max).fold(f64::NEG_INFINITY, f64::max)
    }

    /// All eigenvalues below `lambda_max`, ascending, repeated by multiplicity.
    fn eigenvalues_below(&self, lambda_max: f64) -> Result<Vec<f64>> {
        let mut poles: Vec<f64> = Vec::new();
        for p in &self.props {
            poles.extend(p.eigenvalues_below(EndCondition::Dirichlet, lambda_max)?);
        }
        poles.sort_by(f64::total_cmp);

        // clusters of (numerically) coincident poles: (lo, hi, edges)
        let mut clusters: Vec<(f64, f64, usize)> = Vec::new();
        for &p in &poles {
            match clusters.last_mut() {
                Some(c) if sigma_of(p) - sigma_of(c.1) < MERGE_TOL => {
                    c.1 = p;
                    c.2 += 1;
                }
                _ => clusters.push((p, p, 1)),
            }
        }

        let mut lo = self.q_min() - 1.0;
        while self.weyl_sum(lo)? >= 0.0 {
            lo = 2.0 * lo - 1.0;
        }

        let mut out = Vec::new();
        let mut left = lo;
        for &(c_lo, c_hi, edges) in &clusters {
            out.push(self.zero_between(left, c_lo)?);
            let at = 0.5 * (c_lo + c_hi);
            out.extend(std::iter::repeat_n(at, edges - 1));
            left = c_hi;
        }
        if self.weyl_sum(lambda_max)? > 0.0 {
            out.push(self.zero_between(left, lambda_max)?);
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// The unique zero of the Weyl sum in `(a, b)`, where `a` is a pole or
    /// lies below the spectrum and `b` is a pole or has a positive sum.
    fn zero_between(&self, a: f64, b: f64) -> Result<f64> {
        let f = |l: f64| self.weyl_sum(l);
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        let (x0, f0, x1, f1) = if fm < 0.0 {
            let (x, fx) = self.approach(b, mid, |v| v > 0.0)?;
            (mid, fm, x, fx)
        } else {
            let (x, fx) = self.approach(a, mid, |v| v < 0.0)?;
            (x, fx, mid, fm)
        };
        brent(f, x0, x1, f0, f1, 0.0)
    }

    /// Walks from `mid` towards the pole `edge` until `accept(F)` holds.
    fn approach(&self, edge: f64, mid: f64, accept: impl Fn(f64) -> bool) -> Result<(f64, f64)> {
        let mut d = 0.5 * (edge - mid);
        for _ in 0..200 {
            let x = edge - d;
            let v = self.weyl_sum(x)?;
            if accept(v) {
                return Ok((x, v));
            }
            d *= 0.125;
            if d.abs() <= 4.0 * f64::EPSILON * edge.abs().max(1.0) {
                break;
            }
        }
        // the edge itself (a pole or an interval end with the right sign)
        let v = self.weyl_sum(edge)?;
        Ok((edge, if v.is_finite() { v } else { v.signum() * f64::MAX }))
    }
}

/// `Delta` from the endpoint samples `(S_j(pi), S_j'(pi))`, edge 1 first.
pub fn delta_from_samples(samples: &[BoundarySample]) -> f64 {
    let (first, rest) = samples.split_first().expect("at least one edge");
    let prod: f64 = rest.iter().map(|b| b.s_end).product();
    let mut sum = 0.0;
    for (j, bj) in rest.iter().enumerate() {
        let others: f64 =
            rest.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, b)| b.s_end).product();
        sum += bj.s_prime_end * others;
    }
    first.s_prime_end * prod + first.s_end * sum
}

/// The characteristic function whose zeros are the eigenvalues.
pub fn characteristic_delta(problem: &StarGraphProblem, lambda: f64) -> Result<f64> {
    GraphEvaluator::new(problem).delta(lambda)
}

/// One labelled eigenvalue `lambda_nk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    /// How many `(n, k)` labels share this value.
    pub multiplicity: usize,
}

/// Labelled eigenvalues `lambda_nk`, `n = 1..=n_max`, `k = 1..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub m: usize,
    pub n_max: usize,
    /// Sorted by `(k, n)`.
    pub entries: Vec<SpectrumEntry>,
    pub omega_hat: f64,
    /// Roots `z_1 <= ... <= z_{m-1}` of `P(z)`.
    pub z_roots: Vec<f64>,
}

impl SpectrumTable {
    pub fn get(&self, n: usize, k: usize) -> Option<&SpectrumEntry> {
        if n == 0 || n > self.n_max || k == 0 || k > self.m {
            return None;
        }
        self.entries.get((k - 1) * self.n_max + n - 1)
    }

    pub fn lambda(&self, n: usize, k: usize) -> Option<f64> {
        self.get(n, k).map(|e| e.lambda)
    }

    /// `lambda_nk` for `n = 1..=n_max`.
    pub fn family(&self, k: usize) -> Vec<f64> {
        self.entries.iter().filter(|e| e.k == k).map(|e| e.lambda).collect()
    }

    /// Main asymptotic term of `rho_nk`.
    pub fn slot(&self, n: usize, k: usize) -> f64 {
        asymptotic_slot(n, k, self.omega_hat, &self.z_roots)
    }

    /// `kappa_nk = n * (rho_nk - main term)`; `NaN` where `lambda_nk <= 0`.
    pub fn residuals(&self, k: usize) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.k == k)
            .map(|e| {
                if e.lambda > 0.0 {
                    e.n as f64 * (e.lambda.sqrt() - self.slot(e.n, e.k))
                } else {
                    f64::NAN
                }
            })
            .collect()
    }
}

/// `n - 1/2 + omega_hat/(pi n)` for `k = 1`, `n + z_{k-1}/(pi n)` otherwise.
pub fn asymptotic_slot(n: usize, k: usize, omega_hat: f64, z_roots: &[f64]) -> f64 {
    let nf = n as f64;
    if k == 1 {
        nf - 0.5 + omega_hat / (PI * nf)
    } else {
        nf + z_roots[k - 2] / (PI * nf)
    }
}

/// Estimates `omega_hat` from `lambda_n1`, `n = 1, 2, ...`.
///
/// `y_n = pi n (rho_n1 - n + 1/2)` tends to `omega_hat` only like `1/n`,
/// because the main term `omega_hat/(pi n)` is centred at `n` rather than at
/// `n - 1/2`. Fitting `y_n = a + b/n` over the upper half of the indices and
/// returning `a` removes that bias.
pub fn estimate_omega_hat(family1: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = family1
        .iter()
        .enumerate()
        .skip(family1.len() / 2)
        .filter(|(_, l)| **l > 0.0)
        .map(|(i, l)| {
            let n = (i + 1) as f64;
            (1.0 / n, PI * n * (l.sqrt() - n + 0.5))
        })
        .collect();
    let k = pts.len() as f64;
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    if pts.len() < 2 {
        return if pts.is_empty() { f64::NAN } else { sy };
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    (sy - slope * sx) / k
}

/// Computes and labels the first `n_max` eigenvalues of every family.
///
/// Labels follow the ascending order: the eigenvalues with ordinal
/// `m(n-1)+1 ..= mn` form group `n`, the lowest of which is `(n, 1)`. The
/// upper half of the groups is cross-checked against the asymptotic slots.
pub fn compute_spectrum(problem: &StarGraphProblem, n_max: usize) -> Result<SpectrumTable> {
    if n_max == 0 {
        return Err(Error::InvalidProblem("n_max must be at least 1".into()));
    }
    let eval = GraphEvaluator::new(problem);
    let m = problem.m();
    let omega_hat = problem.omega_hat();
    let z_roots = char_poly_roots(&problem.omegas());
    let needed = m * n_max + 1;

    let nf = n_max as f64;
    let mut lambda_max = (nf + 0.9) * (nf + 0.9) + eval.q_max().max(0.0) + 1.0;
    let flat = loop {
        let found = eval.eigenvalues_below(lambda_max)?;
        if found.len() >= needed {
            break found;
        }
        lambda_max = 1.5 * lambda_max + 1.0;
    };
    let (values, groups) = merge_close(&flat);

    let last = needed - 2;
    if groups[last] == groups[last + 1] {
        return Err(Error::NumberingAmbiguity(format!(
            "eigenvalue {} is split across the n = {n_max} / n = {} boundary",
            values[last],
            n_max + 1
        )));
    }

    let multiplicity = |i: usize| groups.iter().filter(|&&g| g == groups[i]).count();
    let mut entries: Vec<SpectrumEntry> = (0..needed - 1)
        .map(|i| SpectrumEntry {
            n: i / m + 1,
            k: i % m + 1,
            lambda: values[i],
            multiplicity: multiplicity(i),
        })
        .collect();
    entries.sort_by_key(|e| (e.k, e.n));

    let table = SpectrumTable { m, n_max, entries, omega_hat, z_roots };
    check_family_membership(&table)?;
    Ok(table)
}

/// Groups sorted values closer than [`MERGE_TOL`] in `rho`, replacing each
/// group by its mean. Returns the values and a group id per value.
fn merge_close(sorted: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut groups = Vec::with_capacity(sorted.len());
    let mut gid = 0usize;
    for i in 0..sorted.len() {
        if i > 0 && sigma_of(sorted[i]) - sigma_of(sorted[i - 1]) >= MERGE_TOL {
            gid += 1;
        }
        groups.push(gid);
    }
    let mut values = sorted.to_vec();
    let mut start = 0;
    while start < values.len() {
        let mut end = start;
        while end + 1 < values.len() && groups[end + 1] == groups[start] {
            end += 1;
        }
        if end > start {
            let mean = sorted[start..=end].iter().sum::<f64>() / (end - start + 1) as f64;
            values[start..=end].fill(mean);
        }
        start = end + 1;
    }
    (values, groups)
}

/// Every eigenvalue in the upper half of the groups must sit nearer to a slot
/// of its own family type (`k = 1` versus `k >= 2`) than to any other slot.
fn check_family_membership(table: &SpectrumTable) -> Result<()> {
    let first = (table.n_max / 2 + 1).max(3);
    for e in &table.entries {
        if e.n < first || e.lambda <= 0.0 {
            continue;
        }
        let rho = e.lambda.sqrt();
        let mut own = f64::INFINITY;
        let mut other = f64::INFINITY;
        for n in e.n.saturating_sub(1).max(1)..=e.n + 1 {
            for k in 1..=table.m {
                let d = (rho - table.slot(n, k)).abs();
                let same_family = (k == 1) == (e.k == 1) && n == e.n;
                if same_family {
                    own = own.min(d);
                } else {
                    other = other.min(d);
                }
            }
        }
        if own > other {
            return Err(Error::NumberingAmbiguity(format!(
                "lambda = {} labelled ({}, {}) lies closer to a slot of another family",
                e.lambda, e.n, e.k
            )));
        }
    }
    Ok(())
}

/// Roots of `P(z) = d/dz prod_k (z - omega_k)`, ascending, with multiplicity.
///
/// For real `omega` all `m - 1` roots are real: a value repeated `r` times is
/// a root of multiplicity `r - 1`, and each gap between consecutive distinct
/// values holds exactly one simple root of `sum_i r_i / (z - w_i)`.
pub fn char_poly_roots(omegas: &[f64]) -> Vec<f64> {
    let mut w = omegas.to_vec();
    w.sort_by(f64::total_cmp);
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for &v in &w {
        match distinct.last_mut() {
            Some(d) if v == d.0 => d.1 += 1,
            _ => distinct.push((v, 1)),
        }
    }
    let mut roots = Vec::with_capacity(omegas.len().saturating_sub(1));
    for (i, &(v, r)) in distinct.iter().enumerate() {
        roots.extend(std::iter::repeat_n(v, r - 1));
        if let Some(&(next, _)) = distinct.get(i + 1) {
            let g = |z: f64| -> Result<f64> {
                Ok(distinct.iter().map(|&(wi, ri)| ri as f64 / (z - wi)).sum())
            };
            let gap = next - v;
            let (a, b) = (v + gap * 1e-13, next - gap * 1e-13);
            let (ga, gb) = (g(a).unwrap_or(f64::MAX), g(b).unwrap_or(f64::MIN));
            roots.push(brent(g, a, b, ga, gb, 0.0).unwrap_or(0.5 * (v + next)));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Outcome of checking the solvability assumptions on a problem and its
/// spectrum. Labels are `(n, k)`; edges are 1-based.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// (i): `{lambda_n1, lambda_n2}` pairwise distinct and simple.
    pub distinct_ok: bool,
    pub not_distinct: Vec<(usize, usize)>,
    /// (ii): `lambda_nk > 0` for `k = 1, 2`.
    pub positive_ok: bool,
    pub not_positive: Vec<(usize, usize)>,
    /// (iii): `S_j(pi, lambda_nk) != 0`, as `(j, n, k)`.
    pub s_nonzero_ok: bool,
    pub s_vanishing: Vec<(usize, usize, usize)>,
    /// (iv): `z_1 != omega_j`, offending edges `j`.
    pub z1_separated_ok: bool,
    pub z1_coincident: Vec<usize>,
    /// (v): `S_1(pi, 0) != 0` and `S_1'(pi, 0) != 0`.
    pub s1_at_zero_ok: bool,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.distinct_ok
            && self.positive_ok
            && self.s_nonzero_ok
            && self.z1_separated_ok
            && self.s1_at_zero_ok
    }

    /// Builds the report from the two families and per-edge samples.
    ///
    /// `samples(lambda)` returns `(S_j(pi), S_j'(pi))` for `j = 1..=m`, or
    /// `None` for edges that cannot be evaluated (skipped in (iii)).
    pub fn evaluate(
        family1: &[f64],
        family2: &[f64],
        omegas: &[f64],
        mut samples: impl FnMut(f64) -> Result<Vec<Option<BoundarySample>>>,
    ) -> Result<Self> {
        let mut rep = AssumptionReport::default();
        let labelled: Vec<(usize, usize, f64)> = family1
            .iter()
            .enumerate()
            .map(|(i, &l)| (i + 1, 1, l))
            .chain(family2.iter().enumerate().map(|(i, &l)| (i + 1, 2, l)))
            .collect();

        for (a, &(n, k, l)) in labelled.iter().enumerate() {
            let dup = labelled.iter().enumerate().any(|(b, &(_, _, l2))| {
                a != b && (sigma_of(l) - sigma_of(l2)).abs() < MERGE_TOL
            });
            if dup {
                rep.not_distinct.push((n, k));
            }
            if l <= 0.0 {
                rep.not_positive.push((n, k));
            }
            for (j, s) in samples(l)?.into_iter().enumerate() {
                if let Some(s) = s {
                    if s_end_vanishes(s.s_end, l) {
                        rep.s_vanishing.push((j + 1, n, k));
                    }
                }
            }
        }

        let z = char_poly_roots(omegas);
        if let Some(&z1) = z.first() {
            for (j, &w) in omegas.iter().enumerate() {
                if (z1 - w).abs() <= 1e-8 * w.abs().max(1.0) {
                    rep.z1_coincident.push(j + 1);
                }
            }
        }
        if let Some(Some(s1)) = samples(0.0)?.into_iter().next() {
            rep.s1_at_zero_ok = !s_end_vanishes(s1.s_end, 0.0) && !s_end_vanishes(s1.s_prime_end, 0.0);
        }

        rep.distinct_ok = rep.not_distinct.is_empty();
        rep.positive_ok = rep.not_positive.is_empty();
        rep.s_nonzero_ok = rep.s_vanishing.is_empty();
        rep.z1_separated_ok = rep.z1_coincident.is_empty();
        Ok(rep)
    }
}

/// Checks assumptions (i)-(v) for a forward problem and its spectrum.
pub fn check_assumptions(problem: &StarGraphProblem, table: &SpectrumTable) -> Result<AssumptionReport> {
    let eval = GraphEvaluator::new(problem);
    let mut rep = AssumptionReport::evaluate(
        &table.family(1),
        table.family(2).as_slice(),
        &problem.omegas(),
        |l| Ok(eval.samples(l)?.into_iter().map(Some).collect()),
    )?;
    // a label sharing its value with another family also breaks (i)
    for e in table.entries.iter().filter(|e| e.k <= 2 && e.multiplicity > 1) {
        if !rep.not_distinct.contains(&(e.n, e.k)) {
            rep.not_distinct.push((e.n, e.k));
        }
    }
    rep.not_distinct.sort_unstable();
    rep.distinct_ok = rep.not_distinct.is_empty();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DEFAULT_POINTS;

    fn zero_problem(m: usize) -> StarGraphProblem {
        StarGraphProblem::new(vec![GridFunction::zeros(DEFAULT_POINTS).unwrap(); m]).unwrap()
    }

    fn constants(cs: &[f64]) -> StarGraphProblem {
        StarGraphProblem::new(
            cs.iter().map(|&c| GridFunction::constant(DEFAULT_POINTS, c).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn delta_zero_potentials() {
        let p = zero_problem(3);
        assert!(characteristic_delta(&p, 0.25).unwrap().abs() < 1e-12);
        // closed form 3 cos(rho pi) (sin(rho pi)/rho)^2
        let rho = 0.5f64.sqrt();
        let expected = 3.0 * (rho * PI).cos() * ((rho * PI).sin() / rho).powi(2);
        let d = characteristic_delta(&p, 0.5).unwrap();
        assert!((d - expected).abs() < 1e-10);
        assert!((d + 2.300912).abs() < 1e-6);
        assert!(characteristic_delta(&zero_problem(2), 1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn omega_hat_from_shifted_free_family() {
        // equal constants c: lambda_n1 = (n - 1/2)^2 + c and omega_hat = c pi / 2
        let c = 1.3;
        let fam: Vec<f64> = (1..=40).map(|n| (n as f64 - 0.5).powi(2) + c).collect();
        let est = estimate_omega_hat(&fam);
        assert!((est - c * PI / 2.0).abs() < 1e-3, "{est}");
        let plain: f64 = fam[20..]
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let n = (i + 21) as f64;
                PI * n * (l.sqrt() - n + 0.5)
            })
            .sum::<f64>()
            / 20.0;
        assert!((est - c * PI / 2.0).abs() < 0.1 * (plain - c * PI / 2.0).abs());
    }

    #[test]
    fn rejects_single_edge_and_mixed_grids() {
        assert!(StarGraphProblem::new(vec![GridFunction::zeros(9).unwrap()]).is_err());
        assert!(StarGraphProblem::new(vec![
            GridFunction::zeros(9).unwrap(),
            GridFunction::zeros(11).unwrap()
        ])
        .is_err());
    }

    #[test]
    fn spectrum_zero_m3() {
        let t = compute_spectrum(&zero_problem(3), 2).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        assert!(close(t.lambda(1, 1).unwrap(), 0.25));
        assert!(close(t.lambda(1, 2).unwrap(), 1.0));
        assert!(close(t.lambda(1, 3).unwrap(), 1.0));
        assert!(close(t.lambda(2, 1).unwrap(), 2.25));
        assert!(close(t.lambda(2, 2).unwrap(), 4.0));
        assert!(close(t.lambda(2, 3).unwrap(), 4.0));
        assert_eq!(t.get(1, 2).unwrap().multiplicity, 2);
        assert_eq!(t.get(1, 1).unwrap().multiplicity, 1);
    }

    #[test]
    fn spectrum_zero_m2() {
        let t = compute_spectrum(&zero_problem(2), 1).unwrap();
        assert!((t.lambda(1, 1).unwrap() - 0.25).abs() < 1e-9);
        assert!((t.lambda(1, 2).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(t.entries.len(), 2);
    }

    #[test]
    fn spectrum_rejects_zero_n_max() {
        assert!(compute_spectrum(&zero_problem(2), 0).is_err());
    }

    #[test]
    fn char_poly_examples() {
        let r = char_poly_roots(&[0.3, 1.7]);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-14);

        // quadratic formula on 3z^2 - 6z + 2
        let r = char_poly_roots(&[0.0, 1.0, 2.0]);
        let s = 1.0 / 3f64.sqrt();
        assert!((r[0] - (1.0 - s)).abs() < 1e-12);
        assert!((r[1] - (1.0 + s)).abs() < 1e-12);
        assert!((r[0] - 0.42265).abs() < 1e-5 && (r[1] - 1.57735).abs() < 1e-5);

        assert_eq!(char_poly_roots(&[2.5, 2.5, 2.5]), vec![2.5, 2.5]);
    }

    #[test]
    fn char_poly_mixed_multiplicity() {
        // d/dz z^2 (z - 3) = 3z^2 - 6z = 3z(z - 2)
        let r = char_poly_roots(&[0.0, 3.0, 0.0]);
        assert!((r[0]).abs() < 1e-14 && (r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn assumptions_zero_potentials_fail_symmetry() {
        let p = zero_problem(3);
        let t = compute_spectrum(&p, 3).unwrap();
        let rep = check_assumptions(&p, &t).unwrap();
        assert!(!rep.distinct_ok);
        assert!(rep.not_distinct.contains(&(1, 2)));
        assert!(!rep.z1_separated_ok);
    }

    #[test]
    fn assumptions_shifted_constants_positive() {
        let p = constants(&[0.0, 1.0, 2.0]).shifted(1.0);
        let t = compute_spectrum(&p, 4).unwrap();
        let rep = check_assumptions(&p, &t).unwrap();
        assert!(rep.positive_ok);
        assert!(rep.z1_separated_ok);
        assert!(rep.s1_at_zero_ok);
    }

    #[test]
    fn injected_zero_eigenvalue_fails_positivity() {
        let omegas = [0.0, 0.5, 1.0];
        let rep = AssumptionReport::evaluate(&[0.0, 3.0], &[1.5], &omegas, |_| {
            Ok(vec![Some(BoundarySample { s_end: 1.0, s_prime_end: 1.0 }); 3])
        })
        .unwrap();
        assert!(!rep.positive_ok);
        assert_eq!(rep.not_positive, vec![(1, 1)]);
    }

    #[test]
    fn weyl_sum_increases_between_poles() {
        let p = constants(&[0.0, 1.0, 2.0]);
        let eval = GraphEvaluator::new(&p);
        // poles at 1, 2, 3; check monotonicity on (1, 2)
        let xs: Vec<f64> = (1..20).map(|i| 1.0 + i as f64 / 20.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| eval.weyl_sum(x).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[1] > w[0]));
    }
}
