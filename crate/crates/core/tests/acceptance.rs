//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use starip::graph::{compute_spectrum, estimate_omega_hat};
use starip::moments::{build_moment_system, gram_condition_report, reference_distances, solve_moments};
use starip::reconstruct::{full_inverse, InverseOptions};
use starip::stability::run_stability;
use starip::weyl::{aggregate_g, weyl_function, GValue, PartialSpectrum};
use starip::{Error, GridFunction, StarGraphProblem, DEFAULT_POINTS};

use common::{fixture, inverse_data, zero_problem};

const ZERO_SPECTRUM_TOL: f64 = 1e-8;
const ZERO_SPECTRUM_N: usize = 20;
const ZERO_SPECTRUM_BUDGET: Duration = Duration::from_secs(10);
const ASYMPTOTIC_N: usize = 40;
const OMEGA_HAT_TOL: f64 = 2e-2;
const IDENTITY_N: usize = 30;
const IDENTITY_TOL: f64 = 1e-6;
const RIESZ_N: usize = 30;
const RIESZ_FLOOR: f64 = 0.1 * PI / 2.0;
const RIESZ_BLOCK: usize = 10;
const MOMENT_TOL: f64 = 1e-6;
const K_INTEGRAL_TOL: f64 = 1e-8;
const ROUND_TRIP_PAIRS: usize = 30;
const ROUND_TRIP_DOUBLED: usize = 60;
const ROUND_TRIP_TOL: f64 = 5e-2;
const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(300);
const DEGENERATE_TOL: f64 = 1e-3;
const STABILITY_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const STABILITY_TRIALS: usize = 5;
const STABILITY_SPREAD: f64 = 10.0;
const STABILITY_SEED: u64 = 42;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn tail_l2(v: &[f64], lo: usize, hi: usize) -> f64 {
    // 1-based n in (lo, hi]
    v[lo..hi].iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn zero_spectrum() -> Outcome {
    let start = Instant::now();
    let t = compute_spectrum(&zero_problem(3, DEFAULT_POINTS), ZERO_SPECTRUM_N).unwrap();
    let elapsed = start.elapsed();
    let mut worst: f64 = 0.0;
    let mut mult_ok = true;
    for e in &t.entries {
        let n = e.n as f64;
        let (want, mult) = if e.k == 1 { ((n - 0.5).powi(2), 1) } else { (n * n, 2) };
        worst = worst.max((e.lambda - want).abs());
        mult_ok &= e.multiplicity == mult;
    }
    outcome(
        worst <= ZERO_SPECTRUM_TOL && mult_ok && elapsed <= ZERO_SPECTRUM_BUDGET,
        format!("max error {worst:.2e}, multiplicities ok {mult_ok}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn asymptotics(p: &StarGraphProblem) -> Outcome {
    let t = compute_spectrum(p, ASYMPTOTIC_N).unwrap();
    let half = ASYMPTOTIC_N / 2;
    let mut pass = true;
    let mut parts = Vec::new();
    let mut literal = Vec::new();
    for k in 1..=p.m() {
        let kappa = t.residuals(k);
        let (head, tail) = (tail_l2(&kappa, 0, half), tail_l2(&kappa, half, ASYMPTOTIC_N));
        pass &= tail < head;
        parts.push(format!("k={k} {tail:.3e}<{head:.3e}"));
        let scaled: Vec<f64> = kappa.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).collect();
        literal.push(format!(
            "k={k} {:.3e}/{:.3e}",
            tail_l2(&scaled, half, ASYMPTOTIC_N),
            tail_l2(&scaled, 0, half)
        ));
    }
    let est = estimate_omega_hat(&t.family(1));
    let gap = (est - p.omega_hat()).abs();
    pass &= gap <= OMEGA_HAT_TOL;
    outcome(
        pass,
        format!(
            "kappa tail l2 {}; omega_hat gap {gap:.2e} (info: n*kappa tail/head {})",
            parts.join(", "),
            literal.join(", ")
        ),
    )
}

fn eigenvalue_identity(p: &StarGraphProblem) -> Outcome {
    let t = compute_spectrum(p, IDENTITY_N + 1).unwrap();
    let spectra = PartialSpectrum::from_table(&t, IDENTITY_N).unwrap();
    let g = aggregate_g(&p.potentials()[1..], &spectra).unwrap();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for ((n, _, lambda), (_, _, gv)) in spectra.labelled().zip(g.labelled()) {
        if n > IDENTITY_N {
            continue;
        }
        let GValue::Finite(gv) = gv else { continue };
        let m1 = weyl_function(p.potential(1), lambda).unwrap().finite().unwrap();
        worst = worst.max((m1 - gv).abs() / (1.0 + gv.abs()));
        checked += 1;
    }
    outcome(worst <= IDENTITY_TOL, format!("{checked} labels, max scaled gap {worst:.2e}"))
}

fn moment_system(p: &StarGraphProblem, n_max: usize) -> starip::moments::MomentSystem {
    let t = compute_spectrum(p, n_max + 1).unwrap();
    let spectra = PartialSpectrum::from_table(&t, n_max).unwrap();
    let g = aggregate_g(&p.potentials()[1..], &spectra).unwrap();
    build_moment_system(&spectra, &g, p.omegas()[0], n_max, p.n_points()).unwrap()
}

fn riesz(p: &StarGraphProblem) -> Outcome {
    let sys = moment_system(p, RIESZ_N);
    let rep = gram_condition_report(&sys).unwrap();
    let d = reference_distances(&sys).unwrap();
    let blocks: Vec<f64> = (0..RIESZ_N / RIESZ_BLOCK)
        .map(|b| {
            let (lo, hi) = (b * RIESZ_BLOCK, (b + 1) * RIESZ_BLOCK);
            sys.vectors.iter().zip(&d).filter(|(v, _)| v.label.0 > lo && v.label.0 <= hi).map(|(_, x)| x).sum()
        })
        .collect();
    let decreasing = blocks.windows(2).all(|w| w[1] < w[0]);
    outcome(
        rep.min_eig > RIESZ_FLOOR && rep.l2_distance_to_reference.is_finite() && decreasing,
        format!(
            "Gram eig [{:.4}, {:.4}] vs floor {RIESZ_FLOOR:.4}, l2 distance {:.4}, block contributions {:?}",
            rep.min_eig,
            rep.max_eig,
            rep.l2_distance_to_reference,
            blocks.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()
        ),
    )
}

fn moment_residuals(p: &StarGraphProblem) -> Outcome {
    let sys = moment_system(p, IDENTITY_N);
    let sol = solve_moments(&sys).unwrap();
    let worst = sol
        .residuals
        .iter()
        .zip(&sys.targets)
        .map(|(r, t)| r.abs() / (1.0 + t.value.abs()))
        .fold(0.0, f64::max);
    let k_gap = (sol.cauchy.k_func.integral() - sys.omega).abs();
    outcome(
        worst <= MOMENT_TOL && k_gap <= K_INTEGRAL_TOL,
        format!("max scaled residual {worst:.2e}, |int K - omega| {k_gap:.2e}"),
    )
}

fn round_trip(p: &StarGraphProblem) -> Outcome {
    let run = |n_max: usize| {
        let start = Instant::now();
        let (l1, l2) = inverse_data(p, n_max);
        let r = full_inverse(&p.potentials()[1..], &l1, &l2, &InverseOptions::default()).unwrap();
        (r.q1.l2_distance(p.potential(1)).unwrap(), start.elapsed())
    };
    let (e30, t30) = run(ROUND_TRIP_PAIRS);
    let (e60, t60) = run(ROUND_TRIP_DOUBLED);
    outcome(
        e30 <= ROUND_TRIP_TOL && e60 < e30 && t30 + t60 <= ROUND_TRIP_BUDGET,
        format!(
            "L2 error {e30:.3e} at {ROUND_TRIP_PAIRS} pairs, {e60:.3e} at {ROUND_TRIP_DOUBLED}, {:.2} s",
            (t30 + t60).as_secs_f64()
        ),
    )
}

fn degenerate() -> Outcome {
    let p = zero_problem(2, DEFAULT_POINTS);
    let (l1, l2) = inverse_data(&p, ROUND_TRIP_PAIRS);
    match full_inverse(&p.potentials()[1..], &l1, &l2, &InverseOptions::default()) {
        Ok(r) => {
            let norm = r.q1.l2_norm();
            outcome(norm <= DEGENERATE_TOL, format!("||q1_rec|| {norm:.2e}"))
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn stability(p: &StarGraphProblem) -> Outcome {
    let opts = InverseOptions { n_max: Some(ROUND_TRIP_PAIRS), ..Default::default() };
    let rep = run_stability(p, &STABILITY_EPS, STABILITY_TRIALS, STABILITY_SEED, &opts).unwrap();
    let all_converged = rep.rows.iter().all(|r| r.converged);
    let medians: Vec<f64> = rep.summary.iter().map(|s| s.median_ratio).collect();
    let hi = medians.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = medians.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    outcome(
        all_converged && lo > 0.0 && spread <= STABILITY_SPREAD,
        format!(
            "{} runs, all converged {all_converged}, median ratios {:?}, spread {spread:.2}x",
            rep.rows.len(),
            medians.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn degeneracies(p: &StarGraphProblem) -> Outcome {
    let (l1, mut l2) = inverse_data(p, 12);
    l2[4] = l2[3];
    let dup = full_inverse(&p.potentials()[1..], &l1, &l2, &InverseOptions::default());
    let dup_ok = matches!(
        dup.as_ref().map_err(Error::root),
        Err(Error::NotABasis { cause, .. }) if cause.contains("assumption (i)")
    );

    // two identical known edges share every Dirichlet eigenvalue, and those
    // values are eigenvalues of the graph
    let q1 = GridFunction::from_fn(DEFAULT_POINTS, |x| x.cos() + 2.0).unwrap();
    let q = GridFunction::zeros(DEFAULT_POINTS).unwrap();
    let shared = StarGraphProblem::new(vec![q1, q.clone(), q]).unwrap();
    let (l1, l2) = inverse_data(&shared, 12);
    let viol = full_inverse(&shared.potentials()[1..], &l1, &l2, &InverseOptions::default());
    let viol_ok = match viol.as_ref().map_err(Error::root) {
        Err(e @ Error::AssumptionThreeViolation { .. }) => e.to_string().contains("assumption (iii)"),
        _ => false,
    };
    let describe = |r: &Result<_, Error>| match r {
        Ok(_) => "no error".to_string(),
        Err(e) => e.to_string(),
    };
    outcome(dup_ok && viol_ok, format!("duplicate: {}; shared edge: {}", describe(&dup), describe(&viol)))
}

fn main() -> ExitCode {
    let p = fixture(DEFAULT_POINTS);
    let criteria: [(&str, Check); 9] = [
        ("zero-potential spectrum", Box::new(zero_spectrum)),
        ("eigenvalue asymptotics", Box::new(|| asymptotics(&p))),
        ("Weyl identity for g", Box::new(|| eigenvalue_identity(&p))),
        ("Riesz certificate", Box::new(|| riesz(&p))),
        ("moment residuals", Box::new(|| moment_residuals(&p))),
        ("full round trip", Box::new(|| round_trip(&p))),
        ("m = 2 degenerate case", Box::new(degenerate)),
        ("stability", Box::new(|| stability(&p))),
        ("degeneracy handling", Box::new(|| degeneracies(&p))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!("criterion {}: {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
