use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use starip::graph::{check_assumptions, compute_spectrum, AssumptionReport};
use starip::io;
use starip::moments::{build_moment_system, gram_condition_report, GramReport};
use starip::reconstruct::{full_inverse, InverseOptions, DEFAULT_BASIS_DIM};
use starip::stability::run_stability;
use starip::weyl::{aggregate_g, PartialSpectrum};
use starip::{Error, DEFAULT_POINTS};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_AMBIGUITY: u8 = 3;
const EXIT_NO_CONVERGENCE: u8 = 4;
const EXIT_NOT_A_BASIS: u8 = 5;
const EXIT_USAGE: u8 = 64;

/// Forward and partial inverse spectral problems on star-shaped graphs.
///
/// Exit codes: 0 success, 1 other failure, 2 unreadable or malformed input,
/// 3 ambiguous eigenvalue numbering, 4 potential fit did not converge,
/// 5 moment vectors do not form a basis, 64 usage error.
#[derive(Parser)]
#[command(name = "starip", version)]
struct Cli {
    /// Print machine-readable JSON reports on stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Truncation {
    /// Number of eigenvalues per family (n = 1..=n_max).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n_max: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the labelled spectrum of a problem file (`x,q1,...,qm`).
    Forward {
        problem: PathBuf,
        #[command(flatten)]
        trunc: Truncation,
        /// Spectrum CSV `n,k,lambda,multiplicity`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover q1 from the known potentials and the k = 1, 2 families.
    Invert {
        /// Potential files `x,q` for edges 2..m, in edge order.
        #[arg(long = "known", required = true)]
        known: Vec<PathBuf>,
        /// Spectrum CSV with at least the k = 1 and k = 2 families.
        #[arg(long)]
        spectra: PathBuf,
        /// Moment truncation; the largest the data allows if omitted.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_BASIS_DIM)]
        basis_dim: usize,
        /// `x,q1` output; diagnostics go to the `.json` sidecar.
        #[arg(long)]
        out: PathBuf,
    },
    /// Forward solve followed by inversion, reporting the q1 error.
    Roundtrip {
        problem: PathBuf,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long, default_value_t = DEFAULT_BASIS_DIM)]
        basis_dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct from randomly perturbed spectra and tabulate the errors.
    Stability {
        problem: PathBuf,
        #[command(flatten)]
        trunc: Truncation,
        /// Perturbation sizes, comma separated or repeated.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BASIS_DIM)]
        basis_dim: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gram eigenvalues of the moment vectors and their distance to the
    /// reference basis.
    BasisCheck {
        #[arg(long)]
        spectra: PathBuf,
        /// g table `n,k,g`.
        #[arg(long)]
        g: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
    },
    /// Tabulate g_nk from the known potentials at the given eigenvalues.
    Gtable {
        #[arg(long = "known", required = true)]
        known: Vec<PathBuf>,
        #[arg(long)]
        spectra: PathBuf,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        Error::NumberingAmbiguity(_) => EXIT_AMBIGUITY,
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        Error::NotABasis { .. } => EXIT_NOT_A_BASIS,
        _ => EXIT_FAILURE,
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<(), Error> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        println!("{}", text());
    }
    Ok(())
}

fn assumption_text(r: &AssumptionReport) -> String {
    let mark = |ok: bool| if ok { "ok" } else { "VIOLATED" };
    format!(
        "assumptions: (i) distinct {}, (ii) positive {}, (iii) S_j nonzero {}, (iv) z1 separated {}, (v) S_1(0) {}",
        mark(r.distinct_ok),
        mark(r.positive_ok),
        mark(r.s_nonzero_ok),
        mark(r.z1_separated_ok),
        mark(r.s1_at_zero_ok)
    )
}

fn slice_spectra(s: &PartialSpectrum, n_max: usize) -> Result<PartialSpectrum, Error> {
    if s.family1.len() < n_max + 1 {
        return Err(Error::MissingEigenvalue { n: s.family1.len() + 1, k: 1 });
    }
    if s.family2.len() < n_max {
        return Err(Error::MissingEigenvalue { n: s.family2.len() + 1, k: 2 });
    }
    Ok(PartialSpectrum::new(s.family1[..=n_max].to_vec(), s.family2[..n_max].to_vec()))
}

fn run(cli: Cli) -> Result<(), Error> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Forward { problem, trunc, out } => {
            let p = io::read_problem(&problem)?;
            let table = compute_spectrum(&p, trunc.n_max as usize)?;
            io::write_spectrum(&out, &table)?;
            let report = check_assumptions(&p, &table)?;
            emit(json, &report, || assumption_text(&report))
        }
        Cmd::Invert { known, spectra, n_max, basis_dim, out } => {
            let known = known.iter().map(|p| io::read_potential(p)).collect::<Result<Vec<_>, _>>()?;
            let s = io::read_spectrum(&spectra)?;
            let opts = InverseOptions { n_max: n_max.map(|n| n as usize), basis_dim, ..Default::default() };
            let r = full_inverse(&known, &s.family1, &s.family2, &opts)?;
            io::write_reconstruction(&out, &r)?;
            let d = &r.diagnostics;
            emit(json, d, || {
                format!(
                    "n_max {}, omega_1 {:.8}, moment residual {:.3e}, Gram eig [{:.4}, {:.4}], fit residual {:.3e} after {} iterations",
                    d.n_max, d.omega1, d.moment_residual_max, d.gram_min_eig, d.gram_max_eig, d.fit_residual, d.fit_iterations
                )
            })
        }
        Cmd::Roundtrip { problem, trunc, basis_dim, out } => {
            let p = io::read_problem(&problem)?;
            let n_max = trunc.n_max as usize;
            let table = compute_spectrum(&p, n_max + 1)?;
            let opts = InverseOptions { n_max: Some(n_max), basis_dim, ..Default::default() };
            let r = full_inverse(&p.potentials()[1..], &table.family(1), &table.family(2)[..n_max], &opts)?;
            let err = r.q1.l2_distance(p.potential(1))?;
            if let Some(out) = out {
                io::write_reconstruction(&out, &r)?;
            }
            #[derive(Serialize)]
            struct Report<'a> {
                q1_error_l2: f64,
                diagnostics: &'a starip::reconstruct::Diagnostics,
            }
            emit(json, &Report { q1_error_l2: err, diagnostics: &r.diagnostics }, || {
                format!("n_max {n_max}: ||q1_rec - q1||_L2 = {err:.6e}")
            })
        }
        Cmd::Stability { problem, trunc, eps, trials, seed, basis_dim, out } => {
            let p = io::read_problem(&problem)?;
            let opts = InverseOptions { n_max: Some(trunc.n_max as usize), basis_dim, ..Default::default() };
            let report = run_stability(&p, &eps, trials, seed, &opts)?;
            io::write_stability(&out, &report)?;
            emit(json, &report.summary, || {
                let mut s = format!("baseline q1 error {:.6e}", report.baseline_error_l2);
                for row in &report.summary {
                    s.push_str(&format!(
                        "\neps {:e}: median ratio {:.6}, failures {}",
                        row.epsilon, row.median_ratio, row.failures
                    ));
                }
                s
            })
        }
        Cmd::BasisCheck { spectra, g, omega, trunc, points } => {
            let n_max = trunc.n_max as usize;
            let s = slice_spectra(&io::read_spectrum(&spectra)?, n_max)?;
            let g = io::read_gtable(&g)?;
            let system = build_moment_system(&s, &g, omega, n_max, points)?;
            let rep: GramReport = gram_condition_report(&system)?;
            emit(json, &rep, || {
                format!(
                    "Gram eigenvalues [{:.6}, {:.6}], l2 distance to reference {:.6}",
                    rep.min_eig, rep.max_eig, rep.l2_distance_to_reference
                )
            })
        }
        Cmd::Gtable { known, spectra, trunc, out } => {
            let known = known.iter().map(|p| io::read_potential(p)).collect::<Result<Vec<_>, _>>()?;
            let s = slice_spectra(&io::read_spectrum(&spectra)?, trunc.n_max as usize)?;
            let g = aggregate_g(&known, &s)?;
            io::write_gtable(&out, &g)?;
            let infinite = g.labelled().filter(|(_, _, v)| v.finite().is_none()).count();
            emit(json, &serde_json::json!({ "rows": g.family1.len() + g.family2.len(), "infinite": infinite }), || {
                format!("{} rows, {infinite} infinite", g.family1.len() + g.family2.len())
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
