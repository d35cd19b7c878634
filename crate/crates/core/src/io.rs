//! CSV and JSON artifacts read and written by the command-line tool.
//!
//! | artifact | columns |
//! |---|---|
//! | problem | `x,q1,...,qm` |
//! | potential | `x,q` (any second header) |
//! | spectrum | `n,k,lambda,multiplicity` |
//! | g table | `n,k,g` with `inf` for infinite values |
//! | Cauchy data | `t,N,K` plus a `.json` sidecar |
//! | reconstruction | `x,q1` plus a `.json` diagnostics sidecar |
//! | stability | one row per trial, plus a `.json` summary sidecar |

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SpectrumTable, StarGraphProblem};
use crate::grid::{step_for, GridFunction};
use crate::moments::CauchyData;
use crate::reconstruct::ReconstructionResult;
use crate::stability::StabilityReport;
use crate::weyl::{GTable, GValue, PartialSpectrum};

/// Relative tolerance on the spacing of the `x` column.
const GRID_TOL: f64 = 1e-9;

/// `path` with its extension replaced by `json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn parse_err(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}: {msg}", path.display()))
}

fn read_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut cols = vec![Vec::new(); headers.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != headers.len() {
            return Err(parse_err(path, format!("row {} has {} fields", line + 1, rec.len())));
        }
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(path, format!("row {}: bad number {field:?}", line + 1)))?;
            cols[c].push(v);
        }
    }
    Ok((headers, cols))
}

fn check_grid(path: &Path, xs: &[f64]) -> Result<()> {
    if xs.len() < 3 {
        return Err(parse_err(path, "need at least 3 grid points"));
    }
    let h = step_for(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        if (x - i as f64 * h).abs() > GRID_TOL * std::f64::consts::PI {
            return Err(parse_err(path, format!("x[{i}] = {x} is off the uniform grid on [0, pi]")));
        }
    }
    Ok(())
}

/// Reads `x,q1,...,qm`.
pub fn read_problem(path: &Path) -> Result<StarGraphProblem> {
    let (headers, mut cols) = read_columns(path)?;
    if headers.len() < 3 || headers[0] != "x" {
        return Err(parse_err(path, "expected header x,q1,...,qm with m >= 2"));
    }
    check_grid(path, &cols[0])?;
    let qs = cols.drain(1..).map(GridFunction::new).collect::<Result<Vec<_>>>()?;
    StarGraphProblem::new(qs)
}

pub fn write_problem(path: &Path, problem: &StarGraphProblem) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["x".to_string()];
    header.extend((1..=problem.m()).map(|j| format!("q{j}")));
    w.write_record(&header)?;
    let xs: Vec<f64> = problem.potential(1).xs().collect();
    for (i, x) in xs.iter().enumerate() {
        let mut row = vec![x.to_string()];
        row.extend(problem.potentials().iter().map(|q| q.values()[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a two-column `x,<name>` file.
pub fn read_potential(path: &Path) -> Result<GridFunction> {
    let (headers, cols) = read_columns(path)?;
    if headers.len() != 2 || headers[0] != "x" {
        return Err(parse_err(path, "expected header x,<name>"));
    }
    check_grid(path, &cols[0])?;
    GridFunction::new(cols[1].clone())
}

pub fn write_potential(path: &Path, name: &str, q: &GridFunction) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", name])?;
    for (x, v) in q.xs().zip(q.values()) {
        w.write_record([x.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumRow {
    n: usize,
    k: usize,
    lambda: f64,
    multiplicity: usize,
}

pub fn write_spectrum(path: &Path, table: &SpectrumTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for e in &table.entries {
        w.serialize(SpectrumRow { n: e.n, k: e.k, lambda: e.lambda, multiplicity: e.multiplicity })?;
    }
    w.flush()?;
    Ok(())
}

fn family_from(path: &Path, rows: &BTreeMap<(usize, usize), f64>, k: usize) -> Result<Vec<f64>> {
    let fam: Vec<(usize, f64)> =
        rows.iter().filter(|((_, kk), _)| *kk == k).map(|((n, _), &l)| (*n, l)).collect();
    if fam.is_empty() {
        return Err(parse_err(path, format!("family k = {k} is missing")));
    }
    for (i, (n, _)) in fam.iter().enumerate() {
        if *n != i + 1 {
            return Err(parse_err(path, format!("family k = {k} skips n = {}", i + 1)));
        }
    }
    Ok(fam.into_iter().map(|(_, l)| l).collect())
}

/// Reads the `k = 1` and `k = 2` families of a spectrum file; other
/// families are ignored. The `multiplicity` column is optional.
pub fn read_spectrum(path: &Path) -> Result<PartialSpectrum> {
    let (headers, cols) = read_columns(path)?;
    let idx = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ni), Some(ki), Some(li)) = (idx("n"), idx("k"), idx("lambda")) else {
        return Err(parse_err(path, "expected columns n,k,lambda"));
    };
    let mut rows = BTreeMap::new();
    for (r, ((&n, &k), &lambda)) in cols[ni].iter().zip(&cols[ki]).zip(&cols[li]).enumerate() {
        if n < 1.0 || k < 1.0 || n.fract() != 0.0 || k.fract() != 0.0 {
            return Err(parse_err(path, format!("row {}: bad label ({n}, {k})", r + 1)));
        }
        if rows.insert((n as usize, k as usize), lambda).is_some() {
            return Err(parse_err(path, format!("row {}: label ({n}, {k}) repeated", r + 1)));
        }
    }
    Ok(PartialSpectrum::new(family_from(path, &rows, 1)?, family_from(path, &rows, 2)?))
}

pub fn write_gtable(path: &Path, g: &GTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "k", "g"])?;
    for (n, k, v) in g.labelled() {
        let s = match v {
            GValue::Finite(x) => x.to_string(),
            GValue::Infinite => "inf".to_string(),
        };
        w.write_record([n.to_string(), k.to_string(), s])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_gtable(path: &Path) -> Result<GTable> {
    let (headers, cols) = read_columns(path)?;
    if headers != ["n", "k", "g"] {
        return Err(parse_err(path, "expected header n,k,g"));
    }
    let mut rows = BTreeMap::new();
    for (r, ((&n, &k), &g)) in cols[0].iter().zip(&cols[1]).zip(&cols[2]).enumerate() {
        let v = if g.is_infinite() { GValue::Infinite } else { GValue::Finite(g) };
        if !g.is_finite() && !g.is_infinite() {
            return Err(parse_err(path, format!("row {}: g is NaN", r + 1)));
        }
        rows.insert((n as usize, k as usize), v);
    }
    let fam = |k: usize| -> Result<Vec<GValue>> {
        let f: Vec<(usize, GValue)> =
            rows.iter().filter(|((_, kk), _)| *kk == k).map(|((n, _), v)| (*n, *v)).collect();
        for (i, (n, _)) in f.iter().enumerate() {
            if *n != i + 1 {
                return Err(parse_err(path, format!("family k = {k} skips n = {}", i + 1)));
            }
        }
        Ok(f.into_iter().map(|(_, v)| v).collect())
    };
    Ok(GTable { family1: fam(1)?, family2: fam(2)? })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CauchySidecar {
    pub omega: f64,
    pub n_max: usize,
    pub residual: f64,
}

pub fn write_cauchy(path: &Path, cd: &CauchyData, n_max: usize, residual: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "N", "K"])?;
    for ((t, n), k) in cd.n_func.xs().zip(cd.n_func.values()).zip(cd.k_func.values()) {
        w.write_record([t.to_string(), n.to_string(), k.to_string()])?;
    }
    w.flush()?;
    write_json(&sidecar_path(path), &CauchySidecar { omega: cd.omega, n_max, residual })
}

pub fn read_cauchy(path: &Path) -> Result<(CauchyData, CauchySidecar)> {
    let (headers, cols) = read_columns(path)?;
    if headers != ["t", "N", "K"] {
        return Err(parse_err(path, "expected header t,N,K"));
    }
    check_grid(path, &cols[0])?;
    let side: CauchySidecar = serde_json::from_reader(File::open(sidecar_path(path))?)?;
    let cd = CauchyData {
        n_func: GridFunction::new(cols[1].clone())?,
        k_func: GridFunction::new(cols[2].clone())?,
        omega: side.omega,
    };
    Ok((cd, side))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// `x,q1` plus the diagnostics in the sidecar.
pub fn write_reconstruction(path: &Path, r: &ReconstructionResult) -> Result<()> {
    write_potential(path, "q1", &r.q1)?;
    write_json(&sidecar_path(path), &r.diagnostics)
}

pub fn write_stability(path: &Path, report: &StabilityReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct Summary<'a> {
        n_max: usize,
        seed: u64,
        baseline_error_l2: f64,
        summary: &'a [crate::stability::StabilitySummary],
    }
    write_json(
        &sidecar_path(path),
        &Summary {
            n_max: report.n_max,
            seed: report.seed,
            baseline_error_l2: report.baseline_error_l2,
            summary: &report.summary,
        },
    )
}
