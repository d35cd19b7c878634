mod common;

use std::path::Path;
use std::process::{Command, Output};

use starip::graph::compute_spectrum;
use starip::io;

use common::{fixture, zero_problem};

fn starip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starip")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn forward_on_zero_potentials() {
    let d = tempfile::tempdir().unwrap();
    let problem = d.path().join("zero.csv");
    let spec = d.path().join("spec.csv");
    io::write_problem(&problem, &zero_problem(3, 129)).unwrap();
    let out = starip(&["forward", s(&problem), "--n-max", "2", "--out", s(&spec)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&spec).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("n,k,lambda,multiplicity"));
    let want = [(1, 1, 0.25, 1), (2, 1, 2.25, 1), (1, 2, 1.0, 2), (2, 2, 4.0, 2), (1, 3, 1.0, 2), (2, 3, 4.0, 2)];
    for ((n, k, l, m), row) in want.iter().zip(rows) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!((f[0].parse::<usize>().unwrap(), f[1].parse::<usize>().unwrap()), (*n, *k));
        assert!((f[2].parse::<f64>().unwrap() - l).abs() < 1e-10, "{row}");
        assert_eq!(f[3].parse::<usize>().unwrap(), *m);
    }
}

#[test]
fn malformed_input_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let problem = d.path().join("bad.csv");
    std::fs::write(&problem, "x,q1,q2\n0,0,0\nnot-a-number,0,0\n").unwrap();
    let out = starip(&["forward", s(&problem), "--n-max", "2", "--out", s(&d.path().join("o.csv"))]);
    assert_eq!(code(&out), 2);

    let missing = starip(&["forward", s(&d.path().join("nope.csv")), "--n-max", "2", "--out", "o.csv"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn zero_n_max_is_a_usage_error() {
    let out = starip(&["forward", "whatever.csv", "--n-max", "0", "--out", "o.csv"]);
    assert_eq!(code(&out), 64);
    assert_eq!(code(&starip(&["frobnicate"])), 64);
    assert_eq!(code(&starip(&["--help"])), 0);
}

#[test]
fn missing_second_family_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let p = fixture(129);
    let q2 = d.path().join("q2.csv");
    let q3 = d.path().join("q3.csv");
    io::write_potential(&q2, "q2", p.potential(2)).unwrap();
    io::write_potential(&q3, "q3", p.potential(3)).unwrap();
    let spec = d.path().join("s.csv");
    let t = compute_spectrum(&p, 10).unwrap();
    let mut text = String::from("n,k,lambda\n");
    for n in 1..=10 {
        text.push_str(&format!("{n},1,{}\n", t.lambda(n, 1).unwrap()));
    }
    std::fs::write(&spec, text).unwrap();
    let out = starip(&["invert", "--known", s(&q2), "--known", s(&q3), "--spectra", s(&spec), "--out", "o.csv"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn duplicated_eigenvalue_exits_5() {
    let d = tempfile::tempdir().unwrap();
    let p = fixture(257);
    let n_max = 12;
    let t = compute_spectrum(&p, n_max + 1).unwrap();
    let q2 = d.path().join("q2.csv");
    let q3 = d.path().join("q3.csv");
    io::write_potential(&q2, "q2", p.potential(2)).unwrap();
    io::write_potential(&q3, "q3", p.potential(3)).unwrap();

    let mut fam2 = t.family(2)[..n_max].to_vec();
    fam2[4] = fam2[3];
    let mut text = String::from("n,k,lambda\n");
    for (n, l) in t.family(1).iter().enumerate() {
        text.push_str(&format!("{},1,{l}\n", n + 1));
    }
    for (n, l) in fam2.iter().enumerate() {
        text.push_str(&format!("{},2,{l}\n", n + 1));
    }
    let spec = d.path().join("s.csv");
    std::fs::write(&spec, text).unwrap();

    let rec = d.path().join("q1.csv");
    let out = starip(&["invert", "--known", s(&q2), "--known", s(&q3), "--spectra", s(&spec), "--out", s(&rec)]);
    assert_eq!(code(&out), 5, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("assumption (i)"));

    let g = d.path().join("g.csv");
    let n = n_max.to_string();
    let out = starip(&[
        "gtable", "--known", s(&q2), "--known", s(&q3), "--spectra", s(&spec), "--n-max", &n, "--out", s(&g),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let omega = p.omegas()[0].to_string();
    let out = starip(&["basis-check", "--spectra", s(&spec), "--g", s(&g), "--omega", &omega, "--n-max", &n]);
    assert_eq!(code(&out), 5, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn stability_is_reproducible_for_a_seed() {
    let d = tempfile::tempdir().unwrap();
    let problem = d.path().join("p.csv");
    io::write_problem(&problem, &fixture(257)).unwrap();
    let run = |name: &str| {
        let out = d.path().join(name);
        let o = starip(&[
            "stability", s(&problem), "--n-max", "10", "--eps", "1e-3", "--trials", "2", "--seed", "7", "--out", s(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        (std::fs::read(&out).unwrap(), std::fs::read(io::sidecar_path(&out)).unwrap())
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn roundtrip_reports_json() {
    let d = tempfile::tempdir().unwrap();
    let problem = d.path().join("p.csv");
    io::write_problem(&problem, &fixture(513)).unwrap();
    let out = starip(&["--json", "roundtrip", s(&problem), "--n-max", "20"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let err = v["q1_error_l2"].as_f64().unwrap();
    assert!(err < 1e-2, "{err}");
}
