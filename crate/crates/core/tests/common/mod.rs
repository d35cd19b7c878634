#![allow(dead_code)]

use starip::{GridFunction, StarGraphProblem};

/// `q1 = cos x + 2`, `q2 = 1`, `q3 = x`.
pub fn fixture(n_points: usize) -> StarGraphProblem {
    with_q1(n_points, |x| x.cos() + 2.0)
}

/// Edges 2 and 3 of the fixture with a chosen `q1`.
pub fn with_q1(n_points: usize, q1: impl Fn(f64) -> f64) -> StarGraphProblem {
    StarGraphProblem::new(vec![
        GridFunction::from_fn(n_points, q1).unwrap(),
        GridFunction::constant(n_points, 1.0).unwrap(),
        GridFunction::from_fn(n_points, |x| x).unwrap(),
    ])
    .unwrap()
}

pub fn zero_problem(m: usize, n_points: usize) -> StarGraphProblem {
    StarGraphProblem::new(vec![GridFunction::zeros(n_points).unwrap(); m]).unwrap()
}

/// `lambda_n1` for `n <= n_max + 1` and `lambda_n2` for `n <= n_max`.
pub fn inverse_data(p: &StarGraphProblem, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let t = starip::compute_spectrum(p, n_max + 1).unwrap();
    (t.family(1), t.family(2)[..n_max].to_vec())
}
