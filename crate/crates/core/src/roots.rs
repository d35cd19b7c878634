//! Bracketed root refinement and sign-change scans in the signed frequency
//! `sigma`, where `lambda = sigma * |sigma|`.

use crate::error::Result;

/// Default scan step in `sigma`.
pub const SCAN_STEP: f64 = std::f64::consts::PI / 40.0;

#[inline]
pub fn lambda_of(sigma: f64) -> f64 {
    sigma * sigma.abs()
}

/// Signed square root: `sqrt(lambda)` for `lambda >= 0`, `-sqrt(-lambda)` otherwise.
#[inline]
pub fn sigma_of(lambda: f64) -> f64 {
    if lambda >= 0.0 {
        lambda.sqrt()
    } else {
        -(-lambda).sqrt()
    }
}

/// Brent's method on a bracket `[a, b]` with `fa * fb <= 0`.
///
/// Iterates to machine precision unless `xtol` is larger.
pub fn brent<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    debug_assert!(fa * fb < 0.0, "brent needs a sign change");
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Ok(b)
}

/// Scans `f(lambda)` on `sigma` nodes from `sigma_lo` to `sigma_hi` and refines
/// every sign change with Brent. Returns roots in ascending order.
pub fn scan_roots<F>(mut f: F, sigma_lo: f64, sigma_hi: f64, step: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut roots = Vec::new();
    let cells = ((sigma_hi - sigma_lo) / step).ceil().max(1.0) as usize;
    let mut prev_l = lambda_of(sigma_lo);
    let mut prev_f = f(prev_l)?;
    if prev_f == 0.0 {
        roots.push(prev_l);
    }
    for i in 1..=cells {
        let sigma = if i == cells { sigma_hi } else { sigma_lo + i as f64 * step };
        let l = lambda_of(sigma);
        let v = f(l)?;
        if v == 0.0 {
            roots.push(l);
        } else if prev_f != 0.0 && (prev_f < 0.0) != (v < 0.0) {
            roots.push(brent(&mut f, prev_l, l, prev_f, v, 0.0)?);
        }
        prev_l = l;
        prev_f = v;
    }
    Ok(roots)
}
