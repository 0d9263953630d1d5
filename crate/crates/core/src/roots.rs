//! Bracketed scalar root finding.

use crate::{Error, Result};

/// Result of a successful bracketed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Brent's method on `[a, b]`.
///
/// Requires `f(a)` and `f(b)` of opposite sign (or one of them zero).
/// Terminates when the bracket is narrower than `x_tol` or `|f| <= f_tol`.
pub fn brent<F>(mut f: F, a: f64, b: f64, x_tol: f64, f_tol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite function value at bracket ends ({a}, {b})"
        )));
    }
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoPhaseMatching(format!(
            "no sign change on [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }

    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;

    for iter in 1..=max_iter {
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };

        let lo = (3.0 * a + b) / 4.0;
        let outside = if lo < b { s < lo || s > b } else { s > lo || s < b };
        if outside
            || (bisected && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!bisected && (s - b).abs() >= (c - d).abs() / 2.0)
            || (bisected && (b - c).abs() < x_tol)
            || (!bisected && (c - d).abs() < x_tol)
        {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }

        let fs = f(s);
        if !fs.is_finite() {
            return Err(Error::Numerical(format!("non-finite function value at x = {s}")));
        }
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
        if fb.abs() <= f_tol || (b - a).abs() <= x_tol {
            return Ok(Root { x: b, residual: fb, iterations: iter });
        }
    }
    Err(Error::Numerical(format!(
        "Brent iteration did not converge in {max_iter} steps (last x = {b}, f = {fb:e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_root() {
        let r = brent(|x| -x * x + 2.0 * x + 1.0, 2.0, 3.0, 1e-14, 0.0, 100).unwrap();
        assert!((r.x - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn transcendental_root() {
        let r = brent(|x: f64| x.cos() - x, 0.0, 1.0, 1e-15, 0.0, 100).unwrap();
        assert!((r.x - 0.739_085_133_215_160_6).abs() < 1e-12);
        assert!(r.iterations < 20);
    }

    #[test]
    fn no_sign_change() {
        let err = brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0, 50).unwrap_err();
        assert!(matches!(err, Error::NoPhaseMatching(_)));
    }

    #[test]
    fn endpoint_root() {
        let r = brent(|x| x - 1.0, 1.0, 2.0, 1e-12, 0.0, 50).unwrap();
        assert_eq!(r.x, 1.0);
    }
}
