//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Termination settings for [`brent`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions<S> {
    /// Relative tolerance on the abscissa.
    pub rel_tol: S,
    /// Absolute tolerance on the abscissa.
    pub abs_tol: S,
    pub max_iter: usize,
}

impl<S: Real> Default for RootOptions<S> {
    fn default() -> Self {
        Self {
            rel_tol: S::tolerance(1e-12),
            abs_tol: S::zero(),
            max_iter: 200,
        }
    }
}

/// Brent's method (bisection / secant / inverse quadratic interpolation).
///
/// `f(a)` and `f(b)` must have opposite signs, or one of them must vanish.
pub fn brent<S, F>(mut f: F, a: S, b: S, opts: RootOptions<S>) -> Result<S>
where
    S: Real,
    F: FnMut(S) -> Result<S>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Root(format!(
            "non-finite bracket values f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    if fa == S::zero() {
        return Ok(a);
    }
    if fb == S::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Root(format!(
            "no sign change on [{a}, {b}]: f = {fa}, {fb}"
        )));
    }

    let two = S::of(2.0);
    let half = S::of(0.5);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..opts.max_iter {
        if fb.signum() == fc.signum() {
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
        let tol = two * S::epsilon() * b.abs() + half * (opts.rel_tol * b.abs() + opts.abs_tol);
        let m = half * (c - b);
        if m.abs() <= tol || fb == S::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = S::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - S::one()));
                q = (qa - S::one()) * (r - S::one()) * (s - S::one());
            }
            if p > S::zero() {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = S::of(3.0) * m * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol {
            b + d
        } else if m > S::zero() {
            b + tol
        } else {
            b - tol
        };
        fb = f(b)?;
        if !fb.is_finite() {
            return Err(Error::Root(format!("non-finite value f({b}) = {fb}")));
        }
    }
    Err(Error::Root(format!(
        "no convergence after {} iterations (last iterate {b})",
        opts.max_iter
    )))
}

/// Sign changes of `f` over the ordered sample points `xs`.
///
/// Returns the bracketing pairs `(x_i, x_{i+1})` in ascending order together
/// with the sampled values.
pub fn scan_sign_changes<S, F>(mut f: F, xs: &[S]) -> Result<(Vec<(S, S)>, Vec<S>)>
where
    S: Real,
    F: FnMut(S) -> Result<S>,
{
    let values = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let brackets = xs
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, fv)| fv[0] == S::zero() || fv[0].signum() != fv[1].signum())
        .map(|(x, _)| (x[0], x[1]))
        .collect();
    Ok((brackets, values))
}

/// `n` log-spaced points on `[lo, hi]` (both positive), endpoints included.
pub fn log_space<S: Real>(lo: S, hi: S, n: usize) -> Vec<S> {
    assert!(n >= 2 && lo > S::zero() && hi > lo);
    let (l0, l1) = (lo.ln(), hi.ln());
    let step = (l1 - l0) / S::of((n - 1) as f64);
    let mut out: Vec<S> = (0..n).map(|i| (l0 + step * S::of(i as f64)).exp()).collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt2() {
        let opts = RootOptions { rel_tol: 1e-15, ..RootOptions::default() };
        let r = brent(|x: f64| Ok(x * x - 2.0), 0.0, 2.0, opts).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_handles_steep_transcendental() {
        let f = |x: f64| Ok((-1.0 / x).exp() - 1e-3);
        let r = brent(f, 0.01, 10.0, RootOptions::default()).unwrap();
        assert!(((-1.0 / r).exp() - 1e-3).abs() < 1e-14);
        assert!((r - 1.0 / 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn brent_rejects_missing_sign_change() {
        assert!(brent(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, RootOptions::default()).is_err());
    }

    #[test]
    fn brent_in_f32() {
        let r = brent(|x: f32| Ok(x.cos() - x), 0.0, 1.0, RootOptions::default()).unwrap();
        assert!((r - 0.739_085_1).abs() < 1e-6);
    }

    #[test]
    fn scan_reports_every_crossing() {
        let xs: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let (br, _) = scan_sign_changes(|x: f64| Ok(x.sin()), &xs[1..]).unwrap();
        assert_eq!(br.len(), 3);
        assert!(br[0].0 < std::f64::consts::PI && std::f64::consts::PI < br[0].1);
    }

    #[test]
    fn log_space_endpoints() {
        let xs = log_space(1e-3_f64, 1e3, 7);
        assert_eq!(xs[0], 1e-3);
        assert_eq!(xs[6], 1e3);
        assert!((xs[3] - 1.0).abs() < 1e-12);
    }
}
