//! Quadrature rules.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Subdivides until the Richardson estimate of each panel drops below its
/// share of `rel_tol * |I|` (with `|I|` estimated from the coarse pass).
pub fn adaptive_simpson<S, F>(f: F, a: S, b: S, rel_tol: S) -> Result<S>
where
    S: Real,
    F: Fn(S) -> S,
{
    if a == b {
        return Ok(S::zero());
    }
    let half = S::of(0.5);
    let m = (a + b) * half;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    // Scale for the absolute target; guard against integrands with I ~ 0.
    let coarse = gauss_legendre(&f, a, b, 16).abs().max(whole.abs());
    let target = rel_tol * coarse.max(S::min_positive_value());
    let mut depth_hit = false;
    let v = recurse(&f, a, b, fa, fm, fb, whole, target, 48, &mut depth_hit);
    if depth_hit || !v.is_finite() {
        return Err(Error::Integration {
            at: a.as_f64(),
            reason: format!("adaptive Simpson did not converge on [{a}, {b}]"),
        });
    }
    Ok(v)
}

fn simpson<S: Real>(a: S, b: S, fa: S, fm: S, fb: S) -> S {
    (b - a) / S::of(6.0) * (fa + S::of(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<S: Real, F: Fn(S) -> S>(
    f: &F,
    a: S,
    b: S,
    fa: S,
    fm: S,
    fb: S,
    whole: S,
    tol: S,
    depth: u32,
    depth_hit: &mut bool,
) -> S {
    let half = S::of(0.5);
    let m = (a + b) * half;
    let (lm, rm) = ((a + m) * half, (m + b) * half);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= S::of(15.0) * tol || (b - a).abs() <= S::epsilon() * a.abs().max(b.abs()) {
        return left + right + delta / S::of(15.0);
    }
    if depth == 0 {
        *depth_hit = true;
        return left + right + delta / S::of(15.0);
    }
    recurse(f, a, m, fa, flm, fm, left, tol * half, depth - 1, depth_hit)
        + recurse(f, m, b, fm, frm, fb, right, tol * half, depth - 1, depth_hit)
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre rule with `panels` equal panels.
pub fn gauss_legendre<S, F>(f: &F, a: S, b: S, panels: usize) -> S
where
    S: Real,
    F: Fn(S) -> S + ?Sized,
{
    let n = panels.max(1);
    let w = (b - a) / S::of(n as f64);
    let half = w * S::of(0.5);
    let mut sum = S::zero();
    for p in 0..n {
        let mid = a + w * (S::of(p as f64) + S::of(0.5));
        for (x, wt) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            let dx = half * S::of(*x);
            sum = sum + S::of(*wt) * (f(mid - dx) + f(mid + dx));
        }
    }
    sum * half
}
