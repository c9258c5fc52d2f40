//! Dormand-Prince 5(4) embedded Runge-Kutta integrator with adaptive steps.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<S> {
    pub rel_tol: S,
    /// Absolute tolerance, one entry per component.
    pub abs_tol: S,
    /// Initial step; `None` picks one from the interval length.
    pub initial_step: Option<S>,
    pub max_steps: usize,
}

impl<S: Real> Default for OdeOptions<S> {
    fn default() -> Self {
        Self {
            rel_tol: S::tolerance(1e-10),
            abs_tol: S::tolerance(1e-12),
            initial_step: None,
            max_steps: 200_000,
        }
    }
}

/// Accepted steps of an integration: abscissae, states and state derivatives.
///
/// The stored derivatives make cubic Hermite dense output available through
/// [`Trajectory::eval`].
#[derive(Debug, Clone)]
pub struct Trajectory<S, const N: usize> {
    pub t: Vec<S>,
    pub y: Vec<[S; N]>,
    pub dy: Vec<[S; N]>,
}

impl<S: Real, const N: usize> Trajectory<S, N> {
    pub fn last(&self) -> [S; N] {
        *self.y.last().expect("trajectory holds at least the initial point")
    }

    pub fn t_end(&self) -> S {
        *self.t.last().expect("trajectory holds at least the initial point")
    }

    /// Cubic Hermite interpolation between accepted steps; clamps outside.
    pub fn eval(&self, t: S) -> [S; N] {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.y[0];
        }
        if t >= self.t[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.t.binary_search_by(|p| p.partial_cmp(&t).expect("finite abscissa")) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let (one, two, three) = (S::one(), S::of(2.0), S::of(3.0));
        let h00 = (one + two * s) * (one - s) * (one - s);
        let h10 = s * (one - s) * (one - s);
        let h01 = s * s * (three - two * s);
        let h11 = s * s * (s - one);
        let mut out = [S::zero(); N];
        for k in 0..N {
            out[k] = h00 * self.y[i][k]
                + h10 * h * self.dy[i][k]
                + h01 * self.y[i + 1][k]
                + h11 * h * self.dy[i + 1][k];
        }
        out
    }
}

// Butcher tableau of the Dormand-Prince pair.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights equal the last row of A (FSAL); error = b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`.
///
/// `f` may fail (for example when a coefficient degenerates); the error is
/// returned unchanged. Step-size collapse or a non-finite state is reported
/// as [`Error::Integration`] carrying the abscissa reached.
pub fn integrate<S, const N: usize, F>(
    mut f: F,
    t0: S,
    y0: [S; N],
    t1: S,
    opts: &OdeOptions<S>,
) -> Result<Trajectory<S, N>>
where
    S: Real,
    F: FnMut(S, &[S; N]) -> Result<[S; N]>,
{
    if !(t1 > t0) {
        return Err(Error::Integration {
            at: t0.as_f64(),
            reason: format!("empty interval [{t0}, {t1}]"),
        });
    }
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(t, &y)?;
    let mut traj = Trajectory {
        t: vec![t],
        y: vec![y],
        dy: vec![k0],
    };
    let mut h = opts.initial_step.unwrap_or(span * S::of(1e-3)).min(span);
    let h_min = span * S::epsilon() * S::of(64.0);
    let (safety, min_fac, max_fac) = (S::of(0.9), S::of(0.2), S::of(5.0));
    let order_exp = S::of(0.2);

    for _ in 0..opts.max_steps {
        if t >= t1 {
            return Ok(traj);
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let mut k = [[S::zero(); N]; 7];
        k[0] = k0;
        let mut stage_failed = None;
        for s in 1..7 {
            let mut ys = y;
            for (j, a) in A[s].iter().enumerate().take(s) {
                if *a != 0.0 {
                    let a = S::of(*a);
                    for c in 0..N {
                        ys[c] = ys[c] + h * a * k[j][c];
                    }
                }
            }
            match f(t + S::of(C[s]) * h, &ys) {
                Ok(v) => k[s] = v,
                Err(e) => {
                    stage_failed = Some(e);
                    break;
                }
            }
        }
        // y_{n+1} was evaluated as the stage-6 argument.
        let mut y_new = y;
        let mut err_norm = S::zero();
        if stage_failed.is_none() {
            for c in 0..N {
                let mut acc = S::zero();
                let mut err = S::zero();
                for s in 0..6 {
                    acc = acc + S::of(A[6][s]) * k[s][c];
                }
                for s in 0..7 {
                    err = err + S::of(E[s]) * k[s][c];
                }
                y_new[c] = y[c] + h * acc;
                let scale = opts.abs_tol + opts.rel_tol * y[c].abs().max(y_new[c].abs());
                let r = h * err / scale;
                err_norm = err_norm + r * r;
            }
            err_norm = (err_norm / S::of(N as f64)).sqrt();
        }

        let finite = y_new.iter().all(|v| v.is_finite()) && err_norm.is_finite();
        if stage_failed.is_none() && finite && err_norm <= S::one() {
            t = if last { t1 } else { t + h };
            y = y_new;
            k0 = k[6];
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(k0);
            let fac = if err_norm == S::zero() {
                max_fac
            } else {
                (safety * err_norm.powf(-order_exp)).min(max_fac).max(min_fac)
            };
            h = h * fac;
        } else {
            let fac = if finite && stage_failed.is_none() {
                (safety * err_norm.powf(-order_exp)).max(min_fac)
            } else {
                S::of(0.25)
            };
            h = h * fac.min(S::of(0.9));
            if h < h_min {
                return Err(stage_failed.unwrap_or_else(|| Error::Integration {
                    at: t.as_f64(),
                    reason: "step size underflow".into(),
                }));
            }
        }
    }
    Err(Error::Integration {
        at: t.as_f64(),
        reason: format!("exceeded {} steps", opts.max_steps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let opts = OdeOptions::default();
        let tr = integrate(|_t, y: &[f64; 1]| Ok([-2.0 * y[0]]), 0.0, [1.0], 3.0, &opts).unwrap();
        assert!((tr.last()[0] - (-6.0f64).exp()).abs() < 1e-11);
        let mid = tr.eval(1.3)[0];
        assert!((mid - (-2.6f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        let opts = OdeOptions::default();
        let tr = integrate(
            |_t, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [1.0, 0.0],
            20.0,
            &opts,
        )
        .unwrap();
        let y = tr.last();
        assert!((y[0] - 20f64.cos()).abs() < 1e-8);
        assert!((y[0] * y[0] + y[1] * y[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rhs_failure_is_propagated() {
        let opts = OdeOptions::default();
        let r = integrate(
            |t, y: &[f64; 1]| {
                if t > 0.5 {
                    Err(Error::DegenerateDiffusivity { w: y[0], d: 0.0 })
                } else {
                    Ok([1.0])
                }
            },
            0.0,
            [0.0],
            1.0,
            &opts,
        );
        assert!(matches!(r, Err(Error::DegenerateDiffusivity { .. })));
    }

    #[test]
    fn runs_in_f32() {
        let opts = OdeOptions::<f32>::default();
        let tr = integrate(|_t, y: &[f32; 1]| Ok([y[0]]), 0.0, [1.0], 1.0, &opts).unwrap();
        assert!((tr.last()[0] - std::f32::consts::E).abs() < 1e-5);
    }
}
