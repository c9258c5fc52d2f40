//! Similarity solutions `w(x/√t)` of the problem with `q(u)/√t`, `h(u)/√t`
//! surface data, by two-parameter shooting.
//!
//! With `ω = x/√t` and `p = d(w)·w'`, each phase obeys
//! `w' = p/d(w)`, `p' = -(ω/2)·p/d(w)`; fronts sit at `s_k = ω_k √t`.

use crate::error::{Error, Result};
use crate::material::{kirchhoff_inverse, MaterialSpec, Phase, TimeLaw, TransformedBvp};
use crate::numerics::ode::{integrate, OdeOptions, Trajectory};
use crate::scalar::Real;
use crate::travelling_wave::solve_travelling_wave;

/// Right-hand side `(p/d(w), -(ω/2)·p/d(w))` of the reduced equation.
pub fn ss_rhs<S: Real>(bvp: &TransformedBvp<S>, phase: Phase, omega: S, state: [S; 2]) -> Result<[S; 2]> {
    let [w, p] = state;
    let d = match phase {
        Phase::Liquid => (bvp.d1)(w),
        Phase::Solid => (bvp.d2)(w),
    };
    if !(d > S::zero()) || !d.is_finite() {
        return Err(Error::DegenerateDiffusivity { w: w.as_f64(), d: d.as_f64() });
    }
    let dw = p / d;
    Ok([dw, -omega * S::of(0.5) * dw])
}

/// Solver knobs.
#[derive(Debug, Clone, Copy)]
pub struct SelfSimilarOptions<S> {
    /// Converged when the largest normalized residual is at or below this.
    pub tol: S,
    pub max_iter: usize,
    /// Far-field truncation in diffusion widths `√(2 d2(v_inf))` past `ω2`.
    pub tail_widths: S,
    /// Fixed truncation point; overrides `tail_widths` when set.
    pub omega_max: Option<S>,
    pub ode: OdeOptions<S>,
}

impl<S: Real> Default for SelfSimilarOptions<S> {
    fn default() -> Self {
        Self {
            tol: S::tolerance(1e-8),
            max_iter: 100,
            tail_widths: S::of(10.0),
            omega_max: None,
            ode: OdeOptions::default(),
        }
    }
}

/// Converged similarity solution.
#[derive(Debug, Clone)]
pub struct SelfSimilarSolution<S> {
    /// Surface coordinate, m·s^{-1/2}; zero for a fixed-surface problem.
    pub omega1: S,
    /// Melting-front coordinate, m·s^{-1/2}.
    pub omega2: S,
    pub omega_max: S,
    /// Surface enthalpy, J·m⁻³.
    pub u1: S,
    /// `d1·u'` at the surface.
    pub p1: S,
    /// Largest normalized boundary residual.
    pub bc_residual: S,
    pub iterations: usize,
    /// `bc_residual` after each Newton iteration.
    pub history: Vec<S>,
    pub u_profile: Trajectory<S, 2>,
    pub v_profile: Trajectory<S, 2>,
}

impl<S: Real> SelfSimilarSolution<S> {
    /// Phase and enthalpy at similarity coordinate `omega ≥ ω1`.
    pub fn enthalpy_at(&self, omega: S) -> Result<(Phase, S)> {
        if !(omega >= self.omega1) {
            return Err(Error::Domain {
                what: "similarity coordinate",
                value: omega.as_f64(),
                lo: self.omega1.as_f64(),
                hi: f64::INFINITY,
            });
        }
        Ok(if omega <= self.omega2 {
            (Phase::Liquid, self.u_profile.eval(omega)[0])
        } else {
            (Phase::Solid, self.v_profile.eval(omega)[0])
        })
    }

    /// `d·w'` at `omega`.
    pub fn flux_at(&self, omega: S) -> S {
        if omega <= self.omega2 {
            self.u_profile.eval(omega)[1]
        } else {
            self.v_profile.eval(omega)[1]
        }
    }

    /// Enthalpy field at physical `(t, x)`, `t > 0`, `x ≥ ω1 √t`.
    pub fn field(&self, t: S, x: S) -> Result<(Phase, S)> {
        self.enthalpy_at(x / t.sqrt())
    }

    pub fn temperature_at(&self, spec: &MaterialSpec<S>, omega: S) -> Result<(Phase, S)> {
        let (phase, w) = self.enthalpy_at(omega)?;
        Ok((phase, kirchhoff_inverse(spec, phase, w)?))
    }
}

fn shoot_phase<S: Real>(
    bvp: &TransformedBvp<S>,
    phase: Phase,
    from: S,
    state: [S; 2],
    to: S,
    ode: &OdeOptions<S>,
) -> Result<Trajectory<S, 2>> {
    integrate(|w, y| ss_rhs(bvp, phase, w, *y), from, state, to, ode)
}

fn enthalpy_scale<S: Real>(bvp: &TransformedBvp<S>) -> S {
    bvp.vm_offset().abs().max((bvp.u_cap - bvp.u_m).abs())
}

fn ode_for<S: Real>(bvp: &TransformedBvp<S>, ode: &OdeOptions<S>) -> OdeOptions<S> {
    OdeOptions {
        abs_tol: ode.abs_tol * enthalpy_scale(bvp),
        ..*ode
    }
}

fn default_omega_max<S: Real>(bvp: &TransformedBvp<S>, omega2: S, opts: &SelfSimilarOptions<S>) -> S {
    opts.omega_max
        .unwrap_or_else(|| omega2 + opts.tail_widths * (S::of(2.0) * (bvp.d2)(bvp.v_inf)).sqrt())
}

struct Shot<S> {
    residuals: [S; 3],
    liquid: Trajectory<S, 2>,
    solid: Trajectory<S, 2>,
    omega_max: S,
}

/// Integrates both phases from a surface state and returns the normalized
/// residuals `(ω1/2 - h(u1), u(ω2) - u_m, v(ω_max) - v_inf)`.
fn shoot<S: Real>(
    bvp: &TransformedBvp<S>,
    omega1: S,
    omega2: S,
    u1: S,
    p1: S,
    opts: &SelfSimilarOptions<S>,
) -> Result<Shot<S>> {
    if !(omega1 >= S::zero() && omega1 < omega2) {
        return Err(Error::Precondition(format!(
            "need 0 <= omega1 < omega2 (got {omega1}, {omega2})"
        )));
    }
    let ode = ode_for(bvp, &opts.ode);
    let liquid = shoot_phase(bvp, Phase::Liquid, omega1, [u1, p1], omega2, &ode)?;
    let [u2, p2] = liquid.last();
    let p_s = p2 + bvp.h2 * omega2 * S::of(0.5);
    let omega_max = default_omega_max(bvp, omega2, opts).max(omega2 * S::of(1.0 + 1e-9));
    let solid = shoot_phase(bvp, Phase::Solid, omega2, [bvp.v_m, p_s], omega_max, &ode)?;
    let v_end = solid.last()[0];

    let h = (bvp.h_of_u)(u1);
    let half = omega1 * S::of(0.5);
    let r0 = (half - h) / half.max(h).max(S::min_positive_value());
    let w_scale = (u1 - bvp.u_m).abs().max(bvp.vm_offset().abs());
    let r1 = (u2 - bvp.u_m) / w_scale;
    let r2 = (v_end - bvp.v_inf) / bvp.vm_offset().abs();
    Ok(Shot {
        residuals: [r0, r1, r2],
        liquid,
        solid,
        omega_max,
    })
}

/// Normalized boundary residuals for an evaporating surface at `ω1` with
/// surface enthalpy `u1`; the surface slope comes from the flux balance
/// `d1 u' = H1 ω1/2 - q(u1)`.
pub fn shoot_residuals<S: Real>(bvp: &TransformedBvp<S>, omega1: S, omega2: S, u1: S) -> Result<[S; 3]> {
    if !(u1 > bvp.u_m && u1 <= bvp.u_cap) {
        return Err(Error::Domain {
            what: "surface enthalpy",
            value: u1.as_f64(),
            lo: bvp.u_m.as_f64(),
            hi: bvp.u_cap.as_f64(),
        });
    }
    let p1 = bvp.h1 * omega1 * S::of(0.5) - (bvp.q_of_u)(u1);
    Ok(shoot(bvp, omega1, omega2, u1, p1, &SelfSimilarOptions::default())?.residuals)
}

fn max_abs<S: Real>(r: &[S]) -> S {
    r.iter().fold(S::zero(), |m, v| m.max(v.abs()))
}

/// Damped Newton on two unknowns with a forward-difference Jacobian.
///
/// `eval` returns the two residuals driven to zero; `steps` gives the
/// difference increments per unknown.
fn newton2<S: Real, F>(
    mut eval: F,
    x0: [S; 2],
    steps: [S; 2],
    opts: &SelfSimilarOptions<S>,
) -> Result<([S; 2], Vec<S>)>
where
    F: FnMut([S; 2]) -> Result<[S; 2]>,
{
    let mut x = x0;
    let mut f = eval(x)?;
    let mut history = vec![max_abs(&f)];
    let mut best = max_abs(&f);
    // Polish well past the acceptance tolerance; stop once the line search
    // can no longer reduce the residual (integration noise floor).
    let target = opts.tol * S::of(1e-3);
    for _ in 0..opts.max_iter {
        if max_abs(&f) <= target {
            return Ok((x, history));
        }
        let mut jac = [[S::zero(); 2]; 2];
        for j in 0..2 {
            let mut xp = x;
            xp[j] = xp[j] + steps[j];
            // Fall back to a backward difference, returned as its forward equivalent.
            let fp = eval(xp).or_else(|_| {
                xp[j] = x[j] - steps[j];
                eval(xp).map(|v| [-v[0], -v[1]]).map(|v| [v[0] + f[0] + f[0], v[1] + f[1] + f[1]])
            })?;
            for i in 0..2 {
                jac[i][j] = (fp[i] - f[i]) / steps[j];
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == S::zero() || !det.is_finite() {
            return Err(Error::NonConvergence {
                iterations: history.len() - 1,
                best: best.as_f64(),
                history: history.iter().map(|v| v.as_f64()).collect(),
            });
        }
        let dx = [
            -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
        ];
        let current = max_abs(&f);
        let mut lambda = S::one();
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            if let Ok(ft) = eval(trial) {
                let m = max_abs(&ft);
                if m.is_finite() && m < current {
                    x = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            lambda = lambda * S::of(0.5);
        }
        history.push(max_abs(&f));
        best = best.min(max_abs(&f));
        if !accepted {
            break;
        }
    }
    if max_abs(&f) <= opts.tol {
        return Ok((x, history));
    }
    Err(Error::NonConvergence {
        iterations: history.len() - 1,
        best: best.as_f64(),
        history: history.iter().map(|v| v.as_f64()).collect(),
    })
}

/// Solves the evaporating similarity problem: Newton on `(u1, ω2)` with
/// `ω1 = 2 h(u1)` eliminated.
pub fn solve_self_similar<S: Real>(bvp: &TransformedBvp<S>) -> Result<SelfSimilarSolution<S>> {
    solve_self_similar_with(bvp, &SelfSimilarOptions::default())
}

pub fn solve_self_similar_with<S: Real>(
    bvp: &TransformedBvp<S>,
    opts: &SelfSimilarOptions<S>,
) -> Result<SelfSimilarSolution<S>> {
    if bvp.time_law != TimeLaw::InverseSqrt {
        return Err(Error::Precondition(format!(
            "similarity solutions need the inverse-sqrt surface law, got {}",
            bvp.time_law
        )));
    }
    if bvp.v_m == bvp.v_inf {
        return Err(Error::Precondition("v_m must differ from v_inf".into()));
    }

    // The steady problem with the same q, h gives the surface enthalpy, and
    // its liquid thickness, read in ω, the front offset.
    let steady = TransformedBvp {
        time_law: TimeLaw::Steady,
        ..bvp.clone()
    };
    let tw = solve_travelling_wave(&steady)?;
    let u1_0 = tw.u_s;
    let omega1_0 = S::of(2.0) * (bvp.h_of_u)(u1_0);
    let omega2_0 = omega1_0
        + S::of(2.0) * (bvp.d1)(bvp.u_m) / omega1_0 * ((u1_0 - bvp.u_m) / tw.k).ln_1p();

    let surface = |u1: S| {
        let omega1 = S::of(2.0) * (bvp.h_of_u)(u1);
        let p1 = bvp.h1 * omega1 * S::of(0.5) - (bvp.q_of_u)(u1);
        (omega1, p1)
    };
    let eval = |x: [S; 2]| -> Result<[S; 2]> {
        let [u1, omega2] = x;
        if !(u1 > bvp.u_m && u1 <= bvp.u_cap) {
            return Err(Error::Domain {
                what: "surface enthalpy",
                value: u1.as_f64(),
                lo: bvp.u_m.as_f64(),
                hi: bvp.u_cap.as_f64(),
            });
        }
        let (omega1, p1) = surface(u1);
        let r = shoot(bvp, omega1, omega2, u1, p1, opts)?.residuals;
        Ok([r[1], r[2]])
    };
    let steps = [
        (u1_0 - bvp.u_m) * S::of(1e-7),
        omega2_0 * S::of(1e-7),
    ];
    let ([u1, omega2], history) = newton2(eval, [u1_0, omega2_0], steps, opts)?;
    let (omega1, p1) = surface(u1);
    let shot = shoot(bvp, omega1, omega2, u1, p1, opts)?;
    Ok(SelfSimilarSolution {
        omega1,
        omega2,
        omega_max: shot.omega_max,
        u1,
        p1,
        bc_residual: max_abs(&shot.residuals),
        iterations: history.len() - 1,
        history,
        u_profile: shot.liquid,
        v_profile: shot.solid,
    })
}

/// Normalized residuals `(u(ω2) - u_m, v(ω_max) - v_inf)` for a surface held
/// at enthalpy `u_surface` at `ω = 0` with slope `d1 u'(0) = p0`.
pub fn shoot_fixed_surface<S: Real>(
    bvp: &TransformedBvp<S>,
    u_surface: S,
    p0: S,
    omega2: S,
) -> Result<[S; 2]> {
    let r = shoot(bvp, S::zero(), omega2, u_surface, p0, &SelfSimilarOptions::default())?.residuals;
    Ok([r[1], r[2]])
}

/// Two-phase melting from a surface held at enthalpy `u_surface`, with no
/// surface flux law and no evaporation (`ω1 = 0`). Newton on `(p0, ω2)`.
pub fn solve_fixed_surface<S: Real>(
    bvp: &TransformedBvp<S>,
    u_surface: S,
    opts: &SelfSimilarOptions<S>,
) -> Result<SelfSimilarSolution<S>> {
    if bvp.v_m == bvp.v_inf {
        return Err(Error::Precondition("v_m must differ from v_inf".into()));
    }
    if !(u_surface > bvp.u_m) {
        return Err(Error::Precondition(format!(
            "surface enthalpy {u_surface} must exceed u_m = {}",
            bvp.u_m
        )));
    }
    // Small-Stefan-number estimate: quasi-steady liquid, latent heat only.
    let k1 = (bvp.d1)(bvp.u_m);
    let stefan = (u_surface - bvp.u_m) / bvp.h2.max(bvp.vm_offset().abs());
    let omega2_0 = (S::of(2.0) * k1 * stefan).sqrt();
    let p0_0 = k1 * (bvp.u_m - u_surface) / omega2_0;

    let eval = |x: [S; 2]| -> Result<[S; 2]> {
        let [p0, omega2] = x;
        if !(omega2 > S::zero()) {
            return Err(Error::Precondition("omega2 must be positive".into()));
        }
        let r = shoot(bvp, S::zero(), omega2, u_surface, p0, opts)?.residuals;
        Ok([r[1], r[2]])
    };
    let steps = [p0_0.abs() * S::of(1e-7), omega2_0 * S::of(1e-7)];
    let ([p0, omega2], history) = newton2(eval, [p0_0, omega2_0], steps, opts)?;
    let shot = shoot(bvp, S::zero(), omega2, u_surface, p0, opts)?;
    Ok(SelfSimilarSolution {
        omega1: S::zero(),
        omega2,
        omega_max: shot.omega_max,
        u1: u_surface,
        p1: p0,
        bc_residual: max_abs(&shot.residuals[1..]),
        iterations: history.len() - 1,
        history,
        u_profile: shot.liquid,
        v_profile: shot.solid,
    })
}
