//! Plane-wave solutions `w(x - μt)` of the steady-flux problem.
//!
//! With `η` defined by `dξ = d(w) dη`, both phase equations become
//! `W'' + μ W' = 0`, so the profiles are exponentials and the whole problem
//! reduces to one transcendental equation for the surface enthalpy `u_s`
//! (with `μ = h(u_s)`). Offsets: `U = u - u_m` in the liquid and
//! `V = v - v_inf` in the solid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::material::{kirchhoff_inverse, MaterialSpec, Phase, ScalarFn, TimeLaw, TransformedBvp};
use crate::numerics::interp::Hermite;
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::roots::{brent, log_space, scan_sign_changes, RootOptions};
use crate::scalar::Real;

/// Samples used to bracket the velocity equation.
pub const SCAN_POINTS: usize = 64;
/// Nodes of each tabulated `ξ(η)` map.
pub const TABLE_NODES: usize = 2048;

/// `q(u_s)/h(u_s) - H1 - u_s - (V_m - u_m + H2)`, zero at a travelling wave.
pub fn velocity_residual<S: Real>(bvp: &TransformedBvp<S>, u_s: S) -> Result<S> {
    if !(u_s > bvp.u_m && u_s <= bvp.u_cap) {
        return Err(Error::Domain {
            what: "velocity_residual surface enthalpy",
            value: u_s.as_f64(),
            lo: bvp.u_m.as_f64(),
            hi: bvp.u_cap.as_f64(),
        });
    }
    let h = (bvp.h_of_u)(u_s);
    if !(h > S::zero()) {
        return Err(Error::SingularResidual { u_s: u_s.as_f64() });
    }
    let rhs = bvp.vm_offset() - bvp.u_m + bvp.h2;
    Ok((bvp.q_of_u)(u_s) / h - bvp.h1 - u_s - rhs)
}

/// Sum of magnitudes of the terms in [`velocity_residual`].
fn residual_scale<S: Real>(bvp: &TransformedBvp<S>, u_s: S) -> S {
    let h = (bvp.h_of_u)(u_s);
    ((bvp.q_of_u)(u_s) / h).abs()
        + bvp.h1.abs()
        + u_s.abs()
        + (bvp.vm_offset() - bvp.u_m + bvp.h2).abs()
}

/// Monotone map `η ↦ ξ = ξ0 + ∫_{η0}^{η} d dη'` with a tabulated inverse.
#[derive(Clone)]
struct CoordinateMap<S> {
    eta: Vec<S>,
    xi: Vec<S>,
    density: ScalarFn<S>,
    inverse: Hermite<S>,
}

impl<S: Real> CoordinateMap<S> {
    fn build(density: ScalarFn<S>, eta0: S, eta1: S, xi0: S) -> Result<Self> {
        let n = TABLE_NODES;
        let step = (eta1 - eta0) / S::of((n - 1) as f64);
        let eta: Vec<S> = (0..n)
            .map(|i| if i == n - 1 { eta1 } else { eta0 + step * S::of(i as f64) })
            .collect();
        let mut xi = Vec::with_capacity(n);
        let mut slope = Vec::with_capacity(n);
        let mut acc = xi0;
        for i in 0..n {
            if i > 0 {
                acc = acc + gauss_legendre(&*density, eta[i - 1], eta[i], 1);
            }
            let d = density(eta[i]);
            if !(d > S::zero()) {
                return Err(Error::DegenerateDiffusivity { w: eta[i].as_f64(), d: d.as_f64() });
            }
            xi.push(acc);
            slope.push(d.recip());
        }
        let inverse = Hermite::with_slopes(xi.clone(), eta.clone(), slope);
        Ok(Self { eta, xi, density, inverse })
    }

    fn eta_min(&self) -> S {
        self.eta[0]
    }

    fn eta_max(&self) -> S {
        self.eta[self.eta.len() - 1]
    }

    fn xi_max(&self) -> S {
        self.xi[self.xi.len() - 1]
    }

    /// `ξ(η)`; linear continuation with the end density past the table.
    fn forward(&self, eta: S) -> S {
        if eta >= self.eta_max() {
            let last = self.eta_max();
            return self.xi_max() + (self.density)(last) * (eta - last);
        }
        let eta = eta.max(self.eta_min());
        let i = self.eta.partition_point(|e| *e <= eta).saturating_sub(1);
        self.xi[i] + gauss_legendre(&*self.density, self.eta[i], eta, 1)
    }

    /// `η(ξ)`: table guess polished by Newton on [`Self::forward`].
    fn inverse(&self, xi: S) -> S {
        if xi >= self.xi_max() {
            let last = self.eta_max();
            return last + (xi - self.xi_max()) / (self.density)(last);
        }
        let (lo, hi) = (self.eta_min(), self.eta_max());
        let mut eta = self.inverse.eval(xi);
        let tol = S::epsilon() * S::of(4.0) * hi.abs().max(lo.abs());
        for _ in 0..8 {
            let step = (self.forward(eta) - xi) / (self.density)(eta);
            eta = (eta - step).max(lo).min(hi);
            if step.abs() <= tol {
                break;
            }
        }
        eta
    }
}

/// Exact plane-wave solution of a steady-flux problem.
#[derive(Clone)]
pub struct TravellingWaveSolution<S> {
    /// Front velocity, m·s⁻¹.
    pub mu: S,
    /// Surface enthalpy `h⁻¹(μ)`, J·m⁻³.
    pub u_s: S,
    /// Liquid thickness in `η`, s·m⁻¹.
    pub delta_star: S,
    /// Liquid thickness, m.
    pub delta: S,
    /// `U(η) = C1 + C2·e^{-μη}`, J·m⁻³.
    pub c1: S,
    pub c2: S,
    /// `V(η) = C3 + C4·e^{-μη}`, J·m⁻³.
    pub c3: S,
    pub c4: S,
    /// `v_m - v_inf`, J·m⁻³.
    pub vm: S,
    /// `V_m + H2`, J·m⁻³.
    pub k: S,
    pub u_m: S,
    pub v_inf: S,
    /// Relative residual of the velocity equation at `u_s`.
    pub residual: S,
    /// More than one sign change was found; this is the smallest root.
    pub multiple_roots: bool,
    /// Every bracket found by the scan, in increasing `u_s`.
    pub brackets: Vec<(S, S)>,
    liquid: CoordinateMap<S>,
    solid: CoordinateMap<S>,
}

impl<S: Real> std::fmt::Debug for TravellingWaveSolution<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TravellingWaveSolution")
            .field("mu", &self.mu)
            .field("u_s", &self.u_s)
            .field("delta_star", &self.delta_star)
            .field("delta", &self.delta)
            .field("residual", &self.residual)
            .field("multiple_roots", &self.multiple_roots)
            .finish_non_exhaustive()
    }
}

/// Scans `(u_m(1 + 1e-6), u_cap]` for the velocity equation and builds the
/// solution at the smallest root.
pub fn solve_travelling_wave<S: Real>(bvp: &TransformedBvp<S>) -> Result<TravellingWaveSolution<S>> {
    if bvp.time_law != TimeLaw::Steady {
        return Err(Error::Precondition(format!(
            "travelling waves need a steady surface law, got {}",
            bvp.time_law
        )));
    }
    if bvp.v_m == bvp.v_inf {
        return Err(Error::Precondition("v_m must differ from v_inf".into()));
    }
    let lo = bvp.u_m * (S::one() + S::of(1e-6));
    let lo = if lo > bvp.u_m { lo } else { bvp.u_m + bvp.u_m * S::epsilon() * S::of(4.0) };
    let samples = log_space(lo, bvp.u_cap, SCAN_POINTS);
    let (brackets, values) = scan_sign_changes(|u| velocity_residual(bvp, u), &samples)?;
    let Some(&(a, b)) = brackets.first() else {
        return Err(Error::NoTravellingWave {
            lo: lo.as_f64(),
            hi: bvp.u_cap.as_f64(),
            f_lo: values[0].as_f64(),
            f_hi: values[values.len() - 1].as_f64(),
        });
    };
    let opts = RootOptions {
        rel_tol: S::tolerance(1e-12),
        abs_tol: S::zero(),
        max_iter: 200,
    };
    let u_s = brent(|u| velocity_residual(bvp, u), a, b, opts)?;
    let residual = velocity_residual(bvp, u_s)?.abs() / residual_scale(bvp, u_s);
    let mut sol = build_solution(bvp, u_s)?;
    sol.residual = residual;
    sol.multiple_roots = brackets.len() > 1;
    sol.brackets = brackets;
    Ok(sol)
}

/// Builds profiles and coordinate maps around a given surface enthalpy.
fn build_solution<S: Real>(bvp: &TransformedBvp<S>, u_s: S) -> Result<TravellingWaveSolution<S>> {
    let mu = (bvp.h_of_u)(u_s);
    let vm = bvp.vm_offset();
    let k = vm + bvp.h2;
    let du = u_s - bvp.u_m;
    let delta_star = (du / k).ln_1p() / mu;
    if !(mu > S::zero() && delta_star > S::zero() && delta_star.is_finite()) {
        return Err(Error::Precondition(format!(
            "degenerate travelling wave: mu = {mu}, delta* = {delta_star}"
        )));
    }
    let grow = (mu * delta_star).exp_m1();
    let c1 = -du / grow;
    let c2 = du * (mu * delta_star).exp() / grow;
    let c4 = vm * (mu * delta_star).exp();

    let (u_m, v_inf) = (bvp.u_m, bvp.v_inf);
    let d1 = bvp.d1.clone();
    let d2 = bvp.d2.clone();
    let liquid_density: ScalarFn<S> = Arc::new(move |eta: S| {
        let u = du * (mu * (delta_star - eta)).exp_m1() / grow;
        d1(u + u_m)
    });
    let solid_density: ScalarFn<S> = Arc::new(move |eta: S| {
        let v = vm * (mu * (delta_star - eta)).exp();
        d2(v + v_inf)
    });
    let liquid = CoordinateMap::build(liquid_density, S::zero(), delta_star, S::zero())?;
    let delta = liquid.xi_max();
    // ~1e-17 of V_m left at the table end.
    let tail = delta_star + S::of(40.0) / mu;
    let solid = CoordinateMap::build(solid_density, delta_star, tail, delta)?;

    Ok(TravellingWaveSolution {
        mu,
        u_s,
        delta_star,
        delta,
        c1,
        c2,
        c3: S::zero(),
        c4,
        vm,
        k,
        u_m,
        v_inf,
        residual: S::zero(),
        multiple_roots: false,
        brackets: Vec::new(),
        liquid,
        solid,
    })
}

impl<S: Real> TravellingWaveSolution<S> {
    /// Phase and enthalpy offset (`U` or `V`) at transformed coordinate `η ≥ 0`.
    pub fn profile_transformed(&self, eta: S) -> Result<(Phase, S)> {
        if !(eta >= S::zero()) {
            return Err(Error::Domain {
                what: "transformed coordinate",
                value: eta.as_f64(),
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let arg = self.mu * (self.delta_star - eta);
        if eta <= self.delta_star {
            let grow = (self.mu * self.delta_star).exp_m1();
            Ok((Phase::Liquid, (self.u_s - self.u_m) * arg.exp_m1() / grow))
        } else {
            Ok((Phase::Solid, self.vm * arg.exp()))
        }
    }

    /// `dU/dη` or `dV/dη`.
    pub fn profile_slope(&self, eta: S) -> Result<(Phase, S)> {
        let (phase, _) = self.profile_transformed(eta)?;
        let e = (self.mu * (self.delta_star - eta)).exp();
        Ok(match phase {
            Phase::Liquid => {
                let grow = (self.mu * self.delta_star).exp_m1();
                (phase, -self.mu * (self.u_s - self.u_m) * e / grow)
            }
            Phase::Solid => (phase, -self.mu * self.vm * e),
        })
    }

    /// Physical moving-frame coordinate of `η`.
    pub fn xi_of_eta(&self, eta: S) -> S {
        if eta <= self.delta_star {
            self.liquid.forward(eta)
        } else {
            self.solid.forward(eta)
        }
    }

    /// Transformed coordinate of `ξ ≥ 0`.
    pub fn eta_of_xi(&self, xi: S) -> Result<S> {
        if !(xi >= S::zero()) {
            return Err(Error::Domain {
                what: "moving-frame coordinate",
                value: xi.as_f64(),
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(if xi <= self.delta {
            self.liquid.inverse(xi)
        } else {
            self.solid.inverse(xi)
        })
    }

    /// Phase and absolute enthalpy (`u` or `v`) at `ξ ≥ 0`.
    pub fn enthalpy_at(&self, xi: S) -> Result<(Phase, S)> {
        let eta = self.eta_of_xi(xi)?;
        let arg = self.mu * (self.delta_star - eta);
        Ok(if xi <= self.delta {
            let grow = (self.mu * self.delta_star).exp_m1();
            let u = (self.u_s - self.u_m) * arg.max(S::zero()).exp_m1() / grow;
            (Phase::Liquid, u + self.u_m)
        } else {
            (Phase::Solid, self.vm * arg.min(S::zero()).exp() + self.v_inf)
        })
    }

    /// Temperature at `ξ ≥ 0`, K.
    pub fn temperature_at(&self, spec: &MaterialSpec<S>, xi: S) -> Result<(Phase, S)> {
        let (phase, w) = self.enthalpy_at(xi)?;
        Ok((phase, kirchhoff_inverse(spec, phase, w)?))
    }
}

/// Free-function form of [`TravellingWaveSolution::profile_transformed`].
pub fn profile_transformed<S: Real>(sol: &TravellingWaveSolution<S>, eta: S) -> Result<(Phase, S)> {
    sol.profile_transformed(eta)
}

/// Temperature (K) at moving-frame coordinate `xi` (m), with its phase.
pub fn profile_physical<S: Real>(
    sol: &TravellingWaveSolution<S>,
    spec: &MaterialSpec<S>,
    xi: S,
) -> Result<(Phase, S)> {
    sol.temperature_at(spec, xi)
}
