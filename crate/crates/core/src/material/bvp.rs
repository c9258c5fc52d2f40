//! The free-boundary problem in enthalpy variables.

use std::fmt;
use std::sync::Arc;

use super::{kirchhoff_forward, MaterialSpec, Phase};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Shared scalar evaluator.
pub type ScalarFn<S> = Arc<dyn Fn(S) -> S + Send + Sync>;

/// Time dependence of the surface data `q(t, u)` and `h(t, u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeLaw {
    /// `q(u)`, `h(u)`.
    Steady,
    /// `q(u)/√t`, `h(u)/√t`.
    InverseSqrt,
}

impl TimeLaw {
    pub fn factor<S: Real>(self, t: S) -> S {
        match self {
            TimeLaw::Steady => S::one(),
            TimeLaw::InverseSqrt => t.sqrt().recip(),
        }
    }
}

impl fmt::Display for TimeLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeLaw::Steady => "steady",
            TimeLaw::InverseSqrt => "inverse_sqrt",
        })
    }
}

/// Liquid `u` on `[s1, s2]`, solid `v` on `[s2, ∞)`:
///
/// ```text
/// u_t = (d1(u) u_x)_x,         v_t = (d2(v) v_x)_x
/// x = s1:  d1 u_x = H1 V1 - q(t, u),   V1 = h(t, u)
/// x = s2:  u = u_m, v = v_m,   d2 v_x = d1 u_x + H2 V2
/// x → ∞:   v → v_inf
/// ```
#[derive(Clone)]
pub struct TransformedBvp<S> {
    pub d1: ScalarFn<S>,
    pub d2: ScalarFn<S>,
    pub q_of_u: ScalarFn<S>,
    pub h_of_u: ScalarFn<S>,
    pub time_law: TimeLaw,
    pub h1: S,
    pub h2: S,
    pub u_m: S,
    pub v_m: S,
    pub v_inf: S,
    pub u_cap: S,
}

impl<S: Real> fmt::Debug for TransformedBvp<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformedBvp")
            .field("time_law", &self.time_law)
            .field("h1", &self.h1)
            .field("h2", &self.h2)
            .field("u_m", &self.u_m)
            .field("v_m", &self.v_m)
            .field("v_inf", &self.v_inf)
            .field("u_cap", &self.u_cap)
            .finish_non_exhaustive()
    }
}

const GRID: usize = 10_000;

impl<S: Real> TransformedBvp<S> {
    /// Absorbed flux `q(t, u)`.
    pub fn flux(&self, t: S, u: S) -> S {
        (self.q_of_u)(u) * self.time_law.factor(t)
    }

    /// Surface velocity `h(t, u)`.
    pub fn evaporation_velocity(&self, t: S, u: S) -> S {
        (self.h_of_u)(u) * self.time_law.factor(t)
    }

    /// `v_m - v_inf`.
    pub fn vm_offset(&self) -> S {
        self.v_m - self.v_inf
    }

    /// Checks every invariant of the problem class on a 10⁴-point grid.
    pub fn validate(&self) -> Result<()> {
        let fin = [self.h1, self.h2, self.u_m, self.v_m, self.v_inf, self.u_cap];
        if fin.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("non-finite problem constant".into()));
        }
        if !(self.h1 >= S::zero() && self.h2 >= S::zero()) {
            return Err(Error::Precondition(format!(
                "latent heats must be non-negative (H1 = {}, H2 = {})",
                self.h1, self.h2
            )));
        }
        if self.v_m == self.v_inf {
            return Err(Error::Precondition("v_m must differ from v_inf".into()));
        }
        if !(self.u_cap > self.u_m) {
            return Err(Error::Precondition(format!(
                "u_cap = {} must exceed u_m = {}",
                self.u_cap, self.u_m
            )));
        }

        let construction = |reason: String, lo: S, hi: S| Error::Construction {
            reason,
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        };
        let grid = |lo: S, hi: S| {
            (0..=GRID).map(move |i| {
                if i == GRID {
                    hi
                } else {
                    lo + (hi - lo) * S::of(i as f64 / GRID as f64)
                }
            })
        };

        let (v_lo, v_hi) = (self.v_m.min(self.v_inf), self.v_m.max(self.v_inf));
        for v in grid(v_lo, v_hi) {
            let d = (self.d2)(v);
            if !(d > S::zero()) {
                return Err(Error::DegenerateDiffusivity { w: v.as_f64(), d: d.as_f64() });
            }
        }

        let mut prev: Option<(S, S)> = None;
        for u in grid(self.u_m, self.u_cap) {
            let d = (self.d1)(u);
            if !(d > S::zero()) {
                return Err(Error::DegenerateDiffusivity { w: u.as_f64(), d: d.as_f64() });
            }
            let q = (self.q_of_u)(u);
            if !(q > S::zero()) {
                return Err(construction(format!("absorbed flux q = {q} is not positive"), u, u));
            }
            let h = (self.h_of_u)(u);
            if !(h >= S::zero()) || !h.is_finite() {
                return Err(construction(format!("evaporation velocity h = {h} is negative"), u, u));
            }
            if let Some((u_prev, h_prev)) = prev {
                if !(h > h_prev) {
                    return Err(construction(
                        format!("evaporation velocity not strictly increasing ({h_prev} -> {h})"),
                        u_prev,
                        u,
                    ));
                }
            }
            prev = Some((u, h));
        }
        Ok(())
    }
}

/// Builds the enthalpy-variable problem for `spec`.
///
/// `d1(u) = λ1/(ρ c1(T(u)))`, `d2(v) = λ2/(ρ c2(T(v)))`, `q(u) = χ(T(u)) q0`,
/// `h(u)` from the Hertz–Knudsen-type law in [`MaterialSpec::evaporation_velocity`],
/// `H1 = ρ L_v`, `H2 = ρ L_m`. The result is validated.
pub fn build_transformed_bvp<S: Real>(
    spec: &MaterialSpec<S>,
    time_law: TimeLaw,
) -> Result<TransformedBvp<S>> {
    spec.validate()?;
    let u_m = kirchhoff_forward(spec, Phase::Liquid, spec.t_melting)?;
    let v_m = kirchhoff_forward(spec, Phase::Solid, spec.t_melting)?;
    let v_inf = kirchhoff_forward(spec, Phase::Solid, spec.t_far)?;
    let u_cap = kirchhoff_forward(spec, Phase::Liquid, spec.t_cap())?;

    let diffusivity = |phase: Phase| -> ScalarFn<S> {
        let s = spec.clone();
        let lambda = spec.conductivity(phase);
        Arc::new(move |w: S| {
            let t = s.temperature_unchecked(phase, w);
            lambda / (s.rho * s.heat_law(phase).eval(t))
        })
    };
    let s_q = spec.clone();
    let s_h = spec.clone();
    let bvp = TransformedBvp {
        d1: diffusivity(Phase::Liquid),
        d2: diffusivity(Phase::Solid),
        q_of_u: Arc::new(move |u: S| {
            s_q.absorbed_flux(s_q.temperature_unchecked(Phase::Liquid, u))
        }),
        h_of_u: Arc::new(move |u: S| {
            s_h.evaporation_velocity(s_h.temperature_unchecked(Phase::Liquid, u))
        }),
        time_law,
        h1: spec.rho * spec.latent_evaporation,
        h2: spec.rho * spec.latent_melting,
        u_m,
        v_m,
        v_inf,
        u_cap,
    };
    bvp.validate()?;
    Ok(bvp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aluminium_thresholds() {
        let spec = MaterialSpec::<f64>::aluminium(1e10);
        let bvp = build_transformed_bvp(&spec, TimeLaw::Steady).unwrap();
        assert_eq!(bvp.u_m, 2545.0 * 1086.0 * 933.0);
        assert_eq!(bvp.h1, 2545.0 * 10.8e6);
        assert_eq!(bvp.h2, 2545.0 * 0.64e6);
        let d1 = 240.0 / (2545.0 * 1086.0);
        assert!(((bvp.d1)(bvp.u_m) - d1).abs() < 1e-16);
    }

    #[test]
    fn solid_diffusivity_matches_closed_form() {
        let spec = MaterialSpec::<f64>::aluminium(1e10);
        let bvp = build_transformed_bvp(&spec, TimeLaw::Steady).unwrap();
        let (rho, a, b) = (2545.0, 752.2, 0.473);
        for v in [bvp.v_inf, 0.5 * (bvp.v_inf + bvp.v_m), bvp.v_m] {
            let closed = (240.0 / rho) / (a * a + 2.0 * (b / rho) * v).sqrt();
            let got = (bvp.d2)(v);
            assert!((got - closed).abs() <= 1e-14 * closed, "{got} vs {closed}");
        }
    }

    #[test]
    fn evaporation_velocity_at_boiling_point_has_no_exponential() {
        let spec = MaterialSpec::<f64>::aluminium(1e10);
        let bvp = build_transformed_bvp(&spec, TimeLaw::Steady).unwrap();
        let uv = kirchhoff_forward(&spec, Phase::Liquid, spec.t_evaporation).unwrap();
        let expected = spec.ambient_pressure * spec.atomic_weight.sqrt()
            / (spec.rho * (2.0 * std::f64::consts::PI * spec.gas_constant * spec.t_evaporation).sqrt());
        assert!(((bvp.h_of_u)(uv) - expected).abs() <= 1e-13 * expected);
    }

    #[test]
    fn time_laws() {
        let spec = MaterialSpec::<f64>::aluminium(1e10);
        let steady = build_transformed_bvp(&spec, TimeLaw::Steady).unwrap();
        let decaying = build_transformed_bvp(&spec, TimeLaw::InverseSqrt).unwrap();
        let u = 1.2 * steady.u_m;
        assert_eq!(steady.flux(4.0, u), (steady.q_of_u)(u));
        assert!((decaying.flux(4.0, u) - 0.5 * (steady.q_of_u)(u)).abs() < 1e-6);
        assert!((decaying.evaporation_velocity(4.0, u) - 0.5 * (steady.h_of_u)(u)).abs() < 1e-18);
    }

    #[test]
    fn non_monotone_evaporation_law_is_rejected() {
        let spec = MaterialSpec::<f64>::aluminium(1e10);
        let mut bvp = build_transformed_bvp(&spec, TimeLaw::Steady).unwrap();
        let mid = 0.5 * (bvp.u_m + bvp.u_cap);
        bvp.h_of_u = Arc::new(move |u: f64| 2.0 - (u - mid).abs() / mid);
        match bvp.validate() {
            Err(Error::Construction { lo, hi, .. }) => assert!(lo <= mid * (1.0 + 1e-3) && hi >= mid),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equal_far_field_and_melting_enthalpy_is_rejected() {
        let spec = MaterialSpec::<f64>::aluminium(1e10);
        let mut bvp = build_transformed_bvp(&spec, TimeLaw::Steady).unwrap();
        bvp.v_inf = bvp.v_m;
        assert!(matches!(bvp.validate(), Err(Error::Precondition(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let spec = MaterialSpec::<f32>::aluminium(1e10);
        let bvp = build_transformed_bvp(&spec, TimeLaw::Steady).unwrap();
        assert!(bvp.u_m > 2.5e9);
    }
}
