//! Physical material data and the enthalpy (Kirchhoff/Goodman) substitution.
//!
//! A [`MaterialSpec`] holds the raw constants of a metal in SI units. The
//! substitution `w = ∫₀ᵀ ρ c(ζ) dζ` maps each phase's temperature onto a
//! volumetric enthalpy, which turns the conduction equations into
//! `w_t = (d(w) w_x)_x`; [`build_transformed_bvp`] assembles the resulting
//! free-boundary problem.

mod bvp;
mod config;

use std::fmt;
use std::sync::Arc;

pub use bvp::{build_transformed_bvp, ScalarFn, TimeLaw, TransformedBvp};

use crate::error::{Error, Result};
use crate::numerics::quadrature::adaptive_simpson;
use crate::numerics::roots::{brent, RootOptions};
use crate::scalar::Real;

/// Ceiling of the working temperature range, as a multiple of the
/// evaporation temperature.
pub const CAP_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Liquid,
    Solid,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Liquid => "liquid",
            Phase::Solid => "solid",
        })
    }
}

/// Specific heat law `c(T)`, J·kg⁻¹·K⁻¹.
#[derive(Clone)]
pub enum SpecificHeat<S> {
    Constant(S),
    /// `c(T) = a + b·T`
    Linear { a: S, b: S },
    /// Arbitrary law; enthalpies are obtained by adaptive quadrature.
    General(Arc<dyn Fn(S) -> S + Send + Sync>),
}

impl<S: fmt::Debug> fmt::Debug for SpecificHeat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecificHeat::Constant(c) => write!(f, "Constant({c:?})"),
            SpecificHeat::Linear { a, b } => write!(f, "Linear {{ a: {a:?}, b: {b:?} }}"),
            SpecificHeat::General(_) => f.write_str("General(..)"),
        }
    }
}

impl<S: Real> SpecificHeat<S> {
    pub fn eval(&self, t: S) -> S {
        match self {
            SpecificHeat::Constant(c) => *c,
            SpecificHeat::Linear { a, b } => *a + *b * t,
            SpecificHeat::General(f) => f(t),
        }
    }

    /// Fails unless `c > 0` on `[lo, hi]`. Non-linear laws are sampled.
    fn check_positive(&self, lo: S, hi: S) -> Result<()> {
        let bad = |t: S, c: S| {
            Error::ConstitutiveLaw(format!("specific heat c({t}) = {c} is not positive"))
        };
        match self {
            SpecificHeat::Constant(_) | SpecificHeat::Linear { .. } => {
                for t in [lo, hi] {
                    let c = self.eval(t);
                    if !(c > S::zero()) {
                        return Err(bad(t, c));
                    }
                }
            }
            SpecificHeat::General(f) => {
                let n = 512;
                for i in 0..=n {
                    let t = lo + (hi - lo) * S::of(i as f64 / n as f64);
                    let c = f(t);
                    if !(c > S::zero()) {
                        return Err(bad(t, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// `∫₀ᵀ c(ζ) dζ` without validation.
    fn integral(&self, t: S) -> Result<S> {
        Ok(match self {
            SpecificHeat::Constant(c) => *c * t,
            SpecificHeat::Linear { a, b } => *a * t + *b * S::of(0.5) * t * t,
            SpecificHeat::General(f) => adaptive_simpson(|z| f(z), S::zero(), t, S::tolerance(1e-10))?,
        })
    }
}

/// Temperature-dependent absorption coefficient `χ(T) = χ₀ (T / T_ref)^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorption<S> {
    pub chi0: S,
    pub exponent: S,
    /// Reference temperature, K.
    pub t_ref: S,
}

impl<S: Real> Absorption<S> {
    pub fn eval(&self, t: S) -> S {
        self.chi0 * (t / self.t_ref).powf(self.exponent)
    }
}

/// Raw physical constants of a metal, SI units throughout.
#[derive(Debug, Clone)]
pub struct MaterialSpec<S> {
    /// Liquid thermal conductivity, W·m⁻¹·K⁻¹.
    pub lambda1: S,
    /// Solid thermal conductivity, W·m⁻¹·K⁻¹.
    pub lambda2: S,
    /// Density (same in both phases), kg·m⁻³.
    pub rho: S,
    pub c_liquid: SpecificHeat<S>,
    pub c_solid: SpecificHeat<S>,
    /// Latent heat of melting, J·kg⁻¹.
    pub latent_melting: S,
    /// Latent heat of evaporation, J·kg⁻¹.
    pub latent_evaporation: S,
    pub t_evaporation: S,
    pub t_melting: S,
    /// Far-field solid temperature, K.
    pub t_far: S,
    pub absorption: Absorption<S>,
    /// Laser pulse power, W·m⁻².
    pub q0: S,
    /// Atomic weight, kg·mol⁻¹.
    pub atomic_weight: S,
    /// Ambient pressure, Pa.
    pub ambient_pressure: S,
    /// Universal gas constant, J·mol⁻¹·K⁻¹.
    pub gas_constant: S,
}

/// Default molar mass of aluminium, kg·mol⁻¹.
pub const ALUMINIUM_ATOMIC_WEIGHT: f64 = 26.98e-3;
/// Standard atmosphere, Pa.
pub const STANDARD_PRESSURE: f64 = 101_325.0;
/// J·mol⁻¹·K⁻¹.
pub const GAS_CONSTANT: f64 = 8.314;

impl<S: Real> MaterialSpec<S> {
    /// Aluminium under a long laser pulse of power `q0` (W·m⁻²).
    pub fn aluminium(q0: S) -> Self {
        Self {
            lambda1: S::of(240.0),
            lambda2: S::of(240.0),
            rho: S::of(2545.0),
            c_liquid: SpecificHeat::Constant(S::of(1086.0)),
            c_solid: SpecificHeat::Linear {
                a: S::of(752.2),
                b: S::of(0.473),
            },
            latent_melting: S::of(0.64e6),
            latent_evaporation: S::of(10.8e6),
            t_evaporation: S::of(2793.0),
            t_melting: S::of(933.0),
            t_far: S::of(300.0),
            absorption: Absorption {
                chi0: S::of(0.64),
                exponent: S::of(0.4),
                t_ref: S::of(11600.0),
            },
            q0,
            atomic_weight: S::of(ALUMINIUM_ATOMIC_WEIGHT),
            ambient_pressure: S::of(STANDARD_PRESSURE),
            gas_constant: S::of(GAS_CONSTANT),
        }
    }

    pub fn heat_law(&self, phase: Phase) -> &SpecificHeat<S> {
        match phase {
            Phase::Liquid => &self.c_liquid,
            Phase::Solid => &self.c_solid,
        }
    }

    pub fn conductivity(&self, phase: Phase) -> S {
        match phase {
            Phase::Liquid => self.lambda1,
            Phase::Solid => self.lambda2,
        }
    }

    /// Upper end of the working temperature range, K.
    pub fn t_cap(&self) -> S {
        S::of(CAP_FACTOR) * self.t_evaporation
    }

    /// `T* = A·L_v / R`, K.
    pub fn activation_temperature(&self) -> S {
        self.atomic_weight * self.latent_evaporation / self.gas_constant
    }

    /// Evaporation velocity `V*·√(T_v/T)·exp(-T*/T)` at surface temperature `t`, m·s⁻¹,
    /// with `V* = P_a √A / (ρ √(2πR T_v)) · exp(T*/T_v)`.
    pub fn evaporation_velocity(&self, t: S) -> S {
        let t_star = self.activation_temperature();
        let tv = self.t_evaporation;
        let two_pi = S::of(2.0) * S::PI();
        let prefactor = self.ambient_pressure * self.atomic_weight.sqrt()
            / (self.rho * (two_pi * self.gas_constant * tv).sqrt());
        prefactor * (tv / t).sqrt() * (t_star * (S::one() / tv - S::one() / t)).exp()
    }

    /// Absorbed flux `χ(T)·q₀`, W·m⁻².
    pub fn absorbed_flux(&self, t: S) -> S {
        self.absorption.eval(t) * self.q0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("rho", self.rho),
            ("Lm", self.latent_melting),
            ("Lv", self.latent_evaporation),
            ("Tv", self.t_evaporation),
            ("Tm", self.t_melting),
            ("q0", self.q0),
            ("A", self.atomic_weight),
            ("Pa", self.ambient_pressure),
            ("R", self.gas_constant),
            ("chi_Tref", self.absorption.t_ref),
        ];
        for (name, v) in positive {
            if !(v > S::zero()) || !v.is_finite() {
                return Err(Error::InvalidMaterial(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.t_far < self.t_melting && self.t_melting < self.t_evaporation) {
            return Err(Error::InvalidMaterial(format!(
                "temperatures must satisfy Tinf < Tm < Tv (got {}, {}, {})",
                self.t_far, self.t_melting, self.t_evaporation
            )));
        }
        if !(self.t_far >= S::zero()) {
            return Err(Error::InvalidMaterial(format!("Tinf = {} is negative", self.t_far)));
        }
        self.c_solid
            .check_positive(self.t_far, self.t_melting)
            .map_err(|e| Error::InvalidMaterial(e.to_string()))?;
        self.c_liquid
            .check_positive(self.t_melting, self.t_cap())
            .map_err(|e| Error::InvalidMaterial(e.to_string()))?;
        Ok(())
    }

    /// Inverse substitution without range checks; NaN where undefined.
    pub(crate) fn temperature_unchecked(&self, phase: Phase, w: S) -> S {
        match self.heat_law(phase) {
            SpecificHeat::Constant(c) => w / (self.rho * *c),
            SpecificHeat::Linear { a, b } => linear_inverse(*a, *b, w / self.rho),
            SpecificHeat::General(_) => {
                let hi = S::of(4.0) * self.t_cap();
                let target = w;
                brent(
                    |t| Ok(kirchhoff_forward_unchecked(self, phase, t)? - target),
                    S::zero(),
                    hi,
                    RootOptions {
                        rel_tol: S::tolerance(1e-13),
                        ..RootOptions::default()
                    },
                )
                .unwrap_or(S::nan())
            }
        }
    }
}

/// Positive root of `a·T + (b/2)·T² = e`, written to avoid cancellation.
fn linear_inverse<S: Real>(a: S, b: S, e: S) -> S {
    if b == S::zero() {
        return e / a;
    }
    let disc = a * a + S::of(2.0) * b * e;
    if disc < S::zero() {
        return S::nan();
    }
    let root = disc.sqrt();
    if a >= S::zero() {
        S::of(2.0) * e / (a + root)
    } else {
        (root - a) / b
    }
}

fn kirchhoff_forward_unchecked<S: Real>(spec: &MaterialSpec<S>, phase: Phase, t: S) -> Result<S> {
    Ok(spec.rho * spec.heat_law(phase).integral(t)?)
}

/// Volumetric enthalpy `∫₀ᵀ ρ c(ζ) dζ` of `phase` at temperature `t`, J·m⁻³.
///
/// Constant and linear laws use their closed forms; general laws use
/// adaptive Simpson quadrature at 1e-10 relative tolerance.
pub fn kirchhoff_forward<S: Real>(spec: &MaterialSpec<S>, phase: Phase, t: S) -> Result<S> {
    if !(t >= S::zero()) {
        return Err(Error::Domain {
            what: "kirchhoff_forward temperature",
            value: t.as_f64(),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    spec.heat_law(phase).check_positive(S::zero(), t)?;
    kirchhoff_forward_unchecked(spec, phase, t)
}

/// Temperature whose enthalpy in `phase` equals `w`.
///
/// `w` must lie in the image of [`kirchhoff_forward`] over `[0, T_cap]`.
pub fn kirchhoff_inverse<S: Real>(spec: &MaterialSpec<S>, phase: Phase, w: S) -> Result<S> {
    let t_cap = spec.t_cap();
    let hi = kirchhoff_forward(spec, phase, t_cap)?;
    if !(w >= S::zero() && w <= hi) {
        return Err(Error::Domain {
            what: "kirchhoff_inverse enthalpy",
            value: w.as_f64(),
            lo: 0.0,
            hi: hi.as_f64(),
        });
    }
    let t = spec.temperature_unchecked(phase, w);
    if !t.is_finite() {
        return Err(Error::Domain {
            what: "kirchhoff_inverse enthalpy",
            value: w.as_f64(),
            lo: 0.0,
            hi: hi.as_f64(),
        });
    }
    Ok(t.min(t_cap).max(S::zero()))
}
