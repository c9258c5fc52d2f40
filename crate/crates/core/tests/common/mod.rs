//! Independent oracles shared by the integration tests and the acceptance
//! suite. Nothing here calls the solvers under test.
#![allow(dead_code)]

use statrs::function::erf::{erf, erfc};
use stefan_core::material::{MaterialSpec, SpecificHeat};
use stefan_core::travelling_wave::TravellingWaveSolution;

/// Liquid temperature of the travelling wave for a constant liquid specific
/// heat: `λ1 T'' = -μ ρ c1 T'` with `T(0) = T_s`, `T(δ) = T_m`.
pub fn liquid_temperature(spec: &MaterialSpec<f64>, mu: f64, delta: f64, t_surface: f64, xi: f64) -> f64 {
    let c1 = match spec.c_liquid {
        SpecificHeat::Constant(c) => c,
        _ => panic!("liquid oracle needs a constant specific heat"),
    };
    let kappa = mu * spec.rho * c1 / spec.lambda1;
    let num = (-kappa * xi).exp() - (-kappa * delta).exp();
    let den = -(-kappa * delta).exp_m1();
    spec.t_melting + (t_surface - spec.t_melting) * num / den
}

/// Solid temperature of the travelling wave for `c2(T) = a + bT`.
///
/// Integrating `λ2 T'' = -μ ρ c2(T) T'` once with `T → T∞` gives the
/// logistic equation `θ' = -αθ(1 + βθ)` for `θ = T - T∞`, with
/// `α = μρ c2(T∞)/λ2`, `β = b / (2 c2(T∞))`.
pub fn solid_temperature(spec: &MaterialSpec<f64>, mu: f64, delta: f64, xi: f64) -> f64 {
    let (a, b) = match spec.c_solid {
        SpecificHeat::Linear { a, b } => (a, b),
        SpecificHeat::Constant(c) => (c, 0.0),
        _ => panic!("solid oracle needs a linear specific heat"),
    };
    let c_inf = a + b * spec.t_far;
    let alpha = mu * spec.rho * c_inf / spec.lambda2;
    let beta = b / (2.0 * c_inf);
    let theta_m = spec.t_melting - spec.t_far;
    let g = theta_m / (1.0 + beta * theta_m);
    let e = (-alpha * (xi - delta)).exp();
    spec.t_far + g * e / (1.0 - beta * g * e)
}

/// Temperature of the travelling wave at `xi`, from the oracle forms.
pub fn wave_temperature(spec: &MaterialSpec<f64>, sol: &TravellingWaveSolution<f64>, t_surface: f64, xi: f64) -> f64 {
    if xi <= sol.delta {
        liquid_temperature(spec, sol.mu, sol.delta, t_surface, xi)
    } else {
        solid_temperature(spec, sol.mu, sol.delta, xi)
    }
}

/// Classical two-phase similarity solution: surface at `x = 0` held at
/// `u_s`, constant diffusivities `k1`, `k2`. Returns `ω` with `s = ω√t`.
///
/// Front balance
/// `-√k2 V_m e^{-λ2²} / (√π erfc λ2) = √k1 (u_m - u_s) e^{-λ1²} / (√π erf λ1) + H2 ω / 2`,
/// `λi = ω / (2√ki)`, `V_m = v_m - v_inf`.
pub fn neumann_omega(k1: f64, k2: f64, u_s: f64, u_m: f64, v_m: f64, v_inf: f64, h2: f64) -> f64 {
    let sp = std::f64::consts::PI.sqrt();
    let f = |w: f64| {
        let (l1, l2) = (w / (2.0 * k1.sqrt()), w / (2.0 * k2.sqrt()));
        let lhs = -k2.sqrt() * (v_m - v_inf) * (-l2 * l2).exp() / (sp * erfc(l2));
        let rhs = k1.sqrt() * (u_m - u_s) * (-l1 * l1).exp() / (sp * erf(l1)) + h2 * w / 2.0;
        lhs - rhs
    };
    // f → +∞ as ω → 0⁺ (the liquid flux blows up) and → -∞ as ω grows.
    let (mut lo, mut hi) = (1e-12, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    assert!(f(lo) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Expected invariance of the rod families, derived by hand from the
/// determining conditions.
pub fn rod_expectation(k: f64, gamma: f64, q0: f64, family: &str) -> bool {
    let homogeneous = q0 == 0.0;
    let k_minus_two = (k + 2.0).abs() < 1e-12;
    match family {
        "T1" => homogeneous || gamma == 0.0,
        "T2" => false,
        "T3" => homogeneous,
        "T4" => homogeneous || k_minus_two,
        "T5" => false,
        "T_r" => homogeneous || gamma == 0.0 || k_minus_two,
        _ => panic!("no expectation for {family}"),
    }
}

/// Expected row of the rod classification.
pub fn rod_row(k: f64, gamma: f64, q0: f64) -> Option<u8> {
    if q0 == 0.0 {
        Some(1)
    } else if gamma == 0.0 {
        Some(2)
    } else if (k + 2.0).abs() < 1e-12 {
        Some(3)
    } else {
        None
    }
}

/// Relative difference with a floor.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
