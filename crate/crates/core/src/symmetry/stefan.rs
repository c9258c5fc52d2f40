//! Two-phase problem with evaporating surface: group classification by the
//! form of the surface data, verification of the extended generators of
//! the phase equations, and equivalence transformations of the class.

use std::sync::Arc;

use rand::Rng;

use super::action::{AxisFlow, FamilyKind, FieldFlow, GroupAction, HeatSolution, Jet, SurfaceJet};
use super::check::{
    check_condition, check_pde_invariance, BoundaryCondition, EvolutionPde, InvarianceReport, PdeSystem,
};
use crate::error::{Error, Result};
use crate::material::{ScalarFn, TimeLaw, TransformedBvp};
use crate::scalar::Real;

/// Surface data `q(t, u)` or `h(t, u)`.
pub type SurfaceLaw<S> = Arc<dyn Fn(S, S) -> S + Send + Sync>;

/// The free-boundary problem with general coefficients, in the form the
/// invariance checks need.
#[derive(Clone)]
pub struct StefanProblem<S> {
    pub d1: ScalarFn<S>,
    pub d1_prime: ScalarFn<S>,
    pub d2: ScalarFn<S>,
    pub d2_prime: ScalarFn<S>,
    /// Volumetric evaporation heat, possibly enthalpy dependent.
    pub h1: ScalarFn<S>,
    pub h2: S,
    pub u_m: S,
    pub v_m: S,
    pub v_inf: S,
    pub q: SurfaceLaw<S>,
    pub h: SurfaceLaw<S>,
}

impl<S: Real> StefanProblem<S> {
    /// Smooth, non-special coefficients with the given surface data.
    pub fn generic(q: SurfaceLaw<S>, h: SurfaceLaw<S>) -> Self {
        let c = S::of;
        Self {
            d1: Arc::new(move |u| c(1.0) + c(0.3) * u + c(0.1) * u * u),
            d1_prime: Arc::new(move |u| c(0.3) + c(0.2) * u),
            d2: Arc::new(move |v| c(2.0) + (c(0.5) * v).sin()),
            d2_prime: Arc::new(move |v| c(0.5) * (c(0.5) * v).cos()),
            h1: Arc::new(move |u| c(3.0) + c(0.2) * u),
            h2: c(1.5),
            u_m: c(1.0),
            v_m: c(0.7),
            v_inf: c(0.2),
            q,
            h,
        }
    }

    pub fn pde(&self) -> PdeSystem<S> {
        PdeSystem {
            equations: vec![
                EvolutionPde::nonlinear_heat("u_t = (d1(u) u_x)_x", 0, self.d1.clone(), self.d1_prime.clone()),
                EvolutionPde::nonlinear_heat("v_t = (d2(v) v_x)_x", 1, self.d2.clone(), self.d2_prime.clone()),
            ],
            ranges: vec![(1.2, 2.5), (0.2, 1.0)],
        }
    }

    /// Flux balance and evaporation law on the surface `S_1 = 0`.
    pub fn surface_condition(&self) -> BoundaryCondition<S> {
        let p = self.clone();
        let r = self.clone();
        BoundaryCondition::free_surface(
            "d1 u_x = H1 V1 - q(t,u), V1 = h(t,u) on S1",
            0,
            1,
            Arc::new(move |rng| {
                let t = S::of(rng.gen_range(1.0..3.0));
                let x = S::of(rng.gen_range(0.0..1.0));
                let u = S::of(rng.gen_range(1.2..2.5));
                let v1 = (p.h)(t, u);
                let u_x = ((p.h1)(u) * v1 - (p.q)(t, u)) / (p.d1)(u);
                Some(Jet {
                    t,
                    x,
                    w: vec![u, S::of(rng.gen_range(0.2..1.0))],
                    w_t: vec![S::of(rng.gen_range(-1.0..1.0)), S::of(rng.gen_range(-1.0..1.0))],
                    w_x: vec![u_x, S::of(rng.gen_range(-1.0..1.0))],
                    w_xx: None,
                    surfaces: vec![SurfaceJet::front(v1), SurfaceJet::front(S::of(rng.gen_range(0.1..1.0)))],
                })
            }),
            Arc::new(move |j: &Jet<S>| {
                let (t, u, u_x) = (j.t, j.w[0], j.w_x[0]);
                let v1 = j.surfaces[0].velocity();
                let h = (r.h)(t, u);
                let flux = (r.d1)(u) * u_x;
                let lat = (r.h1)(u) * v1;
                let q = (r.q)(t, u);
                vec![
                    (v1 - h, v1.abs() + h.abs()),
                    (flux - lat + q, flux.abs() + lat.abs() + q.abs()),
                ]
            }),
        )
    }

    /// Melting temperature and latent-heat balance on `S_2 = 0`.
    pub fn melting_condition(&self) -> BoundaryCondition<S> {
        let p = self.clone();
        let r = self.clone();
        BoundaryCondition::free_surface(
            "u = u_m, v = v_m, d2 v_x = d1 u_x + H2 V2 on S2",
            1,
            1,
            Arc::new(move |rng| {
                let t = S::of(rng.gen_range(1.0..3.0));
                let x = S::of(rng.gen_range(0.0..1.0));
                let v2 = S::of(rng.gen_range(0.1..1.0));
                let u_x = S::of(rng.gen_range(-1.0..0.0));
                let v_x = ((p.d1)(p.u_m) * u_x + p.h2 * v2) / (p.d2)(p.v_m);
                Some(Jet {
                    t,
                    x,
                    w: vec![p.u_m, p.v_m],
                    w_t: vec![S::of(rng.gen_range(-1.0..1.0)), S::of(rng.gen_range(-1.0..1.0))],
                    w_x: vec![u_x, v_x],
                    w_xx: None,
                    surfaces: vec![SurfaceJet::front(S::of(rng.gen_range(0.1..1.0))), SurfaceJet::front(v2)],
                })
            }),
            Arc::new(move |j: &Jet<S>| {
                let (u, v) = (j.w[0], j.w[1]);
                let v2 = j.surfaces[1].velocity();
                let a = (r.d2)(v) * j.w_x[1];
                let b = (r.d1)(u) * j.w_x[0];
                let c = r.h2 * v2;
                vec![
                    (u - r.u_m, u.abs() + r.u_m.abs()),
                    (v - r.v_m, v.abs() + r.v_m.abs()),
                    (a - b - c, a.abs() + b.abs() + c.abs()),
                ]
            }),
        )
    }

    /// `v → v_inf` as `x → ∞`.
    pub fn far_field_condition(&self) -> BoundaryCondition<S> {
        let (v_m, v_inf) = (self.v_m, self.v_inf);
        BoundaryCondition::infinity(
            "v = v_inf at x = infinity",
            Arc::new(move |x: S| {
                let e = (-x / S::of(10.0)).exp();
                Jet {
                    t: S::of(2.0),
                    x,
                    w: vec![v_m, v_inf + (v_m - v_inf) * e],
                    w_t: vec![S::zero(), S::zero()],
                    w_x: vec![S::zero(), -(v_m - v_inf) * e / S::of(10.0)],
                    w_xx: None,
                    surfaces: vec![SurfaceJet::front(S::one()), SurfaceJet::front(S::one())],
                }
            }),
            Arc::new(move |j: &Jet<S>| vec![(j.w[1] - v_inf, (v_m - v_inf).abs())]),
        )
    }

    pub fn check(&self, action: &GroupAction<S>, seed: u64) -> Result<InvarianceReport> {
        let mut report = InvarianceReport::new(action.id.clone());
        let pde = self.pde();
        let samples = pde.sample_jets(100, seed);
        report.push(check_pde_invariance(action, &pde, &samples)?);
        report.push(check_condition(action, &self.surface_condition(), seed ^ 0x11)?);
        report.push(check_condition(action, &self.melting_condition(), seed ^ 0x22)?);
        report.push(check_condition(action, &self.far_field_condition(), seed)?);
        Ok(report)
    }
}

/// Result of classifying the surface data.
#[derive(Debug, Clone)]
pub struct StefanClassification {
    /// Row 1: `x`-translations only; row 2: `t`- and `x`-translations;
    /// row 3: parabolic dilation combined with `x`-translations.
    pub row: u8,
    pub passing: Vec<String>,
    pub reports: Vec<InvarianceReport>,
}

/// Candidate families: `P_x`, `P_t`, and the dilation `D`.
pub fn stefan_families() -> Vec<GroupAction<f64>> {
    vec![
        GroupAction::space_translation(2),
        GroupAction::time_translation(2),
        GroupAction::parabolic_dilation(2),
    ]
}

/// Checks the three candidate families against generic coefficients with
/// surface data `q`, `h` and reports the matching row.
pub fn classify_stefan_bvp(q: SurfaceLaw<f64>, h: SurfaceLaw<f64>) -> Result<StefanClassification> {
    let problem = StefanProblem::generic(q, h);
    let mut reports = Vec::new();
    let mut passing = Vec::new();
    for action in stefan_families() {
        let report = problem.check(&action, 0xbead)?;
        if report.pass {
            passing.push(action.id.clone());
        }
        reports.push(report);
    }
    let has = |id: &str| passing.iter().any(|p| p == id);
    let row = if has("P_x") && has("D") {
        3
    } else if has("P_x") && has("P_t") {
        2
    } else {
        1
    };
    Ok(StefanClassification { row, passing, reports })
}

/// Constants used to instantiate the diffusivities of each case.
pub const K1: f64 = 0.8;
pub const K2: f64 = 1.7;
pub const N_EXP: f64 = 1.5;
pub const M_EXP: f64 = -0.7;

/// One case of the extended-symmetry catalog for the phase equations.
#[derive(Clone)]
pub struct GeneratorCase {
    pub id: u8,
    pub d1_label: &'static str,
    pub d2_label: &'static str,
    pub system: PdeSystem<f64>,
    pub generators: Vec<(String, GroupAction<f64>)>,
}

fn law(kind: &str, field: usize, name: &str) -> EvolutionPde<f64> {
    let (d, dp): (ScalarFn<f64>, ScalarFn<f64>) = match (kind, field) {
        ("const", 0) => (Arc::new(|_| K1), Arc::new(|_| 0.0)),
        ("const", _) => (Arc::new(|_| K2), Arc::new(|_| 0.0)),
        ("exp", _) => (Arc::new(f64::exp), Arc::new(f64::exp)),
        ("pow", 0) => (
            Arc::new(|u: f64| u.powf(N_EXP)),
            Arc::new(|u: f64| N_EXP * u.powf(N_EXP - 1.0)),
        ),
        ("pow", _) => (
            Arc::new(|v: f64| v.powf(M_EXP)),
            Arc::new(|v: f64| M_EXP * v.powf(M_EXP - 1.0)),
        ),
        ("pow43", _) => (
            Arc::new(|w: f64| w.powf(-4.0 / 3.0)),
            Arc::new(|w: f64| -4.0 / 3.0 * w.powf(-7.0 / 3.0)),
        ),
        (_, 0) => (Arc::new(|u: f64| 1.0 + 0.5 * u * u), Arc::new(|u: f64| u)),
        _ => (Arc::new(|v: f64| 2.0 + (0.5 * v).sin()), Arc::new(|v: f64| 0.5 * (0.5 * v).cos())),
    };
    EvolutionPde::nonlinear_heat(name.to_string(), field, d, dp)
}

fn extra(id: &str, x: AxisFlow<f64>, u: FieldFlow<f64>, v: FieldFlow<f64>, kind: FamilyKind) -> (String, GroupAction<f64>) {
    (id.to_string(), GroupAction::new(id, kind, AxisFlow::identity(), x, vec![u, v]))
}

/// Cases 1–8 of the catalog with concrete diffusivities
/// (`k1 = 0.8`, `k2 = 1.7`, `n = 1.5`, `m = -0.7`).
pub fn generator_case(id: u8) -> Result<GeneratorCase> {
    let (k1, k2) = (K1, K2);
    let ident = FieldFlow::identity();
    let x_scale = AxisFlow::Affine { rate: 1.0, shift: 0.0 };
    let rate = |r: f64| FieldFlow::Affine { rate: r, shift: 0.0 };
    let shift = |s: f64| FieldFlow::Affine { rate: 0.0, shift: s };
    let sup = FamilyKind::LinearSuperposition;
    let sc = FamilyKind::Scaling;
    let (d1, d2, l1, l2, extras): (&str, &str, &str, &str, Vec<(String, GroupAction<f64>)>) = match id {
        1 => ("gen", "gen", "any", "any", vec![]),
        2 => (
            "const",
            "gen",
            "k1",
            "any",
            vec![
                extra("u d_u", AxisFlow::identity(), rate(1.0), ident, sc),
                extra("alpha d_u (kernel)", AxisFlow::identity(), FieldFlow::Superposition(HeatSolution::Kernel { k: k1 }), ident, sup),
                extra("alpha d_u (x^2 + 2 k1 t)", AxisFlow::identity(), FieldFlow::Superposition(HeatSolution::Quadratic { k: k1 }), ident, sup),
            ],
        ),
        3 => (
            "gen",
            "const",
            "any",
            "k2",
            vec![
                extra("v d_v", AxisFlow::identity(), ident, rate(1.0), sc),
                extra("beta d_v (kernel)", AxisFlow::identity(), ident, FieldFlow::Superposition(HeatSolution::Kernel { k: k2 }), sup),
                extra("beta d_v (x^2 + 2 k2 t)", AxisFlow::identity(), ident, FieldFlow::Superposition(HeatSolution::Quadratic { k: k2 }), sup),
            ],
        ),
        4 => ("exp", "exp", "e^u", "e^v", vec![extra("x d_x + 2 d_u + 2 d_v", x_scale, shift(2.0), shift(2.0), FamilyKind::ScalingWithShift)]),
        5 => ("exp", "pow", "e^u", "v^m", vec![extra("x d_x + 2 d_u + (2/m) v d_v", x_scale, shift(2.0), rate(2.0 / M_EXP), FamilyKind::ScalingWithShift)]),
        6 => ("pow", "exp", "u^n", "e^v", vec![extra("x d_x + (2/n) u d_u + 2 d_v", x_scale, rate(2.0 / N_EXP), shift(2.0), FamilyKind::ScalingWithShift)]),
        7 => ("pow", "pow", "u^n", "v^m", vec![extra("x d_x + (2/n) u d_u + (2/m) v d_v", x_scale, rate(2.0 / N_EXP), rate(2.0 / M_EXP), sc)]),
        8 => (
            "pow43",
            "pow43",
            "u^(-4/3)",
            "v^(-4/3)",
            vec![
                extra("x d_x - (3/2) u d_u - (3/2) v d_v", x_scale, rate(-1.5), rate(-1.5), sc),
                extra(
                    "x^2 d_x - 3xu d_u - 3xv d_v",
                    AxisFlow::Conformal,
                    FieldFlow::ConformalWeight { power: 3.0 },
                    FieldFlow::ConformalWeight { power: 3.0 },
                    FamilyKind::Conformal,
                ),
            ],
        ),
        9 => {
            return Err(Error::Precondition(
                "case 9 (both diffusivities constant) is not covered".into(),
            ))
        }
        _ => return Err(Error::Precondition(format!("unknown case {id}; expected 1..=8"))),
    };
    let mut generators: Vec<(String, GroupAction<f64>)> = vec![
        ("d_t".into(), GroupAction::time_translation(2)),
        ("d_x".into(), GroupAction::space_translation(2)),
        ("2t d_t + x d_x".into(), GroupAction::parabolic_dilation(2)),
    ];
    generators.extend(extras);
    Ok(GeneratorCase {
        id,
        d1_label: l1,
        d2_label: l2,
        system: PdeSystem {
            equations: vec![law(d1, 0, "u_t = (d1(u) u_x)_x"), law(d2, 1, "v_t = (d2(v) v_x)_x")],
            ranges: vec![(0.5, 2.0), (0.5, 2.0)],
        },
        generators,
    })
}

/// Per-generator outcome for one case.
#[derive(Debug, Clone)]
pub struct GeneratorReport {
    pub case: u8,
    pub results: Vec<(String, InvarianceReport)>,
    pub pass: bool,
}

/// Exponentiates every listed generator of a case and checks that it maps
/// the pair of phase equations into itself.
pub fn verify_table2_generators(case: u8) -> Result<GeneratorReport> {
    let c = generator_case(case)?;
    let samples = c.system.sample_jets(100, 0x7ab1e2 + case as u64);
    let mut results = Vec::new();
    let mut pass = true;
    for (label, action) in &c.generators {
        let mut report = InvarianceReport::new(label.clone());
        report.push(check_pde_invariance(action, &c.system, &samples)?);
        pass &= report.pass;
        results.push((label.clone(), report));
    }
    Ok(GeneratorReport { case, results, pass })
}

/// `t → e0 t + t0`, `x → e1 x + x0`, `u → e2 u + u0`, `v → e3 v + v0`,
/// free surfaces unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceMap<S> {
    pub e0: S,
    pub e1: S,
    pub e2: S,
    pub e3: S,
    pub t0: S,
    pub x0: S,
    pub u0: S,
    pub v0: S,
}

/// Rewrites a problem in the transformed variables.
///
/// The latent-heat balance on the melting front only keeps its form when
/// `e2 = e3`; positivity of the diffusivities and monotonicity of `h`
/// require `e0, e1, e2 > 0`; the inverse-sqrt law survives only `t0 = 0`.
pub fn equivalence_transform<S: Real>(bvp: &TransformedBvp<S>, m: EquivalenceMap<S>) -> Result<TransformedBvp<S>> {
    if !(m.e0 > S::zero() && m.e1 > S::zero() && m.e2 > S::zero()) {
        return Err(Error::Precondition(format!(
            "need e0, e1, e2 > 0 (got {}, {}, {})",
            m.e0, m.e1, m.e2
        )));
    }
    if m.e2 != m.e3 {
        return Err(Error::Precondition(format!(
            "the melting-front balance requires e2 = e3 (got {}, {})",
            m.e2, m.e3
        )));
    }
    let time = match bvp.time_law {
        TimeLaw::Steady => S::one(),
        TimeLaw::InverseSqrt => {
            if m.t0 != S::zero() {
                return Err(Error::Precondition("a time shift breaks the 1/sqrt(t) law".into()));
            }
            m.e0.sqrt()
        }
    };
    let EquivalenceMap { e0, e1, e2, e3, u0, v0, .. } = m;
    let (d1, d2, q, h) = (bvp.d1.clone(), bvp.d2.clone(), bvp.q_of_u.clone(), bvp.h_of_u.clone());
    let diff = e1 * e1 / e0;
    let out = TransformedBvp {
        d1: Arc::new(move |u: S| diff * d1((u - u0) / e2)),
        d2: Arc::new(move |v: S| diff * d2((v - v0) / e3)),
        q_of_u: Arc::new(move |u: S| e1 * e2 / e0 * time * q((u - u0) / e2)),
        h_of_u: Arc::new(move |u: S| e1 / e0 * time * h((u - u0) / e2)),
        time_law: bvp.time_law,
        h1: e2 * bvp.h1,
        h2: e3 * bvp.h2,
        u_m: e2 * bvp.u_m + u0,
        v_m: e3 * bvp.v_m + v0,
        v_inf: e3 * bvp.v_inf + v0,
        u_cap: e2 * bvp.u_cap + u0,
    };
    out.validate()?;
    Ok(out)
}
