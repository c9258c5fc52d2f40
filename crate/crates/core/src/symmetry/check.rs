//! Numerical invariance checks: governing equations, boundary manifolds on
//! fixed curves and free surfaces, and conditions at infinity.
//!
//! Residuals are normalized by the sum of magnitudes of the terms that
//! make up the condition, so tolerances are relative.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::action::{GroupAction, Jet, SurfaceJet};
use crate::error::{Error, Result};
use crate::material::ScalarFn;
use crate::scalar::Real;

/// Group parameters every check is evaluated at.
pub const EPS_GRID: [f64; 8] = [-0.5, -0.25, -0.1, -0.01, 0.01, 0.1, 0.25, 0.5];
/// Boundary and manifold-membership tolerance (normalized).
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Governing-equation tolerance (normalized).
pub const PDE_TOL: f64 = 1e-6;
/// Samples must lie on their manifold to this (normalized) accuracy.
pub const SAMPLE_TOL: f64 = 1e-10;
/// Far-field sequence `x_n = 10^n`, `n = 1..=INFINITY_TERMS`.
pub const INFINITY_TERMS: i32 = 8;

/// The four items of the invariance definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    /// Governing equations.
    A,
    /// Conditions on known curves.
    B,
    /// Conditions on free surfaces.
    C,
    /// Conditions at infinity.
    D,
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Item::A => "a",
            Item::B => "b",
            Item::C => "c",
            Item::D => "d",
        })
    }
}

/// One residual sample for the CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRecord {
    pub family: String,
    pub item: Item,
    pub condition: String,
    pub eps: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemVerdict {
    pub item: Item,
    pub condition: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: Option<String>,
}

/// Outcome of one check: a verdict plus the per-ε residuals behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub verdict: ItemVerdict,
    pub records: Vec<ResidualRecord>,
}

/// All checks of one group family against one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub family: String,
    pub verdicts: Vec<ItemVerdict>,
    pub records: Vec<ResidualRecord>,
    /// Conditions under which a failing family would pass, e.g. `q0 = 0`.
    pub constraints: Vec<String>,
    pub pass: bool,
}

impl InvarianceReport {
    pub fn new(family: impl Into<String>) -> Self {
        Self {
            family: family.into(),
            verdicts: Vec::new(),
            records: Vec::new(),
            constraints: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, fragment: Fragment) {
        self.pass &= fragment.verdict.pass;
        self.verdicts.push(fragment.verdict);
        self.records.extend(fragment.records);
    }

    /// Largest residual over all verdicts.
    pub fn max_residual(&self) -> f64 {
        self.verdicts.iter().map(|v| v.max_residual).fold(0.0, f64::max)
    }

    /// Items that failed, in order.
    pub fn failed_items(&self) -> Vec<Item> {
        let mut items: Vec<Item> = self.verdicts.iter().filter(|v| !v.pass).map(|v| v.item).collect();
        items.dedup();
        items
    }
}

fn normalized<S: Real>(value: S, scale: S) -> f64 {
    let s = scale.abs().max(S::min_positive_value());
    let r = (value.abs() / s).as_f64();
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

/// `(t, x, w, w_x, w_xx) ↦ (F, scale)` for `w_t = F`; `scale` is the sum of
/// magnitudes of the terms of `F`.
pub type RhsFn<S> = Arc<dyn Fn(S, S, S, S, S) -> (S, S) + Send + Sync>;

/// Evolution equation `w_t = F(t, x, w, w_x, w_xx)` for one field.
#[derive(Clone)]
pub struct EvolutionPde<S> {
    pub name: String,
    pub field: usize,
    pub rhs: RhsFn<S>,
}

impl<S: Real> EvolutionPde<S> {
    /// `w_t = (d(w) w_x)_x = d w_xx + d' w_x²`.
    pub fn nonlinear_heat(name: impl Into<String>, field: usize, d: ScalarFn<S>, d_prime: ScalarFn<S>) -> Self {
        let rhs: RhsFn<S> = Arc::new(move |_t, _x, w, wx, wxx| {
            let a = d(w) * wxx;
            let b = d_prime(w) * wx * wx;
            (a + b, a.abs() + b.abs())
        });
        Self { name: name.into(), field, rhs }
    }
}

impl<S> fmt::Debug for EvolutionPde<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvolutionPde")
            .field("name", &self.name)
            .field("field", &self.field)
            .finish_non_exhaustive()
    }
}

/// Decoupled system of evolution equations, one per field, with sampling
/// ranges for each field value.
#[derive(Debug, Clone)]
pub struct PdeSystem<S> {
    pub equations: Vec<EvolutionPde<S>>,
    pub ranges: Vec<(f64, f64)>,
}

impl<S: Real> PdeSystem<S> {
    pub fn fields(&self) -> usize {
        self.ranges.len()
    }

    /// Random second-order jets on the equation manifold (`w_t = F`), with
    /// `t ∈ [0.5, 2]`, `x ∈ [0.1, 1]`, `w_x, w_xx ∈ [-1, 1]`.
    pub fn sample_jets(&self, n: usize, seed: u64) -> Vec<Jet<S>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let t = S::of(rng.gen_range(0.5..2.0));
                let x = S::of(rng.gen_range(0.1..1.0));
                let m = self.fields();
                let w: Vec<S> = self.ranges.iter().map(|(lo, hi)| S::of(rng.gen_range(*lo..*hi))).collect();
                let w_x: Vec<S> = (0..m).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
                let w_xx: Vec<S> = (0..m).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
                let mut w_t: Vec<S> = (0..m).map(|_| S::of(rng.gen_range(-1.0..1.0))).collect();
                for eq in &self.equations {
                    let i = eq.field;
                    w_t[i] = (eq.rhs)(t, x, w[i], w_x[i], w_xx[i]).0;
                }
                Jet { t, x, w, w_t, w_x, w_xx: Some(w_xx), surfaces: vec![] }
            })
            .collect()
    }
}

fn pde_residual<S: Real>(eq: &EvolutionPde<S>, jet: &Jet<S>) -> Result<f64> {
    let w_xx = jet
        .w_xx
        .as_ref()
        .ok_or_else(|| Error::Contract(format!("`{}` needs second-order jets", eq.name)))?;
    let i = eq.field;
    let (f, scale) = (eq.rhs)(jet.t, jet.x, jet.w[i], jet.w_x[i], w_xx[i]);
    Ok(normalized(jet.w_t[i] - f, jet.w_t[i].abs() + scale))
}

/// Item (a): prolongs each sampled jet over the ε grid and evaluates every
/// equation at the transformed jet.
pub fn check_pde_invariance<S: Real>(
    action: &GroupAction<S>,
    system: &PdeSystem<S>,
    samples: &[Jet<S>],
) -> Result<Fragment> {
    let condition = system.equations.iter().map(|e| e.name.as_str()).collect::<Vec<_>>().join(" & ");
    for jet in samples {
        for eq in &system.equations {
            let r = pde_residual(eq, jet)?;
            if r > 1e-8 {
                return Err(Error::Contract(format!(
                    "sample does not satisfy `{}` (residual {r:e})",
                    eq.name
                )));
            }
        }
    }
    let mut records = Vec::with_capacity(EPS_GRID.len());
    let mut worst = 0.0_f64;
    let mut note = None;
    for &e in &EPS_GRID {
        let eps = S::of(e);
        let mut max_r = 0.0_f64;
        for jet in samples {
            match action.prolong(eps, jet) {
                Ok(j) => {
                    for eq in &system.equations {
                        max_r = max_r.max(pde_residual(eq, &j)?);
                    }
                }
                Err(err @ Error::LocalValidity { .. }) => {
                    max_r = f64::INFINITY;
                    note.get_or_insert(err.to_string());
                }
                Err(err) => return Err(err),
            }
        }
        worst = worst.max(max_r);
        records.push(ResidualRecord {
            family: action.id.clone(),
            item: Item::A,
            condition: condition.clone(),
            eps: e,
            residual: max_r,
        });
    }
    Ok(Fragment {
        verdict: ItemVerdict {
            item: Item::A,
            condition,
            max_residual: worst,
            tolerance: PDE_TOL,
            pass: worst <= PDE_TOL,
            note,
        },
        records,
    })
}

/// Residual components `(value, scale)` of a boundary condition at a jet.
pub type ResidualFn<S> = Arc<dyn Fn(&Jet<S>) -> Vec<(S, S)> + Send + Sync>;
/// Draws a jet on the condition's manifold.
pub type SamplerFn<S> = Arc<dyn Fn(&mut ChaCha8Rng) -> Option<Jet<S>> + Send + Sync>;
/// Known curve `s(t, x) = 0`.
pub type CurveFn<S> = Arc<dyn Fn(S, S) -> S + Send + Sync>;
/// Jet of a far-field profile at position `x`.
pub type FarFieldFn<S> = Arc<dyn Fn(S) -> Jet<S> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldKind {
    /// Known curve `s(t, x) = 0`.
    Fixed,
    /// Free surface `S_b(t, x) = 0`; the index selects `b`.
    FreeSurface(usize),
    /// `x → ∞`.
    Infinity,
}

/// A boundary condition together with a way of producing points on it.
#[derive(Clone)]
pub struct BoundaryCondition<S> {
    pub name: String,
    pub kind: ManifoldKind,
    /// Highest `x`-derivative order appearing in the condition.
    pub order: usize,
    pub residual: ResidualFn<S>,
    curve: Option<CurveFn<S>>,
    sampler: Option<SamplerFn<S>>,
    far_field: Option<FarFieldFn<S>>,
}

impl<S> fmt::Debug for BoundaryCondition<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryCondition")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl<S: Real> BoundaryCondition<S> {
    pub fn fixed(
        name: impl Into<String>,
        order: usize,
        curve: CurveFn<S>,
        sampler: SamplerFn<S>,
        residual: ResidualFn<S>,
    ) -> Self {
        Self {
            name: name.into(),
            kind: ManifoldKind::Fixed,
            order,
            residual,
            curve: Some(curve),
            sampler: Some(sampler),
            far_field: None,
        }
    }

    pub fn free_surface(
        name: impl Into<String>,
        surface: usize,
        order: usize,
        sampler: SamplerFn<S>,
        residual: ResidualFn<S>,
    ) -> Self {
        Self {
            name: name.into(),
            kind: ManifoldKind::FreeSurface(surface),
            order,
            residual,
            curve: None,
            sampler: Some(sampler),
            far_field: None,
        }
    }

    pub fn infinity(name: impl Into<String>, far_field: FarFieldFn<S>, residual: ResidualFn<S>) -> Self {
        Self {
            name: name.into(),
            kind: ManifoldKind::Infinity,
            order: 0,
            residual,
            curve: None,
            sampler: None,
            far_field: Some(far_field),
        }
    }

    fn membership(&self, jet: &Jet<S>) -> f64 {
        match self.kind {
            ManifoldKind::Fixed => {
                let c = self.curve.as_ref().expect("fixed conditions carry a curve");
                normalized(c(jet.t, jet.x), S::one())
            }
            ManifoldKind::FreeSurface(b) => jet
                .surfaces
                .get(b)
                .map_or(f64::INFINITY, |s: &SurfaceJet<S>| normalized(s.value, S::one())),
            ManifoldKind::Infinity => 0.0,
        }
    }

    fn condition_residual(&self, jet: &Jet<S>) -> f64 {
        (self.residual)(jet)
            .into_iter()
            .map(|(v, s)| normalized(v, s))
            .fold(0.0, f64::max)
    }

    /// Residual evaluated at the given jet (max over components).
    pub fn evaluate(&self, jet: &Jet<S>) -> f64 {
        self.condition_residual(jet)
    }
}

/// Samples drawn per boundary check.
pub const BOUNDARY_SAMPLES: usize = 64;

/// Items (b) and (c): transforms sampled manifold points and checks both
/// manifold membership and the condition residual.
pub fn check_boundary_invariance<S: Real>(
    action: &GroupAction<S>,
    condition: &BoundaryCondition<S>,
    seed: u64,
) -> Result<Fragment> {
    let item = match condition.kind {
        ManifoldKind::Fixed => Item::B,
        ManifoldKind::FreeSurface(_) => Item::C,
        ManifoldKind::Infinity => {
            return Err(Error::Contract(format!(
                "`{}` is a condition at infinity",
                condition.name
            )))
        }
    };
    let sampler = condition.sampler.as_ref().expect("finite conditions carry a sampler");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(BOUNDARY_SAMPLES);
    for _ in 0..BOUNDARY_SAMPLES {
        let jet = sampler(&mut rng)
            .ok_or_else(|| Error::Sampling(format!("no point produced for `{}`", condition.name)))?;
        let off = condition.membership(&jet).max(condition.condition_residual(&jet));
        if off > SAMPLE_TOL {
            return Err(Error::Sampling(format!(
                "sample for `{}` is off its manifold by {off:e}",
                condition.name
            )));
        }
        samples.push(jet);
    }

    let mut records = Vec::with_capacity(EPS_GRID.len());
    let mut worst = 0.0_f64;
    let mut note = None;
    for &e in &EPS_GRID {
        let eps = S::of(e);
        let mut max_r = 0.0_f64;
        for jet in &samples {
            match action.prolong(eps, jet) {
                Ok(j) => {
                    let m = condition.membership(&j);
                    if m > BOUNDARY_TOL {
                        note.get_or_insert_with(|| {
                            format!("transformed point leaves the manifold of `{}`", condition.name)
                        });
                    }
                    max_r = max_r.max(m).max(condition.condition_residual(&j));
                }
                Err(err @ Error::LocalValidity { .. }) => {
                    max_r = f64::INFINITY;
                    note.get_or_insert(err.to_string());
                }
                Err(err) => return Err(err),
            }
        }
        worst = worst.max(max_r);
        records.push(ResidualRecord {
            family: action.id.clone(),
            item,
            condition: condition.name.clone(),
            eps: e,
            residual: max_r,
        });
    }
    Ok(Fragment {
        verdict: ItemVerdict {
            item,
            condition: condition.name.clone(),
            max_residual: worst,
            tolerance: BOUNDARY_TOL,
            pass: worst <= BOUNDARY_TOL,
            note,
        },
        records,
    })
}

/// Item (d): follows `x_n = 10^n` through the action. Passes iff the
/// transformed sequence increases without bound and the condition
/// residual vanishes along it.
pub fn check_infinity_invariance<S: Real>(
    action: &GroupAction<S>,
    condition: &BoundaryCondition<S>,
) -> Result<Fragment> {
    let far = condition
        .far_field
        .as_ref()
        .ok_or_else(|| Error::Contract(format!("`{}` is not a condition at infinity", condition.name)))?;
    let mut records = Vec::with_capacity(EPS_GRID.len());
    let mut worst = 0.0_f64;
    let mut note = None;
    for &e in &EPS_GRID {
        let eps = S::of(e);
        let mut xs = Vec::new();
        let mut last_r = f64::INFINITY;
        let mut failed = None;
        for n in 1..=INFINITY_TERMS {
            let x = S::of(10f64.powi(n));
            match action.prolong(eps, &far(x)) {
                Ok(j) => {
                    xs.push(j.x.as_f64());
                    last_r = condition.condition_residual(&j);
                }
                Err(err @ Error::LocalValidity { .. }) => {
                    failed = Some(err.to_string());
                    break;
                }
                Err(err) => return Err(err),
            }
        }
        let r = if let Some(msg) = failed {
            note.get_or_insert(msg);
            f64::INFINITY
        } else {
            let monotone = xs.windows(2).all(|w| w[1] > w[0]);
            let growth = xs[xs.len() - 1] / xs[0];
            let needed = 0.5 * 10f64.powi(INFINITY_TERMS - 1);
            if monotone && growth >= needed {
                last_r
            } else {
                note.get_or_insert_with(|| {
                    format!("x* stays bounded: x*_{INFINITY_TERMS} = {:.6e}", xs[xs.len() - 1])
                });
                f64::INFINITY
            }
        };
        worst = worst.max(r);
        records.push(ResidualRecord {
            family: action.id.clone(),
            item: Item::D,
            condition: condition.name.clone(),
            eps: e,
            residual: r,
        });
    }
    Ok(Fragment {
        verdict: ItemVerdict {
            item: Item::D,
            condition: condition.name.clone(),
            max_residual: worst,
            tolerance: BOUNDARY_TOL,
            pass: worst <= BOUNDARY_TOL,
            note,
        },
        records,
    })
}

/// Runs whichever check matches the condition's manifold kind.
pub fn check_condition<S: Real>(action: &GroupAction<S>, condition: &BoundaryCondition<S>, seed: u64) -> Result<Fragment> {
    match condition.kind {
        ManifoldKind::Infinity => check_infinity_invariance(action, condition),
        _ => check_boundary_invariance(action, condition, seed),
    }
}
