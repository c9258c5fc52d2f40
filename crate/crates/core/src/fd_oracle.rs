//! Independent front-tracking finite-difference solver for the full
//! two-phase problem with an evaporating surface.
//!
//! Each phase is mapped onto a fixed reference interval (Landau
//! transformation): the liquid `[s1, s2] → [0, 1]` and the solid
//! `[s2, x_max] → [0, 1]`. Interior nodes advance by an explicit
//! conservative diffusion stencil plus the grid-motion advection term; the
//! fronts move by forward Euler with `V1 = h(t, u(s1))` and `V2` from the
//! latent-heat balance evaluated with one-sided second-order differences.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::material::{Phase, TimeLaw, TransformedBvp};
use crate::numerics::roots::{brent, RootOptions};
use crate::scalar::Real;
use crate::self_similar::SelfSimilarSolution;
use crate::travelling_wave::TravellingWaveSolution;

/// Stability factor of the explicit scheme: `dt ≤ CFL · Δx² / max d`.
pub const CFL: f64 = 0.4;
/// Steps between two energy-bookkeeping checks.
pub const ENERGY_WINDOW: usize = 100;

/// Fronts and nodal enthalpies at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontTrackedState<S> {
    pub t: S,
    /// Evaporating surface.
    pub s1: S,
    /// Melting front.
    pub s2: S,
    /// Far boundary, fixed in time.
    pub x_max: S,
    /// Liquid enthalpies, `n_liq + 1` nodes; `u[0]` on the surface,
    /// `u[n_liq] = u_m`.
    pub u: Vec<S>,
    /// Solid enthalpies, `n_sol + 1` nodes; `v[0] = v_m`, `v[n_sol] = v_inf`.
    pub v: Vec<S>,
    /// Liquid thickness at or below which the layer counts as collapsed.
    pub collapse_limit: S,
}

/// Front velocities and boundary derivatives of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontKinematics<S> {
    pub v1: S,
    pub v2: S,
    /// `d1 u_x` at `s2⁻`.
    pub liquid_flux_front: S,
    /// `d2 v_x` at `s2⁺`.
    pub solid_flux_front: S,
    /// `d2 v_x` at `x_max`.
    pub solid_flux_far: S,
}

impl<S: Real> FrontTrackedState<S> {
    /// Samples `field(phase, x)` on both grids. The collapse limit is twice
    /// the initial liquid spacing.
    pub fn from_field<F>(t: S, s1: S, s2: S, x_max: S, n_liq: usize, n_sol: usize, mut field: F) -> Result<Self>
    where
        F: FnMut(Phase, S) -> Result<S>,
    {
        if n_liq < 3 || n_sol < 3 {
            return Err(Error::Precondition(format!(
                "need at least 3 cells per phase (got {n_liq}, {n_sol})"
            )));
        }
        if !(s1 < s2 && s2 < x_max) {
            return Err(Error::Precondition(format!(
                "fronts must satisfy s1 < s2 < x_max (got {s1}, {s2}, {x_max})"
            )));
        }
        let mut st = Self {
            t,
            s1,
            s2,
            x_max,
            u: vec![S::zero(); n_liq + 1],
            v: vec![S::zero(); n_sol + 1],
            collapse_limit: S::of(2.0) * (s2 - s1) / S::of(n_liq as f64),
        };
        for i in 0..=n_liq {
            st.u[i] = field(Phase::Liquid, st.liquid_x(i))?;
        }
        for i in 0..=n_sol {
            st.v[i] = field(Phase::Solid, st.solid_x(i))?;
        }
        Ok(st)
    }

    pub fn n_liq(&self) -> usize {
        self.u.len() - 1
    }

    pub fn n_sol(&self) -> usize {
        self.v.len() - 1
    }

    pub fn dx_liq(&self) -> S {
        (self.s2 - self.s1) / S::of(self.n_liq() as f64)
    }

    pub fn dx_sol(&self) -> S {
        (self.x_max - self.s2) / S::of(self.n_sol() as f64)
    }

    pub fn liquid_x(&self, i: usize) -> S {
        self.s1 + self.dx_liq() * S::of(i as f64)
    }

    pub fn solid_x(&self, i: usize) -> S {
        if i == self.n_sol() {
            self.x_max
        } else {
            self.s2 + self.dx_sol() * S::of(i as f64)
        }
    }

    /// Largest admissible explicit step for the current grids.
    pub fn stable_dt(&self, bvp: &TransformedBvp<S>) -> Result<S> {
        let d1 = max_diffusivity(&bvp.d1, &self.u)?;
        let d2 = max_diffusivity(&bvp.d2, &self.v)?;
        let (a, b) = (self.dx_liq(), self.dx_sol());
        Ok(S::of(CFL) * (a * a / d1).min(b * b / d2))
    }

    pub fn kinematics(&self, bvp: &TransformedBvp<S>) -> FrontKinematics<S> {
        let (n, m) = (self.n_liq(), self.n_sol());
        let (hl, hs) = (self.dx_liq(), self.dx_sol());
        let two = S::of(2.0);
        let three = S::of(3.0);
        let four = S::of(4.0);
        let ux = (three * self.u[n] - four * self.u[n - 1] + self.u[n - 2]) / (two * hl);
        let vx0 = (-three * self.v[0] + four * self.v[1] - self.v[2]) / (two * hs);
        let vxm = (three * self.v[m] - four * self.v[m - 1] + self.v[m - 2]) / (two * hs);
        let liquid_flux_front = (bvp.d1)(self.u[n]) * ux;
        let solid_flux_front = (bvp.d2)(self.v[0]) * vx0;
        FrontKinematics {
            v1: bvp.evaporation_velocity(self.t, self.u[0]),
            v2: (solid_flux_front - liquid_flux_front) / bvp.h2,
            liquid_flux_front,
            solid_flux_front,
            solid_flux_far: (bvp.d2)(self.v[m]) * vxm,
        }
    }

    /// Trapezoidal total enthalpy above the level `base`,
    /// `∫ (u - base) dx + ∫ (v - base) dx`.
    pub fn total_enthalpy(&self, base: S) -> S {
        let shift = base * (self.x_max - self.s1);
        trapezoid(&self.u, self.dx_liq()) + trapezoid(&self.v, self.dx_sol()) - shift
    }

    /// Rate of change of [`total_enthalpy`](Self::total_enthalpy) implied
    /// by the boundary data, together with the sum of magnitudes of its
    /// terms.
    pub fn enthalpy_rate(&self, bvp: &TransformedBvp<S>, base: S) -> (S, S) {
        let k = self.kinematics(bvp);
        let u0 = self.u[0];
        let q = bvp.flux(self.t, u0);
        let terms = [
            q,
            -bvp.h1 * k.v1,
            -u0 * k.v1,
            -bvp.h2 * k.v2,
            (bvp.u_m - bvp.v_m) * k.v2,
            k.solid_flux_far,
            base * k.v1,
        ];
        let rate = terms.iter().fold(S::zero(), |a, &b| a + b);
        let gross = terms.iter().fold(S::zero(), |a, &b| a + b.abs());
        (rate, gross)
    }

    /// Advances by `dt`; see [`step`].
    pub fn step(&self, bvp: &TransformedBvp<S>, dt: S) -> Result<Self> {
        let bound = self.stable_dt(bvp)?;
        if !(dt > S::zero()) || dt > bound * (S::one() + S::of(1e-12)) {
            return Err(Error::StepSize { dt: dt.as_f64(), bound: bound.as_f64() });
        }
        let k = self.kinematics(bvp);
        let (n, m) = (self.n_liq(), self.n_sol());
        let mut next = self.clone();

        let hl = self.dx_liq();
        let inv_hl2 = S::one() / (hl * hl);
        let d: Vec<S> = self.u.iter().map(|&w| (bvp.d1)(w)).collect();
        let half = S::of(0.5);
        for i in 1..n {
            let xi = S::of(i as f64) / S::of(n as f64);
            let right = half * (d[i] + d[i + 1]) * (self.u[i + 1] - self.u[i]);
            let left = half * (d[i] + d[i - 1]) * (self.u[i] - self.u[i - 1]);
            let grid = k.v1 * (S::one() - xi) + k.v2 * xi;
            let adv = grid * (self.u[i + 1] - self.u[i - 1]) / (S::of(2.0) * hl);
            next.u[i] = self.u[i] + dt * ((right - left) * inv_hl2 + adv);
        }

        let hs = self.dx_sol();
        let inv_hs2 = S::one() / (hs * hs);
        let d: Vec<S> = self.v.iter().map(|&w| (bvp.d2)(w)).collect();
        for i in 1..m {
            let xi = S::of(i as f64) / S::of(m as f64);
            let right = half * (d[i] + d[i + 1]) * (self.v[i + 1] - self.v[i]);
            let left = half * (d[i] + d[i - 1]) * (self.v[i] - self.v[i - 1]);
            let adv = k.v2 * (S::one() - xi) * (self.v[i + 1] - self.v[i - 1]) / (S::of(2.0) * hs);
            next.v[i] = self.v[i] + dt * ((right - left) * inv_hs2 + adv);
        }

        next.t = self.t + dt;
        next.s1 = self.s1 + dt * k.v1;
        next.s2 = self.s2 + dt * k.v2;
        let thickness = next.s2 - next.s1;
        if thickness <= self.collapse_limit {
            return Err(Error::Collapse {
                t: next.t.as_f64(),
                thickness: thickness.as_f64(),
                limit: self.collapse_limit.as_f64(),
            });
        }
        if next.s2 >= next.x_max {
            return Err(Error::Contract(format!(
                "melting front reached the far boundary at t = {}",
                next.t
            )));
        }
        next.u[n] = bvp.u_m;
        next.v[0] = bvp.v_m;
        next.v[m] = bvp.v_inf;
        next.u[0] = surface_node(bvp, next.t, next.u[1], next.u[2], next.dx_liq())?;
        Ok(next)
    }

    /// Largest excursion of the nodal enthalpies outside the admissible
    /// ranges `[u_m, u_cap]` (liquid) and `[v_inf, v_m]` (solid), relative
    /// to `u_cap - v_inf`.
    pub fn bound_excursion(&self, bvp: &TransformedBvp<S>) -> S {
        let (ulo, uhi) = (bvp.u_m.min(bvp.u_cap), bvp.u_cap.max(bvp.u_m));
        let (vlo, vhi) = (bvp.v_inf.min(bvp.v_m), bvp.v_inf.max(bvp.v_m));
        let mut worst = S::zero();
        for &u in &self.u {
            worst = worst.max(ulo - u).max(u - uhi);
        }
        for &v in &self.v {
            worst = worst.max(vlo - v).max(v - vhi);
        }
        worst / (bvp.u_cap - bvp.v_inf).abs()
    }
}

/// Advances `state` by one explicit step of size `dt`.
///
/// Fails with [`Error::StepSize`] when `dt` exceeds the stability bound on
/// either grid and with [`Error::Collapse`] when the liquid thickness falls
/// to twice the initial liquid spacing.
pub fn step<S: Real>(state: &FrontTrackedState<S>, bvp: &TransformedBvp<S>, dt: S) -> Result<FrontTrackedState<S>> {
    state.step(bvp, dt)
}

fn max_diffusivity<S: Real>(d: &crate::material::ScalarFn<S>, w: &[S]) -> Result<S> {
    let mut best = S::zero();
    for &x in w {
        let v = d(x);
        if !(v > S::zero()) || !v.is_finite() {
            return Err(Error::DegenerateDiffusivity { w: x.as_f64(), d: v.as_f64() });
        }
        best = best.max(v);
    }
    Ok(best)
}

fn trapezoid<S: Real>(w: &[S], h: S) -> S {
    let n = w.len() - 1;
    let inner = w[1..n].iter().fold(S::zero(), |a, &b| a + b);
    h * (inner + S::of(0.5) * (w[0] + w[n]))
}

/// Solves the surface flux balance `d1(u0) u_x = H1 h(t,u0) - q(t,u0)` for
/// the surface node, with a one-sided second-order `u_x`.
fn surface_node<S: Real>(bvp: &TransformedBvp<S>, t: S, u1: S, u2: S, h: S) -> Result<S> {
    let g = |u0: S| -> Result<S> {
        let ux = (S::of(-3.0) * u0 + S::of(4.0) * u1 - u2) / (S::of(2.0) * h);
        Ok((bvp.d1)(u0) * ux - bvp.h1 * bvp.evaporation_velocity(t, u0) + bvp.flux(t, u0))
    };
    let lo = bvp.u_m.min(u1);
    let hi = bvp.u_cap;
    let opts = RootOptions { rel_tol: S::tolerance(1e-14), ..RootOptions::default() };
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if glo == S::zero() {
        return Ok(lo);
    }
    if glo.signum() != ghi.signum() {
        return brent(g, lo, hi, opts);
    }
    // Fall back to a scan for a sign change.
    let n = 256;
    let mut a = lo;
    let mut ga = glo;
    for i in 1..=n {
        let b = lo + (hi - lo) * S::of(i as f64 / n as f64);
        let gb = g(b)?;
        if gb.signum() != ga.signum() {
            return brent(g, a, b, opts);
        }
        a = b;
        ga = gb;
    }
    Err(Error::Root(format!(
        "surface balance has no root on [{lo}, {hi}] at t = {t}"
    )))
}

/// Grid and output settings of an oracle run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid<S> {
    pub n_liq: usize,
    /// Solid cells; `None` matches the initial liquid spacing.
    pub n_sol: Option<usize>,
    /// Fraction of the stability bound used as step size, `(0, 1]`.
    pub dt_fraction: S,
    /// Keep a snapshot every this many steps (plus the first and last).
    pub snapshot_every: Option<usize>,
    /// Fronts are fitted over the last `fit_fraction` of the run.
    pub fit_fraction: S,
}

impl<S: Real> FdGrid<S> {
    pub fn new(n_liq: usize) -> Self {
        Self {
            n_liq,
            n_sol: None,
            dt_fraction: S::one(),
            snapshot_every: None,
            fit_fraction: S::of(0.5),
        }
    }
}

/// Nodal snapshot of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<S> {
    pub t: S,
    pub s1: S,
    pub s2: S,
    /// `(phase, x, w)` for every node, liquid first.
    pub nodes: Vec<(Phase, S, S)>,
}

impl<S: Real> Snapshot<S> {
    pub fn of(st: &FrontTrackedState<S>) -> Self {
        let mut nodes = Vec::with_capacity(st.u.len() + st.v.len());
        for (i, &w) in st.u.iter().enumerate() {
            nodes.push((Phase::Liquid, st.liquid_x(i), w));
        }
        for (i, &w) in st.v.iter().enumerate() {
            nodes.push((Phase::Solid, st.solid_x(i), w));
        }
        Self { t: st.t, s1: st.s1, s2: st.s2, nodes }
    }
}

/// History of a run: front trajectories, snapshots, and diagnostics.
#[derive(Debug, Clone)]
pub struct Run<S> {
    pub final_state: FrontTrackedState<S>,
    /// `(t, s1, s2)` after every step, starting with the initial state.
    pub fronts: Vec<(S, S, S)>,
    pub snapshots: Vec<Snapshot<S>>,
    pub steps: usize,
    /// Largest relative energy-bookkeeping mismatch over all windows.
    pub energy_error: S,
    pub bound_excursion: S,
}

/// Steps `state` to `t_end` with the largest stable step (scaled by
/// `grid.dt_fraction`), the last step shortened to land on `t_end`.
pub fn run<S: Real>(
    bvp: &TransformedBvp<S>,
    mut state: FrontTrackedState<S>,
    t_end: S,
    grid: &FdGrid<S>,
) -> Result<Run<S>> {
    if !(grid.dt_fraction > S::zero() && grid.dt_fraction <= S::one()) {
        return Err(Error::Precondition(format!(
            "dt fraction {} outside (0, 1]",
            grid.dt_fraction
        )));
    }
    let mut fronts = vec![(state.t, state.s1, state.s2)];
    let mut snapshots = Vec::new();
    if grid.snapshot_every.is_some() {
        snapshots.push(Snapshot::of(&state));
    }
    let mut energy_error = S::zero();
    let mut bound = state.bound_excursion(bvp);
    // Measuring enthalpy from the far-field level keeps the windowed
    // differences free of cancellation.
    let base = bvp.v_inf;
    let mut window_start = state.total_enthalpy(base);
    let mut window_flux = S::zero();
    let mut window_gross = S::zero();
    let mut steps = 0usize;
    let (mut rate, mut gross) = state.enthalpy_rate(bvp, base);
    while state.t < t_end {
        let mut dt = state.stable_dt(bvp)? * grid.dt_fraction;
        let remaining = t_end - state.t;
        if dt >= remaining {
            dt = remaining;
        }
        let next = state.step(bvp, dt)?;
        let (r1, g1) = next.enthalpy_rate(bvp, base);
        window_flux = window_flux + S::of(0.5) * dt * (rate + r1);
        window_gross = window_gross + S::of(0.5) * dt * (gross + g1);
        rate = r1;
        gross = g1;
        state = next;
        steps += 1;
        fronts.push((state.t, state.s1, state.s2));
        bound = bound.max(state.bound_excursion(bvp));
        if steps % ENERGY_WINDOW == 0 || state.t >= t_end {
            let e = state.total_enthalpy(base);
            let mismatch = (e - window_start - window_flux).abs() / window_gross.max(S::min_positive_value());
            energy_error = energy_error.max(mismatch);
            window_start = e;
            window_flux = S::zero();
            window_gross = S::zero();
        }
        if let Some(every) = grid.snapshot_every {
            if steps % every.max(1) == 0 || state.t >= t_end {
                snapshots.push(Snapshot::of(&state));
            }
        }
    }
    Ok(Run { final_state: state, fronts, snapshots, steps, energy_error, bound_excursion: bound })
}

/// Least-squares slope of `y` against `x`.
fn slope<S: Real>(pts: &[(S, S)]) -> S {
    let n = S::of(pts.len() as f64);
    let (sx, sy) = pts.iter().fold((S::zero(), S::zero()), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((S::zero(), S::zero()), |(a, b), &(x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    num / den
}

fn tail<T: Copy, S: Real>(v: &[T], fraction: S) -> &[T] {
    let keep = ((S::of(v.len() as f64) * fraction).ceil().as_f64() as usize).clamp(2, v.len());
    &v[v.len() - keep..]
}

/// Outcome of a travelling-wave validation run.
#[derive(Debug, Clone)]
pub struct TravellingWaveValidation<S> {
    pub n_liq: usize,
    pub n_sol: usize,
    pub steps: usize,
    pub t_end: S,
    pub mu: S,
    /// Velocities fitted to `s1(t)` and `s2(t)`.
    pub mu_surface: S,
    pub mu_front: S,
    /// `max |μ_fit - μ| / μ` over both fronts.
    pub velocity_error: S,
    /// Largest nodal deviation from the exact profile in the frame of the
    /// computed surface, relative to `u_s - v_inf`.
    pub profile_drift: S,
    /// `|(s2 - s1) - δ| / δ` at `t_end`.
    pub thickness_drift: S,
    pub energy_error: S,
    pub bound_excursion: S,
    pub run: Run<S>,
}

/// Seeds the oracle with the exact travelling wave (`s1 = 0`, `s2 = δ`) and
/// runs it to `t_end`.
pub fn validate_travelling_wave<S: Real>(
    bvp: &TransformedBvp<S>,
    sol: &TravellingWaveSolution<S>,
    t_end: S,
    grid: &FdGrid<S>,
) -> Result<TravellingWaveValidation<S>> {
    if bvp.time_law != TimeLaw::Steady {
        return Err(Error::Precondition("travelling waves need the steady time law".into()));
    }
    if !(t_end > S::zero()) {
        return Err(Error::Precondition(format!("t_end must be positive (got {t_end})")));
    }
    let (s1, s2) = (S::zero(), sol.delta);
    let x_max = s2 + S::of(20.0) * ((bvp.d2)(bvp.v_inf) * t_end).sqrt();
    let n_sol = solid_cells(grid, s1, s2, x_max);
    let exact = |phase: Phase, xi: S| -> Result<S> {
        Ok(match phase {
            Phase::Liquid if xi >= sol.delta => bvp.u_m,
            Phase::Solid if xi <= sol.delta => bvp.v_m,
            _ => sol.enthalpy_at(xi)?.1,
        })
    };
    let state = FrontTrackedState::from_field(S::zero(), s1, s2, x_max, grid.n_liq, n_sol, exact)?;
    let run = run(bvp, state, t_end, grid)?;
    let fit = tail(&run.fronts, grid.fit_fraction);
    let mu_surface = slope(&fit.iter().map(|f| (f.0, f.1)).collect::<Vec<_>>());
    let mu_front = slope(&fit.iter().map(|f| (f.0, f.2)).collect::<Vec<_>>());
    let velocity_error = ((mu_surface - sol.mu).abs().max((mu_front - sol.mu).abs())) / sol.mu;

    let st = &run.final_state;
    let scale = (sol.u_s - bvp.v_inf).abs();
    let mut drift = S::zero();
    for (phase, x, w) in Snapshot::of(st).nodes {
        let xi = (x - st.s1).max(S::zero());
        drift = drift.max((w - exact(phase, xi)?).abs() / scale);
    }
    Ok(TravellingWaveValidation {
        n_liq: grid.n_liq,
        n_sol,
        steps: run.steps,
        t_end,
        mu: sol.mu,
        mu_surface,
        mu_front,
        velocity_error,
        profile_drift: drift,
        thickness_drift: ((st.s2 - st.s1) - sol.delta).abs() / sol.delta,
        energy_error: run.energy_error,
        bound_excursion: run.bound_excursion,
        run,
    })
}

fn solid_cells<S: Real>(grid: &FdGrid<S>, s1: S, s2: S, x_max: S) -> usize {
    grid.n_sol.unwrap_or_else(|| {
        let ratio = (x_max - s2) / (s2 - s1);
        (S::of(grid.n_liq as f64) * ratio).ceil().as_f64().max(3.0) as usize
    })
}

/// Outcome of a self-similar validation run.
#[derive(Debug, Clone)]
pub struct SelfSimilarValidation<S> {
    pub n_liq: usize,
    pub n_sol: usize,
    pub steps: usize,
    pub t0: S,
    pub t_end: S,
    pub omega1: S,
    pub omega2: S,
    /// `ωₖ` fitted as the least-squares coefficient of `sₖ ≈ ωₖ √t`.
    pub omega1_fit: S,
    pub omega2_fit: S,
    pub omega1_error: S,
    pub omega2_error: S,
    /// Slopes of `log sₖ` against `log t`.
    pub exponent1: S,
    pub exponent2: S,
    pub energy_error: S,
    pub bound_excursion: S,
    pub run: Run<S>,
}

/// Seeds the oracle with the similarity profile at `t0 > 0` and runs it to
/// `t_end`, fitting the fronts to `ωₖ √t`.
pub fn validate_self_similar<S: Real>(
    bvp: &TransformedBvp<S>,
    sol: &SelfSimilarSolution<S>,
    t0: S,
    t_end: S,
    grid: &FdGrid<S>,
) -> Result<SelfSimilarValidation<S>> {
    if bvp.time_law != TimeLaw::InverseSqrt {
        return Err(Error::Precondition("self-similar runs need the inverse-sqrt time law".into()));
    }
    if !(t0 > S::zero() && t_end > t0) {
        return Err(Error::Precondition(format!("need 0 < t0 < t_end (got {t0}, {t_end})")));
    }
    let r = t0.sqrt();
    let (s1, s2) = (sol.omega1 * r, sol.omega2 * r);
    let x_max = s2 + S::of(20.0) * ((bvp.d2)(bvp.v_inf) * t_end).sqrt();
    let n_sol = solid_cells(grid, s1, s2, x_max);
    let state = FrontTrackedState::from_field(t0, s1, s2, x_max, grid.n_liq, n_sol, |phase, x| {
        let omega = (x / r).max(sol.omega1);
        Ok(match phase {
            Phase::Liquid if omega >= sol.omega2 => bvp.u_m,
            Phase::Solid if omega <= sol.omega2 => bvp.v_m,
            _ => sol.enthalpy_at(omega)?.1,
        })
    })?;
    let run = run(bvp, state, t_end, grid)?;
    let fit = tail(&run.fronts, grid.fit_fraction);
    let through_origin = |k: usize| {
        let (num, den) = fit.iter().fold((S::zero(), S::zero()), |(a, b), f| {
            let s = if k == 1 { f.1 } else { f.2 };
            (a + s * f.0.sqrt(), b + f.0)
        });
        num / den
    };
    let exponent = |k: usize| {
        let pts: Vec<(S, S)> = fit
            .iter()
            .map(|f| (f.0.ln(), if k == 1 { f.1 } else { f.2 }.ln()))
            .collect();
        slope(&pts)
    };
    let (w1, w2) = (through_origin(1), through_origin(2));
    Ok(SelfSimilarValidation {
        n_liq: grid.n_liq,
        n_sol,
        steps: run.steps,
        t0,
        t_end,
        omega1: sol.omega1,
        omega2: sol.omega2,
        omega1_fit: w1,
        omega2_fit: w2,
        omega1_error: (w1 - sol.omega1).abs() / sol.omega1,
        omega2_error: (w2 - sol.omega2).abs() / sol.omega2,
        exponent1: exponent(1),
        exponent2: exponent(2),
        energy_error: run.energy_error,
        bound_excursion: run.bound_excursion,
        run,
    })
}

impl<S: Real> TravellingWaveValidation<S> {
    /// Final report as `key = value` lines.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("t_end_s", self.t_end),
            ("mu_exact_m_per_s", self.mu),
            ("mu_surface_fit_m_per_s", self.mu_surface),
            ("mu_front_fit_m_per_s", self.mu_front),
            ("velocity_rel_error", self.velocity_error),
            ("profile_drift_rel", self.profile_drift),
            ("thickness_drift_rel", self.thickness_drift),
            ("energy_bookkeeping_rel", self.energy_error),
            ("bound_excursion_rel", self.bound_excursion),
        ] {
            let _ = writeln!(s, "{k} = {:.12e}", v.as_f64());
        }
        let _ = writeln!(s, "n_liq = {}\nn_sol = {}\nsteps = {}", self.n_liq, self.n_sol, self.steps);
        s
    }
}

impl<S: Real> SelfSimilarValidation<S> {
    /// Final report as `key = value` lines.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("t0_s", self.t0),
            ("t_end_s", self.t_end),
            ("omega1_shooting", self.omega1),
            ("omega2_shooting", self.omega2),
            ("omega1_fit", self.omega1_fit),
            ("omega2_fit", self.omega2_fit),
            ("omega1_rel_error", self.omega1_error),
            ("omega2_rel_error", self.omega2_error),
            ("exponent_s1", self.exponent1),
            ("exponent_s2", self.exponent2),
            ("energy_bookkeeping_rel", self.energy_error),
            ("bound_excursion_rel", self.bound_excursion),
        ] {
            let _ = writeln!(s, "{k} = {:.12e}", v.as_f64());
        }
        let _ = writeln!(s, "n_liq = {}\nn_sol = {}\nsteps = {}", self.n_liq, self.n_sol, self.steps);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn resting() -> TransformedBvp<f64> {
        TransformedBvp {
            d1: Arc::new(|_| 1.0),
            d2: Arc::new(|_| 2.0),
            q_of_u: Arc::new(|_| 0.0),
            h_of_u: Arc::new(|_| 0.0),
            time_law: TimeLaw::Steady,
            h1: 3.0,
            h2: 0.5,
            u_m: 1.0,
            v_m: 0.25,
            v_inf: 0.25,
            u_cap: 10.0,
        }
    }

    #[test]
    fn equilibrium_is_preserved() {
        let bvp = resting();
        let st = FrontTrackedState::from_field(0.0, 0.0, 1.0, 5.0, 8, 16, |p, _| {
            Ok(if p == Phase::Liquid { 1.0 } else { 0.25 })
        })
        .unwrap();
        let mut s = st.clone();
        for _ in 0..50 {
            let dt = s.stable_dt(&bvp).unwrap();
            s = s.step(&bvp, dt).unwrap();
        }
        assert!(s.u.iter().all(|&u| (u - 1.0).abs() < 1e-14));
        assert!(s.v.iter().all(|&v| (v - 0.25).abs() < 1e-14));
        assert_eq!((s.s1, s.s2), (0.0, 1.0));
    }

    #[test]
    fn oversized_step_is_rejected() {
        let bvp = resting();
        let st = FrontTrackedState::from_field(0.0, 0.0, 1.0, 5.0, 8, 16, |_, _| Ok(0.5)).unwrap();
        let dt = st.stable_dt(&bvp).unwrap();
        assert!(matches!(st.step(&bvp, 1.5 * dt), Err(Error::StepSize { .. })));
    }

    #[test]
    fn collapse_is_detected() {
        let mut bvp = resting();
        bvp.h_of_u = Arc::new(|_| 100.0);
        bvp.q_of_u = Arc::new(|_| 300.0);
        let st = FrontTrackedState::from_field(0.0, 0.0, 1.0, 5.0, 8, 16, |p, _| {
            Ok(if p == Phase::Liquid { 1.0 } else { 0.25 })
        })
        .unwrap();
        let r = run(&bvp, st, 1.0, &FdGrid::new(8));
        assert!(matches!(r, Err(Error::Collapse { .. })));
    }

    #[test]
    fn malformed_fronts_are_rejected() {
        assert!(FrontTrackedState::from_field(0.0, 1.0, 0.5, 5.0, 8, 8, |_, _| Ok(0.0)).is_err());
        assert!(FrontTrackedState::from_field(0.0, 0.0, 0.5, 5.0, 2, 8, |_, _| Ok(0.0)).is_err());
    }
}
