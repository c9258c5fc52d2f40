//! One-parameter groups of point transformations and their prolongations.
//!
//! Every cataloged family has the separable form
//! `t* = T(t; ε)`, `x* = X(x; ε)`, `w*_i = a_i(t, x; ε)·w_i + b_i(t, x; ε)`,
//! extended by identity maps `S*_b = S_b` on free-surface functions.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Translation,
    Scaling,
    ScalingWithShift,
    Conformal,
    LinearSuperposition,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Translation => "translation",
            FamilyKind::Scaling => "scaling",
            FamilyKind::ScalingWithShift => "scaling_with_shift",
            FamilyKind::Conformal => "conformal",
            FamilyKind::LinearSuperposition => "linear_superposition",
        })
    }
}

/// `(e^{rε} - 1)/r`, or `ε` when `r = 0`.
fn phi<S: Real>(rate: S, eps: S) -> S {
    if rate == S::zero() {
        eps
    } else {
        (rate * eps).exp_m1() / rate
    }
}

/// Flow of one independent variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisFlow<S> {
    /// Generator `(rate·z + shift) ∂_z`: `z* = z e^{rate ε} + shift·φ(ε)`.
    Affine { rate: S, shift: S },
    /// Generator `z² ∂_z`: `z* = z / (1 - ε z)`.
    Conformal,
}

impl<S: Real> AxisFlow<S> {
    pub fn identity() -> Self {
        AxisFlow::Affine { rate: S::zero(), shift: S::zero() }
    }

    /// `(z*, dz*/dz, d²z*/dz²)`.
    fn eval(&self, eps: S, z: S) -> Option<(S, S, S)> {
        match *self {
            AxisFlow::Affine { rate, shift } => {
                let g = (rate * eps).exp();
                Some((z * g + shift * phi(rate, eps), g, S::zero()))
            }
            AxisFlow::Conformal => {
                let den = S::one() - eps * z;
                if !(den > S::zero()) {
                    return None;
                }
                Some((z / den, (den * den).recip(), S::of(2.0) * eps / (den * den * den)))
            }
        }
    }

    fn is_identity(&self) -> bool {
        matches!(*self, AxisFlow::Affine { rate, shift } if rate == S::zero() && shift == S::zero())
    }
}

/// A solution of `α_t = k α_xx`, with partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatSolution<S> {
    /// `(4πkt)^{-1/2} exp(-x²/(4kt))`.
    Kernel { k: S },
    /// `x² + 2kt`.
    Quadratic { k: S },
}

impl<S: Real> HeatSolution<S> {
    /// `(α, α_t, α_x, α_xx)`.
    pub fn eval(&self, t: S, x: S) -> (S, S, S, S) {
        let two = S::of(2.0);
        let four = S::of(4.0);
        match *self {
            HeatSolution::Kernel { k } => {
                let a = (four * S::PI() * k * t).sqrt().recip() * (-(x * x) / (four * k * t)).exp();
                let a_t = a * (-(two * t).recip() + x * x / (four * k * t * t));
                let a_x = -a * x / (two * k * t);
                let a_xx = a * (x * x / (four * k * k * t * t) - (two * k * t).recip());
                (a, a_t, a_x, a_xx)
            }
            HeatSolution::Quadratic { k } => (x * x + two * k * t, two * k, two * x, two),
        }
    }
}

/// Flow of one dependent variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldFlow<S> {
    /// Generator `(rate·w + shift) ∂_w`.
    Affine { rate: S, shift: S },
    /// Companion of a conformal `x`-flow, generator `-power·x·w ∂_w`:
    /// `w* = (1 - εx)^power · w`.
    ConformalWeight { power: S },
    /// Generator `α(t, x) ∂_w`: `w* = w + ε α(t, x)`.
    Superposition(HeatSolution<S>),
}

/// `a`, `b` of `w* = a w + b` and their partials in the original `(t, x)`.
#[derive(Debug, Clone, Copy)]
struct FieldCoefficients<S> {
    a: S,
    a_t: S,
    a_x: S,
    a_xx: S,
    b: S,
    b_t: S,
    b_x: S,
    b_xx: S,
}

impl<S: Real> FieldFlow<S> {
    pub fn identity() -> Self {
        FieldFlow::Affine { rate: S::zero(), shift: S::zero() }
    }

    fn coefficients(&self, eps: S, t: S, x: S) -> FieldCoefficients<S> {
        let z = S::zero();
        match *self {
            FieldFlow::Affine { rate, shift } => FieldCoefficients {
                a: (rate * eps).exp(),
                a_t: z,
                a_x: z,
                a_xx: z,
                b: shift * phi(rate, eps),
                b_t: z,
                b_x: z,
                b_xx: z,
            },
            FieldFlow::ConformalWeight { power } => {
                let den = S::one() - eps * x;
                let a = den.powf(power);
                FieldCoefficients {
                    a,
                    a_t: z,
                    a_x: -power * eps * den.powf(power - S::one()),
                    a_xx: power * (power - S::one()) * eps * eps * den.powf(power - S::of(2.0)),
                    b: z,
                    b_t: z,
                    b_x: z,
                    b_xx: z,
                }
            }
            FieldFlow::Superposition(alpha) => {
                let (v, v_t, v_x, v_xx) = alpha.eval(t, x);
                FieldCoefficients {
                    a: S::one(),
                    a_t: z,
                    a_x: z,
                    a_xx: z,
                    b: eps * v,
                    b_t: eps * v_t,
                    b_x: eps * v_x,
                    b_xx: eps * v_xx,
                }
            }
        }
    }
}

/// One-parameter group acting on `(t, x, w_1..w_n)` and, trivially, on
/// free-surface functions.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAction<S> {
    pub id: String,
    pub kind: FamilyKind,
    pub t: AxisFlow<S>,
    pub x: AxisFlow<S>,
    pub fields: Vec<FieldFlow<S>>,
}

/// A base point: independent variables, fields, and free-surface values.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    pub t: S,
    pub x: S,
    pub w: Vec<S>,
    pub surfaces: Vec<S>,
}

/// Value and first partials of a free-surface function `S(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet<S> {
    pub value: S,
    pub s_t: S,
    pub s_x: S,
}

impl<S: Real> SurfaceJet<S> {
    /// `S = x - s(t)` at a front moving with velocity `v`.
    pub fn front(v: S) -> Self {
        Self { value: S::zero(), s_t: -v, s_x: S::one() }
    }

    /// `V = -S_t / S_x`.
    pub fn velocity(&self) -> S {
        -self.s_t / self.s_x
    }
}

/// Point plus derivatives of every field up to first order in `t` and
/// (optionally) second order in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    pub t: S,
    pub x: S,
    pub w: Vec<S>,
    pub w_t: Vec<S>,
    pub w_x: Vec<S>,
    pub w_xx: Option<Vec<S>>,
    pub surfaces: Vec<SurfaceJet<S>>,
}

impl<S: Real> GroupAction<S> {
    pub fn new(id: impl Into<String>, kind: FamilyKind, t: AxisFlow<S>, x: AxisFlow<S>, fields: Vec<FieldFlow<S>>) -> Self {
        Self { id: id.into(), kind, t, x, fields }
    }

    /// `t ↦ t + ε`.
    pub fn time_translation(fields: usize) -> Self {
        Self::new(
            "P_t",
            FamilyKind::Translation,
            AxisFlow::Affine { rate: S::zero(), shift: S::one() },
            AxisFlow::identity(),
            vec![FieldFlow::identity(); fields],
        )
    }

    /// `x ↦ x + ε`.
    pub fn space_translation(fields: usize) -> Self {
        Self::new(
            "P_x",
            FamilyKind::Translation,
            AxisFlow::identity(),
            AxisFlow::Affine { rate: S::zero(), shift: S::one() },
            vec![FieldFlow::identity(); fields],
        )
    }

    /// `t ↦ t e^{2ε}`, `x ↦ x e^{ε}`.
    pub fn parabolic_dilation(fields: usize) -> Self {
        Self::new(
            "D",
            FamilyKind::Scaling,
            AxisFlow::Affine { rate: S::of(2.0), shift: S::zero() },
            AxisFlow::Affine { rate: S::one(), shift: S::zero() },
            vec![FieldFlow::identity(); fields],
        )
    }

    fn invalid(&self, x: S, eps: S) -> Error {
        Error::LocalValidity {
            family: self.id.clone(),
            x: x.as_f64(),
            eps: eps.as_f64(),
        }
    }

    fn check_arity(&self, n: usize) -> Result<()> {
        if n != self.fields.len() {
            return Err(Error::Contract(format!(
                "action `{}` acts on {} fields, point has {n}",
                self.id,
                self.fields.len()
            )));
        }
        Ok(())
    }

    /// Transforms a base point. Surface values are left unchanged.
    pub fn apply(&self, eps: S, p: &Point<S>) -> Result<Point<S>> {
        self.check_arity(p.w.len())?;
        let (t, _, _) = self.t.eval(eps, p.t).ok_or_else(|| self.invalid(p.x, eps))?;
        let (x, _, _) = self.x.eval(eps, p.x).ok_or_else(|| self.invalid(p.x, eps))?;
        let mut w = Vec::with_capacity(p.w.len());
        for (f, &wi) in self.fields.iter().zip(&p.w) {
            if matches!(f, FieldFlow::ConformalWeight { .. }) && !(S::one() - eps * p.x > S::zero()) {
                return Err(self.invalid(p.x, eps));
            }
            let c = f.coefficients(eps, p.t, p.x);
            w.push(c.a * wi + c.b);
        }
        Ok(Point { t, x, w, surfaces: p.surfaces.clone() })
    }

    /// Transforms a jet by the chain rule: first derivatives through the
    /// Jacobian of `(t*, x*)`, second `x`-derivatives when supplied.
    pub fn prolong(&self, eps: S, jet: &Jet<S>) -> Result<Jet<S>> {
        self.check_arity(jet.w.len())?;
        if jet.w_t.len() != jet.w.len() || jet.w_x.len() != jet.w.len() {
            return Err(Error::Contract("jet derivative arity mismatch".into()));
        }
        let (t_star, t_t, _) = self.t.eval(eps, jet.t).ok_or_else(|| self.invalid(jet.x, eps))?;
        let (x_star, x_x, x_xx) = self.x.eval(eps, jet.x).ok_or_else(|| self.invalid(jet.x, eps))?;
        // Jacobian [[T_t, T_x], [X_t, X_x]] of the separable flows.
        let (j_tt, j_tx, j_xt, j_xx) = (t_t, S::zero(), S::zero(), x_x);
        let det = j_tt * j_xx - j_tx * j_xt;
        if det == S::zero() || !det.is_finite() {
            return Err(Error::Prolongation(format!(
                "singular Jacobian for `{}` at (t, x) = ({}, {})",
                self.id, jet.t, jet.x
            )));
        }
        // Solve [D_t F, D_x F] = [F_{t*}, F_{x*}]·J for the starred partials.
        let solve = |dt: S, dx: S| ((dt * j_xx - dx * j_xt) / det, (dx * j_tt - dt * j_tx) / det);

        let n = jet.w.len();
        let mut w = Vec::with_capacity(n);
        let mut w_t = Vec::with_capacity(n);
        let mut w_x = Vec::with_capacity(n);
        let mut w_xx = jet.w_xx.as_ref().map(|_| Vec::with_capacity(n));
        for i in 0..n {
            if matches!(self.fields[i], FieldFlow::ConformalWeight { .. })
                && !(S::one() - eps * jet.x > S::zero())
            {
                return Err(self.invalid(jet.x, eps));
            }
            let c = self.fields[i].coefficients(eps, jet.t, jet.x);
            let (u, u_t, u_x) = (jet.w[i], jet.w_t[i], jet.w_x[i]);
            let du_t = c.a_t * u + c.a * u_t + c.b_t;
            let du_x = c.a_x * u + c.a * u_x + c.b_x;
            let (st, sx) = solve(du_t, du_x);
            w.push(c.a * u + c.b);
            w_t.push(st);
            w_x.push(sx);
            if let (Some(out), Some(src)) = (w_xx.as_mut(), jet.w_xx.as_ref()) {
                let u_xx = src[i];
                let d2 = c.a_xx * u + S::of(2.0) * c.a_x * u_x + c.a * u_xx + c.b_xx;
                out.push(d2 / (x_x * x_x) - du_x * x_xx / (x_x * x_x * x_x));
            }
        }
        let surfaces = jet
            .surfaces
            .iter()
            .map(|s| {
                let (st, sx) = solve(s.s_t, s.s_x);
                SurfaceJet { value: s.value, s_t: st, s_x: sx }
            })
            .collect();
        Ok(Jet { t: t_star, x: x_star, w, w_t, w_x, w_xx, surfaces })
    }

    /// True when `ε ↦` this action is the identity on the independent variables.
    pub fn fixes_independent_variables(&self) -> bool {
        self.t.is_identity() && self.x.is_identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rod_t4(k: f64) -> GroupAction<f64> {
        GroupAction::new(
            "T4",
            FamilyKind::Scaling,
            AxisFlow::identity(),
            AxisFlow::Affine { rate: k, shift: 0.0 },
            vec![FieldFlow::Affine { rate: 2.0, shift: 0.0 }],
        )
    }

    fn conformal() -> GroupAction<f64> {
        GroupAction::new(
            "T5",
            FamilyKind::Conformal,
            AxisFlow::identity(),
            AxisFlow::Conformal,
            vec![FieldFlow::ConformalWeight { power: 3.0 }],
        )
    }

    fn pt(t: f64, x: f64, u: f64) -> Point<f64> {
        Point { t, x, w: vec![u], surfaces: vec![] }
    }

    #[test]
    fn t4_closed_form() {
        let eps = 0.3;
        let p = rod_t4(1.5).apply(eps, &pt(2.0, 0.7, 1.1)).unwrap();
        assert_eq!(p.t, 2.0);
        assert!((p.x - 0.7 * (1.5 * eps).exp()).abs() < 1e-15);
        assert!((p.w[0] - 1.1 * (2.0 * eps).exp()).abs() < 1e-15);
    }

    #[test]
    fn conformal_pole() {
        let e = conformal().apply(0.5, &pt(1.0, 2.0, 1.0)).unwrap_err();
        assert!(matches!(e, Error::LocalValidity { .. }));
        assert!(conformal().apply(0.5, &pt(1.0, 1.9, 1.0)).is_ok());
    }

    #[test]
    fn dilation_prolongation() {
        // Stefan-type extended dilation: u_x* = e^{-ε} u_x, V* = e^{-ε} V.
        let d = GroupAction::parabolic_dilation(1);
        let jet = Jet {
            t: 1.0,
            x: 0.5,
            w: vec![2.0],
            w_t: vec![0.3],
            w_x: vec![-0.8],
            w_xx: Some(vec![0.4]),
            surfaces: vec![SurfaceJet::front(0.25)],
        };
        let eps: f64 = 0.2;
        let j = d.prolong(eps, &jet).unwrap();
        assert!((j.w_x[0] - (-eps).exp() * -0.8).abs() < 1e-15);
        assert!((j.w_t[0] - (-2.0 * eps).exp() * 0.3).abs() < 1e-15);
        assert!((j.w_xx.unwrap()[0] - (-2.0 * eps).exp() * 0.4).abs() < 1e-15);
        assert!((j.surfaces[0].velocity() - (-eps).exp() * 0.25).abs() < 1e-15);
    }

    #[test]
    fn translations_leave_derivatives() {
        let jet = Jet {
            t: 1.0,
            x: 0.5,
            w: vec![2.0],
            w_t: vec![0.3],
            w_x: vec![-0.8],
            w_xx: Some(vec![0.4]),
            surfaces: vec![SurfaceJet::front(0.25)],
        };
        for a in [GroupAction::time_translation(1), GroupAction::space_translation(1)] {
            let j = a.prolong(0.4, &jet).unwrap();
            assert_eq!(j.w_t, jet.w_t);
            assert_eq!(j.w_x, jet.w_x);
            assert_eq!(j.w_xx, jet.w_xx);
            assert_eq!(j.surfaces, jet.surfaces);
        }
    }

    #[test]
    fn heat_solutions_solve_heat_equation() {
        for h in [HeatSolution::<f64>::Kernel { k: 0.8 }, HeatSolution::Quadratic { k: 0.8 }] {
            let (_, a_t, _, a_xx) = h.eval(1.3, 0.4);
            assert!((a_t - 0.8 * a_xx).abs() < 1e-14);
        }
    }

    #[test]
    fn arity_is_checked() {
        let e = rod_t4(1.0).apply(0.1, &Point { t: 1.0, x: 1.0, w: vec![1.0, 2.0], surfaces: vec![] });
        assert!(matches!(e, Err(Error::Contract(_))));
    }
}
