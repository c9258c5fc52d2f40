use thiserror::Error;

/// Errors raised by the solvers, checkers, and the oracle.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// failing computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("constitutive law: {0}")]
    ConstitutiveLaw(String),

    #[error("value {value} outside the domain [{lo}, {hi}] of {what}")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("transformed problem construction failed: {reason} on [{lo}, {hi}]")]
    Construction { reason: String, lo: f64, hi: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("velocity residual is singular at u_s = {u_s}: h(u_s) = 0")]
    SingularResidual { u_s: f64 },

    #[error(
        "no travelling wave: velocity residual keeps its sign on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})"
    )]
    NoTravellingWave { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finding: {0}")]
    Root(String),

    #[error("degenerate diffusivity d({w}) = {d}")]
    DegenerateDiffusivity { w: f64, d: f64 },

    #[error("integration failed at {at}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("no convergence after {iterations} iterations (best residual {best}); history: {history:?}")]
    NonConvergence {
        iterations: usize,
        best: f64,
        history: Vec<f64>,
    },

    #[error("group action `{family}` is not defined at x = {x} for eps = {eps}")]
    LocalValidity { family: String, x: f64, eps: f64 },

    #[error("prolongation failed: {0}")]
    Prolongation(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StepSize { dt: f64, bound: f64 },

    #[error("liquid layer collapsed at t = {t}: thickness {thickness} <= {limit}")]
    Collapse { t: f64, thickness: f64, limit: f64 },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
