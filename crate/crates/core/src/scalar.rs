//! Scalar abstraction shared by every solver in the crate.
//!
//! All numerical kernels are written against [`Real`], which is implemented
//! for `f32` and `f64`. Tolerances requested by callers are floored at a
//! small multiple of the type's machine epsilon, so asking an `f32` solve for
//! `1e-12` silently becomes the tightest tolerance `f32` can honour.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Floating point scalar usable by the solvers (`f32` or `f64`).
pub trait Real: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into this type.
    fn of(x: f64) -> Self;

    /// Lossy conversion used for diagnostics and error payloads.
    fn as_f64(self) -> f64;

    /// `requested`, floored at 16 ulp of unity for this type.
    fn tolerance(requested: f64) -> Self {
        Self::of(requested).max(Self::epsilon() * Self::of(16.0))
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

/// Relative difference `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff<S: Real>(a: S, b: S, floor: S) -> S {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_is_floored_per_type() {
        assert_eq!(<f64 as Real>::tolerance(1e-3), 1e-3);
        assert!(<f32 as Real>::tolerance(1e-12) > 1e-7);
        assert!(<f64 as Real>::tolerance(1e-20) > 1e-16);
    }

    #[test]
    fn rel_diff_uses_floor_near_zero() {
        assert_eq!(rel_diff(0.0_f64, 1e-20, 1.0), 1e-20);
        assert!((rel_diff(2.0_f64, 1.0, 1e-30) - 0.5).abs() < 1e-15);
    }
}
