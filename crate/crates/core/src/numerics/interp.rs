//! Piecewise cubic Hermite interpolation on strictly increasing abscissae.

use crate::scalar::Real;

/// Cubic Hermite interpolant with clamping outside the tabulated range.
#[derive(Debug, Clone)]
pub struct Hermite<S> {
    x: Vec<S>,
    y: Vec<S>,
    dy: Vec<S>,
}

impl<S: Real> Hermite<S> {
    /// Interpolant through `(x_i, y_i)` with prescribed slopes.
    pub fn with_slopes(x: Vec<S>, y: Vec<S>, dy: Vec<S>) -> Self {
        assert!(x.len() >= 2 && x.len() == y.len() && y.len() == dy.len());
        debug_assert!(x.windows(2).all(|w| w[1] > w[0]));
        Self { x, y, dy }
    }

    /// Monotonicity-preserving slopes (Fritsch-Carlson, as in PCHIP).
    pub fn monotone(x: Vec<S>, y: Vec<S>) -> Self {
        let n = x.len();
        assert!(n >= 2 && n == y.len());
        let h: Vec<S> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<S> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut dy = vec![S::zero(); n];
        if n == 2 {
            dy[0] = delta[0];
            dy[1] = delta[0];
            return Self { x, y, dy };
        }
        let two = S::of(2.0);
        let three = S::of(3.0);
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= S::zero() {
                dy[i] = S::zero();
            } else {
                let w1 = two * h[i] + h[i - 1];
                let w2 = h[i] + two * h[i - 1];
                dy[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        let end = |h0: S, h1: S, d0: S, d1: S| {
            let d = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if d.signum() != d0.signum() {
                S::zero()
            } else if d0.signum() != d1.signum() && d.abs() > three * d0.abs() {
                three * d0
            } else {
                d
            }
        };
        dy[0] = end(h[0], h[1], delta[0], delta[1]);
        dy[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Self { x, y, dy }
    }

    pub fn x_min(&self) -> S {
        self.x[0]
    }

    pub fn x_max(&self) -> S {
        self.x[self.x.len() - 1]
    }

    pub fn eval(&self, x: S) -> S {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.y[0];
        }
        if x >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|p| *p <= x) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (x - self.x[i]) / h;
        let (one, two, three) = (S::one(), S::of(2.0), S::of(3.0));
        let h00 = (one + two * s) * (one - s) * (one - s);
        let h10 = s * (one - s) * (one - s);
        let h01 = s * s * (three - two * s);
        let h11 = s * s * (s - one);
        h00 * self.y[i] + h10 * h * self.dy[i] + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_data_stays_monotone() {
        let x: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 1.0, 1.0, 5.0];
        let p = Hermite::monotone(x, y);
        let mut prev = p.eval(0.0);
        for i in 1..=400 {
            let v = p.eval(i as f64 * 0.01);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn exact_slopes_reproduce_cubic() {
        let f = |x: f64| x * x * x - x;
        let df = |x: f64| 3.0 * x * x - 1.0;
        let xs: Vec<f64> = (0..5).map(|i| i as f64 * 0.5).collect();
        let p = Hermite::with_slopes(
            xs.clone(),
            xs.iter().map(|&x| f(x)).collect(),
            xs.iter().map(|&x| df(x)).collect(),
        );
        for i in 0..=20 {
            let x = i as f64 * 0.1;
            assert!((p.eval(x) - f(x)).abs() < 1e-13);
        }
        assert_eq!(p.eval(-1.0), f(0.0));
    }
}
