//! Mittag-Leffler form of the 0-scale function for `ψ(θ) = cθ + θ^α`.

use crate::special::{mittag_leffler, mittag_leffler_deriv};

/// `W(x) = (1 − E_{α−1}(−c x^{α−1})) / c`, valid for `q = 0`, `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableClosedForm {
    pub alpha: f64,
    pub c: f64,
}

impl StableClosedForm {
    pub fn w(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let beta = self.alpha - 1.0;
        -(mittag_leffler(beta, -self.c * x.powf(beta)) - 1.0) / self.c
    }

    pub fn w1(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return f64::INFINITY;
        }
        let beta = self.alpha - 1.0;
        beta * x.powf(beta - 1.0) * mittag_leffler_deriv(beta, -self.c * x.powf(beta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_value_at_one() {
        let s = StableClosedForm { alpha: 1.5, c: 1.0 };
        assert!((s.w(1.0) - (1.0 - 0.427_583_576_155_807_05)).abs() < 1e-12);
        assert_eq!(s.w(-1.0), 0.0);
    }

    #[test]
    fn derivative_consistent() {
        let s = StableClosedForm { alpha: 1.7, c: 0.6 };
        for x in [0.05, 0.5, 2.0, 30.0] {
            let h = 1e-6 * x;
            let fd = (s.w(x + h) - s.w(x - h)) / (2.0 * h);
            assert!((fd - s.w1(x)).abs() < 1e-6 * (1.0 + s.w1(x)), "x={x}");
        }
    }
}
