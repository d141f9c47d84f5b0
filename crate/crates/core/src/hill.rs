//! Hill-function counterpart of the logistic loop, used to cross-check the
//! Hopf locus against the standard gene-regulation parameterisation.
//!
//! The two descriptions are matched at equal threshold and equal maximum
//! slope, which fixes the Hill exponent `n = lambda theta` on each link.

use crate::error::Result;
use crate::logistic::{check_thresholds_interior, TwoGeneParams};

/// Increasing Hill activation `x^n / (theta^n + x^n)` for `x > 0`.
pub fn hill_plus(x: f64, theta: f64, n: f64) -> f64 {
    // work with the ratio to keep x^n in range for large exponents
    let r = (x / theta).powf(n);
    r / (1.0 + r)
}

/// Decreasing Hill repression `theta^n / (theta^n + x^n)`.
pub fn hill_minus(x: f64, theta: f64, n: f64) -> f64 {
    1.0 / (1.0 + (x / theta).powf(n))
}

/// Slope magnitude of `hill_plus` at `x > 0`: `n H+ (1 - H+) / x`.
fn hill_slope(x: f64, theta: f64, n: f64) -> f64 {
    let h = hill_plus(x, theta, n);
    n * h * (1.0 - h) / x
}

/// Slope-matched Hill model: exponents, equilibrium, and link gains.
#[derive(Debug, Clone, Copy)]
pub struct HillCounterpart {
    /// Hill exponents `n_i = lambda theta_i`.
    pub n1: f64,
    pub n2: f64,
    pub x1_star: f64,
    pub x2_star: f64,
    pub gain_a: f64,
    pub gain_b: f64,
}

impl HillCounterpart {
    pub fn loop_gain(&self) -> f64 {
        self.gain_a * self.gain_b
    }
}

/// Builds the slope-matched Hill model and solves its equilibrium.
///
/// The scalar reduction is strictly decreasing on `(0, M1)` exactly as in
/// the logistic case; bisection never evaluates the endpoint `x = 0`, where
/// the Hill derivative is undefined for non-integer exponents.
pub fn hill_counterpart(p: &TwoGeneParams) -> Result<HillCounterpart> {
    p.validate()?;
    check_thresholds_interior(p)?;
    let n1 = p.lambda * p.theta1;
    let n2 = p.lambda * p.theta2;
    let (m1, m2) = p.carrying_capacities();

    let residual = |x1: f64| {
        let x2 = m2 * hill_plus(x1, p.theta1, n1);
        p.kappa1 * hill_minus(x2, p.theta2, n2) - p.gamma1 * x1
    };

    let mut lo = 1e-12 * m1;
    let mut hi = m1 * (1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * m1 {
            break;
        }
    }
    let x1_star = 0.5 * (lo + hi);
    let x2_star = m2 * hill_plus(x1_star, p.theta1, n1);

    Ok(HillCounterpart {
        n1,
        n2,
        x1_star,
        x2_star,
        gain_a: p.kappa2 * hill_slope(x1_star, p.theta1, n1),
        gain_b: p.kappa1 * hill_slope(x2_star, p.theta2, n2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logistic::{f_plus, logistic_derivative};
    use approx::assert_relative_eq;

    #[test]
    fn canonical_exponents_and_equilibrium() {
        let p = TwoGeneParams::canonical();
        let h = hill_counterpart(&p).unwrap();
        assert_eq!(h.n1, 12.0);
        assert_eq!(h.n2, 9.0);
        assert_relative_eq!(h.x1_star, 3.87666, max_relative = 1e-4);
        assert_relative_eq!(h.x2_star, 3.25701, max_relative = 1e-4);
        assert_relative_eq!(h.loop_gain(), 5.41814, max_relative = 1e-4);
    }

    #[test]
    fn matches_logistic_at_threshold_and_in_max_slope() {
        let p = TwoGeneParams::canonical();
        let n1 = p.lambda * p.theta1;
        assert_relative_eq!(hill_plus(p.theta1, p.theta1, n1), 0.5, max_relative = 1e-14);
        assert_relative_eq!(f_plus(p.theta1, p.theta1, p.lambda), 0.5, max_relative = 1e-14);
        // the shared maximum slope lambda/4 is attained at x = theta
        assert_relative_eq!(
            hill_slope(p.theta1, p.theta1, n1),
            logistic_derivative(p.theta1, p.theta1, p.lambda, 1).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn hill_equilibrium_residuals() {
        let p = TwoGeneParams::canonical();
        let h = hill_counterpart(&p).unwrap();
        let r1 = p.kappa1 * hill_minus(h.x2_star, p.theta2, h.n2) - p.gamma1 * h.x1_star;
        let r2 = p.kappa2 * hill_plus(h.x1_star, p.theta1, h.n1) - p.gamma2 * h.x2_star;
        assert!((r1 / (p.gamma1 * h.x1_star)).abs() < 1e-10);
        assert!((r2 / (p.gamma2 * h.x2_star)).abs() < 1e-10);
    }
}
