//! Logistic regulatory functions, their closed-form derivatives, and the
//! two-gene loop equilibrium.
//!
//! The model couples an activator and a repressor through the sigmoids
//! `f+(x) = 1/(1 + exp(-lambda (x - theta)))` and `f- = 1 - f+`. Everything
//! downstream (link gains, loop gain, Taylor coefficients, steepness
//! asymptotics) is an elementary closed-form expression in the equilibrium
//! values of those two functions.

use crate::error::{Error, Result};

/// Constants of the delayed two-gene negative-feedback loop.
///
/// `kappa*` are production rates, `gamma*` degradation rates, `theta*`
/// regulation thresholds, `lambda` the shared logistic steepness, and
/// `tau1`/`tau2` the transcriptional delays on the activator and repressor
/// branches. Only the sum `tau1 + tau2` enters the linear stability analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGeneParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub lambda: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl TwoGeneParams {
    pub fn new(
        kappa1: f64,
        kappa2: f64,
        gamma1: f64,
        gamma2: f64,
        theta1: f64,
        theta2: f64,
        lambda: f64,
        tau1: f64,
        tau2: f64,
    ) -> Result<Self> {
        let params = Self {
            kappa1,
            kappa2,
            gamma1,
            gamma2,
            theta1,
            theta2,
            lambda,
            tau1,
            tau2,
        };
        params.validate()?;
        Ok(params)
    }

    /// The parameter set used for every worked example: `lambda = 3`,
    /// `kappa = (3, 4)`, `gamma = (1/4, 1/2)`, `theta = (4, 3)`, zero delays.
    pub fn canonical() -> Self {
        Self {
            kappa1: 3.0,
            kappa2: 4.0,
            gamma1: 0.25,
            gamma2: 0.5,
            theta1: 4.0,
            theta2: 3.0,
            lambda: 3.0,
            tau1: 0.0,
            tau2: 0.0,
        }
    }

    /// Canonical rates with thresholds moved to the capacity midpoints
    /// `theta_i = M_i / 2`, where the quadratic Taylor terms vanish.
    pub fn canonical_symmetric() -> Self {
        let mut p = Self::canonical();
        p.theta1 = p.kappa1 / p.gamma1 / 2.0;
        p.theta2 = p.kappa2 / p.gamma2 / 2.0;
        p
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("lambda", self.lambda),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be strictly positive and finite",
                });
            }
        }
        for (name, value) in [("tau1", self.tau1), ("tau2", self.tau2)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be non-negative and finite",
                });
            }
        }
        for (name, value) in [("theta1", self.theta1), ("theta2", self.theta2)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        Ok(())
    }

    /// Carrying capacities `M_i = kappa_i / gamma_i`.
    pub fn carrying_capacities(&self) -> (f64, f64) {
        (self.kappa1 / self.gamma1, self.kappa2 / self.gamma2)
    }

    /// Total loop delay `tau1 + tau2`.
    pub fn total_delay(&self) -> f64 {
        self.tau1 + self.tau2
    }

    /// Same loop with the total delay `tau` split evenly over the two links.
    pub fn with_total_delay(mut self, tau: f64) -> Self {
        self.tau1 = tau / 2.0;
        self.tau2 = tau / 2.0;
        self
    }

    pub fn with_split(mut self, tau1: f64, tau2: f64) -> Self {
        self.tau1 = tau1;
        self.tau2 = tau2;
        self
    }

    /// True when both thresholds sit at the capacity midpoint to 1e-9
    /// relative, the regime where the loop is odd-symmetric around the
    /// equilibrium.
    pub fn has_symmetric_thresholds(&self) -> bool {
        let (m1, m2) = self.carrying_capacities();
        let rel = |theta: f64, m: f64| (theta - m / 2.0).abs() <= 1e-9 * (m / 2.0);
        rel(self.theta1, m1) && rel(self.theta2, m2)
    }
}

/// Increasing logistic activation `1/(1 + exp(-lambda (x - theta)))`.
///
/// Evaluated through the branch whose exponential argument is non-positive,
/// so there is no overflow however deep into saturation the argument sits.
pub fn f_plus(x: f64, theta: f64, lambda: f64) -> f64 {
    let z = lambda * (x - theta);
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Decreasing logistic repression, the exact complement `1 - f_plus`.
pub fn f_minus(x: f64, theta: f64, lambda: f64) -> f64 {
    1.0 - f_plus(x, theta, lambda)
}

/// Closed-form derivative of `f_plus` of the given order.
///
/// With `f = f_plus(x, theta, lambda)`:
/// order 1 is `lambda f (1-f)`, order 2 is `lambda^2 f (1-f)(1-2f)`,
/// order 3 is `lambda^3 f (1-f)(1 - 6 f (1-f))`.
pub fn logistic_derivative(x: f64, theta: f64, lambda: f64, order: u32) -> Result<f64> {
    let f = f_plus(x, theta, lambda);
    let s = f * (1.0 - f);
    match order {
        1 => Ok(lambda * s),
        2 => Ok(lambda * lambda * s * (1.0 - 2.0 * f)),
        3 => Ok(lambda.powi(3) * s * (1.0 - 6.0 * s)),
        other => Err(Error::InvalidDerivativeOrder(other)),
    }
}

/// Fixed point of the loop together with the logistic values and the link
/// gains evaluated there.
///
/// `gain_a = kappa2 lambda f+*(1-f+*)` is the activator link strength and
/// `gain_b = kappa1 lambda f-*(1-f-*)` the repressor one; their product is
/// the loop gain that the Hopf condition compares against `gamma1 gamma2`.
#[derive(Debug, Clone, Copy)]
pub struct Equilibrium {
    pub x1_star: f64,
    pub x2_star: f64,
    pub fplus_star: f64,
    pub fminus_star: f64,
    pub gain_a: f64,
    pub gain_b: f64,
}

impl Equilibrium {
    pub fn loop_gain(&self) -> f64 {
        self.gain_a * self.gain_b
    }
}

/// Scalar reduction of the equilibrium system: `x2` is eliminated through
/// the second equation and the remainder is a strictly decreasing function
/// of `x1` on `(0, M1)`.
fn equilibrium_residual(p: &TwoGeneParams, x1: f64) -> f64 {
    let m2 = p.kappa2 / p.gamma2;
    let x2 = m2 * f_plus(x1, p.theta1, p.lambda);
    p.kappa1 * f_minus(x2, p.theta2, p.lambda) - p.gamma1 * x1
}

fn equilibrium_residual_slope(p: &TwoGeneParams, x1: f64) -> f64 {
    let m2 = p.kappa2 / p.gamma2;
    let fp = f_plus(x1, p.theta1, p.lambda);
    let x2 = m2 * fp;
    let fm = f_minus(x2, p.theta2, p.lambda);
    -p.gamma1
        - (p.kappa1 * p.kappa2 / p.gamma2)
            * p.lambda
            * p.lambda
            * fm
            * (1.0 - fm)
            * fp
            * (1.0 - fp)
}

/// Solves the equilibrium equations for the two-gene loop.
///
/// Bisection narrows the bracket `(0, M1)` to width 1e-6, then Newton with
/// the closed-form slope polishes to residual below `1e-13 * max(1, kappa1)`.
/// The root exists and is unique because the scalar map is strictly
/// decreasing with a sign change across the bracket.
pub fn solve_equilibrium(p: &TwoGeneParams) -> Result<Equilibrium> {
    p.validate()?;
    let (m1, m2) = p.carrying_capacities();

    let mut lo = 0.0_f64;
    let mut hi = m1;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if equilibrium_residual(p, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x1 = 0.5 * (lo + hi);
    for _ in 0..100 {
        let r = equilibrium_residual(p, x1);
        // both equilibrium terms equal gamma1 x1 at the root, so a relative
        // tolerance there is attainable down to a few ulps
        if r.abs() <= 1e-13 * (p.gamma1 * x1).abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let slope = equilibrium_residual_slope(p, x1);
        let step = r / slope;
        let next = (x1 - step).clamp(lo - 1e-6, hi + 1e-6);
        if (next - x1).abs() <= f64::EPSILON * x1.abs() {
            break;
        }
        x1 = next;
    }

    let fplus_star = f_plus(x1, p.theta1, p.lambda);
    let x2 = m2 * fplus_star;
    let fminus_star = f_minus(x2, p.theta2, p.lambda);
    Ok(Equilibrium {
        x1_star: x1,
        x2_star: x2,
        fplus_star,
        fminus_star,
        gain_a: p.kappa2 * p.lambda * fplus_star * (1.0 - fplus_star),
        gain_b: p.kappa1 * p.lambda * fminus_star * (1.0 - fminus_star),
    })
}

/// Quadratic and cubic Taylor coefficients of the nonlinearity at the
/// equilibrium, in the deviation variables `u_i = x_i - x_i*`:
/// the `u1` equation carries `b1 v^2 + d1 v^3` in `v = u2(t - tau2)` and the
/// `u2` equation `b2 w^2 + d2 w^3` in `w = u1(t - tau1)`.
#[derive(Debug, Clone, Copy)]
pub struct TaylorCoefficients {
    pub b1: f64,
    pub b2: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Closed-form Taylor coefficients from the equilibrium logistic values.
///
/// Both quadratic coefficients vanish exactly at symmetric thresholds
/// (`f+* = f-* = 1/2`), and the cubics change sign where `f(1-f)` crosses 1/6.
pub fn taylor_coefficients(p: &TwoGeneParams, eq: &Equilibrium) -> TaylorCoefficients {
    let lam = p.lambda;
    let fp = eq.fplus_star;
    let fm = eq.fminus_star;
    TaylorCoefficients {
        b1: 0.5 * eq.gain_b * lam * (1.0 - 2.0 * fm),
        b2: 0.5 * eq.gain_a * lam * (1.0 - 2.0 * fp),
        d1: -eq.gain_b * lam * lam * (1.0 - 6.0 * fm * (1.0 - fm)) / 6.0,
        d2: eq.gain_a * lam * lam * (1.0 - 6.0 * fp * (1.0 - fp)) / 6.0,
    }
}

/// Loop gain `A(lambda) B(lambda)` with the equilibrium re-solved at the
/// given steepness; the remaining parameters are taken from `base`.
pub fn gain_of_lambda(base: &TwoGeneParams, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be strictly positive and finite",
        });
    }
    let mut p = *base;
    p.lambda = lambda;
    Ok(solve_equilibrium(&p)?.loop_gain())
}

/// Smallest steepness at which the loop gain reaches `gamma1 gamma2`.
///
/// Below the universal bound `4 sqrt(gamma1 gamma2 / (kappa1 kappa2))` the
/// gain cannot reach the threshold, so the bracket starts there and expands
/// upward by doubling. A violated bracket (gain already above threshold at
/// the lower bound, or never above it by `2^40` times the bound) is reported
/// rather than silently accepted.
pub fn critical_steepness(base: &TwoGeneParams) -> Result<f64> {
    check_thresholds_interior(base)?;
    let target = base.gamma1 * base.gamma2;
    let lower = 4.0 * (base.gamma1 * base.gamma2).sqrt() / (base.kappa1 * base.kappa2).sqrt();

    let mut lo = lower;
    let g_lo = gain_of_lambda(base, lo)?;
    if g_lo > target {
        return Err(Error::BracketFailure {
            what: "critical steepness",
            lo,
            hi: lo,
            f_lo: g_lo - target,
            f_hi: g_lo - target,
        });
    }
    let mut hi = lower;
    let mut g_hi = g_lo;
    for _ in 0..40 {
        hi *= 2.0;
        g_hi = gain_of_lambda(base, hi)?;
        if g_hi > target {
            break;
        }
        lo = hi;
    }
    if g_hi <= target {
        return Err(Error::BracketFailure {
            what: "critical steepness",
            lo,
            hi,
            f_lo: gain_of_lambda(base, lo)? - target,
            f_hi: g_hi - target,
        });
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = gain_of_lambda(base, mid)?;
        if (g - target).abs() < 1e-12 || (hi - lo) < 1e-15 * hi {
            return Ok(mid);
        }
        if g < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Shallow- and steep-limit coefficients of the loop gain `AB(lambda)` and
/// the asymptotic equilibrium offsets of the steep limit.
#[derive(Debug, Clone, Copy)]
pub struct SteepnessAsymptotics {
    /// `AB / lambda^2` limit as `lambda -> 0`: `kappa1 kappa2 / 16`.
    pub c0: f64,
    /// `AB / lambda^2` limit as `lambda -> inf`.
    pub c_inf: f64,
    /// Limit of `lambda (x1* - theta1)`.
    pub xi1: f64,
    /// Limit of `lambda (x2* - theta2)`.
    pub xi2: f64,
}

pub fn steepness_asymptotics(p: &TwoGeneParams) -> Result<SteepnessAsymptotics> {
    check_thresholds_interior(p)?;
    let (m1, m2) = p.carrying_capacities();
    let kk = p.kappa1 * p.kappa2;
    let gg = p.gamma1 * p.gamma2;
    Ok(SteepnessAsymptotics {
        c0: kk / 16.0,
        c_inf: gg * gg * p.theta1 * (m1 - p.theta1) * p.theta2 * (m2 - p.theta2) / kk,
        xi1: (p.theta2 / (m2 - p.theta2)).ln(),
        xi2: ((m1 - p.theta1) / p.theta1).ln(),
    })
}

pub(crate) fn check_thresholds_interior(p: &TwoGeneParams) -> Result<()> {
    let (m1, m2) = p.carrying_capacities();
    for (gene, theta, m) in [(1, p.theta1, m1), (2, p.theta2, m2)] {
        if !(theta > 0.0 && theta < m) {
            return Err(Error::ThresholdOutsideCapacity {
                gene,
                value: theta,
                capacity: m,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn logistic_midpoint_and_saturation() {
        assert_eq!(f_plus(4.0, 4.0, 3.0), 0.5);
        assert_eq!(f_minus(4.0, 4.0, 3.0), 0.5);
        assert_relative_eq!(f_plus(3.873, 4.0, 3.0), 0.4059, max_relative = 1e-3);
        assert_relative_eq!(f_minus(3.247, 3.0, 3.0), 0.3227, max_relative = 1e-3);
        assert_eq!(f_plus(1e6, 0.0, 3.0), 1.0);
        assert_eq!(f_plus(-1e6, 0.0, 3.0), 0.0);
        // no overflow deep in saturation
        assert!(f_plus(-1e4, 0.0, 1.0).is_finite());
    }

    #[test]
    fn complement_identity_holds_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let x = rng.gen_range(-50.0..50.0);
            let theta = rng.gen_range(-10.0..10.0);
            let lambda = rng.gen_range(0.01..20.0);
            let sum = f_plus(x, theta, lambda) + f_minus(x, theta, lambda);
            assert!((sum - 1.0).abs() <= f64::EPSILON);
        }
    }

    #[test]
    fn derivatives_at_threshold() {
        let lam = 3.0;
        assert_relative_eq!(
            logistic_derivative(4.0, 4.0, lam, 1).unwrap(),
            lam / 4.0,
            max_relative = 1e-15
        );
        assert_eq!(logistic_derivative(4.0, 4.0, lam, 2).unwrap(), 0.0);
        assert_relative_eq!(
            logistic_derivative(4.0, 4.0, lam, 3).unwrap(),
            -lam.powi(3) / 8.0,
            max_relative = 1e-15
        );
        assert!(matches!(
            logistic_derivative(1.0, 0.0, 1.0, 4),
            Err(Error::InvalidDerivativeOrder(4))
        ));
    }

    /// Five-point central stencils for the derivative orders the closed
    /// forms cover; test-only oracle, independent of the formulas above.
    /// The step is chosen per order to balance truncation and roundoff.
    fn finite_difference(x: f64, theta: f64, lambda: f64, order: u32, u: f64) -> f64 {
        let h = u / lambda;
        let f = |t: f64| f_plus(t, theta, lambda);
        match order {
            1 => (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h),
            2 => {
                (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h)
                    - f(x + 2.0 * h))
                    / (12.0 * h * h)
            }
            3 => {
                (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h))
                    / (2.0 * h * h * h)
            }
            _ => unreachable!(),
        }
    }

    /// Per-order agreement between the closed forms and the stencils, at
    /// the accuracy f64 cancellation permits: the error floor of an
    /// order-n stencil grows like eps/h^n, so the attainable tolerance and
    /// the usable distance from saturation both shrink with the order.
    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // (order, lambda * step, max |lambda (x - theta)|, tolerance)
        let cases = [(1, 1e-3, 12.0, 1e-6), (2, 1.5e-3, 8.0, 2e-6), (3, 2e-3, 6.0, 1e-4)];
        for _ in 0..300 {
            let theta = rng.gen_range(-3.0..3.0);
            let lambda = rng.gen_range(0.2..6.0);
            let z = rng.gen_range(-12.0..12.0);
            let x: f64 = theta + z / lambda;
            for (order, u, z_max, tol) in cases {
                if z.abs() >= z_max {
                    continue;
                }
                let exact = logistic_derivative(x, theta, lambda, order).unwrap();
                let fd = finite_difference(x, theta, lambda, order, u);
                // scale without the vanishing polynomial factors (1-2f),
                // (1-6f(1-f)), against which relative error is meaningless
                let f = f_plus(x, theta, lambda);
                let scale = lambda.powi(order as i32) * f * (1.0 - f);
                assert!(
                    (exact - fd).abs() <= tol * scale,
                    "order {order} at x={x}, theta={theta}, lambda={lambda}: {exact} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn canonical_equilibrium() {
        let p = TwoGeneParams::canonical();
        let eq = solve_equilibrium(&p).unwrap();
        assert_relative_eq!(eq.x1_star, 3.873, max_relative = 3e-4);
        assert_relative_eq!(eq.x2_star, 3.247, max_relative = 3e-4);
        assert_relative_eq!(eq.gain_a, 2.894, max_relative = 3e-4);
        assert_relative_eq!(eq.gain_b, 1.967, max_relative = 3e-4);
        assert_relative_eq!(eq.loop_gain(), 5.693, max_relative = 3e-4);
    }

    #[test]
    fn equilibrium_residuals_and_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = TwoGeneParams {
                kappa1: rng.gen_range(0.5..10.0),
                kappa2: rng.gen_range(0.5..10.0),
                gamma1: rng.gen_range(0.05..2.0),
                gamma2: rng.gen_range(0.05..2.0),
                theta1: rng.gen_range(0.1..5.0),
                theta2: rng.gen_range(0.1..5.0),
                lambda: rng.gen_range(0.2..8.0),
                tau1: 0.0,
                tau2: 0.0,
            };
            let eq = solve_equilibrium(&p).unwrap();
            let (m1, m2) = p.carrying_capacities();
            assert!(eq.x1_star > 0.0 && eq.x1_star <= m1);
            assert!(eq.x2_star > 0.0 && eq.x2_star <= m2);
            // strict interiority and positive gains are exact statements,
            // but saturation rounds f to {0, 1}; assert them where the
            // logistic arguments stay representable
            if p.lambda * (eq.x1_star - p.theta1).abs() < 36.0 {
                assert!(eq.x2_star < m2);
                assert!(eq.gain_a > 0.0);
            }
            if p.lambda * (eq.x2_star - p.theta2).abs() < 36.0 {
                assert!(eq.x1_star < m1);
                assert!(eq.gain_b > 0.0);
            }
            let r1 = p.kappa1 * f_minus(eq.x2_star, p.theta2, p.lambda) - p.gamma1 * eq.x1_star;
            let r2 = p.kappa2 * f_plus(eq.x1_star, p.theta1, p.lambda) - p.gamma2 * eq.x2_star;
            assert!((r1 / (p.gamma1 * eq.x1_star)).abs() < 1e-12);
            assert!((r2 / (p.gamma2 * eq.x2_star)).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_thresholds_fix_point_at_midpoints() {
        let p = TwoGeneParams::canonical_symmetric();
        let eq = solve_equilibrium(&p).unwrap();
        assert_relative_eq!(eq.x1_star, 6.0, max_relative = 1e-12);
        assert_relative_eq!(eq.x2_star, 4.0, max_relative = 1e-12);
        assert_relative_eq!(eq.fplus_star, 0.5, max_relative = 1e-12);
        assert_relative_eq!(eq.fminus_star, 0.5, max_relative = 1e-12);

        let tc = taylor_coefficients(&p, &eq);
        assert!(tc.b1.abs() < 1e-12 && tc.b2.abs() < 1e-12);
        assert_relative_eq!(tc.d1, eq.gain_b * 9.0 / 12.0, max_relative = 1e-12);
        assert_relative_eq!(tc.d2, -eq.gain_a * 9.0 / 12.0, max_relative = 1e-12);
    }

    /// Taylor coefficients against 5-point central finite differences of
    /// the raw nonlinearity `kappa_i f` at the equilibrium.
    #[test]
    fn taylor_coefficients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut tested = 0;
        while tested < 100 {
            let p = TwoGeneParams {
                kappa1: rng.gen_range(0.5..10.0),
                kappa2: rng.gen_range(0.5..10.0),
                gamma1: rng.gen_range(0.05..2.0),
                gamma2: rng.gen_range(0.05..2.0),
                theta1: rng.gen_range(0.2..5.0),
                theta2: rng.gen_range(0.2..5.0),
                lambda: rng.gen_range(0.3..6.0),
                tau1: 0.0,
                tau2: 0.0,
            };
            let eq = solve_equilibrium(&p).unwrap();
            // keep away from saturation so the stencil sees the curvature
            if (p.lambda * (eq.x1_star - p.theta1)).abs() > 8.0
                || (p.lambda * (eq.x2_star - p.theta2)).abs() > 8.0
            {
                continue;
            }
            tested += 1;
            let tc = taylor_coefficients(&p, &eq);

            let h1 = 1e-3 / p.lambda;
            let n1 = |v: f64| p.kappa1 * f_minus(eq.x2_star + v, p.theta2, p.lambda);
            let n2 = |w: f64| p.kappa2 * f_plus(eq.x1_star + w, p.theta1, p.lambda);
            let second = |f: &dyn Fn(f64) -> f64| {
                (-f(-2.0 * h1) + 16.0 * f(-h1) - 30.0 * f(0.0) + 16.0 * f(h1) - f(2.0 * h1))
                    / (12.0 * h1 * h1)
            };
            let third = |f: &dyn Fn(f64) -> f64| {
                (f(2.0 * h1) - 2.0 * f(h1) + 2.0 * f(-h1) - f(-2.0 * h1)) / (2.0 * h1.powi(3))
            };
            let scale2 = p.kappa1.max(p.kappa2) * p.lambda * p.lambda;
            let scale3 = scale2 * p.lambda;
            assert!((second(&n1) / 2.0 - tc.b1).abs() <= 1e-5 * scale2.max(tc.b1.abs()));
            assert!((second(&n2) / 2.0 - tc.b2).abs() <= 1e-5 * scale2.max(tc.b2.abs()));
            assert!((third(&n1) / 6.0 - tc.d1).abs() <= 1e-5 * scale3.max(tc.d1.abs()));
            assert!((third(&n2) / 6.0 - tc.d2).abs() <= 1e-5 * scale3.max(tc.d2.abs()));
        }
    }

    #[test]
    fn gain_of_lambda_canonical_rows() {
        let p = TwoGeneParams::canonical();
        assert_relative_eq!(gain_of_lambda(&p, 1.0).unwrap(), 0.653, max_relative = 1e-3);
        assert_relative_eq!(gain_of_lambda(&p, 3.0).unwrap(), 5.693, max_relative = 1e-3);
        let steep = gain_of_lambda(&p, 10.0).unwrap() / 100.0;
        let asym = steepness_asymptotics(&p).unwrap();
        assert!((steep - asym.c_inf).abs() / asym.c_inf < 0.02);
    }

    #[test]
    fn gain_is_monotone_on_canonical_grid() {
        let p = TwoGeneParams::canonical();
        let mut last = 0.0;
        let mut lambda = 0.1;
        while lambda <= 10.0 + 1e-9 {
            let g = gain_of_lambda(&p, lambda).unwrap();
            assert!(g > last, "gain not increasing at lambda = {lambda}");
            last = g;
            lambda += 0.1;
        }
    }

    #[test]
    fn critical_steepness_canonical() {
        let p = TwoGeneParams::canonical();
        let lc = critical_steepness(&p).unwrap();
        assert!((lc - 0.426).abs() < 2e-3);
        let lower = 4.0 * (p.gamma1 * p.gamma2).sqrt() / (p.kappa1 * p.kappa2).sqrt();
        assert!(lc >= lower);
        let residual = gain_of_lambda(&p, lc).unwrap() - p.gamma1 * p.gamma2;
        assert!(residual.abs() < 1e-10);
    }

    #[test]
    fn asymptotics_canonical_and_symmetric_equality() {
        let p = TwoGeneParams::canonical();
        let a = steepness_asymptotics(&p).unwrap();
        assert_eq!(a.c0, 0.75);
        assert_relative_eq!(a.c_inf, 0.625, max_relative = 1e-15);
        assert!(a.c_inf <= a.c0);

        let s = steepness_asymptotics(&TwoGeneParams::canonical_symmetric()).unwrap();
        assert_relative_eq!(s.c_inf, s.c0, max_relative = 1e-12);

        let mut bad = p;
        bad.theta1 = 20.0;
        assert!(steepness_asymptotics(&bad).is_err());
    }

    #[test]
    fn cubic_coefficient_changes_sign_across_one_sixth() {
        // move theta1 so f+* (1-f+*) sweeps through 1/6
        let mut p = TwoGeneParams::canonical();
        let mut signs = Vec::new();
        for theta1 in [2.0, 6.0] {
            p.theta1 = theta1;
            let eq = solve_equilibrium(&p).unwrap();
            let tc = taylor_coefficients(&p, &eq);
            signs.push((eq.fplus_star * (1.0 - eq.fplus_star) - 1.0 / 6.0, tc.d2));
        }
        for (margin, d2) in signs {
            // d2 = + A lam^2 (1 - 6 f(1-f))/6, so its sign is opposite the margin
            assert!(margin * d2 < 0.0);
        }
    }
}
