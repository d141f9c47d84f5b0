//! Cyclic N-gene logistic loops: equilibrium, loop gain, Hopf frequency and
//! critical delay with branch selection, transversality sums, no-delay
//! stability, and the symmetric delay-induced-Hopf window.
//!
//! The characteristic equation of any single negative-feedback cycle
//! collapses to `prod_i (mu + gamma_i) + Lambda exp(-mu tau) = 0` with
//! `tau` the total loop delay and `Lambda` the product of link gains,
//! whatever the arrangement of activators and repressors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logistic::{f_minus, f_plus};

/// Sign of a regulatory link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkSign {
    Activation,
    Repression,
}

impl LinkSign {
    pub fn signum(self) -> f64 {
        match self {
            LinkSign::Activation => 1.0,
            LinkSign::Repression => -1.0,
        }
    }
}

/// Cyclic loop of `N >= 2` genes under the link-indexed convention:
/// `kappa[i]`, `gamma[i]` belong to gene `i`, while `theta[i]`, `tau[i]`
/// and `signs[i]` describe the link feeding gene `i` from gene `i-1`
/// (indices mod N). The loop must be negative: an odd number of
/// repressions.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicLoopParams {
    pub kappa: Vec<f64>,
    pub gamma: Vec<f64>,
    pub theta: Vec<f64>,
    pub tau: Vec<f64>,
    pub signs: Vec<LinkSign>,
    pub lambda: f64,
}

impl CyclicLoopParams {
    pub fn new(
        kappa: Vec<f64>,
        gamma: Vec<f64>,
        theta: Vec<f64>,
        tau: Vec<f64>,
        signs: Vec<LinkSign>,
        lambda: f64,
    ) -> Result<Self> {
        let loop_params = Self {
            kappa,
            gamma,
            theta,
            tau,
            signs,
            lambda,
        };
        loop_params.validate()?;
        Ok(loop_params)
    }

    /// Homogeneous loop with one repression and `n - 1` activations.
    pub fn symmetric(n: usize, kappa: f64, gamma: f64, theta: f64, lambda: f64) -> Result<Self> {
        let mut signs = vec![LinkSign::Activation; n];
        signs[0] = LinkSign::Repression;
        Self::new(
            vec![kappa; n],
            vec![gamma; n],
            vec![theta; n],
            vec![0.0; n],
            signs,
            lambda,
        )
    }

    /// The worked symmetric three-gene loop: `gamma = 1/2`, `kappa = 2`,
    /// `theta = 2`, `lambda = 3/2`.
    pub fn worked_three_gene() -> Self {
        Self::symmetric(3, 2.0, 0.5, 2.0, 1.5).expect("static parameters are valid")
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "N",
                value: n as f64,
                reason: "loop length must be at least 2",
            });
        }
        for field in [&self.kappa, &self.theta, &self.tau] {
            if field.len() != n {
                return Err(Error::InvalidParameter {
                    name: "per-gene vectors",
                    value: field.len() as f64,
                    reason: "length mismatch with gamma",
                });
            }
        }
        if self.signs.len() != n {
            return Err(Error::InvalidParameter {
                name: "signs",
                value: self.signs.len() as f64,
                reason: "length mismatch with gamma",
            });
        }
        for (&k, &g) in self.kappa.iter().zip(&self.gamma) {
            if !(k > 0.0 && g > 0.0) || !k.is_finite() || !g.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "kappa/gamma",
                    value: if k > 0.0 { g } else { k },
                    reason: "must be strictly positive and finite",
                });
            }
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: self.lambda,
                reason: "must be strictly positive and finite",
            });
        }
        for &t in &self.tau {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "tau",
                    value: t,
                    reason: "must be non-negative and finite",
                });
            }
        }
        let product: f64 = self.signs.iter().map(|s| s.signum()).product();
        if product >= 0.0 {
            return Err(Error::PositiveFeedbackLoop);
        }
        Ok(())
    }

    pub fn total_delay(&self) -> f64 {
        self.tau.iter().sum()
    }

    /// Same loop with the total delay redistributed evenly over the links.
    pub fn with_total_delay(mut self, tau: f64) -> Self {
        let n = self.n();
        self.tau = vec![tau / n as f64; n];
        self
    }

    pub fn has_symmetric_rates(&self) -> bool {
        let g0 = self.gamma[0];
        self.gamma.iter().all(|&g| (g - g0).abs() <= 1e-12 * g0)
    }

    fn regulation(&self, link: usize, x_upstream: f64) -> f64 {
        match self.signs[link] {
            LinkSign::Activation => f_plus(x_upstream, self.theta[link], self.lambda),
            LinkSign::Repression => f_minus(x_upstream, self.theta[link], self.lambda),
        }
    }

    /// Production rate of gene `i` given the delayed upstream value.
    pub(crate) fn production(&self, i: usize, x_upstream: f64) -> f64 {
        self.kappa[i] * self.regulation(i, x_upstream)
    }
}

/// Per-gene fixed point of the cyclic loop.
///
/// The N-fold composition of the link maps is a strictly decreasing
/// self-map of `(0, M_1)` for a negative loop, so the scalar fixed-point
/// equation for gene 1 has a unique root; bisection brackets it and a
/// Newton polish with the closed-form chain-rule slope sharpens it, after
/// which the rest of the cycle follows by forward substitution.
pub fn ngene_equilibrium(loop_params: &CyclicLoopParams) -> Result<Vec<f64>> {
    loop_params.validate()?;
    let n = loop_params.n();

    // x1 fixed: walk the cycle 2 -> 3 -> ... -> N -> 1
    let propagate = |x1: f64| -> Vec<f64> {
        let mut xs = vec![0.0; n];
        xs[0] = x1;
        for i in 1..n {
            xs[i] = loop_params.production(i, xs[i - 1]) / loop_params.gamma[i];
        }
        xs
    };
    let residual = |x1: f64| -> f64 {
        let xs = propagate(x1);
        loop_params.production(0, xs[n - 1]) / loop_params.gamma[0] - x1
    };

    let m1 = loop_params.kappa[0] / loop_params.gamma[0];
    let mut lo = 0.0;
    let mut hi = m1;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polish: the slope of the composed map is the product of link
    // slopes, each +/- lambda kappa f(1-f)/gamma
    let mut x1 = 0.5 * (lo + hi);
    for _ in 0..30 {
        let xs = propagate(x1);
        let r = loop_params.production(0, xs[n - 1]) / loop_params.gamma[0] - x1;
        if r.abs() < 1e-15 * m1.max(1.0) {
            break;
        }
        let mut slope = 1.0;
        for i in 0..n {
            let upstream = if i == 0 { xs[n - 1] } else { xs[i - 1] };
            let f = f_plus(upstream, loop_params.theta[i], loop_params.lambda);
            slope *= loop_params.signs[i].signum()
                * loop_params.kappa[i]
                * loop_params.lambda
                * f
                * (1.0 - f)
                / loop_params.gamma[i];
        }
        let d = slope - 1.0;
        x1 = (x1 - r / d).clamp(0.0, m1);
    }

    Ok(propagate(x1))
}

/// Link gains `A_i = kappa_i lambda f(1-f)` at the equilibrium; the loop
/// gain is their product.
pub fn link_gains(loop_params: &CyclicLoopParams, equilibrium: &[f64]) -> Vec<f64> {
    let n = loop_params.n();
    (0..n)
        .map(|i| {
            let upstream = equilibrium[(i + n - 1) % n];
            let f = f_plus(upstream, loop_params.theta[i], loop_params.lambda);
            loop_params.kappa[i] * loop_params.lambda * f * (1.0 - f)
        })
        .collect()
}

/// Characteristic function `prod_i (mu + gamma_i) + Lambda exp(-mu tau)`.
pub fn ngene_char_eval(mu: Complex64, gamma: &[f64], loop_gain: f64, tau: f64) -> Complex64 {
    let product = gamma
        .iter()
        .fold(Complex64::ONE, |acc, &g| acc * (mu + g));
    product + loop_gain * (-mu * tau).exp()
}

/// Hopf data of the cyclic loop.
#[derive(Debug, Clone, Copy)]
pub struct CyclicHopf {
    pub omega_c: f64,
    pub tau_c: f64,
    /// Smallest branch integer making the phase bracket positive.
    pub k_star: u32,
    pub loop_gain: f64,
    pub s1: f64,
    pub s2: f64,
    pub trans_re: f64,
    pub trans_im: f64,
    /// Delay-induced-Hopf gain window, populated for symmetric rates.
    pub window: Option<(f64, f64)>,
    pub period: f64,
}

/// Hopf frequency, critical delay and transversality for the cyclic loop;
/// `None` when the loop gain does not exceed the product of degradation
/// rates.
pub fn ngene_hopf(loop_params: &CyclicLoopParams) -> Result<Option<CyclicHopf>> {
    let equilibrium = ngene_equilibrium(loop_params)?;
    let gains = link_gains(loop_params, &equilibrium);
    let loop_gain: f64 = gains.iter().product();
    let gamma = &loop_params.gamma;
    let gamma_product: f64 = gamma.iter().product();
    if loop_gain <= gamma_product {
        return Ok(None);
    }

    let n = loop_params.n();
    // bisection on p = omega^2 over the a-priori bracket
    // [Lambda^{2/N} - max gamma^2, Lambda^{2/N} - min gamma^2], clipped at 0
    let anchor = loop_gain.powf(2.0 / n as f64);
    let gmax2 = gamma.iter().fold(0.0_f64, |m, &g| m.max(g * g));
    let gmin2 = gamma.iter().fold(f64::INFINITY, |m, &g| m.min(g * g));
    let mut lo = (anchor - gmax2).max(0.0);
    let mut hi = anchor - gmin2;
    let h = |p: f64| -> f64 {
        gamma.iter().map(|&g| (p + g * g).ln()).sum::<f64>() - 2.0 * loop_gain.ln()
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi.max(1e-300) {
            break;
        }
    }
    let omega_c = (0.5 * (lo + hi)).sqrt();

    let arctan_sum: f64 = gamma.iter().map(|&g| (omega_c / g).atan()).sum();
    let mut k_star = 0;
    let mut tau_c = -1.0;
    for k in 1..=64u32 {
        let bracket = (2.0 * f64::from(k) - 1.0) * std::f64::consts::PI - arctan_sum;
        if bracket > 0.0 {
            k_star = k;
            tau_c = bracket / omega_c;
            break;
        }
    }
    if k_star == 0 {
        return Err(Error::BranchSearchExhausted { k_max: 64 });
    }

    let w2 = omega_c * omega_c;
    let s1: f64 = gamma.iter().map(|&g| 1.0 / (w2 + g * g)).sum();
    let s2: f64 = gamma.iter().map(|&g| g / (w2 + g * g)).sum();
    let denom = s1 * s1 + (s2 + tau_c).powi(2) / w2;

    let window = if loop_params.has_symmetric_rates() {
        Some(symmetric_window(gamma[0], n))
    } else {
        None
    };

    Ok(Some(CyclicHopf {
        omega_c,
        tau_c,
        k_star,
        loop_gain,
        s1,
        s2,
        trans_re: s1 / denom,
        trans_im: -(s2 + tau_c) / (omega_c * denom),
        window,
        period: std::f64::consts::TAU / omega_c,
    }))
}

/// Loop-gain window `(gamma^N, gamma^N sec^N(pi/N))` inside which the delay
/// genuinely induces the Hopf bifurcation for the symmetric cyclic loop.
/// The upper edge is infinite for `N = 2`.
pub fn symmetric_window(gamma: f64, n: usize) -> (f64, f64) {
    let lower = gamma.powi(n as i32);
    if n == 2 {
        return (lower, f64::INFINITY);
    }
    let sec = 1.0 / (std::f64::consts::PI / n as f64).cos();
    (lower, lower * sec.powi(n as i32))
}

/// No-delay stability verdict with the spectral abscissa and the roots of
/// `prod_i (mu + gamma_i) + Lambda`.
#[derive(Debug, Clone)]
pub struct NoDelayStability {
    pub stable: bool,
    pub spectral_abscissa: f64,
    pub roots: Vec<Complex64>,
}

/// Stability of the no-delay linearisation.
///
/// Symmetric rates use the closed-form roots
/// `mu_k = -gamma + Lambda^{1/N} exp(i pi (2k+1)/N)`; general rates go
/// through companion-matrix eigenvalues, supported up to degree 16.
pub fn no_delay_stability(loop_params: &CyclicLoopParams) -> Result<NoDelayStability> {
    let equilibrium = ngene_equilibrium(loop_params)?;
    let loop_gain: f64 = link_gains(loop_params, &equilibrium).iter().product();
    let n = loop_params.n();

    let roots = if loop_params.has_symmetric_rates() {
        let gamma = loop_params.gamma[0];
        let radius = loop_gain.powf(1.0 / n as f64);
        (0..n)
            .map(|k| {
                let angle = std::f64::consts::PI * (2.0 * k as f64 + 1.0) / n as f64;
                Complex64::new(-gamma + radius * angle.cos(), radius * angle.sin())
            })
            .collect::<Vec<_>>()
    } else {
        if n > 16 {
            return Err(Error::DegreeTooLarge(n));
        }
        // monic coefficients of prod (mu + gamma_i), low degree first
        let mut coeffs = vec![1.0];
        for &g in &loop_params.gamma {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (pow, &c) in coeffs.iter().enumerate() {
                next[pow] += c * g;
                next[pow + 1] += c;
            }
            coeffs = next;
        }
        coeffs[0] += loop_gain;
        companion_roots(&coeffs)
    };

    let spectral_abscissa = roots
        .iter()
        .map(|r| r.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(NoDelayStability {
        stable: spectral_abscissa < 0.0,
        spectral_abscissa,
        roots,
    })
}

/// Eigenvalues of the companion matrix of a monic polynomial given by its
/// coefficients in increasing degree (`coeffs[n] == 1`).
fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    let mut m = DMatrix::<f64>::zeros(degree, degree);
    for row in 1..degree {
        m[(row, row - 1)] = 1.0;
    }
    for row in 0..degree {
        m[(row, degree - 1)] = -coeffs[row];
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect()
}

/// Residual of the inverse-transversality identity
/// `(dmu/dtau)^{-1} = S1 + i (S2 + tau_c)/omega_c` at the Hopf point,
/// evaluated from the implicit derivative of the characteristic function.
///
/// Returns the largest relative discrepancy across the identity's real
/// part, its imaginary part, and the inverted closed form.
pub fn ngene_transversality_identity_check(
    loop_params: &CyclicLoopParams,
    hopf: &CyclicHopf,
) -> f64 {
    let gamma = &loop_params.gamma;
    let mu = Complex64::new(0.0, hopf.omega_c);
    let tau = hopf.tau_c;

    // dmu/dtau = -Delta_tau / Delta_mu along the root branch
    let exp_term = hopf.loop_gain * (-mu * tau).exp();
    let mut d_mu = -tau * exp_term;
    for j in 0..gamma.len() {
        let mut partial = Complex64::ONE;
        for (i, &g) in gamma.iter().enumerate() {
            if i != j {
                partial *= mu + g;
            }
        }
        d_mu += partial;
    }
    let d_tau = -mu * exp_term;
    let slope = -d_tau / d_mu;
    let inverse = 1.0 / slope;

    let expected_inverse = Complex64::new(hopf.s1, (hopf.s2 + tau) / hopf.omega_c);
    let closed = Complex64::new(hopf.trans_re, hopf.trans_im);

    let rel = |x: Complex64, y: Complex64| (x - y).norm() / y.norm();
    rel(inverse, expected_inverse).max(rel(slope, closed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf;
    use crate::logistic::{solve_equilibrium, TwoGeneParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn worked_three_gene_equilibrium_and_hopf() {
        let loop3 = CyclicLoopParams::worked_three_gene();
        let eq = ngene_equilibrium(&loop3).unwrap();
        for &x in &eq {
            assert_relative_eq!(x, 2.0, max_relative = 1e-12);
        }
        let hopf = ngene_hopf(&loop3).unwrap().unwrap();
        assert_abs_diff_eq!(hopf.loop_gain, 0.422, epsilon = 1e-3);
        assert_abs_diff_eq!(hopf.omega_c, 0.5590, epsilon = 1e-4);
        assert_abs_diff_eq!(hopf.tau_c, 1.1062, epsilon = 1e-4);
        assert_abs_diff_eq!(hopf.period, 11.24, epsilon = 0.01);
        assert_abs_diff_eq!(hopf.s1, 5.333, epsilon = 1e-3);
        assert_abs_diff_eq!(hopf.s2, 2.667, epsilon = 1e-3);
        assert_abs_diff_eq!(hopf.trans_re, 0.0721, epsilon = 1e-4);
        assert_eq!(hopf.k_star, 1);

        // characteristic residual at the crossing
        let mu = Complex64::new(0.0, hopf.omega_c);
        let residual = ngene_char_eval(mu, &loop3.gamma, hopf.loop_gain, hopf.tau_c);
        assert!(residual.norm() < 1e-12);

        // symmetric rates collapse the bracket to an equality
        let radius = hopf.loop_gain.powf(2.0 / 3.0);
        assert_relative_eq!(
            hopf.omega_c,
            (radius - 0.25).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn identity_check_and_branch_decay() {
        let loop3 = CyclicLoopParams::worked_three_gene();
        let hopf = ngene_hopf(&loop3).unwrap().unwrap();
        assert!(ngene_transversality_identity_check(&loop3, &hopf) < 1e-12);

        // transversality decreases along the branch ladder
        let mut last = f64::INFINITY;
        for k in 0..3 {
            let tau_k = hopf.tau_c + f64::from(k) * hopf.period;
            let denom = hopf.s1 * hopf.s1
                + (hopf.s2 + tau_k).powi(2) / (hopf.omega_c * hopf.omega_c);
            let re = hopf.s1 / denom;
            assert!(re > 0.0 && re < last);
            last = re;
        }
    }

    #[test]
    fn two_gene_reduction_matches_pair_module() {
        let p = TwoGeneParams::canonical();
        let eq2 = solve_equilibrium(&p).unwrap();
        let pair = hopf::critical_delays(eq2.gain_a, eq2.gain_b, p.gamma1, p.gamma2, 0)
            .unwrap()[0];
        let pair_trans = hopf::transversality(eq2.gain_a, eq2.gain_b, p.gamma1, p.gamma2, 0)
            .unwrap();

        // same loop expressed link-indexed: gene1 repressed by gene2 with
        // threshold theta2, gene2 activated by gene1 with threshold theta1
        let loop2 = CyclicLoopParams::new(
            vec![p.kappa1, p.kappa2],
            vec![p.gamma1, p.gamma2],
            vec![p.theta2, p.theta1],
            vec![0.0, 0.0],
            vec![LinkSign::Repression, LinkSign::Activation],
            p.lambda,
        )
        .unwrap();

        let eq_n = ngene_equilibrium(&loop2).unwrap();
        assert_relative_eq!(eq_n[0], eq2.x1_star, max_relative = 1e-12);
        assert_relative_eq!(eq_n[1], eq2.x2_star, max_relative = 1e-12);

        let hopf_n = ngene_hopf(&loop2).unwrap().unwrap();
        assert_relative_eq!(hopf_n.omega_c, pair.omega_c, max_relative = 1e-10);
        assert_relative_eq!(hopf_n.tau_c, pair.tau_c, max_relative = 1e-10);
        assert_eq!(hopf_n.k_star, 1);
        assert_relative_eq!(hopf_n.trans_re, pair_trans.re, max_relative = 1e-10);
        assert_relative_eq!(hopf_n.trans_im, pair_trans.im, max_relative = 1e-10);

        let mu = Complex64::new(0.0, hopf_n.omega_c);
        let from_pair = hopf::char_eval(mu, hopf_n.tau_c, eq2.gain_a, eq2.gain_b, p.gamma1, p.gamma2);
        let from_loop = ngene_char_eval(mu, &loop2.gamma, hopf_n.loop_gain, hopf_n.tau_c);
        assert!((from_pair - from_loop).norm() < 1e-10);
    }

    #[test]
    fn random_negative_loops_have_consistent_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let mut signs: Vec<LinkSign> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        LinkSign::Activation
                    } else {
                        LinkSign::Repression
                    }
                })
                .collect();
            let repressions = signs.iter().filter(|s| **s == LinkSign::Repression).count();
            if repressions % 2 == 0 {
                signs[0] = match signs[0] {
                    LinkSign::Activation => LinkSign::Repression,
                    LinkSign::Repression => LinkSign::Activation,
                };
            }
            let loop_params = CyclicLoopParams::new(
                (0..n).map(|_| rng.gen_range(0.5..8.0)).collect(),
                (0..n).map(|_| rng.gen_range(0.1..2.0)).collect(),
                (0..n).map(|_| rng.gen_range(0.2..4.0)).collect(),
                vec![0.0; n],
                signs,
                rng.gen_range(0.3..5.0),
            )
            .unwrap();

            let eq = ngene_equilibrium(&loop_params).unwrap();
            for i in 0..n {
                let upstream = eq[(i + n - 1) % n];
                let residual = loop_params.gamma[i] * eq[i]
                    - loop_params.production(i, upstream);
                assert!(
                    (residual / loop_params.kappa[i]).abs() < 1e-12,
                    "link {i} residual {residual:.3e}"
                );
            }

            if let Some(hopf) = ngene_hopf(&loop_params).unwrap() {
                let w2 = hopf.omega_c * hopf.omega_c;
                let lhs: f64 = loop_params.gamma.iter().map(|&g| w2 + g * g).product();
                assert!((lhs - hopf.loop_gain * hopf.loop_gain).abs()
                    <= 1e-10 * hopf.loop_gain * hopf.loop_gain);
                // a-priori bracket always contains omega_c^2
                let anchor = hopf.loop_gain.powf(2.0 / n as f64);
                let gmax2 = loop_params.gamma.iter().fold(0.0_f64, |m, &g| m.max(g * g));
                let gmin2 = loop_params
                    .gamma
                    .iter()
                    .fold(f64::INFINITY, |m, &g| m.min(g * g));
                assert!(w2 >= (anchor - gmax2).max(0.0) - 1e-12);
                assert!(w2 <= anchor - gmin2 + 1e-12);
                assert!(ngene_transversality_identity_check(&loop_params, &hopf) < 1e-10);
            }
        }
    }

    #[test]
    fn symmetric_windows() {
        let (lo3, hi3) = symmetric_window(0.5, 3);
        assert_relative_eq!(lo3, 0.125, max_relative = 1e-14);
        assert_relative_eq!(hi3, 1.0, max_relative = 1e-12);

        let (lo4, hi4) = symmetric_window(0.7, 4);
        assert_relative_eq!(hi4, 4.0 * lo4, max_relative = 1e-12);

        let (_, hi2) = symmetric_window(1.3, 2);
        assert!(hi2.is_infinite());
    }

    #[test]
    fn no_delay_stability_window_boundary() {
        // worked loop sits inside the window: stable without delay
        let loop3 = CyclicLoopParams::worked_three_gene();
        let verdict = no_delay_stability(&loop3).unwrap();
        assert!(verdict.stable);
        assert_abs_diff_eq!(verdict.spectral_abscissa, -0.125, epsilon = 1e-6);

        // push the gain above the window by steepening: Lambda > 8 gamma^3
        // needs lambda kappa/4 > 2 gamma i.e. lambda > 2 here
        let steep = CyclicLoopParams::symmetric(3, 2.0, 0.5, 2.0, 3.0).unwrap();
        let eq = ngene_equilibrium(&steep).unwrap();
        let gain: f64 = link_gains(&steep, &eq).iter().product();
        assert!(gain > 1.0);
        assert!(!no_delay_stability(&steep).unwrap().stable);

        // two-gene loops are always stable without delay
        let loop2 = CyclicLoopParams::symmetric(2, 4.0, 0.5, 4.0, 8.0).unwrap();
        assert!(no_delay_stability(&loop2).unwrap().stable);
    }

    #[test]
    fn asymmetric_rates_use_companion_roots() {
        let loop_params = CyclicLoopParams::new(
            vec![2.0, 3.0, 1.5],
            vec![0.4, 0.8, 0.6],
            vec![2.0, 1.5, 1.0],
            vec![0.0; 3],
            vec![
                LinkSign::Repression,
                LinkSign::Activation,
                LinkSign::Activation,
            ],
            2.0,
        )
        .unwrap();
        let verdict = no_delay_stability(&loop_params).unwrap();
        assert_eq!(verdict.roots.len(), 3);
        // every root satisfies the polynomial
        let eq = ngene_equilibrium(&loop_params).unwrap();
        let gain: f64 = link_gains(&loop_params, &eq).iter().product();
        for &root in &verdict.roots {
            let value = ngene_char_eval(root, &loop_params.gamma, gain, 0.0);
            assert!(value.norm() < 1e-9, "residual {:.3e}", value.norm());
        }
    }

    #[test]
    fn positive_loop_rejected() {
        let result = CyclicLoopParams::new(
            vec![1.0; 3],
            vec![1.0; 3],
            vec![1.0; 3],
            vec![0.0; 3],
            vec![
                LinkSign::Repression,
                LinkSign::Repression,
                LinkSign::Activation,
            ],
            1.0,
        );
        assert!(matches!(result, Err(Error::PositiveFeedbackLoop)));
    }
}
