//! Lindstedt-Poincare reduction of the delayed loop at its Hopf point.
//!
//! The expansion delivers the criticality coefficient `T` (positive means a
//! supercritical bifurcation, with `tau - tau_c = eps^2 T` along the branch)
//! and the frequency correction `Omega2` (`Omega = omega_c + eps^2 Omega2`).
//! At symmetric thresholds the quadratic terms vanish and both come out in
//! closed form; the general loop goes through a complex solvability equation
//! whose coefficients mix the second-order responses `W0` and `W2`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hopf::{critical_delays, HopfPoint};
use crate::logistic::{solve_equilibrium, taylor_coefficients, Equilibrium, TaylorCoefficients, TwoGeneParams};

/// Output of the Lindstedt reduction.
///
/// `p`, `q0` and `g` are the solvability coefficients normalised so that
/// `q0 = 1`; in that gauge `p = -(s2 + tau_c) + i omega_c s1` identically
/// and the whole split dependence of the raw projection cancels. The
/// solution `(t_coeff, omega2)` is invariant under that normalisation.
#[derive(Debug, Clone, Copy)]
pub struct LyapunovResult {
    /// Criticality coefficient `T`; the bifurcation is supercritical iff
    /// it is positive.
    pub t_coeff: f64,
    /// Frequency correction `Omega2` on the scale `tau - tau_c = eps^2 T`.
    pub omega2: f64,
    /// Eigenvector second component under the normalisation `q1 = 1`.
    pub q2: Complex64,
    /// Zero-frequency second-order response.
    pub w0: [f64; 2],
    /// Second-harmonic second-order response.
    pub w2: [Complex64; 2],
    /// Normalised detuning coefficient of `Omega2`.
    pub p: Complex64,
    /// Normalised detuning coefficient of `T`; identically one.
    pub q0: Complex64,
    /// Normalised projected cubic-order forcing (cubic plus quadratic
    /// cross-mixing).
    pub g: Complex64,
    /// `sum_j 1/(omega_c^2 + gamma_j^2)`.
    pub s1: f64,
    /// `sum_j gamma_j/(omega_c^2 + gamma_j^2)`.
    pub s2: f64,
    pub supercritical: bool,
}

impl LyapunovResult {
    /// Residual of the complex solvability equation
    /// `-i p Omega2 + i omega_c q0 T + g` at the stored solution.
    pub fn solvability_residual(&self, omega_c: f64) -> f64 {
        let i = Complex64::i();
        (-i * self.p * self.omega2 + i * omega_c * self.q0 * self.t_coeff + self.g).norm()
    }
}

fn linear_sums(omega_c: f64, gamma1: f64, gamma2: f64) -> (f64, f64) {
    let w2 = omega_c * omega_c;
    let s1 = 1.0 / (w2 + gamma1 * gamma1) + 1.0 / (w2 + gamma2 * gamma2);
    let s2 = gamma1 / (w2 + gamma1 * gamma1) + gamma2 / (w2 + gamma2 * gamma2);
    (s1, s2)
}

/// Closed-form reduction for symmetric thresholds (`theta_i = M_i / 2`).
///
/// Every factor of the closed form is positive, so the symmetric loop is
/// supercritical for any strong-feedback parameter choice.
pub fn symmetric_lyapunov(
    params: &TwoGeneParams,
    eq: &Equilibrium,
    hopf: &HopfPoint,
) -> Result<LyapunovResult> {
    if !params.has_symmetric_thresholds() {
        return Err(Error::AsymmetricThresholds);
    }
    let lambda = params.lambda;
    let (s1, s2) = linear_sums(hopf.omega_c, params.gamma1, params.gamma2);
    let q2_amp_sq = (hopf.omega_c * hopf.omega_c + params.gamma1 * params.gamma1)
        / (eq.gain_b * eq.gain_b);

    let omega2 = -lambda * lambda * (1.0 + q2_amp_sq) / (4.0 * hopf.omega_c * s1);
    let t_coeff = lambda * lambda * (1.0 + q2_amp_sq) * (s2 + hopf.tau_c)
        / (4.0 * hopf.omega_c * hopf.omega_c * s1);

    // report the eigenvector at the default symmetric split
    let i = Complex64::i();
    let phi1 = hopf.omega_c * hopf.tau_c / 2.0;
    let q2 = eq.gain_a * (-i * phi1).exp() / (i * hopf.omega_c + params.gamma2);

    Ok(LyapunovResult {
        t_coeff,
        omega2,
        q2,
        w0: [0.0; 2],
        w2: [Complex64::ZERO; 2],
        p: Complex64::new(-(s2 + hopf.tau_c), hopf.omega_c * s1),
        q0: Complex64::ONE,
        g: Complex64::from(lambda * lambda * (1.0 + q2_amp_sq) / 4.0),
        s1,
        s2,
        supercritical: t_coeff > 0.0,
    })
}

/// Full asymmetric reduction at an explicit delay split summing to the
/// critical delay.
///
/// The raw projection coefficients depend on the split through the link
/// phases `phi_j = omega_c tau_j`, but the solved pair `(T, Omega2)` does
/// not; evaluating over several splits and comparing is the standard
/// consistency check on the second-harmonic bookkeeping.
pub fn general_lyapunov(
    params: &TwoGeneParams,
    eq: &Equilibrium,
    hopf: &HopfPoint,
    taylor: &TaylorCoefficients,
) -> Result<LyapunovResult> {
    let (gamma1, gamma2) = (params.gamma1, params.gamma2);
    let (a, b) = (eq.gain_a, eq.gain_b);
    let ab = a * b;
    if ab <= gamma1 * gamma2 {
        return Err(Error::WeakFeedback {
            loop_gain: ab,
            threshold: gamma1 * gamma2,
        });
    }
    let (tau1, tau2) = (params.tau1, params.tau2);
    let tau_c = hopf.tau_c;
    if (tau1 + tau2 - tau_c).abs() > 1e-9 * tau_c.max(1.0) {
        return Err(Error::SplitMismatch { tau1, tau2, tau_c });
    }

    let w = hopf.omega_c;
    let i = Complex64::i();
    let (phi1, phi2) = (w * tau1, w * tau2);
    let e1 = (-i * phi1).exp();
    let e2 = (-i * phi2).exp();

    let q2 = a * e1 / (i * w + gamma2);
    let q2_amp_sq = q2.norm_sqr();

    // zero-frequency response: -(L0+L1+L2)^{-1} F0 with L = [[-g1,-B],[A,-g2]]
    let det_l = gamma1 * gamma2 + ab;
    if det_l.abs() < 1e-10 {
        return Err(Error::NearResonance {
            what: "det(L0+L1+L2)",
            magnitude: det_l.abs(),
        });
    }
    let f0 = [2.0 * taylor.b1 * q2_amp_sq, 2.0 * taylor.b2];
    let w0 = [
        -(-gamma2 * f0[0] + b * f0[1]) / det_l,
        -(-a * f0[0] - gamma1 * f0[1]) / det_l,
    ];

    // second-harmonic response: Delta(2 i omega_c)^{-1} F2
    let m11 = 2.0 * i * w + gamma1;
    let m12 = b * (-2.0 * i * phi2).exp();
    let m21 = -a * (-2.0 * i * phi1).exp();
    let m22 = 2.0 * i * w + gamma2;
    let det_d = m11 * m22 - m12 * m21;
    if det_d.norm() < 1e-10 {
        return Err(Error::NearResonance {
            what: "det Delta(2 i omega_c)",
            magnitude: det_d.norm(),
        });
    }
    let f2 = [
        taylor.b1 * q2 * q2 * (-2.0 * i * phi2).exp(),
        taylor.b2 * (-2.0 * i * phi1).exp(),
    ];
    let w2 = [
        (m22 * f2[0] - m12 * f2[1]) / det_d,
        (m11 * f2[1] - m21 * f2[0]) / det_d,
    ];

    // adjoint weight and delayed eigenvector factor
    let varpi = a * e1 / (i * w + gamma1);
    let zeta = q2 * e2;

    let p_raw = (varpi + q2) - b * zeta * varpi * tau2 + a * e1 * tau1;
    let q0_raw = b * zeta * varpi * (tau2 / tau_c) - a * e1 * (tau1 / tau_c);

    let g_cub = 3.0 * (varpi * taylor.d1 * q2_amp_sq * zeta + taylor.d2 * e1);
    let g_quad = 2.0 * varpi * taylor.b1 * e2 * (q2 * w0[1] + q2.conj() * w2[1])
        + 2.0 * taylor.b2 * e1 * (w0[0] + w2[0]);
    let g_raw = g_cub + g_quad;

    // gauge the projection so q0 = 1 (divide by the raw q0, which carries
    // the whole normalisation ambiguity of the left null vector)
    let p = p_raw / q0_raw;
    let q0 = Complex64::ONE;
    let g = g_raw / q0_raw;

    // real/imaginary split of -i p Omega2 + i omega_c q0 T + g = 0
    let m = [[p.im, -w * q0.im], [-p.re, w * q0.re]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-12 {
        return Err(Error::DegenerateSolvability { det });
    }
    let rhs = [-g.re, -g.im];
    let omega2 = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
    let t_coeff = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;

    let (s1, s2) = linear_sums(w, gamma1, gamma2);
    Ok(LyapunovResult {
        t_coeff,
        omega2,
        q2,
        w0,
        w2,
        p,
        q0,
        g,
        s1,
        s2,
        supercritical: t_coeff > 0.0,
    })
}

/// Leading-order limit-cycle amplitude and frequency at `tau > tau_c`.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeLaw {
    /// Amplitude of the x1 component, `2 sqrt((tau - tau_c) / T)`.
    pub a1: f64,
    /// Amplitude of the x2 component, `|q2| a1`.
    pub a2: f64,
    /// Angular frequency `omega_c + Omega2 (tau - tau_c) / T`.
    pub omega: f64,
}

pub fn amplitude_law(result: &LyapunovResult, hopf: &HopfPoint, tau: f64) -> Result<AmplitudeLaw> {
    if !(result.t_coeff > 0.0) {
        return Err(Error::Subcritical {
            t_coeff: result.t_coeff,
        });
    }
    if !(tau > hopf.tau_c) {
        return Err(Error::BelowOnset {
            tau,
            tau_c: hopf.tau_c,
        });
    }
    let excess = tau - hopf.tau_c;
    let a1 = 2.0 * (excess / result.t_coeff).sqrt();
    Ok(AmplitudeLaw {
        a1,
        a2: result.q2.norm() * a1,
        omega: hopf.omega_c + result.omega2 * excess / result.t_coeff,
    })
}

/// Sampling region of the Monte-Carlo criticality sweep. Rates and
/// steepness are drawn log-uniformly, thresholds uniformly as a fraction of
/// the carrying capacity.
#[derive(Debug, Clone, Copy)]
pub struct McRegion {
    pub kappa: (f64, f64),
    pub gamma: (f64, f64),
    pub lambda: (f64, f64),
    pub theta_frac: (f64, f64),
}

impl Default for McRegion {
    fn default() -> Self {
        Self {
            kappa: (0.5, 10.0),
            gamma: (0.05, 2.0),
            lambda: (0.5, 10.0),
            theta_frac: (0.05, 0.95),
        }
    }
}

/// One accepted strong-feedback draw with its reduction outputs.
#[derive(Debug, Clone)]
pub struct McSample {
    pub index: u64,
    pub params: TwoGeneParams,
    pub loop_gain: f64,
    pub omega_c: f64,
    pub tau_c: f64,
    pub t_coeff: f64,
    pub omega2: f64,
}

/// Draw that reached the reduction but failed inside it; kept with the full
/// parameter dump for reproduction.
#[derive(Debug, Clone)]
pub struct McFailure {
    pub index: u64,
    pub params: TwoGeneParams,
    pub error: Error,
}

#[derive(Debug, Clone, Default)]
pub struct McSummary {
    pub samples: Vec<McSample>,
    /// Weak-feedback draws discarded before the reduction.
    pub rejected_weak: u64,
    pub failures: Vec<McFailure>,
}

impl McSummary {
    pub fn fraction_supercritical(&self) -> f64 {
        if self.samples.is_empty() {
            return f64::NAN;
        }
        let positive = self.samples.iter().filter(|s| s.t_coeff > 0.0).count();
        positive as f64 / self.samples.len() as f64
    }

    pub fn min_t_coeff(&self) -> Option<f64> {
        self.samples
            .iter()
            .map(|s| s.t_coeff)
            .min_by(|a, b| a.total_cmp(b))
    }

    pub fn non_positive(&self) -> Vec<&McSample> {
        self.samples.iter().filter(|s| s.t_coeff <= 0.0).collect()
    }
}

fn log_uniform(rng: &mut impl Rng, range: (f64, f64)) -> f64 {
    (rng.gen_range(range.0.ln()..range.1.ln())).exp()
}

fn draw_params(rng: &mut impl Rng, region: &McRegion) -> TwoGeneParams {
    let kappa1 = log_uniform(rng, region.kappa);
    let kappa2 = log_uniform(rng, region.kappa);
    let gamma1 = log_uniform(rng, region.gamma);
    let gamma2 = log_uniform(rng, region.gamma);
    let lambda = log_uniform(rng, region.lambda);
    let theta1 = rng.gen_range(region.theta_frac.0..region.theta_frac.1) * kappa1 / gamma1;
    let theta2 = rng.gen_range(region.theta_frac.0..region.theta_frac.1) * kappa2 / gamma2;
    TwoGeneParams {
        kappa1,
        kappa2,
        gamma1,
        gamma2,
        theta1,
        theta2,
        lambda,
        tau1: 0.0,
        tau2: 0.0,
    }
}

enum McOutcome {
    Accepted(Box<McSample>),
    RejectedWeak,
    Failed(Box<McFailure>),
}

fn run_sample(index: u64, seed: u64, region: &McRegion) -> McOutcome {
    // per-sample stream derived from (seed, index): deterministic and
    // order-independent under parallel execution
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let params = draw_params(&mut rng, region);
    let eq = match solve_equilibrium(&params) {
        Ok(eq) => eq,
        Err(error) => {
            return McOutcome::Failed(Box::new(McFailure {
                index,
                params,
                error,
            }))
        }
    };
    let Some(points) = critical_delays(eq.gain_a, eq.gain_b, params.gamma1, params.gamma2, 0)
    else {
        return McOutcome::RejectedWeak;
    };
    let hopf = points[0];
    let split = params.with_split(hopf.tau_c / 2.0, hopf.tau_c / 2.0);
    let taylor = taylor_coefficients(&split, &eq);
    match general_lyapunov(&split, &eq, &hopf, &taylor) {
        Ok(result) => McOutcome::Accepted(Box::new(McSample {
            index,
            params: split,
            loop_gain: eq.loop_gain(),
            omega_c: hopf.omega_c,
            tau_c: hopf.tau_c,
            t_coeff: result.t_coeff,
            omega2: result.omega2,
        })),
        Err(error) => McOutcome::Failed(Box::new(McFailure {
            index,
            params: split,
            error,
        })),
    }
}

/// Monte-Carlo criticality sweep over `n_samples` draws.
///
/// Weak-feedback draws are discarded and counted; accepted samples carry the
/// general reduction at the default symmetric split. The summary is
/// bit-identical for a fixed `(region, n_samples, seed)` regardless of the
/// number of worker threads, because sample `i` derives its own RNG stream
/// from `(seed, i)` and aggregation preserves index order.
pub fn montecarlo_criticality(region: &McRegion, n_samples: u64, seed: u64) -> McSummary {
    let outcomes: Vec<McOutcome> = (0..n_samples)
        .into_par_iter()
        .map(|index| run_sample(index, seed, region))
        .collect();

    let mut summary = McSummary::default();
    for outcome in outcomes {
        match outcome {
            McOutcome::Accepted(sample) => summary.samples.push(*sample),
            McOutcome::RejectedWeak => summary.rejected_weak += 1,
            McOutcome::Failed(failure) => summary.failures.push(*failure),
        }
    }
    summary
}
