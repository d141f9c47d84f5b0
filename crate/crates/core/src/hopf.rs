//! Closed-form analysis of the two-gene characteristic equation
//! `(mu + gamma1)(mu + gamma2) + A B exp(-mu tau) = 0`: Hopf frequency,
//! critical-delay branches, transversality, eigenvector amplitude, stability
//! classification, gain calibration, and normal-form extraction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logistic::{solve_equilibrium, TwoGeneParams};

/// Characteristic function of the linearised loop, `tau` being the total
/// delay. Roots in the open right half-plane mean instability.
pub fn char_eval(
    mu: Complex64,
    tau: f64,
    gain_a: f64,
    gain_b: f64,
    gamma1: f64,
    gamma2: f64,
) -> Complex64 {
    (mu + gamma1) * (mu + gamma2) + gain_a * gain_b * (-mu * tau).exp()
}

/// Positive frequency of the purely imaginary characteristic roots, when
/// one exists.
///
/// Squaring the imaginary-axis condition eliminates the delay and leaves a
/// quadratic in `omega^2` whose unique positive root exists iff
/// `A B > gamma1 gamma2`; weak feedback returns `None` (absolute stability,
/// no crossing at any delay).
pub fn hopf_frequency(gain_a: f64, gain_b: f64, gamma1: f64, gamma2: f64) -> Option<f64> {
    let ab = gain_a * gain_b;
    if ab <= gamma1 * gamma2 {
        return None;
    }
    let g1s = gamma1 * gamma1;
    let g2s = gamma2 * gamma2;
    let p_plus = 0.5 * (-(g1s + g2s) + ((g1s - g2s).powi(2) + 4.0 * ab * ab).sqrt());
    Some(p_plus.sqrt())
}

/// One imaginary-axis crossing: frequency, branch delay, branch index, and
/// onset period `2 pi / omega_c`.
#[derive(Debug, Clone, Copy)]
pub struct HopfPoint {
    pub omega_c: f64,
    pub tau_c: f64,
    pub branch_k: u32,
    pub period: f64,
}

/// Four-quadrant inverse tangent valued in `(0, 2 pi)`.
///
/// The standard `(-pi, pi]` value is shifted by `2 pi` when non-positive.
/// The crossing phase always has positive sine, so the shift fires only on
/// the defensive path, but it keeps the smallest-delay convention exact.
fn atan2_positive(y: f64, x: f64) -> f64 {
    let a = y.atan2(x);
    if a <= 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Critical delays `tau_c^(k) = tau_c + 2 pi k / omega_c` for
/// `k = 0..=k_max`, smallest first; `None` under weak feedback.
pub fn critical_delays(
    gain_a: f64,
    gain_b: f64,
    gamma1: f64,
    gamma2: f64,
    k_max: u32,
) -> Option<Vec<HopfPoint>> {
    let omega_c = hopf_frequency(gain_a, gain_b, gamma1, gamma2)?;
    let tau_c = atan2_positive(omega_c * (gamma1 + gamma2), omega_c * omega_c - gamma1 * gamma2)
        / omega_c;
    let period = std::f64::consts::TAU / omega_c;
    Some(
        (0..=k_max)
            .map(|k| HopfPoint {
                omega_c,
                tau_c: tau_c + f64::from(k) * period,
                branch_k: k,
                period,
            })
            .collect(),
    )
}

/// Crossing speed of the eigenvalue pair at a critical delay.
#[derive(Debug, Clone, Copy)]
pub struct Transversality {
    /// `Re(d mu / d tau)` at the crossing; strictly positive.
    pub re: f64,
    /// `Im(d mu / d tau)` at the crossing; strictly negative.
    pub im: f64,
    /// Parameter-uniform lower bound on `re`, obtained by replacing
    /// `|omega_c^2 - gamma1 gamma2|` with `A B` in the denominator.
    pub lower_bound: f64,
}

/// Closed-form transversality at branch `k`; `None` under weak feedback.
pub fn transversality(
    gain_a: f64,
    gain_b: f64,
    gamma1: f64,
    gamma2: f64,
    branch_k: u32,
) -> Option<Transversality> {
    let points = critical_delays(gain_a, gain_b, gamma1, gamma2, branch_k)?;
    let point = points[branch_k as usize];
    let (w, tau_k) = (point.omega_c, point.tau_c);
    let ab = gain_a * gain_b;
    let gsum = gamma1 + gamma2;
    let gprod = gamma1 * gamma2;
    let w2 = w * w;

    let numerator = w2 * (2.0 * w2 + gamma1 * gamma1 + gamma2 * gamma2);
    let denom_im = 2.0 * w + tau_k * w * gsum;
    let denom = (gsum - tau_k * (w2 - gprod)).powi(2) + denom_im * denom_im;
    let denom_bound = (gsum + tau_k * ab).powi(2) + denom_im * denom_im;

    Some(Transversality {
        re: numerator / denom,
        im: -w * (gsum * (w2 + gprod) + tau_k * ab * ab) / denom,
        lower_bound: numerator / denom_bound,
    })
}

/// Hopf eigenvector first component under the normalisation `q2 = 1`.
///
/// The squared amplitude is independent of the delay split; only the phase
/// carries the factor `exp(-i omega_c tau2)`.
#[derive(Debug, Clone, Copy)]
pub struct HopfEigenvector {
    pub q1: Complex64,
    pub q1_amp_sq: f64,
}

pub fn hopf_eigenvector(gain_b: f64, gamma1: f64, omega_c: f64, tau2: f64) -> HopfEigenvector {
    let i = Complex64::i();
    let q1 = -gain_b * (-i * omega_c * tau2).exp() / (i * omega_c + gamma1);
    HopfEigenvector {
        q1,
        q1_amp_sq: gain_b * gain_b / (omega_c * omega_c + gamma1 * gamma1),
    }
}

/// Stability of the equilibrium at the loop's total delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    /// Weak feedback: stable for every delay.
    AbsolutelyStable,
    /// Strong feedback with `tau < tau_c`.
    StableBelowOnset,
    /// `tau >= tau_c`; counts the conjugate pairs that have crossed.
    Unstable { crossed_pairs: u32 },
}

/// Classifies the equilibrium of `params` at its own total delay.
pub fn classify_stability(params: &TwoGeneParams) -> Result<Stability> {
    let eq = solve_equilibrium(params)?;
    let tau = params.total_delay();
    match critical_delays(eq.gain_a, eq.gain_b, params.gamma1, params.gamma2, 0) {
        None => Ok(Stability::AbsolutelyStable),
        Some(points) => {
            let first = points[0];
            if tau < first.tau_c {
                Ok(Stability::StableBelowOnset)
            } else {
                let crossed = 1 + ((tau - first.tau_c) / first.period).floor() as u32;
                let crossed = if tau == first.tau_c { 0 } else { crossed };
                Ok(Stability::Unstable {
                    crossed_pairs: crossed,
                })
            }
        }
    }
}

/// Loop gain calibrated so the first critical delay equals a target.
#[derive(Debug, Clone, Copy)]
pub struct GainCalibration {
    pub loop_gain: f64,
    pub hopf: HopfPoint,
}

fn tau_c_of_gain(ab: f64, gamma1: f64, gamma2: f64) -> f64 {
    // factor the gain as (ab, 1) -- tau_c depends only on the product
    let w = hopf_frequency(ab, 1.0, gamma1, gamma2).expect("gain above threshold by bracket");
    atan2_positive(w * (gamma1 + gamma2), w * w - gamma1 * gamma2) / w
}

/// Unique loop gain `A B > gamma1 gamma2` whose first critical delay equals
/// `tau_target`, by bisection on the bracket
/// `[gamma1 gamma2 (1 + 1e-9), 1e6]` where `tau_c` decreases in the gain.
pub fn solve_gain_for_delay(gamma1: f64, gamma2: f64, tau_target: f64) -> Result<GainCalibration> {
    if !(tau_target > 0.0) || !tau_target.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tau_target",
            value: tau_target,
            reason: "must be strictly positive and finite",
        });
    }
    let mut lo = gamma1 * gamma2 * (1.0 + 1e-9);
    let mut hi = 1e6;
    let t_lo = tau_c_of_gain(lo, gamma1, gamma2);
    let t_hi = tau_c_of_gain(hi, gamma1, gamma2);
    // tau_c is monotone decreasing in the gain; verify per call
    if !(t_lo > tau_target && tau_target > t_hi) {
        return Err(Error::BracketFailure {
            what: "gain-for-delay calibration",
            lo,
            hi,
            f_lo: t_lo - tau_target,
            f_hi: t_hi - tau_target,
        });
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if tau_c_of_gain(mid, gamma1, gamma2) > tau_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    let ab = 0.5 * (lo + hi);
    let hopf = critical_delays(ab, 1.0, gamma1, gamma2, 0)
        .expect("gain above threshold by construction")[0];
    Ok(GainCalibration {
        loop_gain: ab,
        hopf,
    })
}

/// First Lyapunov coefficient recovered from measured onset behaviour.
#[derive(Debug, Clone, Copy)]
pub struct NormalFormC1 {
    pub re: f64,
    pub im: f64,
    /// `im / re`; independent of the normalisation of the amplitude data.
    pub ratio: f64,
}

/// Extracts `c1` from the measured squared amplitude prefactor
/// (`A1^2 ~ amp_prefactor_sq (tau - tau_c)` in the x1 component) and the
/// measured period slope `dT/dtau` at onset.
///
/// `Re(c1)` comes from the eigenvector-corrected amplitude relation, and
/// the ratio `Im(c1)/Re(c1)` from the period-slope relation
/// `dT/dtau = -(T_c/omega_c) [Im(dmu/dtau) - ratio Re(dmu/dtau)]`.
pub fn extract_c1(
    hopf: &HopfPoint,
    trans: &Transversality,
    eigvec: &HopfEigenvector,
    amp_prefactor_sq: f64,
    period_slope: f64,
) -> Result<NormalFormC1> {
    if !(amp_prefactor_sq > 0.0) {
        return Err(Error::NonPositiveAmplitude(amp_prefactor_sq));
    }
    let re = -4.0 * eigvec.q1_amp_sq * trans.re / amp_prefactor_sq;
    let ratio = (period_slope * hopf.omega_c / hopf.period + trans.im) / trans.re;
    Ok(NormalFormC1 {
        re,
        im: ratio * re,
        ratio,
    })
}

/// Period slope at onset predicted by linear theory alone,
/// `-(T_c / omega_c) Im(dmu/dtau)`.
pub fn linear_period_slope(hopf: &HopfPoint, trans: &Transversality) -> f64 {
    -(hopf.period / hopf.omega_c) * trans.im
}
