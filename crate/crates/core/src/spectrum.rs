//! Complex-Newton root tracking on the transcendental characteristic
//! function, with continuation in the delay and crossing detection.
//!
//! Only the leading upper-half-plane root is traced; conjugate symmetry
//! supplies the partner.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A characteristic function with its analytic derivative in `mu`.
pub trait CharacteristicFn {
    fn eval(&self, mu: Complex64, tau: f64) -> Complex64;
    fn d_mu(&self, mu: Complex64, tau: f64) -> Complex64;
}

/// Two-gene quasi-polynomial `(mu+g1)(mu+g2) + A B exp(-mu tau)`.
#[derive(Debug, Clone, Copy)]
pub struct TwoGeneChar {
    pub gain_a: f64,
    pub gain_b: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl TwoGeneChar {
    /// Delay-free root with positive imaginary part (or the larger real
    /// root when the delay-free spectrum is real), the continuation seed.
    pub fn delay_free_root(&self) -> Complex64 {
        let b = self.gamma1 + self.gamma2;
        let c = self.gamma1 * self.gamma2 + self.gain_a * self.gain_b;
        let disc = b * b - 4.0 * c;
        if disc < 0.0 {
            Complex64::new(-b / 2.0, (-disc).sqrt() / 2.0)
        } else {
            Complex64::new((-b + disc.sqrt()) / 2.0, 0.0)
        }
    }
}

impl CharacteristicFn for TwoGeneChar {
    fn eval(&self, mu: Complex64, tau: f64) -> Complex64 {
        (mu + self.gamma1) * (mu + self.gamma2)
            + self.gain_a * self.gain_b * (-mu * tau).exp()
    }

    fn d_mu(&self, mu: Complex64, tau: f64) -> Complex64 {
        2.0 * mu + self.gamma1 + self.gamma2
            - self.gain_a * self.gain_b * tau * (-mu * tau).exp()
    }
}

/// Cyclic N-gene quasi-polynomial `prod_i (mu+gamma_i) + Lambda exp(-mu tau)`.
#[derive(Debug, Clone)]
pub struct CyclicChar {
    pub gamma: Vec<f64>,
    pub loop_gain: f64,
}

impl CharacteristicFn for CyclicChar {
    fn eval(&self, mu: Complex64, tau: f64) -> Complex64 {
        let product = self
            .gamma
            .iter()
            .fold(Complex64::ONE, |acc, &g| acc * (mu + g));
        product + self.loop_gain * (-mu * tau).exp()
    }

    fn d_mu(&self, mu: Complex64, tau: f64) -> Complex64 {
        let mut sum = Complex64::ZERO;
        for j in 0..self.gamma.len() {
            let mut partial = Complex64::ONE;
            for (i, &g) in self.gamma.iter().enumerate() {
                if i != j {
                    partial *= mu + g;
                }
            }
            sum += partial;
        }
        sum - self.loop_gain * tau * (-mu * tau).exp()
    }
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: u32 = 50;

/// Newton iteration with the analytic derivative; converged means
/// `|Delta| < 1e-12` within 50 iterations.
pub fn newton_root(
    char_fn: &impl CharacteristicFn,
    mu0: Complex64,
    tau: f64,
) -> Result<Complex64> {
    let mut mu = mu0;
    for iteration in 0..NEWTON_MAX_ITER {
        let value = char_fn.eval(mu, tau);
        if value.norm() < NEWTON_TOL {
            return Ok(mu);
        }
        let step = value / char_fn.d_mu(mu, tau);
        mu -= step;
        if !mu.re.is_finite() || !mu.im.is_finite() {
            return Err(Error::NewtonDiverged {
                last: mu,
                residual: f64::INFINITY,
                iterations: iteration + 1,
            });
        }
    }
    let residual = char_fn.eval(mu, tau).norm();
    if residual < NEWTON_TOL {
        Ok(mu)
    } else {
        Err(Error::NewtonDiverged {
            last: mu,
            residual,
            iterations: NEWTON_MAX_ITER,
        })
    }
}

/// Detected imaginary-axis crossing.
#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    pub tau: f64,
    pub omega: f64,
}

/// Leading-root trajectory over a delay grid.
#[derive(Debug, Clone)]
pub struct RootPath {
    pub taus: Vec<f64>,
    pub roots: Vec<Complex64>,
    /// First sign change of the real part, located by bisection to 1e-10
    /// absolute in the delay.
    pub crossing: Option<Crossing>,
}

impl RootPath {
    /// Grid point whose delay is nearest `tau`.
    fn nearest_index(&self, tau: f64) -> usize {
        let mut best = 0;
        let mut best_gap = f64::INFINITY;
        for (i, &t) in self.taus.iter().enumerate() {
            let gap = (t - tau).abs();
            if gap < best_gap {
                best_gap = gap;
                best = i;
            }
        }
        best
    }
}

/// Continues the root seeded at `mu0` across the ascending delay grid.
///
/// Each grid point is seeded by the previous root. On Newton failure the
/// continuation step is halved, up to eight times, before the path is
/// truncated with diagnostics.
pub fn continue_root(
    char_fn: &impl CharacteristicFn,
    mu0: Complex64,
    tau_grid: &[f64],
) -> Result<RootPath> {
    let mut taus = Vec::with_capacity(tau_grid.len());
    let mut roots = Vec::with_capacity(tau_grid.len());
    let mut seed = mu0;
    let mut tau_prev: Option<f64> = None;

    for &tau in tau_grid {
        let root = match newton_root(char_fn, seed, tau) {
            Ok(root) => root,
            Err(first_error) => {
                // refine the continuation by halving toward the target
                let start = tau_prev.unwrap_or(0.0);
                let mut sub_seed = seed;
                let mut recovered = Err(first_error);
                'halving: for halvings in 1..=8u32 {
                    let pieces = 1u32 << halvings;
                    let mut current = sub_seed;
                    let mut ok = true;
                    for piece in 1..=pieces {
                        let t = start + (tau - start) * f64::from(piece) / f64::from(pieces);
                        match newton_root(char_fn, current, t) {
                            Ok(r) => current = r,
                            Err(_) => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        recovered = Ok(current);
                        break 'halving;
                    }
                    sub_seed = seed;
                }
                match recovered {
                    Ok(root) => root,
                    Err(error) => {
                        return Err(Error::ContinuationTruncated {
                            tau,
                            completed: roots.len(),
                            source: Box::new(error),
                        })
                    }
                }
            }
        };
        taus.push(tau);
        roots.push(root);
        seed = root;
        tau_prev = Some(tau);
    }

    // first bracketed sign change of Re(mu)
    let mut crossing = None;
    for i in 1..roots.len() {
        if roots[i - 1].re < 0.0 && roots[i].re >= 0.0 {
            let (mut lo, mut hi) = (taus[i - 1], taus[i]);
            let mut root_lo = roots[i - 1];
            let mut root_hi = roots[i];
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let root_mid = newton_root(char_fn, 0.5 * (root_lo + root_hi), mid)?;
                if root_mid.re < 0.0 {
                    lo = mid;
                    root_lo = root_mid;
                } else {
                    hi = mid;
                    root_hi = root_mid;
                }
            }
            let tau_cross = 0.5 * (lo + hi);
            let root = newton_root(char_fn, 0.5 * (root_lo + root_hi), tau_cross)?;
            crossing = Some(Crossing {
                tau: tau_cross,
                omega: root.im,
            });
            break;
        }
    }

    Ok(RootPath {
        taus,
        roots,
        crossing,
    })
}

/// Continuation over the grid for the two-gene loop, seeded by the
/// delay-free quadratic root with positive imaginary part.
pub fn continue_leading_root(char_fn: &TwoGeneChar, tau_grid: &[f64]) -> Result<RootPath> {
    continue_root(char_fn, char_fn.delay_free_root(), tau_grid)
}

/// Default finite-difference step of the transversality estimate.
pub const FD_STEP: f64 = 1e-4;

/// Central-difference estimate of `d mu / d tau` at `tau`, seeded from the
/// nearest path point.
///
/// The path must cover `[tau - step, tau + step]`; both evaluations are
/// fresh Newton solves, so the estimate is independent of the grid spacing.
pub fn fd_transversality(
    char_fn: &impl CharacteristicFn,
    path: &RootPath,
    tau: f64,
    step: f64,
) -> Result<Complex64> {
    let lo = *path.taus.first().expect("path is non-empty");
    let hi = *path.taus.last().expect("path is non-empty");
    if tau - step < lo || tau + step > hi {
        return Err(Error::InsufficientPathCoverage { tau, lo, hi, step });
    }
    let seed = path.roots[path.nearest_index(tau)];
    let minus = newton_root(char_fn, seed, tau - step)?;
    let plus = newton_root(char_fn, seed, tau + step)?;
    Ok((plus - minus) / (2.0 * step))
}

/// Central-difference slope seeded directly from a known root, for probing
/// higher branches without a continuation path.
pub fn fd_transversality_at(
    char_fn: &impl CharacteristicFn,
    seed: Complex64,
    tau: f64,
    step: f64,
) -> Result<Complex64> {
    let minus = newton_root(char_fn, seed, tau - step)?;
    let plus = newton_root(char_fn, seed, tau + step)?;
    Ok((plus - minus) / (2.0 * step))
}
