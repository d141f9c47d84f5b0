//! Adaptive Dormand-Prince 5(4) stepping with the method of steps.
//!
//! Delayed-state lookups evaluate the accumulated dense output at `t - tau`,
//! or the constant history for arguments at or before zero. The step size is
//! capped at the smallest positive delay, so no stage ever reads inside its
//! own step; with all delays zero the cap is inactive and the scheme is a
//! plain embedded ODE stepper. Dense output is cubic Hermite on accepted
//! steps, built from the first-same-as-last derivative pair.

use crate::dde::DelaySystem;
use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// difference between the 5th-order solution and the embedded 4th-order one
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

/// Counters of the adaptive run.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolverStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
}

/// Accepted-step mesh with states and derivatives at mesh points; between
/// points the solution is the cubic Hermite interpolant, which is C1 across
/// step boundaries because adjacent steps share the endpoint derivative.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dim: usize,
    history: Vec<f64>,
    ts: Vec<f64>,
    ys: Vec<f64>,
    derivs: Vec<f64>,
    pub stats: SolverStats,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_start(&self) -> f64 {
        self.ts[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.ts.last().expect("trajectory has at least one point")
    }

    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn state_at_mesh(&self, index: usize) -> &[f64] {
        &self.ys[index * self.dim..(index + 1) * self.dim]
    }

    /// Dense evaluation of one component; constant history for `t <= 0`.
    pub fn eval_component(&self, t: f64, component: usize) -> f64 {
        if t <= 0.0 {
            return self.history[component];
        }
        let n = self.ts.len();
        let seg = self
            .ts
            .partition_point(|&mesh_t| mesh_t <= t)
            .clamp(1, n - 1)
            - 1;
        let (t0, t1) = (self.ts[seg], self.ts[seg + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let idx0 = seg * self.dim + component;
        let idx1 = (seg + 1) * self.dim + component;
        hermite(
            s,
            h,
            self.ys[idx0],
            self.derivs[idx0],
            self.ys[idx1],
            self.derivs[idx1],
        )
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        for (component, slot) in out.iter_mut().enumerate() {
            *slot = self.eval_component(t, component);
        }
    }

    /// Uniform dense sampling of one component over `[t_lo, t_hi]`.
    pub fn sample_component(&self, t_lo: f64, t_hi: f64, n: usize, component: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let t = t_lo + (t_hi - t_lo) * k as f64 / (n - 1) as f64;
                self.eval_component(t, component)
            })
            .collect()
    }
}

fn hermite(s: f64, h: f64, y0: f64, f0: f64, y1: f64, f1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * f0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * f1
}

/// Delayed-argument evaluation context during integration: the growing
/// trajectory plus the current stage state for zero-delay links.
struct History<'a> {
    traj: &'a Trajectory,
}

impl History<'_> {
    fn delayed(&self, system: &DelaySystem, t_stage: f64, y_stage: &[f64], out: &mut [f64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            let (tau, source) = system.link(i);
            *slot = if tau == 0.0 {
                y_stage[source]
            } else {
                self.traj.eval_component(t_stage - tau, source)
            };
        }
    }
}

/// Integrates the delay system from the constant history `history` on
/// `[-max_delay, 0]` up to `t_end`.
///
/// Embedded 5(4) error control with norm
/// `sqrt(mean((err_i / (atol + rtol max(|y_i|, |y_next_i|)))^2))`; a step
/// whose size falls below `1e-14 t_end` aborts with a stiffness diagnostic.
pub fn integrate(
    system: &DelaySystem,
    history: &[f64],
    t_end: f64,
    rtol: f64,
    atol: f64,
) -> Result<Trajectory> {
    system.validate()?;
    let dim = system.dim();
    assert_eq!(history.len(), dim, "history length must match system dimension");
    for (name, value) in [("rtol", rtol), ("atol", atol)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                value,
                reason: "must be strictly positive and finite",
            });
        }
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            reason: "must be strictly positive and finite",
        });
    }

    let cap = system.min_positive_delay().unwrap_or(f64::INFINITY);
    let mut traj = Trajectory {
        dim,
        history: history.to_vec(),
        ts: Vec::with_capacity(1024),
        ys: Vec::with_capacity(1024 * dim),
        derivs: Vec::with_capacity(1024 * dim),
        stats: SolverStats::default(),
    };

    let mut y = history.to_vec();
    let mut delayed = vec![0.0; dim];
    let mut f_now = vec![0.0; dim];
    {
        let ctx = History { traj: &traj };
        ctx.delayed(system, 0.0, &y, &mut delayed);
    }
    system.rhs(&y, &delayed, &mut f_now);
    traj.stats.rhs_evaluations += 1;
    traj.ts.push(0.0);
    traj.ys.extend_from_slice(&y);
    traj.derivs.extend_from_slice(&f_now);

    let scale_of = |yi: f64, yn: f64| atol + rtol * yi.abs().max(yn.abs());
    let mut h = initial_step(system, &traj, &y, &f_now, rtol, atol, t_end, cap);
    let floor = 1e-14 * t_end;
    let mut t = 0.0;

    let mut stages = vec![vec![0.0; dim]; 7];
    stages[0].copy_from_slice(&f_now);
    let mut y_stage = vec![0.0; dim];
    let mut y_next = vec![0.0; dim];

    while t < t_end {
        let remaining = t_end - t;
        if remaining <= floor {
            break; // end point reached to within roundoff
        }
        h = h.min(cap);
        if h >= remaining {
            h = remaining;
        } else if 2.0 * h >= remaining {
            // split the tail evenly so the final step is never a sliver
            h = 0.5 * remaining;
        }
        if h < floor {
            return Err(Error::StepSizeUnderflow { t, h, floor });
        }

        // stages 2..6 (k1 is the FSAL derivative already in stages[0])
        let coeffs: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (stage, a_row) in coeffs.iter().enumerate() {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, &a) in a_row.iter().enumerate() {
                    acc += a * stages[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            let t_stage = t + C[stage + 1] * h;
            {
                let ctx = History { traj: &traj };
                ctx.delayed(system, t_stage, &y_stage, &mut delayed);
            }
            let (head, tail) = stages.split_at_mut(stage + 1);
            system.rhs(&y_stage, &delayed, &mut tail[0]);
            traj.stats.rhs_evaluations += 1;
            let _ = head;
        }

        // 5th-order solution, then the FSAL stage at (t + h, y_next)
        for i in 0..dim {
            let mut acc = 0.0;
            for (j, &b) in B.iter().enumerate() {
                acc += b * stages[j][i];
            }
            y_next[i] = y[i] + h * acc;
        }
        {
            let ctx = History { traj: &traj };
            ctx.delayed(system, t + h, &y_next, &mut delayed);
        }
        let (head, last) = stages.split_at_mut(6);
        system.rhs(&y_next, &delayed, &mut last[0]);
        traj.stats.rhs_evaluations += 1;
        let _ = head;

        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut err = 0.0;
            for (j, &e) in E.iter().enumerate() {
                err += e * stages[j][i];
            }
            err *= h;
            let sc = scale_of(y[i], y_next[i]);
            err_sq += (err / sc) * (err / sc);
        }
        let err_norm = (err_sq / dim as f64).sqrt();

        if err_norm <= 1.0 {
            t += h;
            y.copy_from_slice(&y_next);
            traj.ts.push(t);
            traj.ys.extend_from_slice(&y);
            traj.derivs.extend_from_slice(&stages[6]);
            traj.stats.accepted_steps += 1;
            let k7 = stages[6].clone();
            stages[0].copy_from_slice(&k7);
            let scale = if err_norm == 0.0 {
                MAX_SCALE
            } else {
                (SAFETY * err_norm.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
            };
            h *= scale;
        } else {
            traj.stats.rejected_steps += 1;
            h *= (SAFETY * err_norm.powf(-0.2)).clamp(MIN_SCALE, 1.0);
        }
    }

    Ok(traj)
}

/// Conservative first step from the scaled derivative magnitude.
#[allow(clippy::too_many_arguments)]
fn initial_step(
    _system: &DelaySystem,
    _traj: &Trajectory,
    y: &[f64],
    f: &[f64],
    rtol: f64,
    atol: f64,
    t_end: f64,
    cap: f64,
) -> f64 {
    let dim = y.len() as f64;
    let d0 = (y
        .iter()
        .map(|&v| {
            let sc = atol + rtol * v.abs();
            (v / sc) * (v / sc)
        })
        .sum::<f64>()
        / dim)
        .sqrt();
    let d1 = (f
        .iter()
        .zip(y)
        .map(|(&fv, &yv)| {
            let sc = atol + rtol * yv.abs();
            (fv / sc) * (fv / sc)
        })
        .sum::<f64>()
        / dim)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0.min(cap).min(0.1 * t_end)
}
