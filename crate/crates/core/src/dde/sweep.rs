//! Bifurcation sweeps, split-symmetry verification, onset-period tables,
//! and the closed-form deep-relaxation period offset.

use rayon::prelude::*;

use crate::dde::measure::{measure_cycle, CycleStats};
use crate::dde::solver::integrate;
use crate::dde::DelaySystem;
use crate::error::Result;
use crate::hopf::critical_delays;
use crate::logistic::{check_thresholds_interior, solve_equilibrium, Equilibrium, TwoGeneParams};

/// The standard constant initial history: a small displacement
/// `(x1* + 0.05, x2* - 0.05)` from the equilibrium.
pub fn default_history(eq: &Equilibrium) -> [f64; 2] {
    [eq.x1_star + 0.05, eq.x2_star - 0.05]
}

/// One row of a bifurcation sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub tau: f64,
    pub amplitude: f64,
    pub period: Option<f64>,
    pub oscillating: bool,
}

/// Sweep output with the supercritical amplitude prefactor fitted near
/// onset.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub tau_c: Option<f64>,
    /// Mean of `A / sqrt(tau - tau_c)` over the three smallest
    /// supercritical grid points; `None` without a Hopf point or without
    /// supercritical rows.
    pub prefactor: Option<f64>,
}

/// Integrates once per grid delay (split evenly over the two links) and
/// measures late-window amplitude and period. Grid points run in parallel;
/// row order follows the grid.
pub fn sweep_bifurcation(
    params: &TwoGeneParams,
    tau_grid: &[f64],
    window: (f64, f64),
    rtol: f64,
    atol: f64,
) -> Result<SweepResult> {
    let eq = solve_equilibrium(params)?;
    let history = default_history(&eq);
    let reference = [eq.x1_star, eq.x2_star];
    let tau_c = critical_delays(eq.gain_a, eq.gain_b, params.gamma1, params.gamma2, 0)
        .map(|points| points[0].tau_c);

    let rows: Result<Vec<SweepRow>> = tau_grid
        .par_iter()
        .map(|&tau| {
            let system = DelaySystem::TwoGene(params.with_total_delay(tau));
            let traj = integrate(&system, &history, window.1, rtol, atol)?;
            let stats = measure_cycle(&traj, window, &reference)?;
            Ok(SweepRow {
                tau,
                amplitude: stats.amplitude[0],
                period: stats.period,
                oscillating: stats.oscillating,
            })
        })
        .collect();
    let rows = rows?;

    let prefactor = tau_c.and_then(|tc| {
        let ratios: Vec<f64> = rows
            .iter()
            .filter(|r| r.oscillating && r.tau > tc)
            .take(3)
            .map(|r| r.amplitude / (r.tau - tc).sqrt())
            .collect();
        if ratios.is_empty() {
            None
        } else {
            Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
        }
    });

    Ok(SweepResult {
        rows,
        tau_c,
        prefactor,
    })
}

/// Integrates each split of the same total delay and measures the cycle;
/// period and component envelopes must agree across splits, the relative
/// phase between components must not.
pub fn verify_sum_symmetry(
    params: &TwoGeneParams,
    splits: &[(f64, f64)],
    window: (f64, f64),
    rtol: f64,
    atol: f64,
) -> Result<Vec<CycleStats>> {
    let eq = solve_equilibrium(params)?;
    let history = default_history(&eq);
    let reference = [eq.x1_star, eq.x2_star];
    splits
        .par_iter()
        .map(|&(tau1, tau2)| {
            let system = DelaySystem::TwoGene(params.with_split(tau1, tau2));
            let traj = integrate(&system, &history, window.1, rtol, atol)?;
            measure_cycle(&traj, window, &reference)
        })
        .collect()
}

/// One row of the onset-period table.
#[derive(Debug, Clone, Copy)]
pub struct OnsetSlopeRow {
    pub tau: f64,
    pub period: f64,
    /// Empirical slope `(T - T_c) / (tau - tau_c)`.
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct OnsetSlopeTable {
    pub rows: Vec<OnsetSlopeRow>,
    /// Slope at the grid point nearest onset; the empirical plateau.
    pub plateau: f64,
    pub tau_c: f64,
    pub period_c: f64,
}

/// Measures the period on a fine grid just above onset and reports the
/// empirical slope `(T - T_c)/(tau - tau_c)` per grid point.
pub fn onset_period_slope(
    params: &TwoGeneParams,
    tau_grid: &[f64],
    window: (f64, f64),
    rtol: f64,
    atol: f64,
) -> Result<OnsetSlopeTable> {
    let eq = solve_equilibrium(params)?;
    let hopf = critical_delays(eq.gain_a, eq.gain_b, params.gamma1, params.gamma2, 0)
        .expect("onset table requires strong feedback")[0];
    let history = default_history(&eq);
    let reference = [eq.x1_star, eq.x2_star];

    let rows: Result<Vec<OnsetSlopeRow>> = tau_grid
        .par_iter()
        .map(|&tau| {
            let system = DelaySystem::TwoGene(params.with_total_delay(tau));
            let traj = integrate(&system, &history, window.1, rtol, atol)?;
            let stats = measure_cycle(&traj, window, &reference)?;
            let period = stats.period.unwrap_or(f64::NAN);
            Ok(OnsetSlopeRow {
                tau,
                period,
                slope: (period - hopf.period) / (tau - hopf.tau_c),
            })
        })
        .collect();
    let rows = rows?;
    let plateau = rows.first().map(|r| r.slope).unwrap_or(f64::NAN);

    Ok(OnsetSlopeTable {
        rows,
        plateau,
        tau_c: hopf.tau_c,
        period_c: hopf.period,
    })
}

/// Closed-form deep-relaxation period offset `C_inf` and the four
/// threshold-crossing phase durations whose sum it is.
#[derive(Debug, Clone, Copy)]
pub struct RelaxationOffsets {
    pub c_inf: f64,
    /// Rise of x2 from empty to its threshold.
    pub delta_a: f64,
    /// Fall of x1 from capacity to its threshold.
    pub delta_b: f64,
    /// Fall of x2 from capacity to its threshold.
    pub delta_c: f64,
    /// Rise of x1 from empty to its threshold.
    pub delta_d: f64,
}

/// In the deep-relaxation regime the period obeys `T = 2 tau + C_inf` with
/// the offset composed of four exponential threshold-crossing durations.
pub fn relaxation_offset(params: &TwoGeneParams) -> Result<RelaxationOffsets> {
    check_thresholds_interior(params)?;
    let (m1, m2) = params.carrying_capacities();
    let delta_a = (m2 / (m2 - params.theta2)).ln() / params.gamma2;
    let delta_b = (m1 / params.theta1).ln() / params.gamma1;
    let delta_c = (m2 / params.theta2).ln() / params.gamma2;
    let delta_d = (m1 / (m1 - params.theta1)).ln() / params.gamma1;
    Ok(RelaxationOffsets {
        c_inf: delta_a + delta_b + delta_c + delta_d,
        delta_a,
        delta_b,
        delta_c,
        delta_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn relaxation_offset_canonical() {
        let p = TwoGeneParams::canonical();
        let offsets = relaxation_offset(&p).unwrap();
        // 4 ln(9/2) + 2 ln(64/15)
        let expected = 4.0 * (4.5_f64).ln() + 2.0 * (64.0_f64 / 15.0).ln();
        assert_relative_eq!(offsets.c_inf, expected, max_relative = 1e-14);
        assert_abs_diff_eq!(offsets.c_inf, 8.92, epsilon = 0.01);
        // log-combination identity
        assert_relative_eq!(
            offsets.delta_a + offsets.delta_b + offsets.delta_c + offsets.delta_d,
            offsets.c_inf,
            max_relative = 1e-15
        );

        let mut bad = p;
        bad.theta2 = 9.0;
        assert!(relaxation_offset(&bad).is_err());
    }

    #[test]
    fn sum_symmetry_three_splits_of_tau_020() {
        let p = TwoGeneParams::canonical();
        let stats = verify_sum_symmetry(
            &p,
            &[(0.10, 0.10), (0.05, 0.15), (0.02, 0.18)],
            (300.0, 400.0),
            1e-9,
            1e-12,
        )
        .unwrap();
        for s in &stats {
            assert_abs_diff_eq!(s.amplitude[0], 0.6015, epsilon = 5e-5);
            assert_abs_diff_eq!(s.period.unwrap(), 3.3299, epsilon = 5e-5);
        }
        // cross-split agreement to 4 decimal places
        for s in &stats[1..] {
            assert!((s.amplitude[0] - stats[0].amplitude[0]).abs() < 1e-4);
            assert!((s.period.unwrap() - stats[0].period.unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn degenerate_split_is_admissible() {
        let p = TwoGeneParams::canonical();
        let stats =
            verify_sum_symmetry(&p, &[(0.0, 0.20)], (300.0, 400.0), 1e-9, 1e-12).unwrap();
        assert_abs_diff_eq!(stats[0].amplitude[0], 0.6015, epsilon = 1e-4);
    }

    #[test]
    fn short_sweep_brackets_onset() {
        let p = TwoGeneParams::canonical();
        let grid = [0.119, 0.142, 0.165];
        let result = sweep_bifurcation(&p, &grid, (300.0, 400.0), 1e-9, 1e-12).unwrap();
        assert!(!result.rows[0].oscillating);
        assert!(result.rows[1].oscillating);
        assert!(result.rows[2].oscillating);
        let tau_c = result.tau_c.unwrap();
        assert!(grid[0] < tau_c && tau_c < grid[1]);
        let c = result.prefactor.unwrap();
        assert!(c > 2.0 && c < 2.7, "prefactor {c}");
    }
}
