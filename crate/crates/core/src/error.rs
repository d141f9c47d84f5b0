use num_complex::Complex64;

/// Errors produced by the analysis and integration routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("derivative order {0} not supported (expected 1, 2 or 3)")]
    InvalidDerivativeOrder(u32),

    #[error("threshold {value} outside the open interval (0, {capacity}) for gene {gene}")]
    ThresholdOutsideCapacity {
        gene: usize,
        value: f64,
        capacity: f64,
    },

    #[error(
        "no sign change for {what} on [{lo}, {hi}] (f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e}); \
         expected monotone bracket"
    )]
    BracketFailure {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("weak feedback: loop gain {loop_gain:.6e} does not exceed {threshold:.6e}")]
    WeakFeedback { loop_gain: f64, threshold: f64 },

    #[error("thresholds are not symmetric (theta_i must equal M_i/2 to 1e-9 relative); use the general reduction")]
    AsymmetricThresholds,

    #[error("delay split ({tau1}, {tau2}) does not sum to the critical delay {tau_c}")]
    SplitMismatch { tau1: f64, tau2: f64, tau_c: f64 },

    #[error("solvability system is degenerate (|det| = {det:.3e} < 1e-12)")]
    DegenerateSolvability { det: f64 },

    #[error("near-resonant second-order system: |{what}| = {magnitude:.3e} < 1e-10")]
    NearResonance { what: &'static str, magnitude: f64 },

    #[error("amplitude law requires tau > tau_c (got tau = {tau}, tau_c = {tau_c})")]
    BelowOnset { tau: f64, tau_c: f64 },

    #[error("subcritical case: criticality coefficient {t_coeff:.6e} <= 0")]
    Subcritical { t_coeff: f64 },

    #[error("negative-feedback loop required: product of link signs is +1")]
    PositiveFeedbackLoop,

    #[error("branch search exhausted at k = {k_max} without a positive critical delay")]
    BranchSearchExhausted { k_max: u32 },

    #[error("polynomial degree {0} exceeds the supported companion-matrix range (<= 16)")]
    DegreeTooLarge(usize),

    #[error(
        "step size underflow at t = {t:.6e} (h = {h:.3e} < {floor:.3e}); \
         the problem appears too stiff for the explicit stepper"
    )]
    StepSizeUnderflow { t: f64, h: f64, floor: f64 },

    #[error("measurement window [{lo}, {hi}] not covered by the trajectory span [{span_lo}, {span_hi}]")]
    WindowOutsideSpan {
        lo: f64,
        hi: f64,
        span_lo: f64,
        span_hi: f64,
    },

    #[error(
        "oscillation detected (amplitude {amplitude:.3e}) but only {crossings} upward \
         crossing(s) found in the window; widen the window"
    )]
    TooFewCrossings { amplitude: f64, crossings: usize },

    #[error("Newton iteration failed to converge: last iterate {last}, |residual| = {residual:.3e} after {iterations} iterations")]
    NewtonDiverged {
        last: Complex64,
        residual: f64,
        iterations: u32,
    },

    #[error(
        "root continuation truncated at tau = {tau:.6e} after {completed} points: {source}"
    )]
    ContinuationTruncated {
        tau: f64,
        completed: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("path does not cover a symmetric neighbourhood of tau = {tau} (span [{lo}, {hi}], step {step})")]
    InsufficientPathCoverage {
        tau: f64,
        lo: f64,
        hi: f64,
        step: f64,
    },

    #[error("amplitude prefactor squared must be positive (got {0})")]
    NonPositiveAmplitude(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
