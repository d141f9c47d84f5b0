//! Delay-driven Hopf bifurcation analysis for logistic gene-regulatory
//! loops: closed-form equilibrium and characteristic-equation theory for the
//! two-gene oscillator, a Lindstedt-Poincare criticality reduction, the
//! cyclic N-gene generalisation, direct DDE integration by the method of
//! steps, and eigenvalue continuation on the transcendental characteristic
//! function.
//!
//! All analysis routines are pure functions of their inputs and safe to call
//! concurrently.

pub mod cyclic;
pub mod dde;
pub mod error;
pub mod hill;
pub mod hopf;
pub mod lindstedt;
pub mod logistic;
pub mod spectrum;

pub use error::{Error, Result};
pub use hill::HillCounterpart;
pub use hopf::{HopfEigenvector, HopfPoint, NormalFormC1, Stability, Transversality};
pub use lindstedt::LyapunovResult;
pub use logistic::{Equilibrium, SteepnessAsymptotics, TaylorCoefficients, TwoGeneParams};
