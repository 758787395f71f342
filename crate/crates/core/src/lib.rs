//! Simulation and goodness-of-fit testing for tempered fractional Brownian
//! motion (three kinds) and fractional Brownian motion.
//!
//! The pipeline: closed-form covariance structures ([`covariance`]) built on
//! scalar special functions ([`specfun`]), exact Gaussian simulation
//! ([`simulate`]), quadratic-form statistics ([`statistics`]), their
//! generalized chi-square null distributions ([`nulldist`]), and the assembled
//! two-sided test plus Monte Carlo power studies ([`testing`]). Quantile-line
//! diagnostics live in [`qlines`].

// reference values keep every digit of the high-precision constants they
// were derived from, beyond f64 resolution
#![allow(clippy::excessive_precision)]

pub mod covariance;
pub mod error;
pub mod nulldist;
pub mod qlines;
pub mod simulate;
pub mod specfun;
pub mod statistics;
pub mod testing;

pub use covariance::{CovarianceMatrix, MatrixMeaning, ProcessKind, ProcessSpec};
pub use error::{Error, Result};
pub use nulldist::{AcceptanceRegion, NullSpectrum};
pub use simulate::{Method, MethodUsed, TrajectoryBatch};
pub use qlines::QuantileLines;
pub use statistics::{QuadraticFormMatrix, StatKind, StatisticSpec};
pub use testing::{NullModel, PowerCurve, TestConfig, TestOutcome};
