//! ACVF, DMA and TAMSD statistics, their quadratic-form matrices, and the DMA
//! detrending operator.
//!
//! Every statistic satisfies the exact identity x' A x = statistic(x) with the
//! matrix produced here (DMA via the detrended vector), which is what ties the
//! observed values to the generalized chi-square null distributions.

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Statistic family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    Acvf,
    Dma,
    Tamsd,
}

impl StatKind {
    pub fn label(self) -> &'static str {
        match self {
            StatKind::Acvf => "acvf",
            StatKind::Dma => "dma",
            StatKind::Tamsd => "tamsd",
        }
    }
}

/// Statistic kind plus its time lag (DMA: window size, tau >= 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatisticSpec {
    pub kind: StatKind,
    pub tau: usize,
}

/// Symmetric matrix A with x' A x equal to the statistic; for DMA the form
/// acts on the detrended vector of length n_effective = n - tau + 1.
#[derive(Debug, Clone)]
pub struct QuadraticFormMatrix {
    pub n_effective: usize,
    pub entries: DMatrix<f64>,
}

fn check_lag(tau: usize, min: usize, max: usize, n: usize) -> Result<()> {
    if tau < min || tau > max {
        return Err(Error::LagOutOfRange { tau, n });
    }
    Ok(())
}

/// Sample autocovariance: (1/(N-tau)) sum_{i=1..N-tau} x(i+tau) x(i).
pub fn acvf_stat(x: &[f64], tau: usize) -> Result<f64> {
    let n = x.len();
    check_lag(tau, 0, n.saturating_sub(1), n)?;
    let cnt = n - tau;
    let s: f64 = (0..cnt).map(|i| x[i + tau] * x[i]).sum();
    Ok(s / cnt as f64)
}

/// Toeplitz quadratic-form matrix of the ACVF statistic: 1/N on the diagonal
/// for tau = 0, otherwise 1/(2(N-tau)) on the two |i-j| = tau subdiagonals.
pub fn acvf_matrix(n: usize, tau: usize) -> Result<QuadraticFormMatrix> {
    check_lag(tau, 0, n.saturating_sub(1), n)?;
    let mut a = DMatrix::<f64>::zeros(n, n);
    if tau == 0 {
        for i in 0..n {
            a[(i, i)] = 1.0 / n as f64;
        }
    } else {
        let w = 0.5 / (n - tau) as f64;
        for i in 0..n - tau {
            a[(i, i + tau)] = w;
            a[(i + tau, i)] = w;
        }
    }
    Ok(QuadraticFormMatrix { n_effective: n, entries: a })
}

/// Time-averaged mean-squared displacement:
/// (1/(N-tau)) sum_{i=1..N-tau} (x(i+tau) - x(i))^2.
pub fn tamsd_stat(x: &[f64], tau: usize) -> Result<f64> {
    let n = x.len();
    check_lag(tau, 1, n.saturating_sub(1), n)?;
    let cnt = n - tau;
    let s: f64 = (0..cnt).map(|i| (x[i + tau] - x[i]).powi(2)).sum();
    Ok(s / cnt as f64)
}

/// Quadratic-form matrix of TAMSD: diagonal entries count how many squared
/// displacements involve x(i), off-diagonal -1/(N-tau) on |i-j| = tau;
/// normalized so x' A x = tamsd_stat(x, tau) exactly.
pub fn tamsd_matrix(n: usize, tau: usize) -> Result<QuadraticFormMatrix> {
    check_lag(tau, 1, n.saturating_sub(1), n)?;
    let w = 1.0 / (n - tau) as f64;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        // occurrences of x(i)^2 across (x(i+tau) - x(i))^2 terms
        let count = usize::from(i + tau < n) + usize::from(i >= tau);
        a[(i, i)] = count as f64 * w;
    }
    for i in 0..n - tau {
        a[(i, i + tau)] = -w;
        a[(i + tau, i)] = -w;
    }
    Ok(QuadraticFormMatrix { n_effective: n, entries: a })
}

/// Detrended moving average statistic:
/// (1/(N-tau+1)) sum_i (x(i+tau-1) - moving average over the tau-window)^2.
pub fn dma_stat(x: &[f64], tau: usize) -> Result<f64> {
    let n = x.len();
    check_lag(tau, 2, n, n)?;
    let cnt = n - tau + 1;
    let inv = 1.0 / tau as f64;
    let mut s = 0.0;
    for i in 0..cnt {
        let p = i + tau - 1;
        let mean: f64 = x[i..=p].iter().sum::<f64>() * inv;
        s += (x[p] - mean).powi(2);
    }
    Ok(s / cnt as f64)
}

/// The (N-tau+1) x N detrending operator T with Y = T x: row i carries
/// 1 - 1/tau at column i+tau-1 and -1/tau at the tau-1 preceding columns.
pub fn detrend_operator(n: usize, tau: usize) -> Result<DMatrix<f64>> {
    check_lag(tau, 2, n, n)?;
    let rows = n - tau + 1;
    let inv = 1.0 / tau as f64;
    let mut t = DMatrix::<f64>::zeros(rows, n);
    for i in 0..rows {
        for j in i..i + tau - 1 {
            t[(i, j)] = -inv;
        }
        t[(i, i + tau - 1)] = 1.0 - inv;
    }
    Ok(t)
}

/// Quadratic-form matrix of DMA on the detrended space: identity scaled by
/// 1/(N-tau+1), so that Y' A Y = dma_stat(x, tau) exactly.
pub fn dma_matrix(n: usize, tau: usize) -> Result<QuadraticFormMatrix> {
    check_lag(tau, 2, n, n)?;
    let rows = n - tau + 1;
    Ok(QuadraticFormMatrix {
        n_effective: rows,
        entries: DMatrix::identity(rows, rows) / rows as f64,
    })
}

/// Covariance of the detrended vector: T Sigma T' (symmetrized against
/// floating-point asymmetry).
pub fn detrended_covariance(sigma: &CovarianceMatrix, tau: usize) -> Result<CovarianceMatrix> {
    let n = sigma.n();
    let t = detrend_operator(n, tau)?;
    let prod = &t * &sigma.entries * t.transpose();
    let sym = (&prod + prod.transpose()) * 0.5;
    Ok(CovarianceMatrix { spec: sigma.spec, meaning: sigma.meaning, entries: sym })
}

/// Evaluate a statistic on a raw trajectory (DMA detrends internally).
pub fn evaluate(x: &[f64], stat: &StatisticSpec) -> Result<f64> {
    match stat.kind {
        StatKind::Acvf => acvf_stat(x, stat.tau),
        StatKind::Dma => dma_stat(x, stat.tau),
        StatKind::Tamsd => tamsd_stat(x, stat.tau),
    }
}
