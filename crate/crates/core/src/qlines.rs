//! Quantile-line diagnostics: empirical marginal quantiles of a trajectory
//! batch as functions of the time index. Flat lines indicate stationarity;
//! H-self-similar processes produce lines growing like n^H.

use crate::error::{Error, Result};
use crate::nulldist::quantile;
use crate::simulate::TrajectoryBatch;
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Default probability levels for the diagnostic plots.
pub const DEFAULT_PROBS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// J quantile lines over N time indices.
#[derive(Debug, Clone)]
pub struct QuantileLines {
    pub probs: Vec<f64>,
    /// J x N: lines[(j, n)] is the p_j-quantile of the marginal at time n+1.
    pub lines: DMatrix<f64>,
    pub spec: crate::covariance::ProcessSpec,
    pub seed: u64,
}

impl QuantileLines {
    /// CSV rows (n, p, q) with a metadata header.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "# kind={},H={},lambda={},seed={}",
            self.spec.kind.label(),
            self.spec.hurst,
            self.spec.lambda,
            self.seed
        )?;
        writeln!(w, "# n,p,q")?;
        for j in 0..self.probs.len() {
            for n in 0..self.lines.ncols() {
                writeln!(w, "{},{},{:.17e}", n + 1, self.probs[j], self.lines[(j, n)])?;
            }
        }
        Ok(())
    }
}

/// Empirical quantile lines of a batch at the given probability levels
/// (strictly increasing, each in (0,1)); requires at least 100 paths.
pub fn quantile_lines(batch: &TrajectoryBatch, probs: &[f64]) -> Result<QuantileLines> {
    if batch.m() < 100 {
        return Err(Error::InsufficientSample(format!(
            "quantile_lines needs at least 100 paths, got {}",
            batch.m()
        )));
    }
    if probs.is_empty() || probs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("probability levels must be strictly increasing".into()));
    }
    if probs.iter().any(|&p| p <= 0.0 || p >= 1.0) {
        return Err(Error::Domain("probability levels must lie in (0,1)".into()));
    }
    let n = batch.n();
    let j = probs.len();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|col| {
            let mut vals: Vec<f64> = (0..batch.m()).map(|i| batch.values[(i, col)]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            probs.iter().map(|&p| quantile(&vals, p)).collect()
        })
        .collect();
    let lines = DMatrix::from_fn(j, n, |jj, nn| columns[nn][jj]);
    Ok(QuantileLines { probs: probs.to_vec(), lines, spec: batch.spec, seed: batch.seed })
}
