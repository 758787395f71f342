//! Null distribution of a quadratic-form statistic: the spectrum of
//! Sigma^{1/2} A Sigma^{1/2}, Monte Carlo sampling of the weighted chi-square
//! sum, and empirical acceptance regions.

use crate::covariance::{CovarianceMatrix, PSD_TOL};
use crate::error::{Error, Result};
use crate::statistics::QuadraticFormMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Eigenvalues of Sigma^{1/2} A Sigma^{1/2}, sorted descending.
#[derive(Debug, Clone)]
pub struct NullSpectrum {
    pub eigenvalues: Vec<f64>,
}

impl NullSpectrum {
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Two-sided acceptance region [Q_{c/2}, Q_{1-c/2}] at significance c.
#[derive(Debug, Clone, Copy)]
pub struct AcceptanceRegion {
    pub lower: f64,
    pub upper: f64,
    pub significance: f64,
    pub sample_count: usize,
}

impl AcceptanceRegion {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }
}

/// True when a is a scalar multiple of the identity (the DMA case), which
/// lets the sandwich eigenproblem collapse to scaling Sigma's spectrum.
fn scalar_identity(a: &QuadraticFormMatrix) -> Option<f64> {
    let n = a.entries.nrows();
    let s = a.entries[(0, 0)];
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { s } else { 0.0 };
            if a.entries[(i, j)] != expect {
                return None;
            }
        }
    }
    Some(s)
}

/// Spectrum of the symmetric matrix Sigma^{1/2} A Sigma^{1/2} (equal to the
/// spectrum of Sigma A). Sigma's own eigenvalues must be >= -1e-8 * max;
/// small negatives are clamped to zero before taking the square root.
pub fn qf_eigenvalues(sigma: &CovarianceMatrix, a: &QuadraticFormMatrix) -> Result<NullSpectrum> {
    let n = sigma.n();
    if a.entries.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "sigma is {n}x{n} but quadratic form is {}x{}",
            a.entries.nrows(),
            a.entries.ncols()
        )));
    }
    let eig = sigma.entries.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL * max.abs() {
        return Err(Error::Degenerate(format!(
            "covariance eigenvalue {min:e} below tolerance (max {max:e})"
        )));
    }
    let mut values: Vec<f64> = if let Some(s) = scalar_identity(a) {
        eig.eigenvalues.iter().map(|&e| s * e.max(0.0)).collect()
    } else {
        let sqrt_vals: Vec<f64> = eig.eigenvalues.iter().map(|&e| e.max(0.0).sqrt()).collect();
        let mut root = eig.eigenvectors.clone();
        for (j, s) in sqrt_vals.iter().enumerate() {
            root.column_mut(j).scale_mut(*s);
        }
        let root = root * eig.eigenvectors.transpose(); // Sigma^{1/2}
        let b = &root * &a.entries * &root;
        let b = (&b + b.transpose()) * 0.5;
        b.symmetric_eigenvalues().iter().cloned().collect()
    };
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(NullSpectrum { eigenvalues: values })
}

/// L independent draws of sum_i lambda_i U_i with U_i i.i.d. chi-square(1),
/// one RNG stream per draw.
pub fn sample_null(spectrum: &NullSpectrum, l: usize, seed: u64) -> Vec<f64> {
    (0..l as u64)
        .into_par_iter()
        .map(|draw| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(draw);
            spectrum
                .eigenvalues
                .iter()
                .map(|&lam| {
                    let z: f64 = rng.sample(StandardNormal);
                    lam * z * z
                })
                .sum()
        })
        .collect()
}

/// Empirical quantile with linear interpolation between order statistics.
/// Input must be sorted ascending.
pub(crate) fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Two-sided empirical acceptance region at significance c.
pub fn acceptance_region(samples: &[f64], c: f64) -> Result<AcceptanceRegion> {
    if samples.is_empty() {
        return Err(Error::InsufficientSample("acceptance_region needs samples".into()));
    }
    if !(0.0..1.0).contains(&c) || c <= 0.0 {
        return Err(Error::Domain(format!("significance must be in (0,1), got {c}")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(AcceptanceRegion {
        lower: quantile(&sorted, c / 2.0),
        upper: quantile(&sorted, 1.0 - c / 2.0),
        significance: c,
        sample_count: samples.len(),
    })
}
