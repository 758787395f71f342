//! Exact Gaussian simulation of the four process kinds.
//!
//! Increments (stationary noise) are generated by Cholesky factorization or
//! Davies-Harte circulant embedding and cumulated into process levels.
//! Every path draws from its own RNG stream keyed by (seed, path index), so
//! batches are bit-reproducible regardless of thread scheduling.

use crate::covariance::{covariance_matrix, increment_acvf, CovarianceMatrix, MatrixMeaning, ProcessSpec};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use std::sync::Arc;

/// Requested generation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Cholesky,
    DaviesHarte,
}

/// Method that actually produced a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    Cholesky,
    DaviesHarte,
}

impl MethodUsed {
    pub fn label(self) -> &'static str {
        match self {
            MethodUsed::Cholesky => "cholesky",
            MethodUsed::DaviesHarte => "davies_harte",
        }
    }
}

/// M sampled paths of length N, with generation provenance.
#[derive(Debug, Clone)]
pub struct TrajectoryBatch {
    pub spec: ProcessSpec,
    pub seed: u64,
    pub method_used: MethodUsed,
    /// M x N process levels at integer times t = 1..N (B(0) = 0 implicit).
    pub values: DMatrix<f64>,
}

impl TrajectoryBatch {
    pub fn m(&self) -> usize {
        self.values.nrows()
    }

    pub fn n(&self) -> usize {
        self.values.ncols()
    }

    /// One row per path; metadata header lines prefixed '#'.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "# kind={},H={},lambda={},n={},m={},seed={},method={}",
            self.spec.kind.label(),
            self.spec.hurst,
            self.spec.lambda,
            self.n(),
            self.m(),
            self.seed,
            self.method_used.label()
        )?;
        for i in 0..self.m() {
            let row: Vec<String> =
                (0..self.n()).map(|j| format!("{:.17e}", self.values[(i, j)])).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Draw m i.i.d. centered Gaussian vectors with the given covariance via the
/// lower-triangular Cholesky factor (diagonal jitter up to 1e-10 * trace/n on
/// near-singular input).
pub fn cholesky_sample(cov: &CovarianceMatrix, m: usize, seed: u64) -> Result<DMatrix<f64>> {
    let n = cov.n();
    let chol = match cov.entries.clone().cholesky() {
        Some(c) => c,
        None => {
            let jitter = 1e-10 * cov.entries.trace() / n as f64;
            let jittered = &cov.entries + DMatrix::identity(n, n) * jitter;
            jittered.cholesky().ok_or(Error::Factorization { jitter })?
        }
    };
    let l = chol.l();
    let rows: Vec<Vec<f64>> = (0..m as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p);
            let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            (&l * z).iter().cloned().collect()
        })
        .collect();
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

/// Fourier eigenvalues of the even circulant embedding of gamma(0..n),
/// clamped at zero. Errors if any eigenvalue is below -1e-10 * max.
fn embedding_eigenvalues(acvf: &[f64]) -> Result<Vec<f64>> {
    let n = acvf.len() - 1;
    let two_n = 2 * n;
    let mut c: Vec<Complex<f64>> = Vec::with_capacity(two_n);
    c.extend(acvf.iter().map(|&g| Complex::new(g, 0.0)));
    c.extend(acvf[1..n].iter().rev().map(|&g| Complex::new(g, 0.0)));
    debug_assert_eq!(c.len(), two_n);
    FftPlanner::new().plan_fft_forward(two_n).process(&mut c);
    let eigs: Vec<f64> = c.iter().map(|z| z.re).collect();
    let max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * max.abs() {
        return Err(Error::Embedding { min_eig: min, max_eig: max });
    }
    Ok(eigs.into_iter().map(|e| e.max(0.0)).collect())
}

/// Davies-Harte circulant embedding: draw m paths of a stationary Gaussian
/// sequence of length n with autocovariance gamma. `acvf` must hold
/// gamma(0)..gamma(n) inclusive (the extra lag closes the even extension).
pub fn davies_harte_sample(acvf: &[f64], m: usize, seed: u64) -> Result<DMatrix<f64>> {
    if acvf.len() < 3 {
        return Err(Error::InsufficientSample(
            "davies_harte_sample needs gamma(0..n) with n >= 2".into(),
        ));
    }
    let n = acvf.len() - 1;
    let two_n = 2 * n;
    let eigs = embedding_eigenvalues(acvf)?;
    let fft: Arc<dyn rustfft::Fft<f64>> = FftPlanner::new().plan_fft_forward(two_n);
    let norm = 1.0 / (two_n as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..m as u64)
        .into_par_iter()
        .map_init(
            || vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()],
            |scratch, p| {
                let mut rng = path_rng(seed, p);
                let mut a = vec![Complex::new(0.0, 0.0); two_n];
                a[0] = Complex::new(eigs[0].sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
                a[n] = Complex::new(eigs[n].sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
                for k in 1..n {
                    let r = (eigs[k] / 2.0).sqrt();
                    let u: f64 = rng.sample(StandardNormal);
                    let v: f64 = rng.sample(StandardNormal);
                    a[k] = Complex::new(r * u, r * v);
                    a[two_n - k] = a[k].conj();
                }
                fft.process_with_scratch(&mut a, scratch);
                a[..n].iter().map(|z| z.re * norm).collect()
            },
        )
        .collect();
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

/// Simulate m trajectories of length n: generate stationary increments by the
/// requested method (auto: Davies-Harte with Cholesky fallback on embedding
/// failure) and cumulate them into levels at t = 1..n.
pub fn simulate_process(
    spec: &ProcessSpec,
    n: usize,
    m: usize,
    method: Method,
    seed: u64,
) -> Result<TrajectoryBatch> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("simulate_process requires n >= 2, got {n}")));
    }
    let (increments, method_used) = match method {
        Method::Cholesky => (
            cholesky_sample(&covariance_matrix(spec, n, MatrixMeaning::IncrementNoise)?, m, seed)?,
            MethodUsed::Cholesky,
        ),
        Method::DaviesHarte => {
            let acvf: Vec<f64> =
                (0..=n).map(|k| increment_acvf(spec, k as i64)).collect::<Result<_>>()?;
            (davies_harte_sample(&acvf, m, seed)?, MethodUsed::DaviesHarte)
        }
        Method::Auto => {
            let acvf: Vec<f64> =
                (0..=n).map(|k| increment_acvf(spec, k as i64)).collect::<Result<_>>()?;
            match davies_harte_sample(&acvf, m, seed) {
                Ok(x) => (x, MethodUsed::DaviesHarte),
                Err(Error::Embedding { .. }) => (
                    cholesky_sample(
                        &covariance_matrix(spec, n, MatrixMeaning::IncrementNoise)?,
                        m,
                        seed,
                    )?,
                    MethodUsed::Cholesky,
                ),
                Err(e) => return Err(e),
            }
        }
    };
    let mut values = increments;
    for i in 0..m {
        for j in 1..n {
            values[(i, j)] += values[(i, j - 1)];
        }
    }
    Ok(TrajectoryBatch { spec: *spec, seed, method_used, values })
}
