//! Variance scales, covariance functions, and increment-noise autocovariances
//! for the four process kinds, plus covariance-matrix assembly.

use crate::error::{Error, Result};
use crate::specfun::{bessel_k, gamma, hyp_2f3, mittag_leffler_3p};
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::io::Write;

/// Process family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessKind {
    TfbmI,
    TfbmII,
    TfbmIII,
    Fbm,
}

impl ProcessKind {
    pub fn label(self) -> &'static str {
        match self {
            ProcessKind::TfbmI => "tfbm1",
            ProcessKind::TfbmII => "tfbm2",
            ProcessKind::TfbmIII => "tfbm3",
            ProcessKind::Fbm => "fbm",
        }
    }
}

/// A fully specified process: kind, Hurst index, tempering rate.
///
/// `lambda` is ignored for FBM and stored as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub hurst: f64,
    pub lambda: f64,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, hurst: f64, lambda: f64) -> Result<Self> {
        if !hurst.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        match kind {
            ProcessKind::TfbmI | ProcessKind::TfbmII => {
                if hurst <= 0.0 || lambda <= 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "{} requires H > 0 and lambda > 0, got H={hurst}, lambda={lambda}",
                        kind.label()
                    )));
                }
            }
            ProcessKind::TfbmIII => {
                if hurst <= 0.5 || hurst >= 1.0 || lambda <= 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "tfbm3 requires 0.5 < H < 1 and lambda > 0, got H={hurst}, lambda={lambda}"
                    )));
                }
            }
            ProcessKind::Fbm => {
                if hurst <= 0.0 || hurst >= 1.0 {
                    return Err(Error::InvalidSpec(format!(
                        "fbm requires 0 < H < 1, got H={hurst}"
                    )));
                }
            }
        }
        let lambda = if kind == ProcessKind::Fbm { 0.0 } else { lambda };
        Ok(ProcessSpec { kind, hurst, lambda })
    }

    pub fn fbm(hurst: f64) -> Result<Self> {
        Self::new(ProcessKind::Fbm, hurst, 0.0)
    }
}

/// What a covariance matrix describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixMeaning {
    /// Cov[B(i), B(j)] at integer times i, j = 1..n.
    ProcessLevels,
    /// Toeplitz autocovariance of the unit-lag increment noise.
    IncrementNoise,
}

impl MatrixMeaning {
    pub fn label(self) -> &'static str {
        match self {
            MatrixMeaning::ProcessLevels => "process_levels",
            MatrixMeaning::IncrementNoise => "increment_noise",
        }
    }
}

/// Symmetric PSD covariance matrix together with its provenance.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    pub spec: ProcessSpec,
    pub meaning: MatrixMeaning,
    pub entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// Row-major CSV with a metadata header line.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "# kind={},H={},lambda={},n={},meaning={}",
            self.spec.kind.label(),
            self.spec.hurst,
            self.spec.lambda,
            self.n(),
            self.meaning.label()
        )?;
        for i in 0..self.n() {
            let row: Vec<String> =
                (0..self.n()).map(|j| format!("{:.17e}", self.entries[(i, j)])).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Crossover between the hypergeometric closed form for the kind II variance
/// (accurate for small lambda*t) and the Matern-integral decomposition
/// (cancellation-free for large lambda*t).
const KIND_II_SWITCH: f64 = 12.0;

/// Matern-type increment correlation rho(h) = Gamma(H+1/2)/(sqrt(pi)(2 lambda)^H) h^H K_H(lambda h).
fn matern_rho(hurst: f64, lambda: f64, h: f64) -> Result<f64> {
    if h == 0.0 {
        return Ok(gamma(2.0 * hurst)? / (2.0 * lambda).powf(2.0 * hurst));
    }
    Ok(gamma(hurst + 0.5)? / (PI.sqrt() * (2.0 * lambda).powf(hurst))
        * h.powf(hurst)
        * bessel_k(hurst, lambda * h)?)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Kind I variance scale: 2 Gamma(2H)/(2 lambda a)^{2H} - 2 Gamma(H+1/2)/sqrt(pi) (2 lambda a)^{-H} K_H(lambda a).
fn c2_kind_i(hurst: f64, lambda: f64, a: f64) -> Result<f64> {
    let x = 2.0 * lambda * a;
    Ok(2.0 * gamma(2.0 * hurst)? * x.powf(-2.0 * hurst)
        - 2.0 * gamma(hurst + 0.5)? / PI.sqrt() * x.powf(-hurst) * bessel_k(hurst, lambda * a)?)
}

/// Kind II variance scale via the 2F3 closed form (small lambda*a).
fn c2_kind_ii_series(hurst: f64, lambda: f64, a: f64) -> Result<f64> {
    let h = hurst;
    let x = lambda * a;
    let z = 0.25 * x * x;
    let sqrt_pi = PI.sqrt();
    let f1 = hyp_2f3(1.0, -0.5, 1.0 - h, 0.5, 1.0, z)?;
    let f2 = hyp_2f3(1.0, h - 0.5, 1.0, h + 1.0, h + 0.5, z)?;
    let term1 =
        (1.0 - 2.0 * h) * gamma(h + 0.5)? * gamma(h)? * x.powf(-2.0 * h) / sqrt_pi * (1.0 - f1);
    let term2 = gamma(1.0 - h)? * gamma(h + 0.5)? / (sqrt_pi * h * 2f64.powf(2.0 * h)) * f2;
    Ok(term1 + term2)
}

/// Kind II process variance via the cancellation-free decomposition
/// Var_II(a) = Var_I(a) + 2 lambda^2 [a M0 - M1 + integral_a^inf (h-a) rho(h) dh],
/// with M0, M1 the zeroth and first moments of rho. Used for large lambda*a,
/// where the 2F3 form loses all significant digits.
fn var_kind_ii_tail(hurst: f64, lambda: f64, a: f64) -> Result<f64> {
    let h = hurst;
    let sqrt_pi = PI.sqrt();
    let g = gamma(h + 0.5)?;
    let var_i = 2.0 * (matern_rho(h, lambda, 0.0)? - matern_rho(h, lambda, a)?);
    let m0 = g * g / (2.0 * lambda.powf(2.0 * h + 1.0));
    let m1 = g * gamma(h + 1.0)? / (sqrt_pi * lambda.powf(2.0 * h + 2.0));
    // rho decays like e^{-lambda h}; beyond u = 45/lambda the integrand is
    // negligible relative to the leading a*M0 term
    let u_max = 45.0 / lambda;
    let pref = g / (sqrt_pi * (2.0 * lambda).powf(h));
    let integrand = |u: f64| {
        let t = a + u;
        u * pref * t.powf(h) * bessel_k(h, lambda * t).unwrap_or(0.0)
    };
    let tail = integrate(integrand, 0.0, u_max, 1e-13 * (a * m0).abs().max(1e-300));
    Ok(var_i + 2.0 * lambda * lambda * (a * m0 - m1 + tail))
}

/// The normalizing variance scale C^2_t.
///
/// For kinds I/II the value depends on t only through |t| and t = 0 is a
/// domain error (callers use Var(0) = 0 directly). Kind III carries the full
/// time dependence: 2 t^{2-2H} E^{1-2H}_{1,3-2H}(-lambda t). FBM returns 1.
pub fn variance_scale(spec: &ProcessSpec, t: f64) -> Result<f64> {
    let h = spec.hurst;
    let lambda = spec.lambda;
    match spec.kind {
        ProcessKind::Fbm => Ok(1.0),
        ProcessKind::TfbmI => {
            let a = t.abs();
            if a == 0.0 {
                return Err(Error::Domain("variance_scale undefined at t = 0 for tfbm1".into()));
            }
            c2_kind_i(h, lambda, a)
        }
        ProcessKind::TfbmII => {
            let a = t.abs();
            if a == 0.0 {
                return Err(Error::Domain("variance_scale undefined at t = 0 for tfbm2".into()));
            }
            if lambda * a <= KIND_II_SWITCH {
                c2_kind_ii_series(h, lambda, a)
            } else {
                Ok(var_kind_ii_tail(h, lambda, a)? / a.powf(2.0 * h))
            }
        }
        ProcessKind::TfbmIII => {
            if t < 0.0 {
                return Err(Error::Domain("variance_scale requires t >= 0 for tfbm3".into()));
            }
            if t == 0.0 {
                return Ok(0.0);
            }
            let ml = mittag_leffler_3p(1.0, 3.0 - 2.0 * h, 1.0 - 2.0 * h, -lambda * t)?;
            Ok(2.0 * t.powf(2.0 - 2.0 * h) * ml)
        }
    }
}

/// Variance of the process level at time t: |t|^{2H} C^2_t for kinds I/II and
/// FBM, C^2_t directly for kind III (whose scale already carries the full t
/// dependence). Zero at t = 0.
pub fn process_variance(spec: &ProcessSpec, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = t.abs();
    match spec.kind {
        ProcessKind::TfbmIII => variance_scale(spec, a),
        _ => Ok(a.powf(2.0 * spec.hurst) * variance_scale(spec, a)?),
    }
}

/// Cov[B(s), B(t)] = (Var(t) + Var(s) - Var(t - s)) / 2.
pub fn process_covariance(spec: &ProcessSpec, s: f64, t: f64) -> Result<f64> {
    Ok(0.5 * (process_variance(spec, t)? + process_variance(spec, s)?
        - process_variance(spec, t - s)?))
}

/// Autocovariance of the unit-lag increment noise at lag k:
/// (Var(|k|+1) - 2 Var(|k|) + Var(|k|-1)) / 2. Depends on |k| only.
pub fn increment_acvf(spec: &ProcessSpec, k: i64) -> Result<f64> {
    let a = k.unsigned_abs() as f64;
    Ok(0.5
        * (process_variance(spec, a + 1.0)? - 2.0 * process_variance(spec, a)?
            + process_variance(spec, a - 1.0)?))
}

/// Velocity autocorrelation of the kind III process:
/// tau^{2H-2} e^{-lambda tau} / Gamma(2H - 1).
pub fn velocity_acf_iii(tau: f64, hurst: f64, lambda: f64) -> Result<f64> {
    if tau <= 0.0 {
        return Err(Error::Domain(format!("velocity_acf_iii requires tau > 0, got {tau}")));
    }
    if hurst <= 0.5 || hurst >= 1.0 || lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "velocity_acf_iii requires 0.5 < H < 1 and lambda > 0, got H={hurst}, lambda={lambda}"
        )));
    }
    Ok(tau.powf(2.0 * hurst - 2.0) * (-lambda * tau).exp() / gamma(2.0 * hurst - 1.0)?)
}

/// Relative PSD tolerance: smallest eigenvalue must be >= -PSD_TOL * largest.
pub const PSD_TOL: f64 = 1e-8;

/// Assemble the n-by-n covariance matrix on the integer grid t = 1..n
/// (process levels) or the Toeplitz increment-noise matrix, verifying positive
/// semidefiniteness within the jitter tolerance.
pub fn covariance_matrix(
    spec: &ProcessSpec,
    n: usize,
    meaning: MatrixMeaning,
) -> Result<CovarianceMatrix> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("covariance_matrix requires n >= 2, got {n}")));
    }
    let mut entries = DMatrix::<f64>::zeros(n, n);
    match meaning {
        MatrixMeaning::ProcessLevels => {
            for i in 0..n {
                for j in i..n {
                    let v = process_covariance(spec, (i + 1) as f64, (j + 1) as f64)?;
                    entries[(i, j)] = v;
                    entries[(j, i)] = v;
                }
            }
        }
        MatrixMeaning::IncrementNoise => {
            let gamma_seq: Vec<f64> =
                (0..n).map(|k| increment_acvf(spec, k as i64)).collect::<Result<_>>()?;
            for i in 0..n {
                for j in 0..n {
                    entries[(i, j)] = gamma_seq[i.abs_diff(j)];
                }
            }
        }
    }
    check_psd(&entries)?;
    Ok(CovarianceMatrix { spec: *spec, meaning, entries })
}

/// Verify min eigenvalue >= -PSD_TOL * max eigenvalue.
pub(crate) fn check_psd(m: &DMatrix<f64>) -> Result<()> {
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL * max.abs() {
        return Err(Error::Degenerate(format!(
            "min eigenvalue {min:e} below -{PSD_TOL:e} * max ({max:e})"
        )));
    }
    Ok(())
}
