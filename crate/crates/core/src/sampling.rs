//! Seeded randomness, Haar-distributed unitaries / bases / states, and the
//! accept/reject core of the rejection sampler.
//!
//! Every random quantity in the crate flows through [`RngStream`], a
//! ChaCha-based stream addressed by (seed, stream_id). Workers own their
//! streams, so parallel and serial runs produce identical results.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::qmath::{Basis, PureState};

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("rejection weight must be non-negative, got {0}")]
    NegativeWeight(f64),
    #[error("rejection scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("calibration needs more samples: relative error {rel_err:.3} exceeds 5% at the observed rates")]
    InsufficientSamples { rel_err: f64 },
}

/// A reproducible random stream: identical (seed, stream_id) pairs yield
/// bit-identical draw sequences regardless of what other streams do.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha12Rng,
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            rng,
            seed,
            stream_id,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw from [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform integer in 0..n (the unbiased die roll).
    #[inline]
    pub fn die(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
    #[inline]
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im)
    }
}

/// Configuration of the accept/reject step: the scale M_d bounding
/// weight / M_d <= 1 for (almost) all draws.
#[derive(Debug, Clone, Copy)]
pub struct RejectionConfig {
    scale: f64,
}

impl RejectionConfig {
    pub fn new(scale: f64) -> Result<Self, SamplingError> {
        if scale <= 0.0 {
            return Err(SamplingError::NonPositiveScale(scale));
        }
        Ok(Self { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// One accept/reject decision: returns true iff weight / M_d - u >= 0,
/// with the ratio clamped to 1 when the weight exceeds the scale.
/// H(0) = 1, so weight / M_d = u accepts.
#[inline]
pub fn accept(weight: f64, cfg: &RejectionConfig, u: f64) -> Result<bool, SamplingError> {
    if weight < 0.0 {
        return Err(SamplingError::NegativeWeight(weight));
    }
    let ratio = (weight / cfg.scale).min(1.0);
    Ok(ratio - u >= 0.0)
}

/// Whether a weight exceeds the scale, i.e. the ratio would be clamped.
/// Callers count these to report the clamp rate.
#[inline]
pub fn is_clamped(weight: f64, cfg: &RejectionConfig) -> bool {
    weight > cfg.scale
}

/// A Haar-distributed d x d unitary, stored as columns.
#[derive(Debug, Clone)]
pub struct Unitary {
    d: usize,
    cols: Vec<Vec<Complex64>>,
}

impl Unitary {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.cols[col][row]
    }

    /// max_ij |(U^dagger U - I)_ij|
    pub fn unitarity_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.d {
            for j in 0..self.d {
                let g: Complex64 = (0..self.d)
                    .map(|k| self.cols[i][k].conj() * self.cols[j][k])
                    .sum();
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    pub fn det_abs(&self) -> f64 {
        // plain Gaussian elimination, d <= 4 in practice
        let d = self.d;
        let mut m: Vec<Vec<Complex64>> = (0..d)
            .map(|r| (0..d).map(|c| self.cols[c][r]).collect())
            .collect();
        let mut det = Complex64::ONE;
        for k in 0..d {
            let pivot = (k..d)
                .max_by(|&a, &b| m[a][k].norm().total_cmp(&m[b][k].norm()))
                .unwrap();
            if pivot != k {
                m.swap(k, pivot);
                det = -det;
            }
            det *= m[k][k];
            if m[k][k].norm() == 0.0 {
                return 0.0;
            }
            for r in k + 1..d {
                let f = m[r][k] / m[k][k];
                for c in k..d {
                    let sub = f * m[k][c];
                    m[r][c] -= sub;
                }
            }
        }
        det.norm()
    }
}

/// Samples a Haar-random unitary: fill a d x d matrix with i.i.d. standard
/// complex Gaussians and orthonormalize the columns by modified
/// Gram-Schmidt. MGS produces the QR factor with positive real diagonal of
/// R, which is exactly the phase-fixed decomposition that makes Q Haar.
pub fn random_unitary(d: usize, rng: &mut RngStream) -> Result<Unitary, SamplingError> {
    if d < 2 {
        return Err(SamplingError::DimensionTooSmall(d));
    }
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.complex_gaussian()).collect())
        .collect();
    for k in 0..d {
        // two passes of orthogonalization against earlier columns
        for _ in 0..2 {
            for j in 0..k {
                let proj: Complex64 = (0..d).map(|r| cols[j][r].conj() * cols[k][r]).sum();
                for r in 0..d {
                    let sub = proj * cols[j][r];
                    cols[k][r] -= sub;
                }
            }
        }
        let norm = cols[k].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut cols[k] {
            *a /= norm;
        }
    }
    Ok(Unitary { d, cols })
}

/// The columns of a Haar-random unitary as an orthonormal basis.
pub fn random_basis(d: usize, rng: &mut RngStream) -> Result<Basis, SamplingError> {
    let u = random_unitary(d, rng)?;
    Ok(Basis::from_raw(
        u.cols.into_iter().map(PureState::from_raw).collect(),
    ))
}

/// A Haar-random pure state: normalized vector of i.i.d. complex Gaussians.
pub fn random_pure_state(d: usize, rng: &mut RngStream) -> Result<PureState, SamplingError> {
    if d < 2 {
        return Err(SamplingError::DimensionTooSmall(d));
    }
    let amps: Vec<Complex64> = (0..d).map(|_| rng.complex_gaussian()).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok(PureState::from_raw(
        amps.into_iter().map(|a| a / norm).collect(),
    ))
}

/// Result of the scale-calibration check: acceptance rates at M_d and at
/// alpha * M_d, and their ratio. A correctly set M_d yields ratio ~ alpha.
#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub scale: f64,
    pub alpha: f64,
    pub accept_base: f64,
    pub accept_scaled: f64,
    pub ratio: f64,
    pub n: usize,
}

/// Runs the rejection step twice per drawn weight, once at scale M_d and
/// once at alpha * M_d, and reports both empirical acceptance rates. If
/// M_d bounds the weights, scaling it by alpha scales acceptance by
/// 1/alpha, so the rate ratio estimates alpha.
pub fn calibrate_scale<F>(
    mut weight_sampler: F,
    scale: f64,
    alpha: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<CalibrationReport, SamplingError>
where
    F: FnMut(&mut RngStream) -> f64,
{
    assert!(alpha > 1.0, "calibration factor must exceed 1");
    let base_cfg = RejectionConfig::new(scale)?;
    let scaled_cfg = RejectionConfig::new(scale * alpha)?;
    let mut acc_base = 0u64;
    let mut acc_scaled = 0u64;
    for _ in 0..n {
        let w = weight_sampler(rng);
        let u = rng.uniform();
        if accept(w, &base_cfg, u)? {
            acc_base += 1;
        }
        let u2 = rng.uniform();
        if accept(w, &scaled_cfg, u2)? {
            acc_scaled += 1;
        }
    }
    let p_base = acc_base as f64 / n as f64;
    let p_scaled = acc_scaled as f64 / n as f64;
    if p_scaled == 0.0 {
        return Err(SamplingError::InsufficientSamples { rel_err: f64::INFINITY });
    }
    // binomial relative error of the rarer estimate
    let rel_err = ((1.0 - p_scaled) / (p_scaled * n as f64)).sqrt();
    if rel_err > 0.05 {
        return Err(SamplingError::InsufficientSamples { rel_err });
    }
    Ok(CalibrationReport {
        scale,
        alpha,
        accept_base: p_base,
        accept_scaled: p_scaled,
        ratio: p_base / p_scaled,
        n,
    })
}
