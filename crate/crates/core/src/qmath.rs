//! Small dense complex linear algebra for pure states and projective
//! measurements, plus the Born-rule oracles used as ground truth by the
//! study harness.
//!
//! States and projectors are stored as unit vectors, never as d x d
//! matrices: every measurement element in scope is rank-1, and the vector
//! form keeps orthonormality and overlap exact to machine precision.

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance for unit-norm and orthonormality checks.
pub const ORTHO_TOL: f64 = 1e-9;
/// Tolerance for probability-sum checks.
pub const PROB_SUM_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum QmathError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector norm {norm} deviates from 1 beyond tolerance")]
    NotNormalized { norm: f64 },
    #[error("basis vectors {i} and {j} are not orthogonal (|<i|j>| = {inner})")]
    NotOrthogonal { i: usize, j: usize, inner: f64 },
    #[error("basis has {got} vectors, expected {expected}")]
    WrongVectorCount { expected: usize, got: usize },
    #[error("joint distribution entries sum to {sum}, expected 1")]
    NotAProbability { sum: f64 },
}

/// A pure state (or rank-1 projector) of dimension d >= 2, stored as a
/// unit complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from amplitudes, checking dimension and normalization.
    pub fn new(amps: Vec<Complex64>) -> Result<Self, QmathError> {
        if amps.len() < 2 {
            return Err(QmathError::DimensionTooSmall(amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > ORTHO_TOL {
            return Err(QmathError::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Normalizes an arbitrary nonzero vector into a state.
    pub fn from_unnormalized(mut amps: Vec<Complex64>) -> Result<Self, QmathError> {
        if amps.len() < 2 {
            return Err(QmathError::DimensionTooSmall(amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QmathError::NotNormalized { norm });
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { amps })
    }

    /// The computational basis vector |k> of dimension d.
    pub fn basis_vector(d: usize, k: usize) -> Self {
        assert!(d >= 2 && k < d);
        let mut amps = vec![Complex64::ZERO; d];
        amps[k] = Complex64::ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(u, v)| u.conj() * v)
            .sum()
    }

    pub(crate) fn from_raw(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }
}

/// Squared overlap |<u|v>|^2 of two pure states (Born's rule specialized to
/// rank-1 projectors). Symmetric in its arguments.
pub fn overlap(u: &PureState, v: &PureState) -> Result<f64, QmathError> {
    if u.dim() != v.dim() {
        return Err(QmathError::DimensionMismatch(u.dim(), v.dim()));
    }
    Ok(overlap_unchecked(u, v))
}

/// Same as [`overlap`] but skips the dimension check; used in trial loops
/// where inputs were validated on entry.
#[inline]
pub fn overlap_unchecked(u: &PureState, v: &PureState) -> f64 {
    u.inner(v).norm_sqr()
}

/// An ordered orthonormal set of d pure states of dimension d. Doubles as a
/// projective measurement and as the shared random variable.
#[derive(Debug, Clone)]
pub struct Basis {
    vectors: Vec<PureState>,
}

impl Basis {
    /// Validates orthonormality within [`ORTHO_TOL`].
    pub fn new(vectors: Vec<PureState>) -> Result<Self, QmathError> {
        let d = match vectors.first() {
            Some(v) => v.dim(),
            None => return Err(QmathError::DimensionTooSmall(0)),
        };
        if vectors.len() != d {
            return Err(QmathError::WrongVectorCount {
                expected: d,
                got: vectors.len(),
            });
        }
        for (i, u) in vectors.iter().enumerate() {
            if u.dim() != d {
                return Err(QmathError::DimensionMismatch(d, u.dim()));
            }
            for (j, v) in vectors.iter().enumerate().skip(i + 1) {
                let inner = u.inner(v).norm();
                if inner > ORTHO_TOL {
                    return Err(QmathError::NotOrthogonal { i, j, inner });
                }
            }
        }
        Ok(Self { vectors })
    }

    /// Skips validation; for internal constructions that preserve
    /// orthonormality (conjugation, QR output).
    pub(crate) fn from_raw(vectors: Vec<PureState>) -> Self {
        Self { vectors }
    }

    /// The computational basis of dimension d.
    pub fn computational(d: usize) -> Self {
        Self {
            vectors: (0..d).map(|k| PureState::basis_vector(d, k)).collect(),
        }
    }

    /// The discrete Fourier basis: entries exp(2 pi i j k / d) / sqrt(d).
    pub fn fourier(d: usize) -> Self {
        let norm = 1.0 / (d as f64).sqrt();
        let vectors = (0..d)
            .map(|k| {
                let amps = (0..d)
                    .map(|j| {
                        let phase = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
                        Complex64::from_polar(norm, phase)
                    })
                    .collect();
                PureState::from_raw(amps)
            })
            .collect();
        Self { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &PureState {
        &self.vectors[i]
    }
}

/// Entrywise complex conjugation of every basis vector. For rank-1
/// projectors this realizes the transpose in the computational basis:
/// B_j^T = |conj(b_j)><conj(b_j)|. Involutive and orthonormality-preserving.
pub fn conjugate_basis(meas: &Basis) -> Basis {
    Basis::from_raw(meas.vectors.iter().map(|v| v.conj()).collect())
}

/// Born-rule outcome probabilities for a projective measurement on a pure
/// state: entry b is |<meas_b|state>|^2.
pub fn born_pm(state: &PureState, meas: &Basis) -> Result<Vec<f64>, QmathError> {
    if state.dim() != meas.dim() {
        return Err(QmathError::DimensionMismatch(state.dim(), meas.dim()));
    }
    Ok(meas
        .vectors
        .iter()
        .map(|b| overlap_unchecked(b, state))
        .collect())
}

/// A d x d joint outcome distribution over pairs (a, b).
#[derive(Debug, Clone)]
pub struct JointDistribution {
    d: usize,
    probs: Vec<f64>, // row-major: probs[a * d + b]
}

impl JointDistribution {
    pub fn new(d: usize, probs: Vec<f64>) -> Result<Self, QmathError> {
        assert_eq!(probs.len(), d * d);
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 || probs.iter().any(|&p| p < 0.0) {
            return Err(QmathError::NotAProbability { sum });
        }
        Ok(Self { d, probs })
    }

    pub(crate) fn from_raw(d: usize, probs: Vec<f64>) -> Self {
        Self { d, probs }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.d + b]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Marginal over b for fixed a.
    pub fn marginal_a(&self, a: usize) -> f64 {
        (0..self.d).map(|b| self.prob(a, b)).sum()
    }
}

/// Joint Born-rule statistics of local projective measurements on the
/// maximally entangled state |Omega> = (1/sqrt(d)) sum_i |ii>:
/// probs[a][b] = (1/d) |<conj(b_b)|a_a>|^2. Each marginal equals 1/d.
pub fn born_entangled(meas_a: &Basis, meas_b: &Basis) -> Result<JointDistribution, QmathError> {
    let d = meas_a.dim();
    if d != meas_b.dim() {
        return Err(QmathError::DimensionMismatch(d, meas_b.dim()));
    }
    let mut probs = vec![0.0; d * d];
    for (a, va) in meas_a.vectors.iter().enumerate() {
        for (b, vb) in meas_b.vectors.iter().enumerate() {
            // <conj(b)|a> = sum_j b_j a_j
            let amp: Complex64 = va
                .amps()
                .iter()
                .zip(vb.amps())
                .map(|(x, y)| x * y)
                .sum();
            probs[a * d + b] = amp.norm_sqr() / d as f64;
        }
    }
    Ok(JointDistribution::from_raw(d, probs))
}

/// Completes `first` into a full orthonormal basis by Gram-Schmidt against
/// the computational basis in index order. Deterministic.
pub fn complete_basis(first: &PureState) -> Basis {
    let d = first.dim();
    let mut vectors = vec![first.clone()];
    for k in 0..d {
        if vectors.len() == d {
            break;
        }
        let mut cand: Vec<Complex64> = PureState::basis_vector(d, k).amps().to_vec();
        // two orthogonalization passes for numerical safety
        for _ in 0..2 {
            for v in &vectors {
                let proj = v.inner(&PureState::from_raw(cand.clone()));
                for (c, a) in cand.iter_mut().zip(v.amps()) {
                    *c -= proj * a;
                }
            }
        }
        let norm = cand.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for c in &mut cand {
                *c /= norm;
            }
            vectors.push(PureState::from_raw(cand));
        }
    }
    assert_eq!(vectors.len(), d, "Gram-Schmidt completion failed");
    Basis::from_raw(vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_state() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap()
    }

    #[test]
    fn overlap_identity_case() {
        let zero = PureState::basis_vector(2, 0);
        assert_abs_diff_eq!(overlap(&zero, &zero).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_unbiased_pair() {
        let zero = PureState::basis_vector(2, 0);
        assert_abs_diff_eq!(overlap(&zero, &plus_state()).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn overlap_d3_symmetric_state() {
        let s = 1.0 / 3.0_f64.sqrt();
        let u = PureState::new(vec![c(s, 0.0); 3]).unwrap();
        let v = PureState::basis_vector(3, 0);
        assert_abs_diff_eq!(overlap(&u, &v).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            overlap(&u, &v).unwrap(),
            overlap(&v, &u).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn overlap_dimension_mismatch() {
        let u = PureState::basis_vector(2, 0);
        let v = PureState::basis_vector(3, 0);
        assert!(matches!(
            overlap(&u, &v),
            Err(QmathError::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn born_pm_computational() {
        let probs = born_pm(&PureState::basis_vector(4, 0), &Basis::computational(4)).unwrap();
        assert_eq!(probs[0], 1.0);
        assert!(probs[1..].iter().all(|&p| p.abs() < 1e-15));
    }

    #[test]
    fn born_pm_fourier_is_unbiased() {
        let probs = born_pm(&PureState::basis_vector(3, 0), &Basis::fourier(3)).unwrap();
        for p in probs {
            assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn conjugate_basis_real_fixed_point() {
        let b = Basis::computational(3);
        let cb = conjugate_basis(&b);
        for (u, v) in b.vectors().iter().zip(cb.vectors()) {
            assert_eq!(u, v);
        }
    }

    #[test]
    fn conjugate_basis_flips_imaginary_part() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = Basis::new(vec![
            PureState::new(vec![c(s, 0.0), c(0.0, s)]).unwrap(),
            PureState::new(vec![c(s, 0.0), c(0.0, -s)]).unwrap(),
        ])
        .unwrap();
        let cb = conjugate_basis(&b);
        assert_abs_diff_eq!(cb.vector(0).amps()[1].im, -s, epsilon = 1e-15);
        // involution
        let cc = conjugate_basis(&cb);
        for (u, v) in b.vectors().iter().zip(cc.vectors()) {
            assert_eq!(u, v);
        }
    }

    #[test]
    fn born_entangled_computational_is_perfectly_correlated() {
        let b = Basis::computational(2);
        let j = born_entangled(&b, &b).unwrap();
        for a in 0..2 {
            for bb in 0..2 {
                let expect = if a == bb { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(j.prob(a, bb), expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn born_entangled_mutually_unbiased_is_flat() {
        let j = born_entangled(&Basis::computational(3), &Basis::fourier(3)).unwrap();
        for &p in j.probs() {
            assert_abs_diff_eq!(p, 1.0 / 9.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn born_entangled_marginals_are_uniform() {
        let j = born_entangled(&Basis::fourier(4), &Basis::computational(4)).unwrap();
        for a in 0..4 {
            assert_abs_diff_eq!(j.marginal_a(a), 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn complete_basis_is_orthonormal_and_keeps_first() {
        let s = plus_state();
        let b = complete_basis(&s);
        assert_eq!(b.vector(0), &s);
        Basis::new(b.vectors().to_vec()).unwrap();
    }

    #[test]
    fn rejects_unnormalized_state() {
        assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn rejects_non_orthogonal_basis() {
        let z = PureState::basis_vector(2, 0);
        assert!(Basis::new(vec![z.clone(), z]).is_err());
    }
}
